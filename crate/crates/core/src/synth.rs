//! Generated nodesets: a synthetic dialogue corpus whose relations are
//! signalled by marker words, and unconstrained random valid nodesets for
//! property tests.
//!
//! In the synthetic corpus every proposition has a locution of the form
//! `"SpeakerN : <marker> <proposition text>"`, where the marker decides the
//! locution's YA label:
//!
//! | marker   | label                  |
//! |----------|------------------------|
//! | claims   | Asserting              |
//! | doubts   | Challenging            |
//! | wonders  | Pure Questioning       |
//! | suggests | Assertive Questioning  |
//! | surely   | Rhetorical Questioning |
//!
//! Related propositions share two link words. The premise carries a kind
//! word (`because` RA, `however` CA, `namely` MA) and the conclusion the word
//! `point`. The transition from conclusion locution to premise locution
//! anchors the relation with Arguing, Disagreeing or Restating; an inference
//! whose premise locution says `anyway` is anchored with Default Illocuting
//! instead. Reaction locutions (`agree`, `why`, `disagree`) have no
//! proposition; the transition into them anchors Agreeing, Challenging or
//! Disagreeing on the previous locution's proposition.

use crate::graph::{Edge, Node, NodeKind, Nodeset, SKind};
use crate::labels::{AnchorPattern, YaLabel};
use crate::pipeline::{gen_ya_candidates, materialize, SPrediction, YaPrediction};
use crate::rng::SplitMix64;

const MARKERS: [&str; 17] = [
    "claims", "doubts", "wonders", "suggests", "surely", "because", "however", "namely", "point", "anyway", "agree",
    "why", "disagree", "speaker", "default", "transition", "inference",
];

const ILLOCUTIONS: [(YaLabel, &str, u64); 5] = [
    (YaLabel::Asserting, "claims", 40),
    (YaLabel::Challenging, "doubts", 15),
    (YaLabel::PureQuestioning, "wonders", 15),
    (YaLabel::AssertiveQuestioning, "suggests", 15),
    (YaLabel::RhetoricalQuestioning, "surely", 15),
];

const REACTIONS: [(YaLabel, &str); 3] = [
    (YaLabel::Agreeing, "yes i agree with that"),
    (YaLabel::Challenging, "why would that be"),
    (YaLabel::Disagreeing, "no i disagree"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthConfig {
    pub nodesets: usize,
    pub seed: u64,
    /// Size of the filler vocabulary.
    pub vocabulary: usize,
    /// Numeric id of the first nodeset (`nodeset<first_id>`).
    pub first_id: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            nodesets: 200,
            seed: 2024,
            vocabulary: 3000,
            first_id: 1000,
        }
    }
}

/// Pronounceable filler words, none of which is a marker.
fn vocabulary(rng: &mut SplitMix64, n: usize) -> Vec<String> {
    const C: &[u8] = b"bdfgklmnprstvz";
    const V: &[u8] = b"aeiou";
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = 2 + rng.below(2) as usize;
        let mut w = String::new();
        for _ in 0..syllables {
            w.push(C[rng.below(C.len() as u64) as usize] as char);
            w.push(V[rng.below(V.len() as u64) as usize] as char);
        }
        if !MARKERS.contains(&w.as_str()) && seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

struct Builder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    next: u64,
}

impl Builder {
    fn id(&mut self) -> String {
        self.next += 1;
        self.next.to_string()
    }

    fn node(&mut self, kind: NodeKind, text: impl Into<String>) -> String {
        let id = self.id();
        self.nodes.push(Node::new(id.clone(), kind, text));
        id
    }

    fn edge(&mut self, from: &str, to: &str) {
        let id = self.id();
        self.edges.push(Edge::new(id, from, to));
    }

    fn ya(&mut self, anchor: &str, label: YaLabel, target: &str) {
        let ya = self.node(NodeKind::YA, label.as_str());
        self.edge(anchor, &ya);
        self.edge(&ya, target);
    }
}

fn illocution(rng: &mut SplitMix64) -> (YaLabel, &'static str) {
    let total: u64 = ILLOCUTIONS.iter().map(|i| i.2).sum();
    let mut r = rng.below(total);
    for (label, marker, weight) in ILLOCUTIONS {
        if r < weight {
            return (label, marker);
        }
        r -= weight;
    }
    unreachable!()
}

fn words(rng: &mut SplitMix64, vocab: &[String], n: usize) -> Vec<String> {
    (0..n).map(|_| vocab[rng.below(vocab.len() as u64) as usize].clone()).collect()
}

/// One turn: a locution and, unless it is a reaction, its proposition.
struct Utterance {
    l: String,
    i: Option<String>,
}

struct Dialogue {
    b: Builder,
    speakers: u64,
    speaker: u64,
}

impl Dialogue {
    fn next_speaker(&mut self, rng: &mut SplitMix64) -> u64 {
        self.speaker = (self.speaker + 1 + rng.below(self.speakers - 1)) % self.speakers;
        self.speaker
    }

    fn say(&mut self, rng: &mut SplitMix64, extra: &str, prop: &str) -> Utterance {
        let who = self.next_speaker(rng);
        let (label, marker) = illocution(rng);
        let l = self.b.node(NodeKind::L, format!("Speaker{who} : {extra}{marker} {prop}"));
        let i = self.b.node(NodeKind::I, prop);
        self.b.ya(&l, label, &i);
        Utterance { l, i: Some(i) }
    }

    fn transition(&mut self, from: &str, to: &str) -> String {
        let ta = self.b.node(NodeKind::TA, "Default Transition");
        self.b.edge(from, &ta);
        self.b.edge(&ta, to);
        ta
    }
}

fn synthetic_nodeset(id: &str, rng: &mut SplitMix64, vocab: &[String]) -> Nodeset {
    let speakers = 2 + rng.below(2);
    let mut d = Dialogue {
        b: Builder {
            nodes: Vec::new(),
            edges: Vec::new(),
            next: 0,
        },
        speakers,
        speaker: rng.below(speakers),
    };

    let relations = 2 + rng.below(3) as usize;
    let singles = rng.below(3) as usize;
    let reactions = rng.below(3) as usize;
    // 0 = relation, 1 = single proposition, 2 = reaction (never first).
    let mut plan: Vec<u8> = std::iter::repeat_n(0, relations)
        .chain(std::iter::repeat_n(1, singles))
        .chain(std::iter::repeat_n(2, reactions))
        .collect();
    rng.shuffle(&mut plan);
    if let Some(pos) = plan.iter().position(|&u| u != 2) {
        plan.swap(0, pos);
    }

    let mut last: Option<Utterance> = None;
    for unit in plan {
        match unit {
            0 => {
                let kind = SKind::ALL[rng.below(3) as usize];
                let link = words(rng, vocab, 2);
                let mut concl = words(rng, vocab, 4);
                concl.insert(rng.below(5) as usize, "point".into());
                concl.extend(link.iter().cloned());
                let mut prem = vec![match kind {
                    SKind::RA => "because".to_string(),
                    SKind::CA => "however".into(),
                    SKind::MA => "namely".into(),
                }];
                prem.extend(words(rng, vocab, 4));
                prem.extend(link);
                let illocuting = kind == SKind::RA && rng.below(4) == 0;
                let c = d.say(rng, "", &concl.join(" "));
                if let Some(prev) = &last {
                    d.transition(&prev.l, &c.l);
                }
                let p = d.say(rng, if illocuting { "anyway " } else { "" }, &prem.join(" "));
                let ta = d.transition(&c.l, &p.l);
                let s = d.b.node(kind.node_kind(), kind.default_text());
                d.b.edge(p.i.as_ref().unwrap(), &s);
                d.b.edge(&s, c.i.as_ref().unwrap());
                let label = match kind {
                    SKind::RA if illocuting => YaLabel::DefaultIllocuting,
                    SKind::RA => YaLabel::Arguing,
                    SKind::CA => YaLabel::Disagreeing,
                    SKind::MA => YaLabel::Restating,
                };
                d.b.ya(&ta, label, &s);
                last = Some(p);
            }
            1 => {
                let text = words(rng, vocab, 6).join(" ");
                let u = d.say(rng, "", &text);
                if let Some(prev) = &last {
                    d.transition(&prev.l, &u.l);
                }
                last = Some(u);
            }
            _ => {
                let prev = last.take().expect("plan starts with a proposition");
                let (label, text) = REACTIONS[rng.below(3) as usize];
                let who = d.next_speaker(rng);
                let l = d.b.node(NodeKind::L, format!("Speaker{who} : {text}"));
                let ta = d.transition(&prev.l, &l);
                if let Some(i) = &prev.i {
                    d.b.ya(&ta, label, i);
                }
                last = Some(Utterance { l, i: None });
            }
        }
    }
    Nodeset::new(id, d.b.nodes, d.b.edges).expect("generator builds consistent nodesets")
}

/// The marker corpus described in the module docs.
pub fn synthetic_corpus(cfg: &SynthConfig) -> Vec<Nodeset> {
    let mut rng = SplitMix64::new(cfg.seed);
    let vocab = vocabulary(&mut rng, cfg.vocabulary);
    (0..cfg.nodesets)
        .map(|k| {
            let mut local = SplitMix64::new(rng.next_u64());
            synthetic_nodeset(&format!("nodeset{}", cfg.first_id + k as u64), &mut local, &vocab)
        })
        .collect()
}

/// Size limits for [`random_nodeset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub max_i: usize,
    pub max_l: usize,
    pub max_ta: usize,
    pub max_s: usize,
    pub max_ya: usize,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            max_i: 8,
            max_l: 6,
            max_ta: 4,
            max_s: 4,
            max_ya: 8,
        }
    }
}

const SMALL_WORDS: [&str; 12] = [
    "we", "should", "act", "now", "tax", "cuts", "help", "nobody", "yes", "no", "maybe", "why",
];

fn small_text(rng: &mut SplitMix64) -> String {
    let n = 1 + rng.below(4) as usize;
    (0..n)
        .map(|_| SMALL_WORDS[rng.below(SMALL_WORDS.len() as u64) as usize])
        .collect::<Vec<_>>()
        .join(" ")
}

/// A random nodeset that passes `validate`: S-nodes with one or two premises,
/// transitions between distinct locutions, and legal YA anchorings. Node
/// order is shuffled and ids are sparse numbers.
pub fn random_nodeset(rng: &mut SplitMix64, id: &str, shape: &RandomShape) -> Nodeset {
    let mut next = rng.below(20);
    let mut fresh = |rng: &mut SplitMix64| {
        next += 1 + rng.below(3);
        next.to_string()
    };
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let n_i = rng.below(shape.max_i as u64 + 1) as usize;
    let n_l = rng.below(shape.max_l as u64 + 1) as usize;
    let is: Vec<String> = (0..n_i).map(|_| fresh(rng)).collect();
    let ls: Vec<String> = (0..n_l).map(|_| fresh(rng)).collect();
    for i in &is {
        nodes.push(Node::new(i.clone(), NodeKind::I, small_text(rng)));
    }
    for l in &ls {
        nodes.push(Node::new(l.clone(), NodeKind::L, format!("Speaker{} : {}", rng.below(3), small_text(rng))));
    }
    if n_l >= 2 {
        for _ in 0..rng.below(shape.max_ta as u64 + 1) {
            let ta = fresh(rng);
            let pick = rng.sample_indices(n_l, 2);
            let (a, c) = if rng.below(2) == 0 { (pick[0], pick[1]) } else { (pick[1], pick[0]) };
            nodes.push(Node::new(ta.clone(), NodeKind::TA, "Default Transition"));
            edges.push(Edge::new(fresh(rng), ls[a].clone(), ta.clone()));
            edges.push(Edge::new(fresh(rng), ta, ls[c].clone()));
        }
    }
    if n_i >= 2 {
        for _ in 0..rng.below(shape.max_s as u64 + 1) {
            let kind = SKind::ALL[rng.below(3) as usize];
            let s = fresh(rng);
            let premises = if n_i >= 3 && rng.below(4) == 0 { 2 } else { 1 };
            let mut pick = rng.sample_indices(n_i, premises + 1);
            rng.shuffle(&mut pick);
            nodes.push(Node::new(s.clone(), kind.node_kind(), kind.default_text()));
            for &p in &pick[..premises] {
                edges.push(Edge::new(fresh(rng), is[p].clone(), s.clone()));
            }
            edges.push(Edge::new(fresh(rng), s, is[pick[premises]].clone()));
        }
    }
    let partial = Nodeset::new(id, nodes.clone(), edges.clone()).expect("consistent");
    let candidates = gen_ya_candidates(&partial, None);
    if !candidates.is_empty() {
        let k = (rng.below(shape.max_ya as u64 + 1) as usize).min(candidates.len());
        for c in rng.sample_indices(candidates.len(), k) {
            let (a, t) = &candidates[c];
            let pattern = AnchorPattern::of(partial.kind_of(a).unwrap(), partial.kind_of(t).unwrap())
                .expect("candidates follow the anchor patterns");
            let labels = pattern.labels();
            let label = labels[rng.below(labels.len() as u64) as usize];
            let ya = fresh(rng);
            nodes.push(Node::new(ya.clone(), NodeKind::YA, label.as_str()));
            edges.push(Edge::new(fresh(rng), a.clone(), ya.clone()));
            edges.push(Edge::new(fresh(rng), ya, t.clone()));
        }
    }
    rng.shuffle(&mut nodes);
    rng.shuffle(&mut edges);
    Nodeset::new(id, nodes, edges).expect("consistent")
}

/// A prediction for `gold` sharing its L, I and TA nodes: a random mix of
/// copied and invented S-nodes and YA anchorings.
pub fn random_prediction(gold: &Nodeset, rng: &mut SplitMix64) -> Nodeset {
    let mut s_preds = Vec::new();
    for s in gold.s_node_structures_lenient() {
        for p in &s.premises {
            for c in &s.conclusions {
                if p != c && rng.below(3) != 0 {
                    let kind = if rng.below(4) == 0 { SKind::ALL[rng.below(3) as usize] } else { s.kind };
                    s_preds.push(SPrediction {
                        head: p.clone(),
                        kind,
                        tail: c.clone(),
                        existence: 1.0,
                        type_score: 1.0,
                    });
                }
            }
        }
    }
    let pairs = crate::dataset::gen_i_pairs(gold);
    if !pairs.is_empty() {
        for _ in 0..rng.below(3) {
            let (h, t) = &pairs[rng.below(pairs.len() as u64) as usize];
            s_preds.push(SPrediction {
                head: h.clone(),
                kind: SKind::ALL[rng.below(3) as usize],
                tail: t.clone(),
                existence: 1.0,
                type_score: 1.0,
            });
        }
    }
    let view = materialize(gold, &s_preds, &[]).expect("gold I ids");
    let candidates = gen_ya_candidates(&view, None);
    let mut ya_preds = Vec::new();
    let gold_ya = gold.ya_anchorings_lenient();
    for (a, t) in &candidates {
        let anchor_kind = view.kind_of(a).unwrap();
        let target_kind = view.kind_of(t).unwrap();
        let legal = AnchorPattern::of(anchor_kind, target_kind).unwrap().labels();
        let copied = gold_ya
            .iter()
            .find(|g| &g.anchor_id == a && (&g.target_id == t || (target_kind.is_s_node() && gold.kind_of(&g.target_id) == Some(target_kind))))
            .and_then(|g| g.label.parse::<YaLabel>().ok())
            .filter(|l| legal.contains(l));
        let label = match copied {
            Some(l) if rng.below(4) != 0 => Some(l),
            _ if rng.below(6) == 0 => Some(legal[rng.below(legal.len() as u64) as usize]),
            _ => None,
        };
        if let Some(label) = label {
            ya_preds.push(YaPrediction {
                anchor: a.clone(),
                anchor_kind,
                target: t.clone(),
                target_kind,
                label,
                score: 1.0,
            });
        }
    }
    materialize(gold, &s_preds, &ya_preds).expect("references come from the view")
}
