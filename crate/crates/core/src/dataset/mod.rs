//! Supervised examples for the three classifiers, built from gold nodesets.
//!
//! * stage 1, step 1: ordered I-node pairs labelled by whether an S-node
//!   connects them; unconnected pairs are sampled as negatives.
//! * stage 1, step 2: connected pairs labelled with the S-node kind.
//! * stage 2: YA anchorings with their contexts, plus sampled unanchored
//!   candidates labelled `None`.
//!
//! Negative sampling is per nodeset and seeded (see [`crate::rng`]).

mod records;
mod split;
mod stats;

pub use records::{read_records, write_records, ExampleRecord, RecordError};
pub use split::{split_corpus, EvalSpec, Split};
pub use stats::{corpus_stats, CorpusStats, CountingRule};

use crate::graph::{GraphError, NodeKind, Nodeset, SKind, CONTEXT_SEPARATOR};
use crate::labels::YaLabel;
use crate::pipeline::gen_ya_candidates;
use crate::rng::SplitMix64;
use std::collections::HashSet;
use thiserror::Error;

pub const DEFAULT_NEG_RATIO: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot contextualize {anchor_kind} -> {target_kind} ({anchor_id} -> {target_id})")]
    KindMismatch {
        anchor_id: String,
        anchor_kind: NodeKind,
        target_id: String,
        target_kind: NodeKind,
    },
    #[error("eval id {0:?} is not in the corpus")]
    UnknownEvalId(String),
    #[error("duplicate nodeset id {0:?}")]
    DuplicateId(String),
    #[error("eval fraction {0} outside (0, 1)")]
    BadFraction(f64),
    #[error("negative ratio {0} must be finite and non-negative")]
    BadRatio(f64),
}

/// Classifier input: head and tail texts with optional contexts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairInstance {
    pub head_text: String,
    pub head_context: String,
    pub tail_text: String,
    pub tail_context: String,
}

impl PairInstance {
    pub fn plain(head: impl Into<String>, tail: impl Into<String>) -> Self {
        PairInstance {
            head_text: head.into(),
            head_context: String::new(),
            tail_text: tail.into(),
            tail_context: String::new(),
        }
    }
}

/// A labelled pair together with the node ids it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct Example<L> {
    pub instance: PairInstance,
    pub head_id: String,
    pub tail_id: String,
    pub label: L,
}

pub type Stage1Example = Example<bool>;
pub type Stage2Example = Example<SKind>;
pub type YaExample = Example<YaLabel>;
/// Direct four-way example: `None` for unconnected pairs.
pub type FourLabelExample = Example<Option<SKind>>;

#[derive(Debug, Clone, PartialEq)]
pub struct Sampled<L> {
    pub examples: Vec<Example<L>>,
    /// Set when the pool of negatives was smaller than requested.
    pub shortfall: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedAnchoring {
    pub ya_id: String,
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct YaBuild {
    pub examples: Vec<YaExample>,
    pub shortfall: bool,
    /// Gold anchorings left out: unknown label text or a label that is not
    /// legal for the anchor/target kinds.
    pub skipped: Vec<SkippedAnchoring>,
}

/// All ordered pairs of distinct I-nodes in node order.
pub fn gen_i_pairs(ns: &Nodeset) -> Vec<(String, String)> {
    let ids: Vec<&str> = ns.nodes_of_kind(NodeKind::I).map(|n| n.id.as_str()).collect();
    let mut out = Vec::with_capacity(ids.len() * ids.len().saturating_sub(1));
    for h in &ids {
        for t in &ids {
            if h != t {
                out.push((h.to_string(), t.to_string()));
            }
        }
    }
    out
}

fn negative_count(ratio: f64, positives: usize) -> Result<usize, DatasetError> {
    if !ratio.is_finite() || ratio < 0.0 {
        return Err(DatasetError::BadRatio(ratio));
    }
    Ok((ratio * positives as f64).floor() as usize)
}

fn plain_instance(ns: &Nodeset, head: &str, tail: &str) -> PairInstance {
    PairInstance::plain(text_of(ns, head), text_of(ns, tail))
}

/// Node text, or the kind name when the node has none, so instances never
/// carry an empty head or tail.
fn text_of(ns: &Nodeset, id: &str) -> String {
    let node = ns.node(id).expect("id taken from nodeset");
    if node.text.is_empty() {
        node.kind.as_str().to_string()
    } else {
        node.text.clone()
    }
}

/// Directed (premise, conclusion) pairs of every S-node, one per pair per
/// S-node, in node then edge order.
fn s_pairs(ns: &Nodeset) -> Result<Vec<(String, String, SKind)>, DatasetError> {
    let mut out = Vec::new();
    for s in ns.s_node_structures()? {
        for p in &s.premises {
            for c in &s.conclusions {
                if p != c {
                    out.push((p.clone(), c.clone(), s.kind));
                }
            }
        }
    }
    Ok(out)
}

/// Draws `count` pairs from `pool` minus `exclude`, in pool order.
fn sample_pairs(
    pool: Vec<(String, String)>,
    exclude: &HashSet<(String, String)>,
    count: usize,
    seed: u64,
) -> (Vec<(String, String)>, bool) {
    let pool: Vec<_> = pool.into_iter().filter(|p| !exclude.contains(p)).collect();
    let shortfall = pool.len() < count;
    let picked = SplitMix64::new(seed).sample_indices(pool.len(), count);
    let mut pool: Vec<Option<(String, String)>> = pool.into_iter().map(Some).collect();
    (
        picked.into_iter().map(|i| pool[i].take().expect("distinct")).collect(),
        shortfall,
    )
}

/// Step-1 existence examples: every S-connected directed pair once as a
/// positive, then `floor(neg_ratio * positives)` sampled unconnected pairs.
pub fn build_stage1(ns: &Nodeset, neg_ratio: f64, seed: u64) -> Result<Sampled<bool>, DatasetError> {
    let mut seen = HashSet::new();
    let positives: Vec<(String, String)> = s_pairs(ns)?
        .into_iter()
        .map(|(h, t, _)| (h, t))
        .filter(|p| seen.insert(p.clone()))
        .collect();
    let wanted = negative_count(neg_ratio, positives.len())?;
    let (negatives, shortfall) = sample_pairs(gen_i_pairs(ns), &seen, wanted, seed);
    let examples = positives
        .into_iter()
        .map(|p| (p, true))
        .chain(negatives.into_iter().map(|p| (p, false)))
        .map(|((h, t), label)| Example {
            instance: plain_instance(ns, &h, &t),
            head_id: h,
            tail_id: t,
            label,
        })
        .collect();
    Ok(Sampled { examples, shortfall })
}

/// Step-2 type examples: one per directed pair per S-node.
pub fn build_stage2(ns: &Nodeset) -> Result<Vec<Stage2Example>, DatasetError> {
    Ok(s_pairs(ns)?
        .into_iter()
        .map(|(h, t, kind)| Example {
            instance: plain_instance(ns, &h, &t),
            head_id: h,
            tail_id: t,
            label: kind,
        })
        .collect())
}

/// Four-way examples for the direct-classification configuration: step-2
/// positives plus step-1 style negatives labelled `None`.
pub fn build_four_label(
    ns: &Nodeset,
    neg_ratio: f64,
    seed: u64,
) -> Result<Sampled<Option<SKind>>, DatasetError> {
    let positives = s_pairs(ns)?;
    let connected: HashSet<(String, String)> =
        positives.iter().map(|(h, t, _)| (h.clone(), t.clone())).collect();
    let wanted = negative_count(neg_ratio, positives.len())?;
    let (negatives, shortfall) = sample_pairs(gen_i_pairs(ns), &connected, wanted, seed);
    let examples = positives
        .into_iter()
        .map(|(h, t, k)| (h, t, Some(k)))
        .chain(negatives.into_iter().map(|(h, t)| (h, t, None)))
        .map(|(h, t, label)| Example {
            instance: plain_instance(ns, &h, &t),
            head_id: h,
            tail_id: t,
            label,
        })
        .collect();
    Ok(Sampled { examples, shortfall })
}

/// Stage-2 examples: one per gold anchoring, then sampled candidates with no
/// YA connection labelled `None`.
pub fn build_ya(ns: &Nodeset, neg_ratio: f64, seed: u64) -> Result<YaBuild, DatasetError> {
    ns.s_node_structures()?;
    let anchorings = ns.ya_anchorings()?;
    let mut skipped = Vec::new();
    let mut gold = HashSet::new();
    let mut positives = Vec::new();
    for a in anchorings {
        gold.insert((a.anchor_id.clone(), a.target_id.clone()));
        let label = match a.label.parse::<YaLabel>() {
            Ok(l) if l.is_legal(a.anchor_kind, a.target_kind) => l,
            Ok(_) => {
                skipped.push(SkippedAnchoring {
                    reason: format!("not allowed from {} to {}", a.anchor_kind, a.target_kind),
                    ya_id: a.ya_id,
                    label: a.label,
                });
                continue;
            }
            Err(e) => {
                skipped.push(SkippedAnchoring {
                    reason: e.to_string(),
                    ya_id: a.ya_id,
                    label: a.label,
                });
                continue;
            }
        };
        positives.push(Example {
            instance: contextualize(ns, &a.anchor_id, &a.target_id)?,
            head_id: a.anchor_id,
            tail_id: a.target_id,
            label,
        });
    }
    let wanted = negative_count(neg_ratio, positives.len())?;
    let (negatives, shortfall) = sample_pairs(gen_ya_candidates(ns, None), &gold, wanted, seed);
    let mut examples = positives;
    for (a, t) in negatives {
        examples.push(Example {
            instance: contextualize(ns, &a, &t)?,
            head_id: a,
            tail_id: t,
            label: YaLabel::None,
        });
    }
    Ok(YaBuild {
        examples,
        shortfall,
        skipped,
    })
}

/// Builds the stage-2 classifier input for an (anchor, target) pair.
///
/// L anchors and I targets carry no context. A TA anchor's context is the
/// text of the locutions it joins; an S-node target's context is the text of
/// its premises followed by its conclusions. Multiple texts are joined with
/// `" || "`, and sides that are missing are left out.
pub fn contextualize(ns: &Nodeset, anchor_id: &str, target_id: &str) -> Result<PairInstance, DatasetError> {
    let anchor = ns
        .node(anchor_id)
        .ok_or_else(|| GraphError::UnknownNode(anchor_id.to_string()))?;
    let target = ns
        .node(target_id)
        .ok_or_else(|| GraphError::UnknownNode(target_id.to_string()))?;
    let anchor_ok = matches!(anchor.kind, NodeKind::L | NodeKind::TA);
    let target_ok = target.kind == NodeKind::I || target.kind.is_s_node();
    if !anchor_ok || !target_ok {
        return Err(DatasetError::KindMismatch {
            anchor_id: anchor_id.to_string(),
            anchor_kind: anchor.kind,
            target_id: target_id.to_string(),
            target_kind: target.kind,
        });
    }
    let head_context = if anchor.kind == NodeKind::TA {
        let (before, after) = ns.ta_context_lenient(anchor_id);
        join_sides(&before, &after)
    } else {
        String::new()
    };
    let tail_context = if target.kind.is_s_node() {
        let (premises, conclusions) = ns.s_context_lenient(target_id);
        join_sides(&premises, &conclusions)
    } else {
        String::new()
    };
    Ok(PairInstance {
        head_text: text_of(ns, anchor_id),
        head_context,
        tail_text: text_of(ns, target_id),
        tail_context,
    })
}

fn join_sides(first: &[&str], second: &[&str]) -> String {
    first
        .iter()
        .chain(second)
        .copied()
        .collect::<Vec<_>>()
        .join(CONTEXT_SEPARATOR)
}
