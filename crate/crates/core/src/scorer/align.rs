use super::ScoreError;
use crate::classifier::Task;
use crate::graph::{NodeKind, Nodeset, SKind};
use crate::labels::YaLabel;
use crate::pipeline::gen_ya_candidates;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// ARI vocabulary; index 0 is the absence of a relation.
pub const ARI_LABELS: [&str; 4] = ["None", "RA", "CA", "MA"];

/// Parallel gold and predicted label indices over one pair universe.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairLabels {
    pub gold: Vec<usize>,
    pub pred: Vec<usize>,
    pub warnings: Vec<String>,
}

fn ids_of(ns: &Nodeset, kinds: &[NodeKind]) -> BTreeSet<String> {
    ns.nodes()
        .iter()
        .filter(|n| kinds.contains(&n.kind))
        .map(|n| n.id.clone())
        .collect()
}

fn same_nodes(gold: &Nodeset, pred: &Nodeset, kinds: &[NodeKind]) -> Result<(), ScoreError> {
    let g = ids_of(gold, kinds);
    let p = ids_of(pred, kinds);
    if g != p {
        let missing: Vec<_> = g.difference(&p).take(3).cloned().collect();
        let extra: Vec<_> = p.difference(&g).take(3).cloned().collect();
        return Err(ScoreError::NodeMismatch {
            nodeset: gold.id().to_string(),
            reason: format!("missing {missing:?}, unexpected {extra:?}"),
        });
    }
    Ok(())
}

fn ari_index(kind: SKind) -> usize {
    match kind {
        SKind::RA => 1,
        SKind::CA => 2,
        SKind::MA => 3,
    }
}

/// Relation kind per directed I-pair. Pairs joined by more than one S-node
/// take the alphabetically smallest kind name and produce a warning.
fn relation_map(ns: &Nodeset, side: &str, warnings: &mut Vec<String>) -> HashMap<(String, String), SKind> {
    let mut found: BTreeMap<(String, String), Vec<SKind>> = BTreeMap::new();
    for s in ns.s_node_structures_lenient() {
        for p in &s.premises {
            for c in &s.conclusions {
                if p != c {
                    found.entry((p.clone(), c.clone())).or_default().push(s.kind);
                }
            }
        }
    }
    found
        .into_iter()
        .map(|(pair, kinds)| {
            let kind = *kinds.iter().min_by_key(|k| k.as_str()).expect("non-empty");
            if kinds.len() > 1 {
                warnings.push(format!(
                    "{}: {side} has {} S-nodes from {} to {}; scored as {}",
                    ns.id(),
                    kinds.len(),
                    pair.0,
                    pair.1,
                    kind.as_str()
                ));
            }
            (pair, kind)
        })
        .collect()
}

/// Labels every ordered pair of distinct I-nodes with the S-node kind that
/// connects it, in gold and in the prediction.
pub fn ari_pair_labels(gold: &Nodeset, pred: &Nodeset) -> Result<PairLabels, ScoreError> {
    same_nodes(gold, pred, &[NodeKind::I])?;
    let mut warnings = Vec::new();
    let g = relation_map(gold, "gold", &mut warnings);
    let p = relation_map(pred, "prediction", &mut warnings);
    let mut out = PairLabels {
        warnings,
        ..Default::default()
    };
    for pair in crate::dataset::gen_i_pairs(gold) {
        out.gold.push(g.get(&pair).map_or(0, |k| ari_index(*k)));
        out.pred.push(p.get(&pair).map_or(0, |k| ari_index(*k)));
    }
    Ok(out)
}

/// Where a YA target lands in the shared universe.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum TargetKey {
    Proposition(String),
    /// A gold S-node, or a predicted one aligned to it.
    GoldRelation(String),
    /// A predicted S-node with no gold counterpart.
    PredRelation(String),
}

/// One-to-one alignment of predicted to gold S-nodes. Walking predicted
/// S-nodes in node order, each takes the first unclaimed gold S-node of the
/// same kind that shares a directed (premise, conclusion) pair with it.
pub fn align_relations(gold: &Nodeset, pred: &Nodeset) -> BTreeMap<String, String> {
    let pairs = |s: &crate::graph::SStructure| -> BTreeSet<(String, String)> {
        s.premises
            .iter()
            .flat_map(|p| s.conclusions.iter().map(move |c| (p.clone(), c.clone())))
            .collect()
    };
    let gold_s: Vec<_> = gold
        .s_node_structures_lenient()
        .into_iter()
        .map(|s| {
            let p = pairs(&s);
            (s, p)
        })
        .collect();
    let mut claimed = vec![false; gold_s.len()];
    let mut out = BTreeMap::new();
    for s in pred.s_node_structures_lenient() {
        let mine = pairs(&s);
        let hit = gold_s
            .iter()
            .enumerate()
            .find(|(i, (g, gp))| !claimed[*i] && g.kind == s.kind && !gp.is_disjoint(&mine));
        if let Some((i, (g, _))) = hit {
            claimed[i] = true;
            out.insert(s.s_id.clone(), g.s_id.clone());
        }
    }
    out
}

fn target_key(ns: &Nodeset, id: &str, is_gold: bool, alignment: &BTreeMap<String, String>) -> Option<TargetKey> {
    let kind = ns.kind_of(id)?;
    Some(if kind == NodeKind::I {
        TargetKey::Proposition(id.to_string())
    } else if kind.is_s_node() {
        if is_gold {
            TargetKey::GoldRelation(id.to_string())
        } else {
            match alignment.get(id) {
                Some(g) => TargetKey::GoldRelation(g.clone()),
                None => TargetKey::PredRelation(id.to_string()),
            }
        }
    } else {
        // Off-pattern targets keep their own key.
        TargetKey::Proposition(id.to_string())
    })
}

type UniverseKey = (String, TargetKey);

/// YA labels of one side keyed by (anchor, target). Several YA nodes on one
/// key keep the label with the alphabetically smallest name.
fn ya_map(
    ns: &Nodeset,
    is_gold: bool,
    alignment: &BTreeMap<String, String>,
    warnings: &mut Vec<String>,
) -> BTreeMap<UniverseKey, YaLabel> {
    let side = if is_gold { "gold" } else { "prediction" };
    let mut out: BTreeMap<UniverseKey, YaLabel> = BTreeMap::new();
    for a in ns.ya_anchorings_lenient() {
        let label = match a.label.parse::<YaLabel>() {
            Ok(YaLabel::None) | Err(_) => {
                warnings.push(format!("{}: {side} YA {} has unscorable label {:?}", ns.id(), a.ya_id, a.label));
                continue;
            }
            Ok(l) => l,
        };
        let Some(target) = target_key(ns, &a.target_id, is_gold, alignment) else {
            continue;
        };
        let key = (a.anchor_id.clone(), target);
        match out.get(&key) {
            Some(prev) => {
                warnings.push(format!(
                    "{}: {side} anchors {} to {} more than once",
                    ns.id(),
                    a.anchor_id,
                    a.target_id
                ));
                if label.as_str() < prev.as_str() {
                    out.insert(key, label);
                }
            }
            None => {
                out.insert(key, label);
            }
        }
    }
    out
}

/// Labels the YA universe: every anchored pair on either side plus every
/// unanchored candidate of either nodeset, with predicted S-nodes mapped
/// onto the gold S-nodes they align with.
pub fn ilo_pair_labels(gold: &Nodeset, pred: &Nodeset) -> Result<PairLabels, ScoreError> {
    same_nodes(gold, pred, &[NodeKind::L, NodeKind::I, NodeKind::TA])?;
    let alignment = align_relations(gold, pred);
    let mut warnings = Vec::new();
    let g = ya_map(gold, true, &alignment, &mut warnings);
    let p = ya_map(pred, false, &alignment, &mut warnings);

    let mut universe: BTreeSet<UniverseKey> = g.keys().chain(p.keys()).cloned().collect();
    for (ns, is_gold) in [(gold, true), (pred, false)] {
        for (a, t) in gen_ya_candidates(ns, None) {
            if let Some(key) = target_key(ns, &t, is_gold, &alignment) {
                universe.insert((a, key));
            }
        }
    }
    let mut out = PairLabels {
        warnings,
        ..Default::default()
    };
    for key in universe {
        out.gold.push(g.get(&key).map_or(0, |l| l.index()));
        out.pred.push(p.get(&key).map_or(0, |l| l.index()));
    }
    debug_assert!(Task::Ya.labels()[0] == "None");
    Ok(out)
}
