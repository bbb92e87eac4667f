//! Corpus-level steps shared by the command line and the tests: building
//! example files for a stage and training a model from them.

use crate::classifier::{self, fnv1a64, ClassifierError, FeatureConfig, Hyper, LinearModel, Task, TrainReport};
use crate::dataset::{
    build_four_label, build_stage1, build_stage2, build_ya, DatasetError, Example, ExampleRecord, PairInstance,
};
use crate::graph::Nodeset;
use crate::rng::SplitMix64;
use std::fmt;
use std::str::FromStr;

/// A trainable classifier stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Relation existence.
    S1,
    /// Relation type.
    S2,
    /// Illocutionary anchoring.
    Ya,
    /// Relation existence and type in one decision.
    S4,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::S1, Stage::S2, Stage::Ya, Stage::S4];

    pub fn name(self) -> &'static str {
        match self {
            Stage::S1 => "s1",
            Stage::S2 => "s2",
            Stage::Ya => "ya",
            Stage::S4 => "s4",
        }
    }

    pub fn task(self) -> Task {
        match self {
            Stage::S1 => Task::SStep1,
            Stage::S2 => Task::SStep2,
            Stage::Ya => Task::Ya,
            Stage::S4 => Task::SFour,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage {s:?} (expected s1, s2, ya or s4)"))
    }
}

/// Seed for one nodeset's sampling, so results do not depend on which other
/// nodesets are in the run or on their order.
pub fn nodeset_seed(seed: u64, nodeset_id: &str) -> u64 {
    SplitMix64::new(seed ^ fnv1a64(nodeset_id.as_bytes())).next_u64()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuildSummary {
    pub nodesets: usize,
    pub examples: usize,
    /// Nodesets whose negative pool was smaller than requested.
    pub shortfalls: Vec<String>,
    /// Gold anchorings skipped for an unknown or illegal label:
    /// (nodeset, YA id, label).
    pub skipped: Vec<(String, String, String)>,
}

fn record<L>(ns: &Nodeset, e: Example<L>, label: String) -> ExampleRecord {
    ExampleRecord {
        head: e.instance.head_text,
        head_context: e.instance.head_context,
        tail: e.instance.tail_text,
        tail_context: e.instance.tail_context,
        label,
        nodeset_id: ns.id().to_string(),
        head_id: e.head_id,
        tail_id: e.tail_id,
    }
}

struct NodesetBuild {
    records: Vec<ExampleRecord>,
    shortfall: bool,
    skipped: Vec<(String, String, String)>,
}

fn build_one(stage: Stage, ns: &Nodeset, neg_ratio: f64, seed: u64) -> Result<NodesetBuild, (String, DatasetError)> {
    let seed = nodeset_seed(seed, ns.id());
    let wrap = |e: DatasetError| (ns.id().to_string(), e);
    let mut skipped = Vec::new();
    let (records, shortfall) = match stage {
        Stage::S1 => {
            let s = build_stage1(ns, neg_ratio, seed).map_err(wrap)?;
            let r = s.examples.into_iter().map(|e| {
                let l = e.label.to_string();
                record(ns, e, l)
            });
            (r.collect(), s.shortfall)
        }
        Stage::S2 => {
            let r = build_stage2(ns).map_err(wrap)?.into_iter().map(|e| {
                let l = e.label.as_str().to_string();
                record(ns, e, l)
            });
            (r.collect(), false)
        }
        Stage::Ya => {
            let b = build_ya(ns, neg_ratio, seed).map_err(wrap)?;
            skipped = b
                .skipped
                .into_iter()
                .map(|s| (ns.id().to_string(), s.ya_id, s.label))
                .collect();
            let r = b.examples.into_iter().map(|e| {
                let l = e.label.as_str().to_string();
                record(ns, e, l)
            });
            (r.collect(), b.shortfall)
        }
        Stage::S4 => {
            let s = build_four_label(ns, neg_ratio, seed).map_err(wrap)?;
            let r = s.examples.into_iter().map(|e| {
                let l = e.label.map_or("None", |k| k.as_str()).to_string();
                record(ns, e, l)
            });
            (r.collect(), s.shortfall)
        }
    };
    Ok(NodesetBuild {
        records,
        shortfall,
        skipped,
    })
}

/// Examples for `stage` from every nodeset, in nodeset order. Nodesets are
/// processed in parallel; each samples with its own [`nodeset_seed`].
pub fn build_records(
    stage: Stage,
    nodesets: &[Nodeset],
    neg_ratio: f64,
    seed: u64,
) -> Result<(Vec<ExampleRecord>, BuildSummary), (String, DatasetError)> {
    let parts = crate::par::try_map(nodesets, |ns| build_one(stage, ns, neg_ratio, seed))?;
    let mut summary = BuildSummary {
        nodesets: nodesets.len(),
        ..Default::default()
    };
    let mut records = Vec::new();
    for (ns, part) in nodesets.iter().zip(parts) {
        if part.shortfall {
            summary.shortfalls.push(ns.id().to_string());
        }
        summary.skipped.extend(part.skipped);
        records.extend(part.records);
    }
    summary.examples = records.len();
    Ok((records, summary))
}

/// Trains the stage's model on example records.
pub fn train_records(
    stage: Stage,
    records: &[ExampleRecord],
    features: FeatureConfig,
    hyper: Hyper,
) -> Result<(LinearModel, TrainReport), ClassifierError> {
    let task = stage.task();
    let examples = records
        .iter()
        .map(|r| {
            let y = task.label_index(&r.label).ok_or_else(|| ClassifierError::UnknownLabel {
                task,
                label: r.label.clone(),
            })?;
            Ok((
                PairInstance {
                    head_text: r.head.clone(),
                    head_context: r.head_context.clone(),
                    tail_text: r.tail.clone(),
                    tail_context: r.tail_context.clone(),
                },
                y,
            ))
        })
        .collect::<Result<Vec<_>, ClassifierError>>()?;
    classifier::train(&examples, task, features, hyper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;

    #[test]
    fn stage_names() {
        for s in Stage::ALL {
            assert_eq!(s.name().parse::<Stage>().unwrap(), s);
        }
        assert!("s3".parse::<Stage>().is_err());
        assert_eq!(Stage::S4.task(), Task::SFour);
    }

    #[test]
    fn records_carry_labels_and_ids() {
        let ns = [fixtures::argued()];
        let (r, s) = build_records(Stage::S2, &ns, 1.0, 7).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].label.as_str(), r[0].head_id.as_str(), r[0].nodeset_id.as_str()), ("RA", "I1", "nodeset2"));
        assert_eq!(s.examples, 1);

        let (r, s) = build_records(Stage::S1, &ns, 1.0, 7).unwrap();
        assert_eq!(r.iter().map(|x| x.label.as_str()).collect::<Vec<_>>(), vec!["true", "false"]);
        assert!(s.shortfalls.is_empty());

        let (r, _) = build_records(Stage::S4, &ns, 1.0, 7).unwrap();
        assert_eq!(r.iter().map(|x| x.label.as_str()).collect::<Vec<_>>(), vec!["RA", "None"]);

        let (r, _) = build_records(Stage::Ya, &ns, 1.0, 7).unwrap();
        assert_eq!(r[0].label, "Arguing");
        assert_eq!(r.iter().filter(|x| x.label == "None").count(), 1);
    }

    #[test]
    fn seeds_are_per_nodeset() {
        assert_eq!(nodeset_seed(1, "a"), nodeset_seed(1, "a"));
        assert_ne!(nodeset_seed(1, "a"), nodeset_seed(1, "b"));
        assert_ne!(nodeset_seed(1, "a"), nodeset_seed(2, "a"));
    }

    #[test]
    fn unknown_record_label() {
        let (mut r, _) = build_records(Stage::S2, &[fixtures::argued()], 1.0, 7).unwrap();
        r[0].label = "XX".into();
        assert!(matches!(
            train_records(Stage::S2, &r, FeatureConfig::with_dim(1 << 8), Hyper::default()),
            Err(ClassifierError::UnknownLabel { .. })
        ));
    }
}
