//! Text-pair classification backends.
//!
//! Every backend maps [`PairInstance`]s to a [`LabelDistribution`] over a
//! task's fixed label vocabulary. The built-in [`LinearModel`] is a hashed
//! multinomial logistic regression; [`RemoteClassifier`] forwards batches to
//! an inference server speaking the JSON wire protocol.

mod features;
mod linear;
mod persist;
mod remote;
pub mod stub;

pub use features::{featurize, fnv1a64, tokenize, FeatureConfig, Namespace, SparseVector};
pub use linear::{train, train_vectors, Gradient, Hyper, LabeledVector, LinearModel, TrainReport, TrainingMeta};
pub use persist::{decode_model, encode_model, load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use remote::{RemoteClassifier, MAX_BATCH};

use crate::dataset::PairInstance;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    /// Relation existence between two propositions.
    SStep1,
    /// Relation type between two connected propositions.
    SStep2,
    /// Illocutionary anchoring, `None` included.
    Ya,
    /// Relation existence and type in one decision.
    SFour,
}

const S_STEP1_LABELS: &[&str] = &["false", "true"];
const S_STEP2_LABELS: &[&str] = &["RA", "CA", "MA"];
const S_FOUR_LABELS: &[&str] = &["None", "RA", "CA", "MA"];
const YA_LABELS: &[&str] = &[
    "None",
    "Asserting",
    "Challenging",
    "Pure Questioning",
    "Assertive Questioning",
    "Rhetorical Questioning",
    "Arguing",
    "Disagreeing",
    "Default Illocuting",
    "Restating",
    "Agreeing",
];

impl Task {
    pub const ALL: [Task; 4] = [Task::SStep1, Task::SStep2, Task::Ya, Task::SFour];

    pub fn name(self) -> &'static str {
        match self {
            Task::SStep1 => "s_step1",
            Task::SStep2 => "s_step2",
            Task::Ya => "ya",
            Task::SFour => "s_four",
        }
    }

    /// Label vocabulary in output order.
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Task::SStep1 => S_STEP1_LABELS,
            Task::SStep2 => S_STEP2_LABELS,
            Task::Ya => YA_LABELS,
            Task::SFour => S_FOUR_LABELS,
        }
    }

    pub fn num_labels(self) -> usize {
        self.labels().len()
    }

    pub fn label_index(self, label: &str) -> Option<usize> {
        self.labels().iter().position(|l| *l == label)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = ClassifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| ClassifierError::UnknownTask(s.to_string()))
    }
}

/// Normalized scores, one per label of the task, in task label order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    pub scores: Vec<f64>,
}

impl LabelDistribution {
    pub fn uniform(k: usize) -> Self {
        LabelDistribution {
            scores: vec![1.0 / k as f64; k],
        }
    }

    /// Numerically stable softmax.
    pub fn softmax(logits: &[f64]) -> Self {
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        LabelDistribution {
            scores: exps.into_iter().map(|e| e / sum).collect(),
        }
    }

    /// Index of the highest score; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.scores.iter().enumerate() {
            if s > self.scores[best] {
                best = i;
            }
        }
        best
    }

    pub fn score(&self, i: usize) -> f64 {
        self.scores[i]
    }
}

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("label {label:?} is not in the {task} vocabulary")]
    UnknownLabel { task: Task, label: String },
    #[error("training data has no example for label {0:?}")]
    DegenerateData(String),
    #[error("training loss became non-finite in epoch {epoch}; lower the learning rate")]
    NonFiniteLoss { epoch: usize },
    #[error("model is for task {found}, expected {expected}")]
    TaskMismatch { expected: Task, found: Task },
    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported model file version {0}")]
    VersionMismatch(u32),
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("backend reported: {0}")]
    BackendError(String),
}

/// A backend that scores instance batches for one task.
pub trait PairClassifier: Send + Sync {
    fn task(&self) -> Task;

    /// One distribution per instance, in input order.
    fn classify(&self, instances: &[PairInstance]) -> Result<Vec<LabelDistribution>, ClassifierError>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabularies() {
        assert_eq!(Task::SStep1.labels(), &["false", "true"]);
        assert_eq!(Task::SStep2.labels(), &["RA", "CA", "MA"]);
        assert_eq!(Task::Ya.num_labels(), 11);
        assert_eq!(Task::Ya.labels()[0], "None");
        for l in crate::labels::YaLabel::ALL {
            assert_eq!(Task::Ya.labels()[l.index()], l.as_str());
        }
        assert_eq!("ya".parse::<Task>().unwrap(), Task::Ya);
        assert!("s_step3".parse::<Task>().is_err());
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(LabelDistribution::uniform(4).argmax(), 0);
        let d = LabelDistribution { scores: vec![0.1, 0.45, 0.45] };
        assert_eq!(d.argmax(), 1);
    }

    #[test]
    fn softmax_normalizes() {
        let d = LabelDistribution::softmax(&[1000.0, -1000.0, 3.0]);
        assert!((d.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(d.argmax(), 0);
        let u = LabelDistribution::softmax(&[0.0; 5]);
        assert!(u.scores.iter().all(|&s| s == 0.2));
    }
}
