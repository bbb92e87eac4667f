//! Two-stage inference over a nodeset.
//!
//! Stage 1 scores every ordered pair of I-nodes and emits one S-node per
//! accepted pair. Stage 2 scores every YA candidate of the nodeset extended
//! with those predicted S-nodes, so illocutionary anchors can attach to
//! predicted relations. [`materialize`] writes both into an output nodeset.

mod candidates;
mod config;
mod materialize;

pub use candidates::gen_ya_candidates;
pub use config::{BackendRef, PipelineConfig, StageMode, ENDPOINT_ENV};
pub use materialize::materialize;

use crate::classifier::{ClassifierError, LabelDistribution, PairClassifier, Task};
use crate::dataset::{contextualize, DatasetError, PairInstance};
use crate::graph::{GraphError, NodeKind, Nodeset, SKind};
use crate::labels::{AnchorPattern, YaLabel};
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_EXISTENCE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{stage} backend failed: {source}")]
    Backend {
        stage: &'static str,
        #[source]
        source: ClassifierError,
    },
    #[error("prediction references unknown node {0:?}")]
    UnknownReference(String),
    #[error("invalid prediction: {0}")]
    InvalidPrediction(String),
    #[error("pipeline configuration: {0}")]
    Config(String),
    #[error("cannot load model {path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ClassifierError,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A predicted argumentative relation `head -> S -> tail`.
#[derive(Debug, Clone, PartialEq)]
pub struct SPrediction {
    pub head: String,
    pub kind: SKind,
    pub tail: String,
    /// Probability that some relation exists.
    pub existence: f64,
    /// Probability of `kind` from the typing decision.
    pub type_score: f64,
}

/// A predicted illocutionary anchoring `anchor -> YA -> target`.
#[derive(Debug, Clone, PartialEq)]
pub struct YaPrediction {
    pub anchor: String,
    pub anchor_kind: NodeKind,
    pub target: String,
    pub target_kind: NodeKind,
    pub label: YaLabel,
    pub score: f64,
}

pub type Backend = Arc<dyn PairClassifier>;

/// How S-nodes are predicted.
#[derive(Clone)]
pub enum Stage1 {
    /// An existence model over `[false, true]`, then a typing model over
    /// `[RA, CA, MA]` for the pairs that pass the threshold.
    TwoStep { existence: Backend, typing: Backend },
    /// One model over `[None, RA, CA, MA]`.
    FourLabel(Backend),
}

#[derive(Clone)]
pub struct Pipeline {
    stage1: Stage1,
    ya: Backend,
    existence_threshold: f64,
    window: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub nodeset: Nodeset,
    pub s_predictions: Vec<SPrediction>,
    pub ya_predictions: Vec<YaPrediction>,
    /// Stage-2 decisions with no legal label for their candidate.
    pub dropped: usize,
}

const STEP1: &str = "stage 1 existence";
const STEP2: &str = "stage 1 typing";
const FOUR: &str = "stage 1 four-label";
const YA: &str = "stage 2";

fn expect_task(stage: &'static str, backend: &Backend, task: Task) -> Result<(), PipelineError> {
    let found = backend.task();
    if found != task {
        return Err(PipelineError::Backend {
            stage,
            source: ClassifierError::TaskMismatch { expected: task, found },
        });
    }
    Ok(())
}

/// Runs a backend and checks that it answered every instance with a row of
/// the right width.
fn run_backend(
    stage: &'static str,
    backend: &Backend,
    instances: &[PairInstance],
) -> Result<Vec<LabelDistribution>, PipelineError> {
    if instances.is_empty() {
        return Ok(Vec::new());
    }
    let out = backend
        .classify(instances)
        .map_err(|source| PipelineError::Backend { stage, source })?;
    let k = backend.task().num_labels();
    if out.len() != instances.len() || out.iter().any(|d| d.scores.len() != k) {
        return Err(PipelineError::Backend {
            stage,
            source: ClassifierError::ProtocolViolation(format!(
                "{} rows for {} instances over {k} labels",
                out.len(),
                instances.len()
            )),
        });
    }
    Ok(out)
}

impl Pipeline {
    pub fn new(stage1: Stage1, ya: Backend) -> Result<Self, PipelineError> {
        match &stage1 {
            Stage1::TwoStep { existence, typing } => {
                expect_task(STEP1, existence, Task::SStep1)?;
                expect_task(STEP2, typing, Task::SStep2)?;
            }
            Stage1::FourLabel(model) => expect_task(FOUR, model, Task::SFour)?,
        }
        expect_task(YA, &ya, Task::Ya)?;
        Ok(Pipeline {
            stage1,
            ya,
            existence_threshold: DEFAULT_EXISTENCE_THRESHOLD,
            window: None,
        })
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self, PipelineError> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(PipelineError::Config(format!(
                "existence threshold {threshold} outside (0, 1)"
            )));
        }
        self.existence_threshold = threshold;
        Ok(self)
    }

    pub fn with_window(mut self, window: Option<usize>) -> Self {
        self.window = window;
        self
    }

    pub fn existence_threshold(&self) -> f64 {
        self.existence_threshold
    }

    pub fn window(&self) -> Option<usize> {
        self.window
    }

    /// Stage 1 over every ordered pair of distinct I-nodes, in pair order.
    pub fn predict_s_nodes(&self, ns: &Nodeset) -> Result<Vec<SPrediction>, PipelineError> {
        let pairs = crate::dataset::gen_i_pairs(ns);
        let text = |id: &str| ns.node(id).map(|n| n.text.clone()).unwrap_or_default();
        let instances: Vec<PairInstance> = pairs
            .iter()
            .map(|(h, t)| PairInstance::plain(text(h), text(t)))
            .collect();

        let mut out = Vec::new();
        match &self.stage1 {
            Stage1::TwoStep { existence, typing } => {
                let exist = run_backend(STEP1, existence, &instances)?;
                let keep: Vec<usize> = (0..pairs.len())
                    .filter(|&i| exist[i].score(1) >= self.existence_threshold)
                    .collect();
                let kept: Vec<PairInstance> = keep.iter().map(|&i| instances[i].clone()).collect();
                let types = run_backend(STEP2, typing, &kept)?;
                for (&i, d) in keep.iter().zip(&types) {
                    let k = d.argmax();
                    out.push(SPrediction {
                        head: pairs[i].0.clone(),
                        kind: SKind::ALL[k],
                        tail: pairs[i].1.clone(),
                        existence: exist[i].score(1),
                        type_score: d.score(k),
                    });
                }
            }
            Stage1::FourLabel(model) => {
                let dists = run_backend(FOUR, model, &instances)?;
                for ((h, t), d) in pairs.iter().zip(&dists) {
                    let k = d.argmax();
                    if k == 0 {
                        continue;
                    }
                    out.push(SPrediction {
                        head: h.clone(),
                        kind: SKind::ALL[k - 1],
                        tail: t.clone(),
                        existence: 1.0 - d.score(0),
                        type_score: d.score(k),
                    });
                }
            }
        }
        Ok(out)
    }

    /// Stage 2 over `candidates` of `ns`. An argmax of `None` yields nothing;
    /// an argmax that is not legal for the candidate's kinds is replaced by
    /// the best-scoring legal label. Returns the predictions and how many
    /// candidates had no legal label at all.
    pub fn predict_ya(
        &self,
        ns: &Nodeset,
        candidates: &[(String, String)],
    ) -> Result<(Vec<YaPrediction>, usize), PipelineError> {
        let instances = crate::par::try_map(candidates, |(a, t)| contextualize(ns, a, t))?;
        let dists = run_backend(YA, &self.ya, &instances)?;
        let mut preds = Vec::new();
        let mut dropped = 0;
        for ((anchor, target), d) in candidates.iter().zip(&dists) {
            let best = YaLabel::from_index(d.argmax()).expect("ya row width checked");
            if best == YaLabel::None {
                continue;
            }
            let anchor_kind = ns.kind_of(anchor).expect("contextualized");
            let target_kind = ns.kind_of(target).expect("contextualized");
            let label = if best.is_legal(anchor_kind, target_kind) {
                Some(best)
            } else {
                coerce(d, anchor_kind, target_kind)
            };
            match label {
                Some(label) => preds.push(YaPrediction {
                    anchor: anchor.clone(),
                    anchor_kind,
                    target: target.clone(),
                    target_kind,
                    label,
                    score: d.score(label.index()),
                }),
                None => dropped += 1,
            }
        }
        Ok((preds, dropped))
    }

    /// Stage 1, then stage 2 on the nodeset extended with the predicted
    /// S-nodes, then materialization.
    pub fn run(&self, ns: &Nodeset) -> Result<PipelineOutput, PipelineError> {
        let s_predictions = self.predict_s_nodes(ns)?;
        let view = materialize(ns, &s_predictions, &[])?;
        let candidates = gen_ya_candidates(&view, self.window);
        let (ya_predictions, dropped) = self.predict_ya(&view, &candidates)?;
        let nodeset = materialize(ns, &s_predictions, &ya_predictions)?;
        Ok(PipelineOutput {
            nodeset,
            s_predictions,
            ya_predictions,
            dropped,
        })
    }
}

/// Highest-scoring label legal for the kind pair; ties go to the lower
/// label index.
fn coerce(d: &LabelDistribution, anchor: NodeKind, target: NodeKind) -> Option<YaLabel> {
    let legal = AnchorPattern::of(anchor, target)?.labels();
    let mut best: Option<YaLabel> = None;
    for l in YaLabel::ALL.into_iter().filter(|l| legal.contains(l)) {
        if best.is_none_or(|b| d.score(l.index()) > d.score(b.index())) {
            best = Some(l);
        }
    }
    best
}

/// [`Pipeline::run`] as a free function.
pub fn run_pipeline(ns: &Nodeset, pipeline: &Pipeline) -> Result<PipelineOutput, PipelineError> {
    pipeline.run(ns)
}
