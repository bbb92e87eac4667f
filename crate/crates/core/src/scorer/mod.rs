//! ARI and ILO evaluation of predicted nodesets against gold.
//!
//! ARI labels every ordered pair of distinct I-nodes with the kind of S-node
//! joining it (`None` when there is none). ILO labels every (anchor, target)
//! pair that is anchored on either side or is a YA candidate of either
//! nodeset; predicted S-nodes are first aligned with gold S-nodes so anchors
//! on a correctly predicted relation can match.
//!
//! Counts are pooled over the corpus before averaging. Averages run over
//! the labels that occur in gold or prediction; "general" includes `None`,
//! "focused" leaves it out.

mod align;
mod metrics;

pub use align::{align_relations, ari_pair_labels, ilo_pair_labels, PairLabels, ARI_LABELS};
pub use metrics::{macro_prf, per_class, Averaging, ClassMetrics, ConfusionMatrix, Prf};

use crate::classifier::Task;
use crate::corpus::{list_nodeset_files, read_nodeset, CorpusError};
use crate::graph::Nodeset;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("{nodeset}: gold and prediction disagree on nodes ({reason})")]
    NodeMismatch { nodeset: String, reason: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub task: String,
    pub averaging: Averaging,
    pub general: Prf,
    pub focused: Prf,
    pub per_class: Vec<ClassMetrics>,
    pub support: BTreeMap<String, u64>,
    pub warnings: Vec<String>,
}

impl MetricsReport {
    pub fn from_matrix(task: &str, cm: &ConfusionMatrix, averaging: Averaging, warnings: Vec<String>) -> Self {
        let per_class = per_class(cm);
        let (general, focused) = summary(cm, averaging);
        MetricsReport {
            task: task.to_string(),
            averaging,
            general,
            focused,
            support: per_class.iter().map(|c| (c.label.clone(), c.support)).collect(),
            per_class,
            warnings,
        }
    }
}

/// General and focused averages over the observed labels of `cm`.
pub fn summary(cm: &ConfusionMatrix, averaging: Averaging) -> (Prf, Prf) {
    let seen = cm.observed();
    (macro_prf(&seen, None, averaging), macro_prf(&seen, Some("None"), averaging))
}

/// General and focused F1 of one nodeset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodesetScore {
    pub nodeset: String,
    pub ari_general_f1: f64,
    pub ari_focused_f1: f64,
    pub ilo_general_f1: f64,
    pub ilo_focused_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub ari: MetricsReport,
    pub ilo: MetricsReport,
    pub per_nodeset: Vec<NodesetScore>,
}

/// Per-nodeset matrices; merged by [`score_nodesets`].
#[derive(Debug, Clone, PartialEq)]
pub struct NodesetMatrices {
    pub nodeset: String,
    pub ari: ConfusionMatrix,
    pub ilo: ConfusionMatrix,
    pub ari_warnings: Vec<String>,
    pub ilo_warnings: Vec<String>,
}

pub fn nodeset_matrices(gold: &Nodeset, pred: &Nodeset) -> Result<NodesetMatrices, ScoreError> {
    let ari = ari_pair_labels(gold, pred)?;
    let ilo = ilo_pair_labels(gold, pred)?;
    Ok(NodesetMatrices {
        nodeset: gold.id().to_string(),
        ari: ConfusionMatrix::from_pairs(&ARI_LABELS, &ari.gold, &ari.pred),
        ilo: ConfusionMatrix::from_pairs(Task::Ya.labels(), &ilo.gold, &ilo.pred),
        ari_warnings: ari.warnings,
        ilo_warnings: ilo.warnings,
    })
}

fn report(parts: &[NodesetMatrices], averaging: Averaging, extra_warnings: Vec<String>) -> CorpusReport {
    let mut ari = ConfusionMatrix::new(&ARI_LABELS);
    let mut ilo = ConfusionMatrix::new(Task::Ya.labels());
    let mut ari_w = extra_warnings.clone();
    let mut ilo_w = extra_warnings;
    let mut per_nodeset = Vec::with_capacity(parts.len());
    for m in parts {
        ari.merge(&m.ari);
        ilo.merge(&m.ilo);
        ari_w.extend(m.ari_warnings.iter().cloned());
        ilo_w.extend(m.ilo_warnings.iter().cloned());
        let (ari_general, ari_focused) = summary(&m.ari, averaging);
        let (ilo_general, ilo_focused) = summary(&m.ilo, averaging);
        per_nodeset.push(NodesetScore {
            nodeset: m.nodeset.clone(),
            ari_general_f1: ari_general.f1,
            ari_focused_f1: ari_focused.f1,
            ilo_general_f1: ilo_general.f1,
            ilo_focused_f1: ilo_focused.f1,
        });
    }
    CorpusReport {
        ari: MetricsReport::from_matrix("ARI", &ari, averaging, ari_w),
        ilo: MetricsReport::from_matrix("ILO", &ilo, averaging, ilo_w),
        per_nodeset,
    }
}

/// Scores (gold, prediction) pairs; nodesets are processed in parallel and
/// their counts pooled.
pub fn score_nodesets(pairs: &[(Nodeset, Nodeset)], averaging: Averaging) -> Result<CorpusReport, ScoreError> {
    let parts = crate::par::try_map(pairs, |(g, p)| nodeset_matrices(g, p))?;
    Ok(report(&parts, averaging, Vec::new()))
}

/// Scores every gold nodeset file against the file of the same name under
/// `pred_dir`. A missing prediction is scored as an empty one (no S or YA
/// nodes) and reported as a warning.
pub fn score_corpus(gold_dir: &Path, pred_dir: &Path, averaging: Averaging) -> Result<CorpusReport, ScoreError> {
    let gold_files = list_nodeset_files(gold_dir)?;
    let pred_files: BTreeMap<String, std::path::PathBuf> = list_nodeset_files(pred_dir)?.into_iter().collect();
    let mut warnings = Vec::new();
    for id in pred_files.keys() {
        if !gold_files.iter().any(|(g, _)| g == id) {
            warnings.push(format!("{id}: prediction has no gold nodeset; ignored"));
        }
    }
    let parts = crate::par::try_map(&gold_files, |(id, path)| {
        let gold = read_nodeset(id, path)?;
        let (pred, missing) = match pred_files.get(id) {
            Some(p) => (read_nodeset(id, p)?, false),
            None => (empty_prediction(&gold), true),
        };
        let mut m = nodeset_matrices(&gold, &pred)?;
        if missing {
            let w = format!("{id}: missing prediction, scored as empty");
            m.ari_warnings.insert(0, w.clone());
            m.ilo_warnings.insert(0, w);
        }
        Ok::<_, ScoreError>(m)
    })?;
    Ok(report(&parts, averaging, warnings))
}

/// Gold with its S and YA nodes removed.
fn empty_prediction(gold: &Nodeset) -> Nodeset {
    crate::pipeline::materialize(gold, &[], &[]).expect("stripping cannot introduce bad references")
}

/// The two-row results table.
pub fn render_table(report: &CorpusReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<6}{:^33}|{:^33}", "", "General", "Focused");
    let _ = writeln!(
        out,
        "{:<6}{:>11}{:>11}{:>11}|{:>11}{:>11}{:>11}",
        "", "precision", "recall", "f1", "precision", "recall", "f1"
    );
    for r in [&report.ari, &report.ilo] {
        let _ = writeln!(
            out,
            "{:<6}{:>11.4}{:>11.4}{:>11.4}|{:>11.4}{:>11.4}{:>11.4}",
            r.task, r.general.precision, r.general.recall, r.general.f1, r.focused.precision, r.focused.recall, r.focused.f1
        );
    }
    out
}
