use super::DatasetError;
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// How the evaluation part of a corpus is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalSpec {
    /// Exactly these ids, in this order.
    Explicit(Vec<String>),
    /// A seeded uniform sample of `round(fraction * n)` ids.
    Fraction { fraction: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<String>,
    pub eval: Vec<String>,
}

impl Split {
    pub fn contains_eval(&self, id: &str) -> bool {
        self.eval.iter().any(|e| e == id)
    }
}

/// Partitions `ids` into train and eval. Train keeps the input order.
pub fn split_corpus(ids: &[String], spec: &EvalSpec) -> Result<Split, DatasetError> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(DatasetError::DuplicateId(id.clone()));
        }
    }
    let eval: Vec<String> = match spec {
        EvalSpec::Explicit(list) => {
            let mut listed = HashSet::new();
            for id in list {
                if !seen.contains(id.as_str()) {
                    return Err(DatasetError::UnknownEvalId(id.clone()));
                }
                if !listed.insert(id.as_str()) {
                    return Err(DatasetError::DuplicateId(id.clone()));
                }
            }
            list.clone()
        }
        EvalSpec::Fraction { fraction, seed } => {
            if !(*fraction > 0.0 && *fraction < 1.0) {
                return Err(DatasetError::BadFraction(*fraction));
            }
            let k = (fraction * ids.len() as f64).round() as usize;
            SplitMix64::new(*seed)
                .sample_indices(ids.len(), k)
                .into_iter()
                .map(|i| ids[i].clone())
                .collect()
        }
    };
    let eval_set: HashSet<&str> = eval.iter().map(String::as_str).collect();
    let train = ids
        .iter()
        .filter(|id| !eval_set.contains(id.as_str()))
        .cloned()
        .collect();
    Ok(Split { train, eval })
}
