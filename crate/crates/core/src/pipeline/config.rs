//! Pipeline configuration file.
//!
//! ```toml
//! mode = "two_step"            # or "four_label"
//! existence_threshold = 0.5
//! window = 6                   # optional
//!
//! [backends.step1]
//! model = "models/s1.dlam"     # relative to this file
//!
//! [backends.step2]
//! endpoint = "http://127.0.0.1:8080"
//!
//! [backends.ya]
//! model = "models/ya.dlam"
//! ```
//!
//! In `four_label` mode the stage-1 backend is `[backends.four_label]`. A
//! backend section that is absent falls back to the endpoint in
//! `DIALAM_ENDPOINT`, when that variable is set.

use super::{Backend, Pipeline, PipelineError, Stage1, DEFAULT_EXISTENCE_THRESHOLD};
use crate::classifier::{load_model, RemoteClassifier, Task};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const ENDPOINT_ENV: &str = "DIALAM_ENDPOINT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StageMode {
    #[default]
    TwoStep,
    FourLabel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendRef {
    Model(PathBuf),
    Remote(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBackend {
    model: Option<PathBuf>,
    endpoint: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    mode: StageMode,
    existence_threshold: Option<f64>,
    window: Option<usize>,
    #[serde(default)]
    backends: BTreeMap<String, RawBackend>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub mode: StageMode,
    pub existence_threshold: f64,
    pub window: Option<usize>,
    /// Keyed by `step1`, `step2`, `four_label` and `ya`.
    pub backends: BTreeMap<String, BackendRef>,
}

const SECTIONS: [&str; 4] = ["step1", "step2", "four_label", "ya"];

impl PipelineConfig {
    /// Parses a config; relative model paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path, default_endpoint: Option<&str>) -> Result<Self, PipelineError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        let mut backends = BTreeMap::new();
        for (name, b) in raw.backends {
            if !SECTIONS.contains(&name.as_str()) {
                return Err(PipelineError::Config(format!("unknown backend section {name:?}")));
            }
            let r = match (b.model, b.endpoint) {
                (Some(p), None) => BackendRef::Model(if p.is_absolute() { p } else { base.join(p) }),
                (None, Some(url)) => BackendRef::Remote(url),
                _ => {
                    return Err(PipelineError::Config(format!(
                        "backend {name:?} needs exactly one of model or endpoint"
                    )))
                }
            };
            backends.insert(name, r);
        }
        let needed: &[&str] = match raw.mode {
            StageMode::TwoStep => &["step1", "step2", "ya"],
            StageMode::FourLabel => &["four_label", "ya"],
        };
        for name in needed {
            if !backends.contains_key(*name) {
                match default_endpoint {
                    Some(url) => {
                        backends.insert(name.to_string(), BackendRef::Remote(url.to_string()));
                    }
                    None => {
                        return Err(PipelineError::Config(format!(
                            "missing [backends.{name}] and {ENDPOINT_ENV} is not set"
                        )))
                    }
                }
            }
        }
        let existence_threshold = raw.existence_threshold.unwrap_or(DEFAULT_EXISTENCE_THRESHOLD);
        if !(existence_threshold > 0.0 && existence_threshold < 1.0) {
            return Err(PipelineError::Config(format!(
                "existence threshold {existence_threshold} outside (0, 1)"
            )));
        }
        Ok(PipelineConfig {
            mode: raw.mode,
            existence_threshold,
            window: raw.window,
            backends,
        })
    }

    /// Reads a config file, taking the default endpoint from the environment.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let env = std::env::var(ENDPOINT_ENV).ok();
        PipelineConfig::parse(&text, base, env.as_deref())
    }

    fn backend(&self, name: &str, task: Task) -> Result<Backend, PipelineError> {
        match &self.backends[name] {
            BackendRef::Model(path) => {
                let model = load_model(path).map_err(|source| PipelineError::Model {
                    path: path.display().to_string(),
                    source,
                })?;
                Ok(Arc::new(model))
            }
            BackendRef::Remote(url) => Ok(Arc::new(RemoteClassifier::new(url.clone(), task))),
        }
    }

    /// Loads or connects every backend and checks each serves its task.
    pub fn build(&self) -> Result<Pipeline, PipelineError> {
        let stage1 = match self.mode {
            StageMode::TwoStep => Stage1::TwoStep {
                existence: self.backend("step1", Task::SStep1)?,
                typing: self.backend("step2", Task::SStep2)?,
            },
            StageMode::FourLabel => Stage1::FourLabel(self.backend("four_label", Task::SFour)?),
        };
        Ok(Pipeline::new(stage1, self.backend("ya", Task::Ya)?)?
            .with_threshold(self.existence_threshold)?
            .with_window(self.window))
    }
}
