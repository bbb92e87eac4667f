use super::{ClassifierError, LabelDistribution, PairClassifier, Task};
use crate::dataset::PairInstance;
use serde::{Deserialize, Serialize};
use std::time::Duration;

/// Largest number of instances sent in one request.
pub const MAX_BATCH: usize = 256;

/// Client for an inference server implementing `POST /v1/classify` and
/// `GET /v1/health`. Plain HTTP only.
#[derive(Debug, Clone)]
pub struct RemoteClassifier {
    endpoint: String,
    task: Task,
    agent: ureq::Agent,
}

#[derive(Serialize)]
struct WireInstance<'a> {
    head: &'a str,
    head_context: &'a str,
    tail: &'a str,
    tail_context: &'a str,
}

#[derive(Serialize)]
struct ClassifyRequest<'a> {
    task: &'a str,
    instances: Vec<WireInstance<'a>>,
}

#[derive(Deserialize)]
struct ClassifyResponse {
    #[allow(dead_code)]
    model_id: String,
    labels: Vec<String>,
    predictions: Vec<WirePrediction>,
}

#[derive(Deserialize)]
struct WirePrediction {
    scores: Vec<f64>,
}

#[derive(Deserialize)]
struct ErrorBody {
    error: String,
}

#[derive(Deserialize)]
struct HealthBody {
    status: String,
}

impl RemoteClassifier {
    pub fn new(endpoint: impl Into<String>, task: Task) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(300)))
            .build()
            .into();
        RemoteClassifier {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            task,
            agent,
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// `GET /v1/health`; succeeds only on `{"status": "ok"}`.
    pub fn health(&self) -> Result<(), ClassifierError> {
        let url = format!("{}/v1/health", self.endpoint);
        let mut resp = self
            .agent
            .get(&url)
            .call()
            .map_err(|e| ClassifierError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| ClassifierError::Transport(e.to_string()))?;
        if status != 200 {
            return Err(ClassifierError::BackendError(format!("health returned HTTP {status}: {text}")));
        }
        let body: HealthBody = serde_json::from_str(&text)
            .map_err(|e| ClassifierError::ProtocolViolation(format!("health body: {e}")))?;
        if body.status != "ok" {
            return Err(ClassifierError::BackendError(format!("health status {:?}", body.status)));
        }
        Ok(())
    }

    fn classify_batch(&self, batch: &[PairInstance]) -> Result<Vec<LabelDistribution>, ClassifierError> {
        let request = ClassifyRequest {
            task: self.task.name(),
            instances: batch
                .iter()
                .map(|i| WireInstance {
                    head: &i.head_text,
                    head_context: &i.head_context,
                    tail: &i.tail_text,
                    tail_context: &i.tail_context,
                })
                .collect(),
        };
        let url = format!("{}/v1/classify", self.endpoint);
        let mut resp = self
            .agent
            .post(&url)
            .send_json(&request)
            .map_err(|e| ClassifierError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| ClassifierError::Transport(e.to_string()))?;
        if status != 200 {
            let message = serde_json::from_str::<ErrorBody>(&text)
                .map(|b| b.error)
                .map_err(|_| {
                    ClassifierError::ProtocolViolation(format!("HTTP {status} without an error body"))
                })?;
            return Err(ClassifierError::BackendError(message));
        }
        let body: ClassifyResponse = serde_json::from_str(&text)
            .map_err(|e| ClassifierError::ProtocolViolation(format!("response body: {e}")))?;
        validate_response(self.task, batch.len(), body)
    }
}

fn validate_response(
    task: Task,
    expected: usize,
    body: ClassifyResponse,
) -> Result<Vec<LabelDistribution>, ClassifierError> {
    if body.labels.iter().map(String::as_str).ne(task.labels().iter().copied()) {
        return Err(ClassifierError::ProtocolViolation(format!(
            "labels {:?} do not match the {task} vocabulary {:?}",
            body.labels,
            task.labels()
        )));
    }
    if body.predictions.len() != expected {
        return Err(ClassifierError::ProtocolViolation(format!(
            "{} predictions for {expected} instances",
            body.predictions.len()
        )));
    }
    body.predictions
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let ok_values = p.scores.iter().all(|s| s.is_finite() && *s >= 0.0);
            let sum: f64 = p.scores.iter().sum();
            if p.scores.len() != task.num_labels() || !ok_values || (sum - 1.0).abs() > 1e-6 {
                return Err(ClassifierError::ProtocolViolation(format!(
                    "prediction {i} is not a distribution over {} labels",
                    task.num_labels()
                )));
            }
            Ok(LabelDistribution {
                scores: p.scores.into_iter().map(|s| s / sum).collect(),
            })
        })
        .collect()
}

impl PairClassifier for RemoteClassifier {
    fn task(&self) -> Task {
        self.task
    }

    fn classify(&self, instances: &[PairInstance]) -> Result<Vec<LabelDistribution>, ClassifierError> {
        let mut out = Vec::with_capacity(instances.len());
        for batch in instances.chunks(MAX_BATCH) {
            out.extend(self.classify_batch(batch)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::stub::{Reply, StubServer};

    fn instances(n: usize) -> Vec<PairInstance> {
        (0..n).map(|i| PairInstance::plain(format!("h{i}"), "t")).collect()
    }

    #[test]
    fn uniform_stub() {
        let server = StubServer::start(Reply::uniform);
        let client = RemoteClassifier::new(server.url(), Task::SStep2);
        client.health().unwrap();
        let out = client.classify(&instances(5)).unwrap();
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|d| d.scores.iter().all(|s| (s - 1.0 / 3.0).abs() < 1e-12)));
    }

    #[test]
    fn batching_keeps_order() {
        // Score the position within the batch so order mistakes show up.
        let server = StubServer::start_with(|req| {
            let preds = req
                .instances
                .iter()
                .map(|i| {
                    let idx: f64 = i.head[1..].parse().unwrap();
                    let p = (idx + 1.0) / 1000.0;
                    vec![1.0 - p, p]
                })
                .collect();
            Reply::scores(Task::SStep1, preds)
        });
        let client = RemoteClassifier::new(server.url(), Task::SStep1);
        let out = client.classify(&instances(600)).unwrap();
        assert_eq!(server.requests(), 3);
        for (i, d) in out.iter().enumerate() {
            assert!((d.scores[1] - (i as f64 + 1.0) / 1000.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_labels() {
        let server = StubServer::start(|_, n| Reply::uniform(Task::SStep2, n).with_labels(vec!["RA", "CA"]));
        let client = RemoteClassifier::new(server.url(), Task::Ya);
        assert!(matches!(
            client.classify(&instances(2)),
            Err(ClassifierError::ProtocolViolation(_))
        ));
    }

    #[test]
    fn backend_error_and_transport() {
        let server = StubServer::start(|_, _| Reply::error(500, "model not loaded"));
        let client = RemoteClassifier::new(server.url(), Task::Ya);
        match client.classify(&instances(1)) {
            Err(ClassifierError::BackendError(m)) => assert_eq!(m, "model not loaded"),
            other => panic!("{other:?}"),
        }
        let dead = RemoteClassifier::new("http://127.0.0.1:1", Task::Ya);
        assert!(matches!(dead.classify(&instances(1)), Err(ClassifierError::Transport(_))));
    }
}
