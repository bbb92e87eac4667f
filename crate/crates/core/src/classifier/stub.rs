//! In-process HTTP server speaking the inference wire protocol, for tests
//! and for checking a client setup without a real backend, plus a closure
//! backed classifier for driving the pipeline in-process.

use super::{ClassifierError, LabelDistribution, PairClassifier, Task};
use crate::dataset::PairInstance;
use serde::Deserialize;
use serde_json::{json, Value};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

#[derive(Debug, Clone, Deserialize)]
pub struct StubInstance {
    pub head: String,
    #[serde(default)]
    pub head_context: String,
    pub tail: String,
    #[serde(default)]
    pub tail_context: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StubRequest {
    pub task: String,
    pub instances: Vec<StubInstance>,
}

#[derive(Debug, Clone)]
pub struct Reply {
    pub status: u16,
    pub body: Value,
}

impl Reply {
    pub fn uniform(task: Task, n: usize) -> Reply {
        let k = task.num_labels();
        Reply::scores(task, vec![vec![1.0 / k as f64; k]; n])
    }

    pub fn scores(task: Task, rows: Vec<Vec<f64>>) -> Reply {
        Reply {
            status: 200,
            body: json!({
                "model_id": "stub",
                "labels": task.labels(),
                "predictions": rows.into_iter().map(|s| json!({"scores": s})).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn with_labels(mut self, labels: Vec<&str>) -> Reply {
        self.body["labels"] = json!(labels);
        self
    }

    pub fn error(status: u16, message: &str) -> Reply {
        Reply {
            status,
            body: json!({ "error": message }),
        }
    }
}

type Handler = dyn Fn(&StubRequest) -> Reply + Send + Sync;

pub struct StubServer {
    addr: String,
    requests: Arc<AtomicUsize>,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl StubServer {
    /// Serves `handler(task, batch_len)` for every well-formed request.
    /// Unknown task names get a 400 error body.
    pub fn start<F>(handler: F) -> StubServer
    where
        F: Fn(Task, usize) -> Reply + Send + Sync + 'static,
    {
        StubServer::start_with(move |req| match req.task.parse::<Task>() {
            Ok(task) => handler(task, req.instances.len()),
            Err(_) => Reply::error(400, &format!("unknown task {:?}", req.task)),
        })
    }

    pub fn start_with<F>(handler: F) -> StubServer
    where
        F: Fn(&StubRequest) -> Reply + Send + Sync + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
        let addr = listener.local_addr().unwrap().to_string();
        let requests = Arc::new(AtomicUsize::new(0));
        let stop = Arc::new(AtomicBool::new(false));
        let handler: Arc<Handler> = Arc::new(handler);
        let thread = {
            let requests = requests.clone();
            let stop = stop.clone();
            std::thread::spawn(move || {
                for stream in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    if let Ok(stream) = stream {
                        let _ = serve(stream, &*handler, &requests);
                    }
                }
            })
        };
        StubServer {
            addr,
            requests,
            stop,
            thread: Some(thread),
        }
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Number of classify requests handled so far.
    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(&self.addr);
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

fn serve(stream: TcpStream, handler: &Handler, requests: &AtomicUsize) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    if reader.read_line(&mut request_line)? == 0 {
        return Ok(());
    }
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            if name.eq_ignore_ascii_case("content-length") {
                content_length = value.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;

    let mut parts = request_line.split_whitespace();
    let method = parts.next().unwrap_or("");
    let path = parts.next().unwrap_or("");
    let reply = match (method, path) {
        ("GET", "/v1/health") => Reply {
            status: 200,
            body: json!({"status": "ok"}),
        },
        ("POST", "/v1/classify") => {
            requests.fetch_add(1, Ordering::SeqCst);
            match serde_json::from_slice::<StubRequest>(&body) {
                Ok(req) => handler(&req),
                Err(e) => Reply::error(400, &e.to_string()),
            }
        }
        _ => Reply::error(404, "not found"),
    };
    let text = reply.body.to_string();
    let mut out = stream;
    write!(
        out,
        "HTTP/1.1 {} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        reply.status,
        text.len(),
        text
    )?;
    out.flush()
}

type ScoreFn = dyn Fn(&PairInstance) -> Vec<f64> + Send + Sync;

/// In-process backend whose scores come from a closure. Rows are normalized
/// before they are returned.
pub struct FnClassifier {
    task: Task,
    score: Box<ScoreFn>,
}

impl FnClassifier {
    pub fn new<F>(task: Task, score: F) -> Self
    where
        F: Fn(&PairInstance) -> Vec<f64> + Send + Sync + 'static,
    {
        FnClassifier {
            task,
            score: Box::new(score),
        }
    }

    /// Always puts all mass on one label.
    pub fn constant(task: Task, label: usize) -> Self {
        let k = task.num_labels();
        FnClassifier::new(task, move |_| {
            let mut s = vec![0.0; k];
            s[label] = 1.0;
            s
        })
    }
}

impl PairClassifier for FnClassifier {
    fn task(&self) -> Task {
        self.task
    }

    fn classify(&self, instances: &[PairInstance]) -> Result<Vec<LabelDistribution>, ClassifierError> {
        instances
            .iter()
            .map(|inst| {
                let raw = (self.score)(inst);
                let sum: f64 = raw.iter().sum();
                if raw.len() != self.task.num_labels() || sum.is_nan() || sum <= 0.0 {
                    return Err(ClassifierError::BackendError(format!(
                        "scripted scores {raw:?} are not a distribution"
                    )));
                }
                Ok(LabelDistribution {
                    scores: raw.into_iter().map(|s| s / sum).collect(),
                })
            })
            .collect()
    }
}
