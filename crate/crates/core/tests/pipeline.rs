use dialam::classifier::stub::{FnClassifier, Reply, StubServer};
use dialam::classifier::{
    FeatureConfig, Hyper, LinearModel, PairClassifier, RemoteClassifier, Task, MAX_BATCH,
};
use dialam::dataset::PairInstance;
use dialam::graph::{parse_nodeset, serialize_nodeset, validate};
use dialam::pipeline::{run_pipeline, Backend, Pipeline, PipelineError, Stage1};
use dialam::synth::{synthetic_corpus, SynthConfig};
use dialam::workflow::{build_records, train_records, Stage};
use dialam::{NodeKind, Nodeset};
use std::sync::Arc;

const DIALOGUE: &str = r#"{
  "nodes": [
    {"nodeID": "1", "text": "Bob : we should leave now", "type": "L"},
    {"nodeID": "2", "text": "Ann : why", "type": "L"},
    {"nodeID": "3", "text": "Bob : because the train goes at six", "type": "L"},
    {"nodeID": "4", "text": "Default Transition", "type": "TA"},
    {"nodeID": "5", "text": "Default Transition", "type": "TA"},
    {"nodeID": "6", "text": "we should leave now", "type": "I"},
    {"nodeID": "7", "text": "the train goes at six", "type": "I"}
  ],
  "edges": [
    {"edgeID": "8", "fromID": "1", "toID": "4"},
    {"edgeID": "9", "fromID": "4", "toID": "2"},
    {"edgeID": "10", "fromID": "2", "toID": "5"},
    {"edgeID": "11", "fromID": "5", "toID": "3"}
  ],
  "locutions": []
}"#;

/// Scripted backends: "because" in the head marks an inference, TA anchors
/// on relations are Arguing, L anchors are Asserting.
fn scripted() -> Pipeline {
    let existence = FnClassifier::new(Task::SStep1, |i: &PairInstance| {
        if i.head_text.contains("train") {
            vec![0.1, 0.9]
        } else {
            vec![0.8, 0.2]
        }
    });
    let typing = FnClassifier::new(Task::SStep2, |_: &PairInstance| vec![0.7, 0.2, 0.1]);
    let ya = FnClassifier::new(Task::Ya, |i: &PairInstance| {
        let mut row = vec![0.0; 11];
        if i.tail_text == "Default Inference" {
            row[6] = 1.0;
        } else if i.head_text.starts_with("Bob") && i.tail_context.is_empty() {
            row[1] = 1.0;
        } else {
            row[0] = 1.0;
        }
        row
    });
    Pipeline::new(
        Stage1::TwoStep {
            existence: Arc::new(existence),
            typing: Arc::new(typing),
        },
        Arc::new(ya),
    )
    .unwrap()
}

#[test]
fn golden_dialogue() {
    let input = parse_nodeset("nodeset42", DIALOGUE).unwrap();
    assert!(validate(&input).is_empty());
    let out = run_pipeline(&input, &scripted()).unwrap();
    let ns = &out.nodeset;
    assert!(validate(ns).is_empty(), "{:?}", validate(ns));

    let ra: Vec<_> = ns.nodes().iter().filter(|n| n.kind == NodeKind::RA).collect();
    assert_eq!(ra.len(), 1);
    assert_eq!(ra[0].text, "Default Inference");
    assert_eq!(ns.predecessors(&ra[0].id)[0].id, "7");
    assert_eq!(ns.successors(&ra[0].id)[0].id, "6");

    let mut anchors: Vec<(String, String, String)> = ns
        .ya_anchorings()
        .unwrap()
        .into_iter()
        .map(|a| (a.anchor_id, a.target_id, a.label))
        .collect();
    anchors.sort();
    let arguing: Vec<_> = anchors.iter().filter(|a| a.2 == "Arguing").collect();
    assert_eq!(arguing.len(), 2, "both transitions anchor the inference: {anchors:?}");
    assert!(arguing.iter().all(|a| a.1 == ra[0].id));
    assert!(anchors.iter().filter(|a| a.2 == "Asserting").all(|a| a.0 == "1" || a.0 == "3"));

    let text = serialize_nodeset(ns);
    let again = parse_nodeset("nodeset42", &text).unwrap();
    assert_eq!(&again, ns);
    assert_eq!(serialize_nodeset(&run_pipeline(&input, &scripted()).unwrap().nodeset), text);
}

fn trained(corpus: &[Nodeset], stage: Stage) -> LinearModel {
    let (records, _) = build_records(stage, corpus, 1.0, 5).unwrap();
    train_records(stage, &records, FeatureConfig::with_dim(1 << 12), Hyper::default()).unwrap().0
}

/// A stub server answering with a local model's distributions, so the
/// remote route can be compared with the in-process one.
fn serve_models(models: Vec<Arc<LinearModel>>) -> StubServer {
    StubServer::start_with(move |req| {
        let task: Task = req.task.parse().unwrap();
        let model = models.iter().find(|m| m.task == task).unwrap();
        let instances: Vec<PairInstance> = req
            .instances
            .iter()
            .map(|i| PairInstance {
                head_text: i.head.clone(),
                head_context: i.head_context.clone(),
                tail_text: i.tail.clone(),
                tail_context: i.tail_context.clone(),
            })
            .collect();
        assert!(instances.len() <= MAX_BATCH);
        let rows = model.classify(&instances).unwrap().into_iter().map(|d| d.scores).collect();
        Reply::scores(task, rows)
    })
}

#[test]
fn remote_route_matches_in_process() {
    let corpus = synthetic_corpus(&SynthConfig {
        nodesets: 30,
        ..Default::default()
    });
    let s1 = Arc::new(trained(&corpus, Stage::S1));
    let s2 = Arc::new(trained(&corpus, Stage::S2));
    let ya = Arc::new(trained(&corpus, Stage::Ya));
    let local = Pipeline::new(
        Stage1::TwoStep {
            existence: s1.clone(),
            typing: s2.clone(),
        },
        ya.clone(),
    )
    .unwrap();
    let server = serve_models(vec![s1, s2, ya]);
    let remote = |task| -> Backend { Arc::new(RemoteClassifier::new(server.url(), task)) };
    let over_wire = Pipeline::new(
        Stage1::TwoStep {
            existence: remote(Task::SStep1),
            typing: remote(Task::SStep2),
        },
        remote(Task::Ya),
    )
    .unwrap();

    // Merge a few nodesets so one stage needs more than one batch.
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (k, ns) in corpus.iter().take(4).enumerate() {
        let tag = |id: &str| format!("{k}_{id}");
        nodes.extend(ns.nodes().iter().map(|n| dialam::Node::new(tag(&n.id), n.kind, n.text.clone())));
        edges.extend(ns.edges().iter().map(|e| dialam::Edge::new(tag(&e.id), tag(&e.from), tag(&e.to))));
    }
    let big = Nodeset::new("nodeset9000", nodes, edges).unwrap();
    assert!(big.count_kind(NodeKind::I) * (big.count_kind(NodeKind::I) - 1) > MAX_BATCH);

    for ns in corpus.iter().take(5).chain(std::iter::once(&big)) {
        let a = run_pipeline(ns, &local).unwrap();
        let b = run_pipeline(ns, &over_wire).unwrap();
        // Scores pass through JSON and are renormalized by the client, so
        // they agree to rounding; every decision must be identical.
        assert_eq!(a.nodeset, b.nodeset, "{}", ns.id());
        assert_eq!(a.s_predictions.len(), b.s_predictions.len());
        for (x, y) in a.s_predictions.iter().zip(&b.s_predictions) {
            assert_eq!((&x.head, x.kind, &x.tail), (&y.head, y.kind, &y.tail));
            assert!((x.existence - y.existence).abs() < 1e-12 && (x.type_score - y.type_score).abs() < 1e-12);
        }
        assert_eq!(a.ya_predictions.len(), b.ya_predictions.len());
        for (x, y) in a.ya_predictions.iter().zip(&b.ya_predictions) {
            assert_eq!((&x.anchor, &x.target, x.label), (&y.anchor, &y.target, y.label));
            assert!((x.score - y.score).abs() < 1e-12);
        }
    }
    assert!(server.requests() > 18);
}

#[test]
fn remote_errors_name_the_stage() {
    let server = StubServer::start(|task, n| match task {
        Task::Ya => Reply::error(503, "warming up"),
        _ => Reply::scores(task, vec![vec![0.0, 1.0]; n]).with_labels(vec!["false", "true"]),
    });
    let remote = |task| -> Backend { Arc::new(RemoteClassifier::new(server.url(), task)) };
    let p = Pipeline::new(
        Stage1::TwoStep {
            existence: remote(Task::SStep1),
            typing: Arc::new(FnClassifier::constant(Task::SStep2, 0)),
        },
        remote(Task::Ya),
    )
    .unwrap();
    let input = parse_nodeset("nodeset42", DIALOGUE).unwrap();
    match run_pipeline(&input, &p) {
        Err(PipelineError::Backend { stage, source }) => {
            assert_eq!(stage, "stage 2");
            assert!(source.to_string().contains("warming up"), "{source}");
        }
        other => panic!("expected a stage 2 backend error, got {other:?}"),
    }
}
