use dialam::classifier::stub::{Reply, StubServer};
use dialam::classifier::Task;
use dialam::corpus::{load_corpus, write_nodeset};
use dialam::graph::validate;
use dialam::synth::{synthetic_corpus, SynthConfig};
use std::path::Path;
use std::process::{Command, Output};

fn dialam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dialam"))
        .args(args)
        .env_remove("DIALAM_ENDPOINT")
        .output()
        .expect("run dialam")
}

fn ok(args: &[&str]) -> String {
    let out = dialam(args);
    assert!(
        out.status.success(),
        "dialam {} failed:\n{}{}",
        args.join(" "),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn write_corpus(dir: &Path, n: usize) {
    std::fs::create_dir_all(dir).unwrap();
    for ns in synthetic_corpus(&SynthConfig {
        nodesets: n,
        ..Default::default()
    }) {
        write_nodeset(dir, &ns).unwrap();
    }
}

#[test]
fn full_workflow() {
    let work = tempfile::tempdir().unwrap();
    let w = |name: &str| s(&work.path().join(name));
    ok(&["synth", "--out", &w("corpus"), "--nodesets", "40"]);
    assert!(ok(&["validate", &w("corpus")]).contains("40 nodesets, 0 with problems"));

    ok(&["split", "--input", &w("corpus"), "--eval-frac", "0.25", "--seed", "3", "--out", &w("split.json")]);
    let split: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(w("split.json")).unwrap()).unwrap();
    assert_eq!(split["eval"].as_array().unwrap().len(), 10);
    assert_eq!(split["train"].as_array().unwrap().len(), 30);

    let stats = ok(&["stats", "--input", &w("corpus"), "--split", &w("split.json")]);
    assert!(stats.lines().any(|l| l.starts_with("train") && l.contains("30")), "{stats}");
    let json = ok(&["stats", "--input", &w("corpus"), "--json", "--rule", "per-node"]);
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed["all"]["nodesets"], 40);

    for stage in ["s1", "s2", "ya"] {
        let data = w(&format!("{stage}.jsonl"));
        ok(&["build", "--stage", stage, "--input", &w("corpus"), "--split", &w("split.json"), "--out", &data]);
        let first = std::fs::read_to_string(&data).unwrap();
        let record: serde_json::Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
        assert!(record["label"].is_string() && record["head"].is_string());
        let log = ok(&["train", "--stage", stage, "--data", &data, "--out", &w(&format!("{stage}.model")), "--dim", "4096"]);
        assert!(log.contains("epoch  10"), "{log}");
    }
    std::fs::write(
        w("pipeline.toml"),
        "existence_threshold = 0.5\n[backends.step1]\nmodel = \"s1.model\"\n[backends.step2]\nmodel = \"s2.model\"\n[backends.ya]\nmodel = \"ya.model\"\n",
    )
    .unwrap();
    ok(&["predict", "--config", &w("pipeline.toml"), "--input", &w("corpus"), "--out", &w("pred")]);
    let pred = load_corpus(&work.path().join("pred")).unwrap();
    assert_eq!(pred.len(), 40);
    assert!(pred.iter().all(|ns| validate(ns).is_empty()));

    let table = ok(&["score", "--gold", &w("corpus"), "--pred", &w("pred"), "--report", &w("report.json")]);
    assert!(table.contains("ARI") && table.contains("ILO"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(w("report.json")).unwrap()).unwrap();
    let f1 = report["ari"]["focused"]["f1"].as_f64().unwrap();
    assert!(f1 > 0.5, "trained on most of the corpus, scored on all of it: {f1}");
    assert_eq!(report["per_nodeset"].as_array().unwrap().len(), 40);
}

#[test]
fn validate_reports_problems() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), 2);
    std::fs::write(
        dir.path().join("nodeset7.json"),
        r#"{"nodes":[{"nodeID":"1","text":"x","type":"RA"}],"edges":[]}"#,
    )
    .unwrap();
    std::fs::write(dir.path().join("nodeset8.json"), "{ not json").unwrap();
    let out = dialam(&["validate", &s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("nodeset7\tV1"), "{stdout}");
    assert!(stdout.contains("nodeset8\tparse"), "{stdout}");
    assert!(stdout.contains("4 nodesets, 2 with problems"), "{stdout}");
}

#[test]
fn usage_and_domain_exit_codes() {
    assert_eq!(dialam(&[]).status.code(), Some(2));
    assert_eq!(dialam(&["--help"]).status.code(), Some(0));
    assert_eq!(dialam(&["split", "--input", "x", "--out", "y", "--eval-frac", "0.1", "--eval-list", "dialam78"]).status.code(), Some(2));
    assert_eq!(dialam(&["train", "--stage", "s1", "--data", "/nope.jsonl", "--out", "/tmp/x"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), 3);
    let out = dialam(&["split", "--input", &s(dir.path()), "--eval-list", "dialam78", "--out", "/tmp/never"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nodeset"));
    let out = dialam(&["backend-check"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DIALAM_ENDPOINT"));
}

#[test]
fn remote_backends_through_the_cli() {
    let server = StubServer::start(|task, n| {
        let k = task.num_labels();
        // Always "no relation" for stage 1 and "Asserting" for anchors.
        let row: Vec<f64> = (0..k)
            .map(|i| match task {
                Task::SStep1 | Task::SFour => (i == 0) as u8 as f64,
                Task::SStep2 => 1.0 / k as f64,
                Task::Ya => (i == 1) as u8 as f64,
            })
            .collect();
        Reply::scores(task, vec![row; n])
    });
    let out = ok(&["backend-check", "--endpoint", &server.url()]);
    assert!(out.contains("health: ok") && out.contains("ya: ok"), "{out}");

    let work = tempfile::tempdir().unwrap();
    write_corpus(&work.path().join("in"), 5);
    std::fs::write(
        work.path().join("remote.toml"),
        format!(
            "mode = \"four_label\"\n[backends.four_label]\nendpoint = \"{0}\"\n[backends.ya]\nendpoint = \"{0}\"\n",
            server.url()
        ),
    )
    .unwrap();
    let log = ok(&[
        "predict",
        "--config",
        &s(&work.path().join("remote.toml")),
        "--input",
        &s(&work.path().join("in")),
        "--out",
        &s(&work.path().join("out")),
    ]);
    assert!(log.contains("5 nodesets: 0 S-nodes"), "{log}");
    assert!(server.requests() >= 10);
    for ns in load_corpus(&work.path().join("out")).unwrap() {
        // TA anchors cannot be Asserting and fall back to another label.
        for a in ns.ya_anchorings().unwrap() {
            assert_eq!(a.label == "Asserting", a.anchor_kind == dialam::NodeKind::L, "{a:?}");
        }
    }

    let dead = dialam(&["backend-check", "--endpoint", "http://127.0.0.1:9"]);
    assert_eq!(dead.status.code(), Some(1));
}
