//! The `dialam` command line.
//!
//! Exit codes: 0 on success, 1 when the command ran into a problem with its
//! data (a bad nodeset, an unreachable backend, validation findings), 2 for
//! usage errors.

use crate::classifier::{save_model, FeatureConfig, Hyper, RemoteClassifier, Task};
use crate::corpus::{list_nodeset_files, load_corpus, read_nodeset, write_atomic, write_nodeset};
use crate::dataset::{
    corpus_stats, read_records, split_corpus, write_records, CorpusStats, CountingRule, EvalSpec, PairInstance, Split,
};
use crate::graph::{validate, Nodeset};
use crate::pipeline::{PipelineConfig, ENDPOINT_ENV};
use crate::presets::eval_preset;
use crate::scorer::{render_table, score_corpus, Averaging};
use crate::synth::{synthetic_corpus, SynthConfig};
use crate::workflow::{build_records, train_records, Stage};
use crate::classifier::PairClassifier;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "dialam", version, about = "Dialogical argument mining over IAT nodesets")]
struct Cli {
    /// Worker threads for per-nodeset work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every nodeset in a directory for structural violations.
    Validate { dir: PathBuf },
    /// Partition a corpus into train and eval ids.
    Split(SplitArgs),
    /// Count relations in a corpus, optionally per split.
    Stats(StatsArgs),
    /// Write training examples for one stage.
    Build(BuildArgs),
    /// Train a linear model on an example file.
    Train(TrainArgs),
    /// Run the two-stage pipeline over a directory of nodesets.
    Predict(PredictArgs),
    /// Score predicted nodesets against gold.
    Score(ScoreArgs),
    /// Probe a remote inference server.
    BackendCheck(BackendArgs),
    /// Write the synthetic marker corpus.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct EvalChoice {
    /// File with one eval nodeset id per line, or the preset `dialam78`.
    #[arg(long, conflicts_with = "eval_frac")]
    eval_list: Option<String>,
    /// Fraction of nodesets to sample for eval.
    #[arg(long)]
    eval_frac: Option<f64>,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    eval: EvalChoice,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rule {
    PairProduct,
    PerNode,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Split file written by `split`.
    #[arg(long, conflicts_with = "eval_list")]
    split: Option<PathBuf>,
    /// Eval id list or preset, as for `split`.
    #[arg(long)]
    eval_list: Option<String>,
    #[arg(long, value_enum, default_value_t = Rule::PairProduct)]
    rule: Rule,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[arg(long)]
    stage: Stage,
    #[arg(long)]
    input: PathBuf,
    /// Only use the train part of this split.
    #[arg(long)]
    split: Option<PathBuf>,
    #[arg(long, default_value_t = crate::dataset::DEFAULT_NEG_RATIO)]
    neg_ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    stage: Stage,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = Hyper::default().epochs)]
    epochs: usize,
    #[arg(long, default_value_t = Hyper::default().lr)]
    lr: f64,
    #[arg(long, default_value_t = Hyper::default().l2)]
    l2: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hashed feature dimension; a power of two.
    #[arg(long, default_value_t = FeatureConfig::default().dim)]
    dim: usize,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AveragingArg {
    Macro,
    Micro,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    report: PathBuf,
    #[arg(long, value_enum, default_value_t = AveragingArg::Macro)]
    averaging: AveragingArg,
}

#[derive(Debug, Args)]
struct BackendArgs {
    /// Server URL; defaults to the DIALAM_ENDPOINT environment variable.
    #[arg(long)]
    endpoint: Option<String>,
    /// Tasks to probe (default: s_step1, s_step2 and ya).
    #[arg(long, value_delimiter = ',')]
    tasks: Vec<String>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = SynthConfig::default().nodesets)]
    nodesets: usize,
    #[arg(long, default_value_t = SynthConfig::default().seed)]
    seed: u64,
}

/// A failure worth exit code 1, already phrased for the user.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return 2;
        }
        crate::par::set_jobs(j);
    }
    let result = match cli.command {
        Command::Validate { dir } => cmd_validate(&dir),
        Command::Split(a) => cmd_split(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Build(a) => cmd_build(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Score(a) => cmd_score(a),
        Command::BackendCheck(a) => cmd_backend_check(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn cmd_validate(dir: &Path) -> Outcome {
    let files = list_nodeset_files(dir)?;
    let reports = crate::par::map(&files, |(id, path)| match read_nodeset(id, path) {
        Ok(ns) => Ok(validate(&ns)),
        Err(e) => Err(e.to_string()),
    });
    let mut bad = 0usize;
    for ((id, _), r) in files.iter().zip(reports) {
        match r {
            Ok(v) if v.is_empty() => {}
            Ok(v) => {
                bad += 1;
                for x in v {
                    println!("{id}\t{:?}\t{}\t{}", x.code, x.node_or_edge_id, x.message);
                }
            }
            Err(e) => {
                bad += 1;
                println!("{id}\tparse\t-\t{e}");
            }
        }
    }
    println!("{} nodesets, {} with problems", files.len(), bad);
    if bad > 0 {
        return Err(Failure(format!("{bad} nodesets have problems")));
    }
    Ok(())
}

fn eval_list(spec: &str) -> Result<Vec<String>, Failure> {
    if let Some(ids) = eval_preset(spec) {
        return Ok(ids);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Failure(format!("{spec}: {e}")))?;
    Ok(text
        .lines()
        .map(|l| l.trim().trim_matches(|c| c == '\'' || c == '"' || c == ','))
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

fn corpus_ids(dir: &Path) -> Result<Vec<String>, Failure> {
    Ok(list_nodeset_files(dir)?.into_iter().map(|(id, _)| id).collect())
}

fn cmd_split(a: SplitArgs) -> Outcome {
    let ids = corpus_ids(&a.input)?;
    let spec = match (a.eval.eval_list, a.eval.eval_frac) {
        (Some(list), None) => EvalSpec::Explicit(eval_list(&list)?),
        (None, Some(fraction)) => EvalSpec::Fraction { fraction, seed: a.seed },
        _ => return Err(Failure("give one of --eval-list or --eval-frac".into())),
    };
    let split = split_corpus(&ids, &spec)?;
    let mut text = serde_json::to_string_pretty(&split)?;
    text.push('\n');
    write_atomic(&a.out, text.as_bytes())?;
    println!("train {} / eval {}", split.train.len(), split.eval.len());
    Ok(())
}

fn read_split(path: &Path) -> Result<Split, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn stats_line(name: &str, s: &CorpusStats) -> String {
    format!("{name:<6}{:>10}{:>8}{:>8}{:>8}{:>8}", s.nodesets, s.ra, s.ca, s.ma, s.ya)
}

fn cmd_stats(a: StatsArgs) -> Outcome {
    let rule = match a.rule {
        Rule::PairProduct => CountingRule::PairProduct,
        Rule::PerNode => CountingRule::PerNode,
    };
    let corpus = load_corpus(&a.input)?;
    let split = match (a.split, a.eval_list) {
        (Some(path), _) => Some(read_split(&path)?),
        (None, Some(list)) => {
            let ids: Vec<String> = corpus.iter().map(|n| n.id().to_string()).collect();
            Some(split_corpus(&ids, &EvalSpec::Explicit(eval_list(&list)?))?)
        }
        (None, None) => None,
    };
    let mut rows: Vec<(&str, CorpusStats)> = Vec::new();
    match &split {
        Some(s) => {
            let train: std::collections::HashSet<&str> = s.train.iter().map(String::as_str).collect();
            let eval: std::collections::HashSet<&str> = s.eval.iter().map(String::as_str).collect();
            rows.push(("train", corpus_stats(corpus.iter().filter(|n| train.contains(n.id())), rule)));
            rows.push(("eval", corpus_stats(corpus.iter().filter(|n| eval.contains(n.id())), rule)));
        }
        None => rows.push(("all", corpus_stats(&corpus, rule))),
    }
    if a.json {
        let map: std::collections::BTreeMap<&str, CorpusStats> = rows.into_iter().collect();
        println!("{}", serde_json::to_string_pretty(&map)?);
    } else {
        println!("{:<6}{:>10}{:>8}{:>8}{:>8}{:>8}", "split", "nodesets", "RA", "CA", "MA", "YA");
        for (name, s) in &rows {
            println!("{}", stats_line(name, s));
        }
    }
    Ok(())
}

fn load_selected(input: &Path, split: Option<&Path>) -> Result<Vec<Nodeset>, Failure> {
    let corpus = load_corpus(input)?;
    Ok(match split {
        Some(path) => {
            let s = read_split(path)?;
            let train: std::collections::HashSet<&str> = s.train.iter().map(String::as_str).collect();
            corpus.into_iter().filter(|n| train.contains(n.id())).collect()
        }
        None => corpus,
    })
}

fn cmd_build(a: BuildArgs) -> Outcome {
    if !(a.neg_ratio.is_finite() && a.neg_ratio >= 0.0) {
        return Err(Failure(format!("--neg-ratio {} must be finite and non-negative", a.neg_ratio)));
    }
    let corpus = load_selected(&a.input, a.split.as_deref())?;
    let (records, summary) =
        build_records(a.stage, &corpus, a.neg_ratio, a.seed).map_err(|(id, e)| Failure(format!("{id}: {e}")))?;
    let mut bytes = Vec::new();
    write_records(&mut bytes, &records)?;
    write_atomic(&a.out, &bytes)?;
    for (ns, ya, label) in &summary.skipped {
        eprintln!("warning: {ns}: skipped YA {ya} with label {label:?}");
    }
    if !summary.shortfalls.is_empty() {
        eprintln!(
            "warning: {} nodesets had fewer negatives than requested",
            summary.shortfalls.len()
        );
    }
    println!(
        "{}: {} examples from {} nodesets",
        a.stage, summary.examples, summary.nodesets
    );
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Outcome {
    if !a.dim.is_power_of_two() {
        return Err(Failure(format!("--dim {} is not a power of two", a.dim)));
    }
    let file = std::fs::File::open(&a.data).map_err(|e| Failure(format!("{}: {e}", a.data.display())))?;
    let records = read_records(std::io::BufReader::new(file)).map_err(|e| Failure(format!("{}: {e}", a.data.display())))?;
    let hyper = Hyper {
        epochs: a.epochs,
        lr: a.lr,
        l2: a.l2,
        seed: a.seed,
    };
    let (model, report) = train_records(a.stage, &records, FeatureConfig::with_dim(a.dim), hyper)?;
    save_model(&model, &a.out)?;
    for (e, l) in report.epoch_losses.iter().enumerate() {
        println!("epoch {:>3}  loss {l:.6}", e + 1);
    }
    println!("{}: {} examples, model written to {}", a.stage, records.len(), a.out.display());
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> Outcome {
    let pipeline = PipelineConfig::load(&a.config)?.build()?;
    let corpus = load_corpus(&a.input)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Failure(format!("{}: {e}", a.out.display())))?;
    let outputs = crate::par::try_map(&corpus, |ns| {
        let out = pipeline.run(ns).map_err(|e| Failure(format!("{}: {e}", ns.id())))?;
        write_nodeset(&a.out, &out.nodeset).map_err(Failure::from)?;
        Ok::<_, Failure>((out.s_predictions.len(), out.ya_predictions.len(), out.dropped))
    })?;
    let (s, ya, dropped) = outputs
        .iter()
        .fold((0, 0, 0), |acc, o| (acc.0 + o.0, acc.1 + o.1, acc.2 + o.2));
    println!(
        "{} nodesets: {s} S-nodes, {ya} YA-nodes, {dropped} YA decisions dropped",
        corpus.len()
    );
    Ok(())
}

fn cmd_score(a: ScoreArgs) -> Outcome {
    let averaging = match a.averaging {
        AveragingArg::Macro => Averaging::Macro,
        AveragingArg::Micro => Averaging::Micro,
    };
    let report = score_corpus(&a.gold, &a.pred, averaging)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_atomic(&a.report, text.as_bytes())?;
    print!("{}", render_table(&report));
    for w in report.ari.warnings.iter().chain(&report.ilo.warnings) {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn cmd_backend_check(a: BackendArgs) -> Outcome {
    let endpoint = match a.endpoint.or_else(|| std::env::var(ENDPOINT_ENV).ok()) {
        Some(e) => e,
        None => return Err(Failure(format!("no --endpoint given and {ENDPOINT_ENV} is not set"))),
    };
    let tasks: Vec<Task> = if a.tasks.is_empty() {
        vec![Task::SStep1, Task::SStep2, Task::Ya]
    } else {
        a.tasks.iter().map(|t| t.parse()).collect::<Result<_, _>>()?
    };
    RemoteClassifier::new(endpoint.clone(), Task::Ya).health()?;
    println!("health: ok");
    let probe = [
        PairInstance::plain("we should act now", "acting now helps"),
        PairInstance {
            head_text: "Default Transition".into(),
            head_context: "Speaker1 : why? || Speaker2 : because it helps".into(),
            tail_text: "Default Inference".into(),
            tail_context: "it helps || we should act".into(),
        },
    ];
    let mut failed = 0;
    for task in tasks {
        match RemoteClassifier::new(endpoint.clone(), task).classify(&probe) {
            Ok(rows) => println!("{task}: ok ({} rows over {} labels)", rows.len(), task.num_labels()),
            Err(e) => {
                failed += 1;
                println!("{task}: FAILED {e}");
            }
        }
    }
    if failed > 0 {
        return Err(Failure(format!("{failed} task probes failed")));
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Outcome {
    std::fs::create_dir_all(&a.out).map_err(|e| Failure(format!("{}: {e}", a.out.display())))?;
    let corpus = synthetic_corpus(&SynthConfig {
        nodesets: a.nodesets,
        seed: a.seed,
        ..Default::default()
    });
    crate::par::try_map(&corpus, |ns| write_nodeset(&a.out, ns))?;
    println!("{} nodesets written to {}", corpus.len(), a.out.display());
    Ok(())
}
