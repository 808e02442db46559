//! The `milpgen` command line: dataset generation, solving, agent runs,
//! scoring, audits and fine-tuning export.

mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use milpgen::agent::{
    run_pipeline, AgentConfig, BridgeExecutor, ExecStatus, Executor, ExecutorResult, LanguageTag, OracleExecutor,
    WorkflowTrace,
};
use milpgen::eval::{audit, choose_epsilon, evaluate, is_correct, DatasetEntry, EvalRecord, Verdict};
use milpgen::generate::{generate, write_outputs, GenerateConfig};
use milpgen::model::text::from_text;
use milpgen::solve::{solve_milp, SolveOutcome, SolverConfig};
use milpgen::teacher::{open_backend, Backend, BackendSpec, ReplayBackend, Teacher};
use milpgen::trajectory::{assemble, export_sft};

pub use config::{ExecutorSpec, GenerateSection, RunConfig, SolverSettings};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable inputs or config: exit code 2.
    Usage(String),
    /// The command ran and the answer is a failure: exit code 1.
    Domain(String),
}


impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "milpgen", version, about = "Verifiable MILP datasets and NL-to-model agent runs")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Root seed for everything random.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML run configuration; flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads, default all cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample, solve and describe instances; write them with a labels manifest.
    Generate {
        /// Instances per class as `class=count`, repeatable. Replaces the
        /// configured counts.
        #[arg(long = "count", value_parser = parse_count)]
        counts: Vec<(milpgen::classes::ClassId, usize)>,
    },
    /// Solve one instance file and print the outcome.
    Solve { path: PathBuf },
    /// Run the agent over a dataset and write one trace per instance.
    RunAgent {
        #[arg(long)]
        dataset: PathBuf,
        /// Replay this transcript instead of the configured backend.
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// `oracle` or `bridge`.
        #[arg(long)]
        executor: Option<String>,
        /// Runner command for the bridge executor, split on whitespace.
        #[arg(long)]
        runner: Option<String>,
        #[arg(long)]
        max_debug: Option<usize>,
    },
    /// Score agent traces against labels.
    Evaluate {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
    /// Re-solve a labelled dataset and report labels that disagree.
    Audit {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Turn matching traces into fine-tuning records.
    ExportSft {
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
}

fn parse_count(s: &str) -> Result<(milpgen::classes::ClassId, usize), String> {
    let (class, n) = s.split_once('=').ok_or("expected class=count")?;
    Ok((class.parse().map_err(|e| format!("{e}"))?, n.parse().map_err(|e| format!("{e}"))?))
}

/// Settings after applying flags over the config file over defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub out_given: bool,
    pub config: RunConfig,
    pub solver: SolverConfig,
}

pub fn resolve(common: &Common) -> Result<Resolved, CliError> {
    let config = RunConfig::load(common.config.as_deref())?;
    let workers = common
        .workers
        .or(config.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let out_given = common.out.is_some() || config.out.is_some();
    Ok(Resolved {
        seed: common.seed.or(config.seed).unwrap_or(0),
        workers,
        out: common.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
        out_given,
        solver: config.solver.solver(),
        config,
    })
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli, stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let r = resolve(&cli.common)?;
    match &cli.command {
        Command::Generate { counts } => cmd_generate(&r, counts, out),
        Command::Solve { path } => cmd_solve(&r, path, out),
        Command::RunAgent { dataset, transcript, executor, runner, max_debug } => {
            cmd_run_agent(&r, dataset, transcript.as_deref(), executor.as_deref(), runner.as_deref(), *max_debug, out)
        }
        Command::Evaluate { traces, labels } => cmd_evaluate(&r, traces, labels, out),
        Command::Audit { dataset } => cmd_audit(&r, dataset, out),
        Command::ExportSft { traces, labels } => cmd_export_sft(&r, traces, labels, out),
    }
}

fn say(out: &mut dyn Write, text: impl std::fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(domain)
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    read_input(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), i + 1))))
        .collect()
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| domain(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| domain(format!("{}: {e}", path.display())))
}

pub fn cmd_generate(
    r: &Resolved,
    counts: &[(milpgen::classes::ClassId, usize)],
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let section = &r.config.generate;
    let counts = if counts.is_empty() { section.counts.clone() } else { counts.iter().copied().collect() };
    let cfg = GenerateConfig {
        seed: r.seed,
        counts,
        sizes: section.sizes.clone(),
        sampler: section.sampler.clone(),
        workers: r.workers,
    };
    let items = generate(&cfg, &r.solver).map_err(domain)?;
    write_outputs(&items, &r.out).map_err(domain)?;
    say(out, format!("wrote {} instances to {}", items.len(), r.out.display()))
}

pub fn cmd_solve(r: &Resolved, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let problem = from_text(&read_input(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    match solve_milp(&problem, &r.solver).map_err(domain)? {
        SolveOutcome::Optimal { value, point, stats } => {
            say(out, format!("Optimal value: {value}"))?;
            for (v, x) in problem.variables.iter().zip(&point.values) {
                say(out, format!("{} = {x}", v.name))?;
            }
            log::info!("{} nodes, {} pivots", stats.nodes, stats.pivots);
            Ok(())
        }
        other => {
            say(out, other.status())?;
            Err(CliError::Domain(format!("{} is {}", path.display(), other.status())))
        }
    }
}

/// Executor for instances that cannot be run at all.
struct Unavailable(String);

impl Executor for Unavailable {
    fn run(&self, _: LanguageTag, _: &str, _: Duration) -> ExecutorResult {
        ExecutorResult::failed(ExecStatus::RuntimeError, self.0.clone())
    }
}

pub fn cmd_run_agent(
    r: &Resolved,
    dataset: &Path,
    transcript: Option<&Path>,
    executor: Option<&str>,
    runner: Option<&str>,
    max_debug: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let entries: Vec<DatasetEntry> = read_jsonl(dataset)?;
    let spec = match (transcript, &r.config.backend) {
        (Some(t), _) => BackendSpec::Replay { transcript: t.to_path_buf() },
        (None, Some(s)) => s.clone(),
        (None, None) => return Err(CliError::Usage("no backend: pass --transcript or configure [backend]".into())),
    };
    let replay = match &spec {
        BackendSpec::Replay { transcript } => {
            Some(Arc::new(ReplayBackend::from_path(transcript).map_err(|e| CliError::Usage(e.to_string()))?))
        }
        BackendSpec::Live { .. } => None,
    };
    let backend: Arc<dyn Backend> = match &replay {
        Some(b) => b.clone(),
        None => Arc::from(open_backend(&spec).map_err(|e| CliError::Usage(e.to_string()))?),
    };
    let teacher = Teacher::new(backend);
    let exec_spec = match (executor, runner) {
        (Some("oracle"), _) => ExecutorSpec::Oracle,
        (Some("bridge"), Some(cmd)) => ExecutorSpec::Bridge { command: cmd.split_whitespace().map(String::from).collect() },
        (Some("bridge"), None) => match &r.config.executor {
            Some(s @ ExecutorSpec::Bridge { .. }) => s.clone(),
            _ => return Err(CliError::Usage("--executor bridge needs --runner".into())),
        },
        (Some(other), _) => return Err(CliError::Usage(format!("unknown executor `{other}`"))),
        (None, _) => r.config.executor.clone().unwrap_or(ExecutorSpec::Oracle),
    };
    let bridge = match &exec_spec {
        ExecutorSpec::Bridge { command } => {
            let (program, args) = command.split_first().ok_or_else(|| CliError::Usage("empty runner command".into()))?;
            Some(BridgeExecutor::spawn(program, args).map_err(|e| CliError::Usage(format!("{program}: {e}")))?)
        }
        ExecutorSpec::Oracle => None,
    };
    let cfg = AgentConfig { max_debug_rounds: max_debug.unwrap_or(r.config.agent.max_debug_rounds), ..r.config.agent.clone() };

    let run_one = |e: &DatasetEntry| -> WorkflowTrace {
        let oracle;
        let unavailable;
        let exec: &dyn Executor = match (&bridge, &e.problem) {
            (Some(b), _) => b,
            (None, Some(text)) => match from_text(text) {
                Ok(p) => {
                    oracle = OracleExecutor::new(p, r.solver.clone());
                    &oracle
                }
                Err(err) => {
                    unavailable = Unavailable(format!("model does not parse: {err}"));
                    &unavailable
                }
            },
            (None, None) => {
                unavailable = Unavailable("no model for the oracle executor".into());
                &unavailable
            }
        };
        run_pipeline(&teacher, exec, &e.id, &e.description, &cfg).1
    };
    let chunk = entries.len().div_ceil(r.workers).max(1);
    let traces: Vec<WorkflowTrace> = std::thread::scope(|s| {
        let handles: Vec<_> =
            entries.chunks(chunk).map(|part| s.spawn(|| part.iter().map(run_one).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("agent worker panicked")).collect()
    });
    if let Some(b) = &replay {
        if b.remaining() > 0 {
            log::warn!("{} scripted responses were never requested", b.remaining());
        }
    }
    let text: String = traces.iter().map(|t| serde_json::to_string(t).expect("trace serializes") + "\n").collect();
    let path = r.out.join("traces.jsonl");
    write_output(&path, &text)?;
    for t in traces.iter().filter(|t| !t.errors.is_empty()) {
        say(out, format!("{}: {}", t.instance_id, t.errors.join("; ")))?;
    }
    let answered = traces.iter().filter(|t| t.answer.is_some()).count();
    say(out, format!("answered {answered}/{}; traces in {}", traces.len(), path.display()))
}

#[derive(serde::Deserialize)]
struct LabelRow {
    id: String,
    label: serde_json::Number,
}

fn read_labels(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    Ok(read_jsonl::<LabelRow>(path)?.into_iter().map(|r| (r.id, r.label.to_string())).collect())
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

pub fn cmd_evaluate(r: &Resolved, traces: &Path, labels: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let traces: BTreeMap<String, WorkflowTrace> =
        read_jsonl::<WorkflowTrace>(traces)?.into_iter().map(|t| (t.instance_id.clone(), t)).collect();
    let labels = read_labels(labels)?;
    let records: Vec<EvalRecord> = labels
        .iter()
        .map(|(id, label)| {
            let t = traces.get(id);
            EvalRecord {
                instance_id: id.clone(),
                predicted: t.and_then(|t| t.answer),
                executed_ok: t.is_some_and(|t| t.tracks.iter().any(|k| k.final_value().is_some())),
                label: label.clone(),
            }
        })
        .collect();
    let report = evaluate(&records).map_err(domain)?;
    say(out, format!("instances       {}", report.total))?;
    say(out, format!("accuracy        {} ({}/{})", pct(report.accuracy), report.correct, report.total))?;
    say(out, format!("execution rate  {} ({}/{})", pct(report.execution_rate), report.executed, report.total))?;
    say(out, "\ntag        executed  correct")?;
    for tag in LanguageTag::ALL {
        let (mut executed, mut correct) = (0, 0);
        for (id, label) in &labels {
            let v = traces.get(id).and_then(|t| t.track(tag)).and_then(|k| k.final_value());
            executed += usize::from(v.is_some());
            let rec = EvalRecord { instance_id: id.clone(), predicted: v, executed_ok: v.is_some(), label: label.clone() };
            correct += usize::from(is_correct(&rec));
        }
        say(out, format!("{:<10} {executed:<9} {correct}", tag.tag()))?;
    }
    if r.out_given {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_output(&r.out.join("evaluation.json"), &(json + "\n"))?;
    }
    Ok(())
}

pub fn cmd_audit(r: &Resolved, dataset: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let entries: Vec<DatasetEntry> = read_jsonl(dataset)?;
    let report = audit(&entries, &r.solver, r.workers);
    for f in report.findings.iter().filter(|f| f.verdict != Verdict::Confirmed) {
        let value = f.solver_value.map_or("-".to_string(), |v| v.to_string());
        let reason = f.reason.as_deref().unwrap_or("");
        say(out, format!("{:<12} {:<24} label {:<14} solver {:<14} {reason}", format!("{:?}", f.verdict).to_lowercase(), f.instance_id, f.stored_label.to_string(), value))?;
    }
    say(out, format!("confirmed {}  mismatch {}  unsupported {}", report.confirmed, report.mismatches, report.unsupported))?;
    match report.error_rate {
        Some(rate) => say(out, format!("error rate {}", pct(rate)))?,
        None => say(out, "error rate n/a (no checkable instances)")?,
    }
    if r.out_given {
        let text: String =
            report.findings.iter().map(|f| serde_json::to_string(f).expect("finding serializes") + "\n").collect();
        write_output(&r.out.join("audit.jsonl"), &text)?;
    }
    Ok(())
}

pub fn cmd_export_sft(r: &Resolved, traces: &Path, labels: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let traces: Vec<WorkflowTrace> = read_jsonl(traces)?;
    let labels = read_labels(labels)?;
    let mut trajectories = Vec::new();
    for t in &traces {
        let Some(label) = labels.get(&t.instance_id) else {
            log::warn!("{}: no label, skipped", t.instance_id);
            continue;
        };
        let eps = choose_epsilon(label).map_err(domain)?;
        let truth: f64 = label.parse().map_err(domain)?;
        trajectories.extend(assemble(t, truth, eps));
    }
    fs::create_dir_all(&r.out).map_err(domain)?;
    let path = r.out.join("sft.jsonl");
    let n = export_sft(&trajectories, &path).map_err(domain)?;
    say(out, format!("{n} records from {}/{} traces in {}", trajectories.len(), traces.len(), path.display()))
}
