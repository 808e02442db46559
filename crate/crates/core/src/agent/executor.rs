use std::collections::{BTreeMap, VecDeque};
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::model::Problem;
use crate::solve::{solve_milp, SolveError, SolveOutcome, SolverConfig};

use super::LanguageTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecStatus {
    Ok,
    RuntimeError,
    InfeasibleModel,
    Timeout,
}

/// What running one script produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutorResult {
    pub status: ExecStatus,
    /// Present exactly when `status` is ok.
    pub value: Option<f64>,
    #[serde(default)]
    pub message: String,
}

impl ExecutorResult {
    pub fn ok(value: f64) -> Self {
        ExecutorResult { status: ExecStatus::Ok, value: Some(value), message: String::new() }
    }

    pub fn failed(status: ExecStatus, message: impl Into<String>) -> Self {
        debug_assert!(status != ExecStatus::Ok);
        ExecutorResult { status, value: None, message: message.into() }
    }

    /// The value of an ok run, if finite.
    pub fn ok_value(&self) -> Option<f64> {
        match (self.status, self.value) {
            (ExecStatus::Ok, Some(v)) if v.is_finite() => Some(v),
            _ => None,
        }
    }

    /// Downgrades an ok result without a finite value.
    fn checked(self) -> Self {
        if self.status == ExecStatus::Ok && self.ok_value().is_none() {
            return ExecutorResult::failed(ExecStatus::RuntimeError, format!("ok without a finite value: {}", self.message));
        }
        self
    }
}

/// Runs generated code for one language tag.
pub trait Executor: Send + Sync {
    fn run(&self, tag: LanguageTag, code: &str, timeout: Duration) -> ExecutorResult;
}

/// Returns queued results per tag; the last result of a queue repeats.
#[derive(Debug, Default)]
pub struct ScriptedExecutor {
    queues: Mutex<BTreeMap<LanguageTag, VecDeque<ExecutorResult>>>,
    calls: Mutex<Vec<(LanguageTag, String)>>,
}

impl ScriptedExecutor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn script(self, tag: LanguageTag, results: impl IntoIterator<Item = ExecutorResult>) -> Self {
        self.queues.lock().expect("executor script").entry(tag).or_default().extend(results);
        self
    }

    /// Every `(tag, code)` run so far, in call order.
    pub fn calls(&self) -> Vec<(LanguageTag, String)> {
        self.calls.lock().expect("executor calls").clone()
    }
}

impl Executor for ScriptedExecutor {
    fn run(&self, tag: LanguageTag, code: &str, _timeout: Duration) -> ExecutorResult {
        self.calls.lock().expect("executor calls").push((tag, code.to_string()));
        let mut queues = self.queues.lock().expect("executor script");
        let q = queues.entry(tag).or_default();
        let out = if q.len() > 1 { q.pop_front() } else { q.front().cloned() };
        out.unwrap_or_else(|| ExecutorResult::failed(ExecStatus::RuntimeError, format!("nothing scripted for {tag}")))
    }
}

/// Ignores the code and solves the paired problem with the exact solver,
/// as a perfectly faithful script would.
#[derive(Debug, Clone)]
pub struct OracleExecutor {
    problem: Problem,
    solver: SolverConfig,
    overrides: BTreeMap<LanguageTag, ExecutorResult>,
}

impl OracleExecutor {
    pub fn new(problem: Problem, solver: SolverConfig) -> Self {
        OracleExecutor { problem, solver, overrides: BTreeMap::new() }
    }

    /// Makes `tag` report `result` whatever it is given.
    pub fn with_override(mut self, tag: LanguageTag, result: ExecutorResult) -> Self {
        self.overrides.insert(tag, result);
        self
    }
}

pub(crate) fn outcome_result(outcome: Result<SolveOutcome, SolveError>) -> ExecutorResult {
    match outcome {
        Ok(SolveOutcome::Optimal { value, .. }) => ExecutorResult::ok(value),
        Ok(SolveOutcome::Infeasible { .. }) => ExecutorResult::failed(ExecStatus::InfeasibleModel, "model is infeasible"),
        Ok(SolveOutcome::Unbounded { .. }) => ExecutorResult::failed(ExecStatus::RuntimeError, "model is unbounded"),
        Err(e @ (SolveError::TimeLimit { .. } | SolveError::NodeLimit { .. })) => {
            ExecutorResult::failed(ExecStatus::Timeout, e.to_string())
        }
        Err(e) => ExecutorResult::failed(ExecStatus::RuntimeError, e.to_string()),
    }
}

impl Executor for OracleExecutor {
    fn run(&self, tag: LanguageTag, _code: &str, _timeout: Duration) -> ExecutorResult {
        if let Some(r) = self.overrides.get(&tag) {
            return r.clone();
        }
        outcome_result(solve_milp(&self.problem, &self.solver))
    }
}

#[derive(Debug, Serialize)]
struct WireRequest<'a> {
    tag: LanguageTag,
    code: &'a str,
    timeout_s: f64,
}

struct BridgeIo {
    child: Option<Child>,
    input: Box<dyn Write + Send>,
    output: Box<dyn BufRead + Send>,
}

/// Talks to an out-of-process runner over line-delimited JSON: one
/// `{tag, code, timeout_s}` request line in, one `{status, value, message}`
/// line back. Requests are serialised over the single connection.
pub struct BridgeExecutor {
    io: Mutex<BridgeIo>,
}

impl BridgeExecutor {
    pub fn spawn(program: &str, args: &[String]) -> std::io::Result<Self> {
        let mut child = Command::new(program).args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn()?;
        let input: ChildStdin = child.stdin.take().expect("piped stdin");
        let output: ChildStdout = child.stdout.take().expect("piped stdout");
        Ok(BridgeExecutor {
            io: Mutex::new(BridgeIo { child: Some(child), input: Box::new(input), output: Box::new(BufReader::new(output)) }),
        })
    }

    pub fn from_streams(input: impl Write + Send + 'static, output: impl BufRead + Send + 'static) -> Self {
        BridgeExecutor { io: Mutex::new(BridgeIo { child: None, input: Box::new(input), output: Box::new(output) }) }
    }

    fn exchange(&self, tag: LanguageTag, code: &str, timeout: Duration) -> Result<ExecutorResult, String> {
        let req = WireRequest { tag, code, timeout_s: timeout.as_secs_f64() };
        let mut line = serde_json::to_string(&req).map_err(|e| e.to_string())?;
        line.push('\n');
        let mut io = self.io.lock().map_err(|_| "bridge lock poisoned".to_string())?;
        io.input.write_all(line.as_bytes()).and_then(|_| io.input.flush()).map_err(|e| format!("write: {e}"))?;
        let mut reply = String::new();
        match io.output.read_line(&mut reply) {
            Ok(0) => Err("runner closed its output".into()),
            Ok(_) => serde_json::from_str::<ExecutorResult>(reply.trim_end()).map_err(|e| format!("bad reply {reply:?}: {e}")),
            Err(e) => Err(format!("read: {e}")),
        }
    }
}

impl Executor for BridgeExecutor {
    fn run(&self, tag: LanguageTag, code: &str, timeout: Duration) -> ExecutorResult {
        match self.exchange(tag, code, timeout) {
            Ok(r) => r.checked(),
            Err(e) => ExecutorResult::failed(ExecStatus::RuntimeError, format!("bridge: {e}")),
        }
    }
}

impl Drop for BridgeExecutor {
    fn drop(&mut self) {
        if let Ok(io) = self.io.get_mut() {
            if let Some(mut child) = io.child.take() {
                let _ = child.kill();
                let _ = child.wait();
            }
        }
    }
}
