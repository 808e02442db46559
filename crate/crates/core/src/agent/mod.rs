//! The agent pipeline: decomposition, formulation, per-language coding with
//! bounded debugging, and a vote over the values the scripts report.

mod codegen;
mod executor;
pub mod suite;
mod vote;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::teacher::{render_prompt, Bindings, Teacher, TeacherError};

pub use codegen::{components_text, infeasibility_example, reference_code};
pub use executor::{BridgeExecutor, ExecStatus, Executor, ExecutorResult, OracleExecutor, ScriptedExecutor};
pub use vote::{majority_vote, Cluster, ConsensusReason, ConsensusReport};

pub const DEFAULT_MAX_DEBUG_ROUNDS: usize = 6;
pub const DEFAULT_CLUSTER_EPSILON: f64 = 1e-4;

/// Target modeling ecosystem of one coding track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageTag {
    Pyomo,
    Gurobipy,
    Docplex,
    Cvxpy,
    Pyscipopt,
}

impl LanguageTag {
    /// Also the priority order for breaking ties.
    pub const ALL: [LanguageTag; 5] =
        [LanguageTag::Pyomo, LanguageTag::Gurobipy, LanguageTag::Docplex, LanguageTag::Cvxpy, LanguageTag::Pyscipopt];

    pub fn tag(self) -> &'static str {
        match self {
            LanguageTag::Pyomo => "pyomo",
            LanguageTag::Gurobipy => "gurobipy",
            LanguageTag::Docplex => "docplex",
            LanguageTag::Cvxpy => "cvxpy",
            LanguageTag::Pyscipopt => "pyscipopt",
        }
    }

    /// Name used in prompts.
    pub fn solver_name(self) -> &'static str {
        match self {
            LanguageTag::Pyomo => "Pyomo",
            LanguageTag::Gurobipy => "Gurobipy",
            LanguageTag::Docplex => "DOcplex",
            LanguageTag::Cvxpy => "CVXPY",
            LanguageTag::Pyscipopt => "PySCIPOpt",
        }
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for LanguageTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        LanguageTag::ALL.into_iter().find(|t| t.tag() == s).ok_or_else(|| format!("unknown language tag `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub max_debug_rounds: usize,
    /// Verifier rounds after decomposition and after formulation.
    pub reflection_rounds: usize,
    pub cluster_epsilon: f64,
    pub timeout_s: f64,
    pub tags: Vec<LanguageTag>,
    /// Run the coding tracks on separate threads.
    pub parallel: bool,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            max_debug_rounds: DEFAULT_MAX_DEBUG_ROUNDS,
            reflection_rounds: 1,
            cluster_epsilon: DEFAULT_CLUSTER_EPSILON,
            timeout_s: 60.0,
            tags: LanguageTag::ALL.to_vec(),
            parallel: true,
        }
    }
}

impl AgentConfig {
    /// Most prompts one pipeline run may issue, re-asks not counted.
    pub fn call_bound(&self) -> usize {
        2 * (1 + self.reflection_rounds) + self.tags.len() * (1 + self.max_debug_rounds)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("empty problem description")]
    EmptyDescription,
    #[error("{stage}: {source}")]
    Teacher { stage: &'static str, source: TeacherError },
}

/// One prompt/verifier stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    /// The first prompt sent.
    pub prompt: String,
    /// Pre-fence text of the final answer.
    pub reasoning: String,
    pub content: String,
    /// Content after each round, the final one last.
    pub drafts: Vec<String>,
    pub calls: usize,
    pub requests: usize,
}

fn bindings<const N: usize>(pairs: [(&str, &str); N]) -> Bindings {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn reflected_stage(
    teacher: &Teacher,
    stage: &'static str,
    first: (&str, Bindings),
    verifier: &str,
    previous_slot: &str,
    rounds: usize,
) -> Result<StageRecord, AgentError> {
    let wrap = |source| AgentError::Teacher { stage, source };
    let (template, b) = first;
    let prompt = render_prompt(template, &b).map_err(wrap)?;
    let mut answer = teacher.ask(template, &b).map_err(wrap)?;
    let mut rec = StageRecord {
        prompt,
        reasoning: String::new(),
        content: String::new(),
        drafts: vec![answer.content.clone()],
        calls: 1,
        requests: answer.requests,
    };
    for _ in 0..rounds {
        let mut vb = b.clone();
        vb.insert(previous_slot.to_string(), answer.content.clone());
        answer = teacher.ask(verifier, &vb).map_err(wrap)?;
        rec.calls += 1;
        rec.requests += answer.requests;
        rec.drafts.push(answer.content.clone());
    }
    rec.reasoning = answer.reasoning;
    rec.content = answer.content;
    Ok(rec)
}

/// Decomposition prompt followed by `rounds` verifier rounds.
pub fn decompose(teacher: &Teacher, description: &str, rounds: usize) -> Result<StageRecord, AgentError> {
    if description.trim().is_empty() {
        return Err(AgentError::EmptyDescription);
    }
    let b = bindings([("description", description)]);
    reflected_stage(teacher, "decomposition", ("decomposition", b), "decomposition_verifier", "previous_components", rounds)
}

pub fn formulate(teacher: &Teacher, description: &str, components: &str, rounds: usize) -> Result<StageRecord, AgentError> {
    if description.trim().is_empty() {
        return Err(AgentError::EmptyDescription);
    }
    let b = bindings([("description", description), ("components", components)]);
    reflected_stage(teacher, "formulation", ("formulation", b), "formulation_verifier", "previous_formulation", rounds)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeAnswer {
    pub prompt: String,
    pub reasoning: String,
    pub code: String,
    pub requests: usize,
}

pub fn write_code(
    teacher: &Teacher,
    description: &str,
    components: &str,
    formulation: &str,
    tag: LanguageTag,
) -> Result<CodeAnswer, AgentError> {
    let wrap = |source| AgentError::Teacher { stage: "coding", source };
    let b = bindings([
        ("description", description),
        ("components", components),
        ("formulation", formulation),
        ("solver", tag.solver_name()),
    ]);
    let prompt = render_prompt("programmer", &b).map_err(wrap)?;
    let a = teacher.ask("programmer", &b).map_err(wrap)?;
    Ok(CodeAnswer { prompt, reasoning: a.reasoning, code: a.content, requests: a.requests })
}

/// One debugging prompt and the code it produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DebugStep {
    pub template: String,
    pub prompt: String,
    pub reasoning: String,
    pub code: String,
}

/// Every execution of one track. `codes[i]` produced `results[i]`, and
/// `debug[i]` turned `codes[i]` into `codes[i + 1]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DebugRun {
    pub codes: Vec<String>,
    pub results: Vec<ExecutorResult>,
    pub debug: Vec<DebugStep>,
    pub calls: usize,
    pub requests: usize,
    pub error: Option<String>,
}

impl DebugRun {
    pub fn final_result(&self) -> Option<&ExecutorResult> {
        self.results.last()
    }

    pub fn debug_rounds(&self) -> usize {
        self.debug.len()
    }
}

/// Runs `code`, and while it fails and rounds remain, asks for a fix: the
/// code debugging prompt for errors and timeouts, the infeasibility prompt
/// for infeasible models.
pub fn execute_with_debug(
    executor: &dyn Executor,
    teacher: &Teacher,
    description: &str,
    code: &str,
    tag: LanguageTag,
    max_rounds: usize,
    timeout: Duration,
) -> DebugRun {
    let mut run = DebugRun::default();
    let mut code = code.to_string();
    loop {
        let r = executor.run(tag, &code, timeout);
        run.codes.push(code.clone());
        let status = r.status;
        let message = r.message.clone();
        run.results.push(r);
        if status == ExecStatus::Ok || run.debug.len() >= max_rounds {
            return run;
        }
        let (template, b) = if status == ExecStatus::InfeasibleModel {
            let example = infeasibility_example(tag);
            let b = bindings([
                ("code_examples", example.as_str()),
                ("code_w_error", code.as_str()),
                ("description", description),
                ("solver", tag.solver_name()),
            ]);
            ("infeasibility_debugging", b)
        } else {
            let b = bindings([
                ("code_w_error", code.as_str()),
                ("description", description),
                ("error_message", message.as_str()),
                ("solver", tag.solver_name()),
            ]);
            ("code_debugging", b)
        };
        run.calls += 1;
        let asked = render_prompt(template, &b).and_then(|prompt| Ok((prompt, teacher.ask(template, &b)?)));
        match asked {
            Ok((prompt, a)) => {
                run.requests += a.requests;
                code = a.content.clone();
                run.debug.push(DebugStep { template: template.into(), prompt, reasoning: a.reasoning, code: a.content });
            }
            Err(e) => {
                run.error = Some(format!("{template}: {e}"));
                return run;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagTrack {
    pub tag: LanguageTag,
    pub coding: Option<CodeAnswer>,
    pub run: DebugRun,
    pub error: Option<String>,
}

impl TagTrack {
    pub fn final_value(&self) -> Option<f64> {
        self.run.final_result().and_then(ExecutorResult::ok_value)
    }

    pub fn calls(&self) -> usize {
        usize::from(self.coding.is_some() || self.error.is_some()) + self.run.calls
    }
}

/// Everything one pipeline run did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkflowTrace {
    pub instance_id: String,
    pub description: String,
    pub decomposition: Option<StageRecord>,
    pub formulation: Option<StageRecord>,
    pub tracks: Vec<TagTrack>,
    pub consensus: ConsensusReport,
    pub answer: Option<f64>,
    pub errors: Vec<String>,
    pub config: AgentConfig,
}

impl WorkflowTrace {
    /// Prompts issued, re-asks not counted.
    pub fn calls(&self) -> usize {
        let stages: usize = [&self.decomposition, &self.formulation].iter().filter_map(|s| s.as_ref()).map(|s| s.calls).sum();
        stages + self.tracks.iter().map(TagTrack::calls).sum::<usize>()
    }

    pub fn track(&self, tag: LanguageTag) -> Option<&TagTrack> {
        self.tracks.iter().find(|t| t.tag == tag)
    }

    /// Final result of every track that executed.
    pub fn final_results(&self) -> BTreeMap<LanguageTag, ExecutorResult> {
        self.tracks.iter().filter_map(|t| Some((t.tag, t.run.final_result()?.clone()))).collect()
    }
}

fn coding_track(
    teacher: &Teacher,
    executor: &dyn Executor,
    description: &str,
    components: &str,
    formulation: &str,
    tag: LanguageTag,
    cfg: &AgentConfig,
) -> TagTrack {
    match write_code(teacher, description, components, formulation, tag) {
        Ok(coding) => {
            let timeout = Duration::from_secs_f64(cfg.timeout_s.max(0.0));
            let run = execute_with_debug(executor, teacher, description, &coding.code, tag, cfg.max_debug_rounds, timeout);
            TagTrack { tag, coding: Some(coding), run, error: None }
        }
        Err(e) => TagTrack { tag, coding: None, run: DebugRun::default(), error: Some(e.to_string()) },
    }
}

/// Runs every stage for one description. Failures are recorded in the
/// trace; the answer is the consensus winner.
pub fn run_pipeline(
    teacher: &Teacher,
    executor: &dyn Executor,
    instance_id: &str,
    description: &str,
    cfg: &AgentConfig,
) -> (Option<f64>, WorkflowTrace) {
    let mut trace = WorkflowTrace {
        instance_id: instance_id.to_string(),
        description: description.to_string(),
        decomposition: None,
        formulation: None,
        tracks: Vec::new(),
        consensus: majority_vote(&BTreeMap::new(), cfg.cluster_epsilon),
        answer: None,
        errors: Vec::new(),
        config: cfg.clone(),
    };
    let stages = decompose(teacher, description, cfg.reflection_rounds).and_then(|d| {
        let f = formulate(teacher, description, &d.content, cfg.reflection_rounds);
        trace.decomposition = Some(d);
        f
    });
    let formulation = match stages {
        Ok(f) => f,
        Err(e) => {
            trace.errors.push(e.to_string());
            return (None, trace);
        }
    };
    let components = trace.decomposition.as_ref().map(|d| d.content.clone()).unwrap_or_default();
    let (comp, form) = (components.as_str(), formulation.content.as_str());
    trace.tracks = if cfg.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = cfg
                .tags
                .iter()
                .map(|&tag| s.spawn(move || coding_track(teacher, executor, description, comp, form, tag, cfg)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("coding track panicked")).collect()
        })
    } else {
        cfg.tags.iter().map(|&tag| coding_track(teacher, executor, description, comp, form, tag, cfg)).collect()
    };
    trace.formulation = Some(formulation);
    for t in &trace.tracks {
        if let Some(e) = t.error.as_ref().or(t.run.error.as_ref()) {
            trace.errors.push(format!("{}: {e}", t.tag));
        }
    }
    trace.consensus = majority_vote(&trace.final_results(), cfg.cluster_epsilon);
    trace.answer = trace.consensus.winner;
    (trace.answer, trace)
}
