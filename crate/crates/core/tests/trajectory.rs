use std::sync::Arc;

use milpgen::agent::suite::{mini_suite, MINI_SUITE_TRANSCRIPT};
use milpgen::agent::{
    run_pipeline, AgentConfig, ExecStatus, ExecutorResult, LanguageTag, OracleExecutor, ScriptedExecutor, WorkflowTrace,
};
use milpgen::eval::choose_epsilon;
use milpgen::solve::SolverConfig;
use milpgen::teacher::{read_transcript, ChatExchange, FnBackend, ReplayBackend, Teacher};
use milpgen::trajectory::{assemble, export_sft, read_sft, sft_records, PairKind, Trajectory};

fn suite_trace(k: usize, liar: Option<LanguageTag>) -> (WorkflowTrace, f64, f64) {
    let teacher = Teacher::new(Arc::new(ReplayBackend::new(read_transcript(MINI_SUITE_TRANSCRIPT).unwrap())));
    let inst = &mini_suite()[k];
    let mut exec = OracleExecutor::new(inst.model().unwrap(), SolverConfig::default());
    if let Some(tag) = liar {
        exec = exec.with_override(tag, ExecutorResult::ok(inst.label_value() - 5.0));
    }
    let (_, trace) = run_pipeline(&teacher, &exec, &inst.id, &inst.description, &AgentConfig::default());
    (trace, inst.label_value(), choose_epsilon(&inst.label.to_string()).unwrap())
}

#[test]
fn pair_schemas() {
    let (trace, truth, eps) = suite_trace(0, None);
    let t = assemble(&trace, truth, eps).unwrap();
    assert_eq!(t.da.instruction_names(), ["problem_description", "decomposition_prompt"]);
    assert_eq!(t.da.output_names(), ["reasoning_step_1", "extracted_components"]);
    assert_eq!(t.fa.instruction_names(), ["problem_description", "extracted_components", "formulation_prompt"]);
    assert_eq!(t.fa.output_names(), ["reasoning_step_2", "math_formulation"]);
    for ca in &t.ca {
        assert_eq!(ca.instruction_names(), ["problem_description", "math_formulation", "coding_prompt"]);
        assert_eq!(ca.output_names(), ["reasoning_step_3", "code"]);
        assert!(ca.output[0].text.contains(ca.tag.unwrap().solver_name()));
        assert!(ca.output[1].text.contains("Optimal value:"));
    }
    assert_eq!(t.ca.len(), 5);
    assert!(t.debug.is_empty());
}

#[test]
fn only_matching_tags_contribute_code() {
    let (trace, truth, eps) = suite_trace(3, Some(LanguageTag::Docplex));
    let t = assemble(&trace, truth, eps).unwrap();
    assert_eq!(t.ca.len(), 4);
    assert!(!t.matched.contains(&LanguageTag::Docplex));
    for ca in &t.ca {
        let v = trace.track(ca.tag.unwrap()).unwrap().final_value().unwrap();
        assert!((v - truth).abs() <= eps);
    }
    assert!(assemble(&trace, truth + 1000.0, eps).is_none());
}

#[test]
fn fixed_track_yields_a_debug_sample() {
    let teacher = Teacher::new(Arc::new(FnBackend(|ex: &ChatExchange| format!("{}\n```\nfixed\n```", ex.key.template))));
    let mut exec = ScriptedExecutor::new()
        .script(LanguageTag::Pyomo, [ExecutorResult::failed(ExecStatus::RuntimeError, "KeyError"), ExecutorResult::ok(4.0)]);
    for tag in &LanguageTag::ALL[1..] {
        exec = exec.script(*tag, [ExecutorResult::failed(ExecStatus::RuntimeError, "ImportError")]);
    }
    let cfg = AgentConfig { max_debug_rounds: 2, ..AgentConfig::default() };
    let (answer, trace) = run_pipeline(&teacher, &exec, "d", "D", &cfg);
    assert_eq!(answer, Some(4.0));
    let t = assemble(&trace, 4.0, 1e-4).unwrap();
    assert_eq!(t.ca.len(), 1);
    assert_eq!(t.debug.len(), 1);
    assert_eq!(t.debug[0].tag, Some(LanguageTag::Pyomo));
    assert!(t.debug[0].instruction[0].text.contains("KeyError"));
    assert_eq!(t.debug[0].output[0].text, "code_debugging");
}

fn three_ca() -> Trajectory {
    let (trace, truth, eps) = suite_trace(1, None);
    let mut t = assemble(&trace, truth, eps).unwrap();
    t.ca.truncate(3);
    t
}

#[test]
fn export_counts_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sft.jsonl");
    assert_eq!(export_sft(&[three_ca()], &path).unwrap(), 5);
    let back = read_sft(&path).unwrap();
    assert_eq!(back, sft_records(&[three_ca()]));
    let kinds: Vec<PairKind> = back.iter().map(|r| r.kind).collect();
    assert_eq!(kinds, [PairKind::DA, PairKind::FA, PairKind::CA, PairKind::CA, PairKind::CA]);
    let line: serde_json::Value = serde_json::from_str(std::fs::read_to_string(&path).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(line["schema_version"], 1);
    assert_eq!(line["kind"], "DA");
    assert!(line.get("tag").is_none());

    let empty = dir.path().join("empty.jsonl");
    assert_eq!(export_sft(&[], &empty).unwrap(), 0);
    assert!(read_sft(&empty).unwrap().is_empty());
}

#[test]
fn export_is_deterministic_and_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (suite_trace(2, None), suite_trace(0, None));
    let ts = vec![assemble(&a.0, a.1, a.2).unwrap(), assemble(&b.0, b.1, b.2).unwrap()];
    let (p1, p2) = (dir.path().join("1.jsonl"), dir.path().join("2.jsonl"));
    export_sft(&ts, &p1).unwrap();
    let reversed: Vec<Trajectory> = ts.iter().rev().cloned().collect();
    export_sft(&reversed, &p2).unwrap();
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    let recs = read_sft(&p1).unwrap();
    let keys: Vec<_> = recs.iter().map(|r| (r.instance_id.clone(), r.kind, r.tag)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}
