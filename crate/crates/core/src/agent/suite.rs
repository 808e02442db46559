//! The bundled mini-suite: ten described instances, one per class, with a
//! replay transcript in which the teacher answers every stage perfectly.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classes::{generate_class_instance, ClassId, ClassSizes};
use crate::model::text::{from_text, to_text, ParseError};
use crate::model::Problem;
use crate::sampler::{child_seed, SamplerConfig};
use crate::solve::SolverConfig;
use crate::teacher::{prompt, Bindings, Teacher, TeacherError, TranscriptEntry};
use crate::template::describe_class;

use super::{components_text, reference_code, AgentConfig};

pub const MINI_SUITE: &str = include_str!("../../data/mini_suite/instances.jsonl");
pub const MINI_SUITE_TRANSCRIPT: &str = include_str!("../../data/mini_suite/transcript.jsonl");
pub const MINI_SUITE_SEED: u64 = 2024;

/// A described problem with its machine-readable model and label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteInstance {
    pub id: String,
    pub class: String,
    pub description: String,
    /// The model in the crate's text format.
    pub problem: String,
    pub label: serde_json::Number,
}

impl SuiteInstance {
    pub fn model(&self) -> Result<Problem, ParseError> {
        from_text(&self.problem)
    }

    pub fn label_value(&self) -> f64 {
        self.label.as_f64().expect("labels are finite numbers")
    }
}

/// Shortest text that reads back as exactly `v`.
pub fn label_number(v: f64) -> serde_json::Number {
    serde_json::Number::from_str(&format!("{v:?}")).expect("finite label")
}

pub fn parse_instances(text: &str) -> Result<Vec<SuiteInstance>, serde_json::Error> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}

pub fn write_instances(instances: &[SuiteInstance]) -> String {
    instances.iter().map(|i| serde_json::to_string(i).expect("instance serializes") + "\n").collect()
}

pub fn mini_suite() -> Vec<SuiteInstance> {
    parse_instances(MINI_SUITE).expect("bundled suite parses")
}

/// One instance per class at default sizes, described with a seeded
/// template.
pub fn build_mini_suite(seed: u64) -> Result<Vec<SuiteInstance>, Box<dyn std::error::Error>> {
    let (sizes, scfg, solver) = (ClassSizes::default(), SamplerConfig::default(), SolverConfig::default());
    let mut out = Vec::new();
    for (k, class) in ClassId::ALL.into_iter().enumerate() {
        let s = child_seed(seed, k as u64);
        let inst = generate_class_instance(class, &sizes, &scfg, s, &solver)?;
        let description = describe_class(&inst, None, s)?.render(Some(s))?;
        out.push(SuiteInstance {
            id: format!("mini-{:02}-{}", k + 1, class.tag()),
            class: class.tag().to_string(),
            description,
            problem: to_text(&inst.problem),
            label: label_number(inst.optimum),
        });
    }
    Ok(out)
}

fn entry(template: &str, b: &Bindings, response: String) -> Result<TranscriptEntry, TeacherError> {
    let key = Teacher::request_key(&prompt(template)?, b);
    Ok(TranscriptEntry { request_hash: key.hash(), template: Some(template.to_string()), response })
}

fn fenced(reasoning: &str, body: &str) -> String {
    format!("{reasoning}\n```\n{}\n```", body.trim_end())
}

/// Responses a perfect teacher gives for every prompt `cfg` issues on
/// `instances` when no script fails.
pub fn perfect_transcript(instances: &[SuiteInstance], cfg: &AgentConfig) -> Result<Vec<TranscriptEntry>, Box<dyn std::error::Error>> {
    let mut out = Vec::new();
    for inst in instances {
        let p = inst.model()?;
        let components = components_text(&p);
        let formulation = to_text(&p);
        let d = inst.description.as_str();
        let mut b: Bindings = [("description".to_string(), d.to_string())].into();
        out.push(entry("decomposition", &b, fenced("The description fixes these components.", &components))?);
        b.insert("previous_components".into(), components.clone());
        for _ in 0..cfg.reflection_rounds {
            out.push(entry("decomposition_verifier", &b, fenced("Every parameter is already covered.", &components))?);
        }
        b.remove("previous_components");
        b.insert("components".into(), components.clone());
        out.push(entry("formulation", &b, fenced("Writing each component as a linear expression.", &formulation))?);
        b.insert("previous_formulation".into(), formulation.clone());
        for _ in 0..cfg.reflection_rounds {
            out.push(entry("formulation_verifier", &b, fenced("The formulation matches the components.", &formulation))?);
        }
        b.remove("previous_formulation");
        b.insert("formulation".into(), formulation.clone());
        for tag in &cfg.tags {
            b.insert("solver".into(), tag.solver_name().to_string());
            let code = reference_code(&p, *tag);
            out.push(entry("programmer", &b, fenced(&format!("One {} variable per model variable.", tag.solver_name()), &code))?);
        }
    }
    Ok(out)
}
