//! Fine-tuning trajectories built from pipeline traces whose scripts
//! reproduced the known optimum.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agent::{LanguageTag, WorkflowTrace};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PairKind {
    DA,
    FA,
    CA,
    /// A debugging prompt and the fix that made the script run.
    DBG,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub name: String,
    pub text: String,
}

fn parts<const N: usize>(pairs: [(&str, &str); N]) -> Vec<Part> {
    pairs.into_iter().map(|(name, text)| Part { name: name.into(), text: text.into() }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryPair {
    pub kind: PairKind,
    pub tag: Option<LanguageTag>,
    pub instruction: Vec<Part>,
    pub output: Vec<Part>,
}

impl TrajectoryPair {
    pub fn instruction_names(&self) -> Vec<&str> {
        self.instruction.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.output.iter().map(|p| p.name.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub instance_id: String,
    pub ground_truth: f64,
    pub epsilon: f64,
    pub da: TrajectoryPair,
    pub fa: TrajectoryPair,
    pub ca: Vec<TrajectoryPair>,
    pub matched: BTreeSet<LanguageTag>,
    pub debug: Vec<TrajectoryPair>,
}

impl Trajectory {
    /// Every pair in export order.
    pub fn pairs(&self) -> impl Iterator<Item = &TrajectoryPair> {
        std::iter::once(&self.da).chain(std::iter::once(&self.fa)).chain(&self.ca).chain(&self.debug)
    }
}

/// Keeps a trace when at least one track's final value lies within `eps`
/// of `ground_truth`. Only matching tracks contribute code pairs; those
/// that needed debugging also contribute their last debugging step.
pub fn assemble(trace: &WorkflowTrace, ground_truth: f64, eps: f64) -> Option<Trajectory> {
    let (d, f) = (trace.decomposition.as_ref()?, trace.formulation.as_ref()?);
    let desc = trace.description.as_str();
    let matching: Vec<_> = trace
        .tracks
        .iter()
        .filter(|t| t.final_value().is_some_and(|v| (v - ground_truth).abs() <= eps))
        .filter(|t| t.coding.is_some())
        .collect();
    if matching.is_empty() {
        return None;
    }
    let da = TrajectoryPair {
        kind: PairKind::DA,
        tag: None,
        instruction: parts([("problem_description", desc), ("decomposition_prompt", &d.prompt)]),
        output: parts([("reasoning_step_1", &d.reasoning), ("extracted_components", &d.content)]),
    };
    let fa = TrajectoryPair {
        kind: PairKind::FA,
        tag: None,
        instruction: parts([("problem_description", desc), ("extracted_components", &d.content), ("formulation_prompt", &f.prompt)]),
        output: parts([("reasoning_step_2", &f.reasoning), ("math_formulation", &f.content)]),
    };
    let mut ca = Vec::new();
    let mut debug = Vec::new();
    for t in &matching {
        let coding = t.coding.as_ref().expect("filtered above");
        let code = t.run.codes.last().expect("a final value implies a run");
        ca.push(TrajectoryPair {
            kind: PairKind::CA,
            tag: Some(t.tag),
            instruction: parts([("problem_description", desc), ("math_formulation", &f.content), ("coding_prompt", &coding.prompt)]),
            output: parts([("reasoning_step_3", &coding.reasoning), ("code", code)]),
        });
        if let Some(step) = t.run.debug.last() {
            debug.push(TrajectoryPair {
                kind: PairKind::DBG,
                tag: Some(t.tag),
                instruction: parts([("debugging_prompt", &step.prompt)]),
                output: parts([("reasoning", &step.reasoning), ("code", &step.code)]),
            });
        }
    }
    Some(Trajectory {
        instance_id: trace.instance_id.clone(),
        ground_truth,
        epsilon: eps,
        da,
        fa,
        ca,
        matched: matching.iter().map(|t| t.tag).collect(),
        debug,
    })
}

/// One line of the export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftRecord {
    pub schema_version: u32,
    pub instance_id: String,
    pub kind: PairKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<LanguageTag>,
    pub instruction: Vec<Part>,
    pub output: Vec<Part>,
}

/// Records ordered by instance id, kind, then tag.
pub fn sft_records(trajectories: &[Trajectory]) -> Vec<SftRecord> {
    let mut out: Vec<SftRecord> = trajectories
        .iter()
        .flat_map(|t| {
            t.pairs().map(|p| SftRecord {
                schema_version: SCHEMA_VERSION,
                instance_id: t.instance_id.clone(),
                kind: p.kind,
                tag: p.tag,
                instruction: p.instruction.clone(),
                output: p.output.clone(),
            })
        })
        .collect();
    out.sort_by(|a, b| (&a.instance_id, a.kind, a.tag).cmp(&(&b.instance_id, b.kind, b.tag)));
    out
}

pub fn export_sft(trajectories: &[Trajectory], path: &Path) -> std::io::Result<usize> {
    let records = sft_records(trajectories);
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    for r in &records {
        serde_json::to_writer(&mut f, r)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(records.len())
}

pub fn read_sft(path: &Path) -> std::io::Result<Vec<SftRecord>> {
    fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(std::io::Error::from))
        .collect()
}
