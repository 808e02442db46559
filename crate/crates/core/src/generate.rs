//! Batch dataset production: sampled instances, their descriptions and a
//! labels manifest, every label re-checked before it is written.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agent::suite::label_number;
use crate::classes::{generate_class_instance, ClassError, ClassId, ClassSizes};
use crate::eval::DatasetEntry;
use crate::model::text::to_text;
use crate::model::Problem;
use crate::sampler::{child_seed, SamplerConfig};
use crate::solve::{solve_milp, SolveOutcome, SolverConfig};
use crate::template::{describe_class, PlaceholderError, TemplateError};

/// Relative tolerance for re-verifying stored labels.
pub const REVERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("{class} #{index}: {source}")]
    Class { class: ClassId, index: usize, source: ClassError },
    #[error("{id}: {0}", id = .1)]
    Template(TemplateError, String),
    #[error("{id}: {0}", id = .1)]
    Render(PlaceholderError, String),
    #[error("{id}: stored label {label} does not re-verify ({detail})")]
    Verify { id: String, label: f64, detail: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    pub seed: u64,
    pub counts: BTreeMap<ClassId, usize>,
    pub sizes: ClassSizes,
    pub sampler: SamplerConfig,
    pub workers: usize,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            seed: 0,
            counts: ClassId::ALL.into_iter().map(|c| (c, if c == ClassId::Linear { 100 } else { 20 })).collect(),
            sizes: ClassSizes::default(),
            sampler: SamplerConfig::default(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub id: String,
    pub class: ClassId,
    pub seed: u64,
    pub description: String,
    pub problem: Problem,
    pub label: f64,
}

/// Seed of the `index`th instance of `class`.
pub fn instance_seed(seed: u64, class: ClassId, index: usize) -> u64 {
    let k = ClassId::ALL.iter().position(|c| *c == class).expect("class listed") as u64;
    child_seed(child_seed(seed, k), index as u64)
}

fn one(class: ClassId, index: usize, cfg: &GenerateConfig, solver: &SolverConfig) -> Result<Generated, GenerateError> {
    let seed = instance_seed(cfg.seed, class, index);
    let id = format!("{}-{index:04}", class.tag());
    let inst = generate_class_instance(class, &cfg.sizes, &cfg.sampler, seed, solver)
        .map_err(|source| GenerateError::Class { class, index, source })?;
    let described = describe_class(&inst, None, seed).map_err(|e| GenerateError::Template(e, id.clone()))?;
    let description = described.render(Some(seed)).map_err(|e| GenerateError::Render(e, id.clone()))?;
    let g = Generated { id, class, seed, description, problem: inst.problem, label: inst.optimum };
    reverify(&g.problem, g.label, solver).map_err(|detail| GenerateError::Verify { id: g.id.clone(), label: g.label, detail })?;
    Ok(g)
}

/// Solves `problem` again and checks `label` to a relative 1e-9.
pub fn reverify(problem: &Problem, label: f64, solver: &SolverConfig) -> Result<(), String> {
    match solve_milp(problem, solver) {
        Ok(SolveOutcome::Optimal { value, .. }) => {
            if (value - label).abs() <= REVERIFY_TOLERANCE * label.abs().max(1.0) {
                Ok(())
            } else {
                Err(format!("solver now reports {value}"))
            }
        }
        Ok(other) => Err(format!("solver now reports {}", other.status())),
        Err(e) => Err(e.to_string()),
    }
}

/// Every requested instance, ordered by class then index. Work is split
/// over `cfg.workers` threads without changing the result.
pub fn generate(cfg: &GenerateConfig, solver: &SolverConfig) -> Result<Vec<Generated>, GenerateError> {
    let jobs: Vec<(ClassId, usize)> =
        ClassId::ALL.into_iter().flat_map(|c| (0..cfg.counts.get(&c).copied().unwrap_or(0)).map(move |i| (c, i))).collect();
    if jobs.is_empty() {
        return Ok(Vec::new());
    }
    let chunk = jobs.len().div_ceil(cfg.workers.max(1));
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|&(c, i)| one(c, i, cfg, solver)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("generation worker panicked")).collect()
    })
}

/// One manifest line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub class: ClassId,
    pub path: PathBuf,
    pub label: serde_json::Number,
    pub seed: u64,
}

pub fn manifest(items: &[Generated]) -> Vec<ManifestEntry> {
    items
        .iter()
        .map(|g| ManifestEntry {
            id: g.id.clone(),
            class: g.class,
            path: Path::new("instances").join(format!("{}.milp", g.id)),
            label: label_number(g.label),
            seed: g.seed,
        })
        .collect()
}

pub fn dataset(items: &[Generated]) -> Vec<DatasetEntry> {
    items
        .iter()
        .map(|g| DatasetEntry {
            id: g.id.clone(),
            description: g.description.clone(),
            problem: Some(to_text(&g.problem)),
            label: label_number(g.label),
        })
        .collect()
}

fn jsonl<T: Serialize>(rows: &[T]) -> String {
    rows.iter().map(|r| serde_json::to_string(r).expect("row serializes") + "\n").collect()
}

/// Writes `instances/<id>.milp`, `descriptions/<id>.txt`, `manifest.jsonl`
/// and `dataset.jsonl` under `out`.
pub fn write_outputs(items: &[Generated], out: &Path) -> Result<(), GenerateError> {
    fs::create_dir_all(out.join("instances"))?;
    fs::create_dir_all(out.join("descriptions"))?;
    for g in items {
        fs::write(out.join("instances").join(format!("{}.milp", g.id)), to_text(&g.problem))?;
        fs::write(out.join("descriptions").join(format!("{}.txt", g.id)), &g.description)?;
    }
    fs::write(out.join("manifest.jsonl"), jsonl(&manifest(items)))?;
    fs::write(out.join("dataset.jsonl"), jsonl(&dataset(items)))?;
    Ok(())
}
