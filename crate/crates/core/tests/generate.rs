use std::collections::BTreeMap;

use milpgen::classes::ClassId;
use milpgen::generate::{generate, manifest, reverify, write_outputs, GenerateConfig, ManifestEntry};
use milpgen::model::text::from_text;
use milpgen::solve::SolverConfig;

fn small(seed: u64, workers: usize) -> GenerateConfig {
    GenerateConfig { seed, counts: ClassId::ALL.into_iter().map(|c| (c, 3)).collect(), workers, ..GenerateConfig::default() }
}

#[test]
fn same_seed_same_output_any_worker_count() {
    let solver = SolverConfig::default();
    let a = generate(&small(0, 1), &solver).unwrap();
    let b = generate(&small(0, 4), &solver).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 30);
    let c = generate(&small(1, 1), &solver).unwrap();
    assert_ne!(manifest(&a), manifest(&c));
}

#[test]
fn outputs_re_read_and_re_verify() {
    let solver = SolverConfig::default();
    let items = generate(&small(5, 2), &solver).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&items, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap();
    let rows: Vec<ManifestEntry> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), items.len());
    for row in rows {
        let p = from_text(&std::fs::read_to_string(dir.path().join(&row.path)).unwrap()).unwrap();
        reverify(&p, row.label.as_f64().unwrap(), &solver).unwrap();
        let desc = std::fs::read_to_string(dir.path().join("descriptions").join(format!("{}.txt", row.id))).unwrap();
        assert!(!desc.contains("\\parameter"));
    }
}

#[test]
fn zero_counts_give_an_empty_manifest() {
    let cfg = GenerateConfig { counts: BTreeMap::new(), ..GenerateConfig::default() };
    let items = generate(&cfg, &SolverConfig::default()).unwrap();
    assert!(items.is_empty());
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&items, dir.path()).unwrap();
    assert_eq!(std::fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap(), "");
}

#[test]
fn config_from_toml() {
    let cfg: GenerateConfig = toml::from_str("seed = 9\n[counts]\nknapsack = 4\ntsp = 1\n").unwrap();
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.counts.get(&ClassId::Knapsack), Some(&4));
    assert_eq!(cfg.counts.get(&ClassId::Linear), None);
}

#[test]
fn wrong_label_fails_re_verification() {
    let items = generate(&small(2, 1), &SolverConfig::default()).unwrap();
    assert!(reverify(&items[0].problem, items[0].label + 1e-6 * items[0].label.abs().max(1.0), &SolverConfig::default()).is_err());
}
