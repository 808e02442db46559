//! Regenerates the bundled mini-suite and its replay transcript.
//!
//! cargo run -p milpgen --example build_mini_suite

use std::fs;
use std::path::Path;

use milpgen::agent::suite::{build_mini_suite, perfect_transcript, write_instances, MINI_SUITE_SEED};
use milpgen::agent::AgentConfig;
use milpgen::teacher::write_transcript;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_suite");
    let instances = build_mini_suite(MINI_SUITE_SEED)?;
    let transcript = perfect_transcript(&instances, &AgentConfig::default())?;
    fs::write(dir.join("instances.jsonl"), write_instances(&instances))?;
    fs::write(dir.join("transcript.jsonl"), write_transcript(&transcript))?;
    println!("{} instances, {} scripted responses", instances.len(), transcript.len());
    Ok(())
}
