//! Accuracy, execution rate and label audits.

use serde::{Deserialize, Serialize};

use crate::model::text::from_text;
use crate::solve::{solve_milp, SolveOutcome, SolverConfig};

pub const STRICT_EPSILON: f64 = 1e-4;
pub const ROUNDED_EPSILON: f64 = 1e-1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("label `{0}` is not a number")]
    BadLabel(String),
    #[error("no records to score")]
    Empty,
}

/// Digits after the decimal point as written, exponent applied.
pub fn label_decimals(label: &str) -> Result<usize, EvalError> {
    let t = label.trim();
    let v: f64 = t.parse().map_err(|_| EvalError::BadLabel(label.to_string()))?;
    if !v.is_finite() {
        return Err(EvalError::BadLabel(label.to_string()));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| EvalError::BadLabel(label.to_string()))?),
        None => (t, 0),
    };
    let frac = mantissa.split_once('.').map_or(0, |(_, f)| f.len()) as i64;
    Ok((frac - exp).max(0) as usize)
}

/// Labels written with at most one decimal are taken to be rounded and get
/// the loose tolerance.
pub fn choose_epsilon(label: &str) -> Result<f64, EvalError> {
    Ok(if label_decimals(label)? <= 1 { ROUNDED_EPSILON } else { STRICT_EPSILON })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub instance_id: String,
    pub predicted: Option<f64>,
    pub executed_ok: bool,
    /// The label exactly as stored.
    pub label: String,
}

impl EvalRecord {
    pub fn label_value(&self) -> Result<f64, EvalError> {
        self.label.trim().parse().map_err(|_| EvalError::BadLabel(self.label.clone()))
    }
}

pub fn is_correct(r: &EvalRecord) -> bool {
    match (r.predicted, r.label_value(), choose_epsilon(&r.label)) {
        (Some(p), Ok(l), Ok(eps)) => (p - l).abs() <= eps,
        _ => false,
    }
}

pub fn solution_accuracy(records: &[EvalRecord]) -> Result<f64, EvalError> {
    fraction(records, is_correct)
}

pub fn execution_rate(records: &[EvalRecord]) -> Result<f64, EvalError> {
    fraction(records, |r| r.executed_ok)
}

fn fraction(records: &[EvalRecord], f: impl Fn(&EvalRecord) -> bool) -> Result<f64, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(records.iter().filter(|r| f(r)).count() as f64 / records.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub total: usize,
    pub correct: usize,
    pub executed: usize,
    pub accuracy: f64,
    pub execution_rate: f64,
    pub per_instance: Vec<(String, bool)>,
}

pub fn evaluate(records: &[EvalRecord]) -> Result<EvalReport, EvalError> {
    let accuracy = solution_accuracy(records)?;
    let execution_rate = execution_rate(records)?;
    let per_instance: Vec<(String, bool)> = records.iter().map(|r| (r.instance_id.clone(), is_correct(r))).collect();
    Ok(EvalReport {
        total: records.len(),
        correct: per_instance.iter().filter(|(_, c)| *c).count(),
        executed: records.iter().filter(|r| r.executed_ok).count(),
        accuracy,
        execution_rate,
        per_instance,
    })
}

/// A benchmark line: `problem` is the model in text format when one exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    pub label: serde_json::Number,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confirmed,
    Mismatch,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditFinding {
    pub instance_id: String,
    pub stored_label: serde_json::Number,
    pub solver_value: Option<f64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub findings: Vec<AuditFinding>,
    pub confirmed: usize,
    pub mismatches: usize,
    pub unsupported: usize,
    /// Mismatches over confirmed plus mismatches; absent when both are zero.
    pub error_rate: Option<f64>,
}

fn audit_one(e: &DatasetEntry, solver: &SolverConfig) -> AuditFinding {
    let finding = |solver_value, verdict, reason: Option<String>| AuditFinding {
        instance_id: e.id.clone(),
        stored_label: e.label.clone(),
        solver_value,
        verdict,
        reason,
    };
    let label_text = e.label.to_string();
    let (label, eps) = match (label_text.parse::<f64>(), choose_epsilon(&label_text)) {
        (Ok(l), Ok(eps)) => (l, eps),
        _ => return finding(None, Verdict::Unsupported, Some(format!("label {label_text} is not usable"))),
    };
    let Some(text) = &e.problem else {
        return finding(None, Verdict::Unsupported, Some("no machine-readable model".into()));
    };
    let problem = match from_text(text) {
        Ok(p) => p,
        Err(err) => return finding(None, Verdict::Unsupported, Some(format!("model not representable: {err}"))),
    };
    match solve_milp(&problem, solver) {
        Ok(SolveOutcome::Optimal { value, .. }) => {
            if (value - label).abs() <= eps {
                finding(Some(value), Verdict::Confirmed, None)
            } else {
                finding(Some(value), Verdict::Mismatch, Some(format!("differs by {}", (value - label).abs())))
            }
        }
        Ok(other) => finding(None, Verdict::Mismatch, Some(format!("solver reports {}", other.status()))),
        Err(err) => finding(None, Verdict::Unsupported, Some(err.to_string())),
    }
}

/// Re-solves every entry and compares with its stored label. Entries are
/// split over `workers` threads; findings keep input order.
pub fn audit(entries: &[DatasetEntry], solver: &SolverConfig, workers: usize) -> AuditReport {
    let chunk = entries.len().div_ceil(workers.max(1)).max(1);
    let findings: Vec<AuditFinding> = std::thread::scope(|s| {
        let handles: Vec<_> = entries
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|e| audit_one(e, solver)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("audit worker panicked")).collect()
    });
    let count = |v| findings.iter().filter(|f| f.verdict == v).count();
    let (confirmed, mismatches, unsupported) = (count(Verdict::Confirmed), count(Verdict::Mismatch), count(Verdict::Unsupported));
    let judged = confirmed + mismatches;
    let error_rate = (judged > 0).then(|| mismatches as f64 / judged as f64);
    AuditReport { findings, confirmed, mismatches, unsupported, error_rate }
}
