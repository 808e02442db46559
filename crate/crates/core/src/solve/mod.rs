//! Exact LP/MILP solving.
//!
//! [`solve_milp`] is the ground-truth oracle for everything the generator
//! emits: a value stored next to a generated instance is whatever this engine
//! reports. [`brute_force`] enumerates small integer grids and exists to test
//! the engine independently of the simplex code path.

mod branch;
mod brute;
mod simplex;

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{Assignment, ModelError, Problem};

pub use brute::{brute_force, MAX_GRID_POINTS};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub lp_tolerance: f64,
    pub integrality_tolerance: f64,
    pub node_limit: u64,
    pub time_limit: Duration,
    /// Per-phase pivot cap; `None` derives one from the tableau size.
    pub max_pivots: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lp_tolerance: 1e-9,
            integrality_tolerance: 1e-6,
            node_limit: 1_000_000,
            time_limit: Duration::from_secs(30),
            max_pivots: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.lp_tolerance > 0.0) || !(self.integrality_tolerance > 0.0) {
            return Err(SolveError::BadConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid problem: {0}")]
    Model(#[from] ModelError),
    #[error("invalid solver configuration: {0}")]
    BadConfig(String),
    #[error("simplex iteration limit reached after {pivots} pivots")]
    IterationLimit { pivots: u64 },
    #[error("branch-and-bound node limit of {limit} reached")]
    NodeLimit { limit: u64 },
    #[error("time limit of {seconds} s reached")]
    TimeLimit { seconds: f64 },
    #[error("numerical trouble: {0}")]
    Numerical(String),
    #[error("brute force unsupported: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "Optimal",
            Status::Infeasible => "Infeasible",
            Status::Unbounded => "Unbounded",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveStats {
    pub pivots: u64,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Optimal { value: f64, point: Assignment, stats: SolveStats },
    Infeasible { stats: SolveStats },
    Unbounded { stats: SolveStats },
}

impl SolveOutcome {
    pub fn status(&self) -> Status {
        match self {
            SolveOutcome::Optimal { .. } => Status::Optimal,
            SolveOutcome::Infeasible { .. } => Status::Infeasible,
            SolveOutcome::Unbounded { .. } => Status::Unbounded,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            SolveOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&Assignment> {
        match self {
            SolveOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    pub fn stats(&self) -> SolveStats {
        match self {
            SolveOutcome::Optimal { stats, .. }
            | SolveOutcome::Infeasible { stats }
            | SolveOutcome::Unbounded { stats } => *stats,
        }
    }

    pub(crate) fn with_status(status: Status, stats: SolveStats) -> SolveOutcome {
        match status {
            Status::Infeasible => SolveOutcome::Infeasible { stats },
            Status::Unbounded => SolveOutcome::Unbounded { stats },
            Status::Optimal => unreachable!("optimal outcomes carry a point"),
        }
    }
}

impl fmt::Display for SolveOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveOutcome::Optimal { value, .. } => write!(f, "Optimal value: {value}"),
            other => write!(f, "{}", other.status()),
        }
    }
}

/// Optimal outcome for `point`, with the value taken from evaluating the
/// objective there so that value and point can never disagree.
pub(crate) fn optimal_at(p: &Problem, point: Vec<f64>, stats: SolveStats) -> Result<SolveOutcome, SolveError> {
    let point = Assignment::from(point);
    let value = p.evaluate(&point)?.objective;
    Ok(SolveOutcome::Optimal { value, point, stats })
}

/// Solves the LP relaxation (integrality is ignored).
pub fn solve_lp(problem: &Problem, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    cfg.validate()?;
    problem.validate()?;
    let p = problem.canonicalize();
    let lower: Vec<f64> = p.variables.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = p.variables.iter().map(|v| v.upper).collect();
    let mut lp = simplex::Lp::new(cfg, Instant::now());
    let res = lp.solve(&p, &lower, &upper, false)?;
    let stats = SolveStats { pivots: lp.pivots(), nodes: 0 };
    match res.status {
        simplex::LpStatus::Optimal(x) => optimal_at(&p, x, stats),
        simplex::LpStatus::Infeasible => Ok(SolveOutcome::Infeasible { stats }),
        simplex::LpStatus::Unbounded => Ok(SolveOutcome::Unbounded { stats }),
    }
}

/// Solves the problem with integrality enforced by best-first
/// branch-and-bound. Problems without integral variables go straight to
/// [`solve_lp`].
pub fn solve_milp(problem: &Problem, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    if !problem.has_integers() {
        return solve_lp(problem, cfg);
    }
    cfg.validate()?;
    problem.validate()?;
    branch::branch_and_bound(&problem.canonicalize(), cfg)
}

/// `true` iff the problem solves to optimality and the optimum is within
/// `eps` (absolute) of `claimed`.
pub fn verify_value(problem: &Problem, claimed: f64, eps: f64, cfg: &SolverConfig) -> Result<bool, SolveError> {
    if !(eps > 0.0) {
        return Err(SolveError::BadConfig(format!("epsilon must be positive, got {eps}")));
    }
    Ok(match solve_milp(problem, cfg)?.value() {
        Some(v) => (v - claimed).abs() <= eps,
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, LinearExpr, Relation, Sense, Variable};

    fn small_lp() -> Problem {
        let mut p = Problem::new(Sense::Maximize);
        let x = p.add_variable(Variable::nonneg("x"));
        let y = p.add_variable(Variable::nonneg("y"));
        p.set_objective(LinearExpr::from_terms([(x, 3.0), (y, 2.0)]));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0), (y, 1.0)]), Relation::Le, 4.0));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0)]), Relation::Le, 2.0));
        p
    }

    /// max 5x + 4y, 6x + 4y <= 24, x + 2y <= 6, x, y integer >= 0
    fn small_milp() -> Problem {
        let mut p = Problem::new(Sense::Maximize);
        let x = p.add_variable(Variable::integer("x", 0.0, f64::INFINITY));
        let y = p.add_variable(Variable::integer("y", 0.0, f64::INFINITY));
        p.set_objective(LinearExpr::from_terms([(x, 5.0), (y, 4.0)]));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 6.0), (y, 4.0)]), Relation::Le, 24.0));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0), (y, 2.0)]), Relation::Le, 6.0));
        p
    }

    #[test]
    fn lp_vertex_optimum() {
        let out = solve_lp(&small_lp(), &SolverConfig::default()).unwrap();
        assert_eq!(out.status(), Status::Optimal);
        assert!((out.value().unwrap() - 10.0).abs() < 1e-9);
        let pt = &out.point().unwrap().values;
        assert!((pt[0] - 2.0).abs() < 1e-9 && (pt[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn lp_empty_box_is_infeasible() {
        let mut p = Problem::new(Sense::Minimize);
        let x = p.add_variable(Variable::continuous("x", f64::NEG_INFINITY, f64::INFINITY));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0)]), Relation::Ge, 1.0));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0)]), Relation::Le, 0.0));
        assert_eq!(solve_lp(&p, &SolverConfig::default()).unwrap().status(), Status::Infeasible);
    }

    #[test]
    fn lp_unbounded_ray() {
        let mut p = Problem::new(Sense::Maximize);
        let x = p.add_variable(Variable::nonneg("x"));
        p.set_objective(LinearExpr::from_terms([(x, 1.0)]));
        assert_eq!(solve_lp(&p, &SolverConfig::default()).unwrap().status(), Status::Unbounded);
    }

    #[test]
    fn lp_free_and_mirrored_variables() {
        // min x - y, x free, y <= 3 (no lower bound), x + y >= -2, x >= -5 via row
        let mut p = Problem::new(Sense::Minimize);
        let x = p.add_variable(Variable::continuous("x", f64::NEG_INFINITY, f64::INFINITY));
        let y = p.add_variable(Variable::continuous("y", f64::NEG_INFINITY, 3.0));
        p.set_objective(LinearExpr::from_terms([(x, 1.0), (y, -1.0)]));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0), (y, 1.0)]), Relation::Ge, -2.0));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0)]), Relation::Ge, -5.0));
        let out = solve_lp(&p, &SolverConfig::default()).unwrap();
        // y = 3, x = -5 gives -8 and satisfies x + y = -2.
        assert!((out.value().unwrap() + 8.0).abs() < 1e-9, "{out:?}");
    }

    #[test]
    fn lp_equality_rows() {
        // min x + y, x + y = 3, x - y = 1 -> (2, 1)
        let mut p = Problem::new(Sense::Minimize);
        let x = p.add_variable(Variable::nonneg("x"));
        let y = p.add_variable(Variable::nonneg("y"));
        p.set_objective(LinearExpr::from_terms([(x, 1.0), (y, 1.0)]));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0), (y, 1.0)]), Relation::Eq, 3.0));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0), (y, -1.0)]), Relation::Eq, 1.0));
        // redundant copy of the first row
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 2.0), (y, 2.0)]), Relation::Eq, 6.0));
        let out = solve_lp(&p, &SolverConfig::default()).unwrap();
        let pt = &out.point().unwrap().values;
        assert!((pt[0] - 2.0).abs() < 1e-9 && (pt[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn milp_matches_grid_enumeration() {
        let p = small_milp();
        // Grid oracle: x <= 4 from the first row, y <= 3 from the second.
        let mut best = f64::MIN;
        for x in 0..=4 {
            for y in 0..=3 {
                let (xf, yf) = (x as f64, y as f64);
                if 6.0 * xf + 4.0 * yf <= 24.0 && xf + 2.0 * yf <= 6.0 {
                    best = best.max(5.0 * xf + 4.0 * yf);
                }
            }
        }
        assert_eq!(best, 20.0);
        let out = solve_milp(&p, &SolverConfig::default()).unwrap();
        assert_eq!(out.value(), Some(20.0));
        assert_eq!(out.point().unwrap().values, vec![4.0, 0.0]);
        assert!(p.evaluate(out.point().unwrap()).unwrap().feasible);
    }

    #[test]
    fn milp_on_continuous_problem_equals_lp() {
        let cfg = SolverConfig::default();
        assert_eq!(solve_milp(&small_lp(), &cfg).unwrap(), solve_lp(&small_lp(), &cfg).unwrap());
    }

    #[test]
    fn milp_floors_fractional_bound() {
        let mut p = Problem::new(Sense::Maximize);
        let x = p.add_variable(Variable::integer("x", 0.0, 10.0));
        p.set_objective(LinearExpr::from_terms([(x, 1.0)]));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0)]), Relation::Le, 7.3));
        assert_eq!(solve_milp(&p, &SolverConfig::default()).unwrap().value(), Some(7.0));
    }

    #[test]
    fn milp_unbounded_and_integer_infeasible() {
        let cfg = SolverConfig::default();
        let mut p = Problem::new(Sense::Maximize);
        let x = p.add_variable(Variable::integer("x", 0.0, f64::INFINITY));
        p.set_objective(LinearExpr::from_terms([(x, 1.0)]));
        assert_eq!(solve_milp(&p, &cfg).unwrap().status(), Status::Unbounded);

        // 2x = 1 has no integer solution even though the relaxation is unbounded in y.
        let y = p.add_variable(Variable::nonneg("y"));
        p.set_objective(LinearExpr::from_terms([(y, 1.0)]));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 2.0)]), Relation::Eq, 1.0));
        assert_eq!(solve_milp(&p, &cfg).unwrap().status(), Status::Infeasible);
    }

    #[test]
    fn verify_value_uses_absolute_epsilon() {
        let cfg = SolverConfig::default();
        let p = small_milp();
        assert!(verify_value(&p, 20.00005, 1e-4, &cfg).unwrap());
        assert!(!verify_value(&p, 19.5, 1e-4, &cfg).unwrap());
        assert!(verify_value(&p, 20.04, 1e-1, &cfg).unwrap());
        assert!(verify_value(&p, 20.0, 0.0, &cfg).is_err());
    }

    #[test]
    fn deterministic_stats() {
        let cfg = SolverConfig::default();
        let a = solve_milp(&small_milp(), &cfg).unwrap();
        let b = solve_milp(&small_milp(), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.stats().nodes >= 1);
    }

    #[test]
    fn node_limit_is_an_error() {
        let cfg = SolverConfig { node_limit: 1, ..SolverConfig::default() };
        // relaxation optimum is fractional so a second node is needed
        let err = solve_milp(&small_milp(), &cfg);
        assert!(matches!(err, Err(SolveError::NodeLimit { limit: 1 })), "{err:?}");
    }

    #[test]
    fn display() {
        let out = solve_milp(&small_milp(), &SolverConfig::default()).unwrap();
        assert_eq!(out.to_string(), "Optimal value: 20");
    }
}
