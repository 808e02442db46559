use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::model::{Problem, Sense};

use super::simplex::{Lp, LpStatus};
use super::{optimal_at, SolveError, SolveOutcome, SolveStats, SolverConfig, Status};

struct Node {
    // relaxation bound in minimisation form
    bound: f64,
    id: u64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    point: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: the best node is the one with the smallest
    // bound, then the smallest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.id.cmp(&self.id))
    }
}

struct Search<'a> {
    p: &'a Problem,
    cfg: &'a SolverConfig,
    lp: Lp<'a>,
    started: Instant,
    nodes: u64,
    next_id: u64,
    zero_objective: bool,
    integral_objective: bool,
}

enum Relaxed {
    Node(Node),
    Infeasible,
    Unbounded,
}

impl<'a> Search<'a> {
    fn min_form(&self, v: f64) -> f64 {
        if self.zero_objective {
            0.0
        } else if self.p.sense == Sense::Maximize {
            -v
        } else {
            v
        }
    }

    fn relax(&mut self, lower: Vec<f64>, upper: Vec<f64>) -> Result<Relaxed, SolveError> {
        if self.nodes >= self.cfg.node_limit {
            return Err(SolveError::NodeLimit { limit: self.cfg.node_limit });
        }
        self.nodes += 1;
        if self.started.elapsed() > self.cfg.time_limit {
            return Err(SolveError::TimeLimit { seconds: self.cfg.time_limit.as_secs_f64() });
        }
        let res = self.lp.solve(self.p, &lower, &upper, self.zero_objective)?;
        Ok(match res.status {
            LpStatus::Infeasible => Relaxed::Infeasible,
            LpStatus::Unbounded => Relaxed::Unbounded,
            LpStatus::Optimal(point) => {
                let bound = self.min_form(self.p.objective.eval(&point));
                let id = self.next_id;
                self.next_id += 1;
                Relaxed::Node(Node { bound, id, lower, upper, point })
            }
        })
    }

    /// Most fractional integral variable, lowest index on ties.
    fn branching_var(&self, point: &[f64]) -> Option<usize> {
        let tol = self.cfg.integrality_tolerance;
        let mut best: Option<(usize, f64)> = None;
        for (j, v) in self.p.variables.iter().enumerate() {
            if !v.integral {
                continue;
            }
            let frac = point[j] - point[j].floor();
            let score = frac.min(1.0 - frac);
            if score > tol && best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Integral point with integer variables snapped, if it stays feasible.
    fn snap(&self, point: &[f64]) -> Vec<f64> {
        let snapped: Vec<f64> = point
            .iter()
            .zip(&self.p.variables)
            .map(|(&x, v)| if v.integral { x.round() } else { x })
            .collect();
        match self.p.evaluate(&snapped.clone().into()) {
            Ok(e) if e.feasible => snapped,
            _ => point.to_vec(),
        }
    }

    /// `true` when a node with this bound may still beat the incumbent.
    fn can_improve(&self, bound: f64, incumbent: f64) -> bool {
        if self.integral_objective {
            // every integral point has an integer objective value
            return (bound - 1e-6).ceil() <= incumbent - 1.0 + 1e-9;
        }
        bound < incumbent - self.cfg.lp_tolerance * incumbent.abs().max(1.0)
    }
}

/// Objective takes only integer values on integral points when every term
/// is an integer multiple of an integral variable and the constant is an
/// integer.
fn has_integral_objective(p: &Problem) -> bool {
    p.objective.constant.fract() == 0.0
        && p.objective.terms.iter().all(|t| p.variables[t.var].integral && t.coef.fract() == 0.0)
}

pub(super) fn branch_and_bound(p: &Problem, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    let started = Instant::now();
    let tol = cfg.integrality_tolerance;
    let mut lower = Vec::with_capacity(p.variables.len());
    let mut upper = Vec::with_capacity(p.variables.len());
    for v in &p.variables {
        if v.integral {
            lower.push(if v.lower.is_finite() { (v.lower - tol).ceil() } else { v.lower });
            upper.push(if v.upper.is_finite() { (v.upper + tol).floor() } else { v.upper });
        } else {
            lower.push(v.lower);
            upper.push(v.upper);
        }
    }
    if lower.iter().zip(&upper).any(|(l, u)| l > u) {
        return Ok(SolveOutcome::Infeasible { stats: SolveStats::default() });
    }

    let mut search = Search {
        p,
        cfg,
        lp: Lp::new(cfg, started),
        started,
        nodes: 0,
        next_id: 0,
        zero_objective: false,
        integral_objective: has_integral_objective(p),
    };

    match search.relax(lower.clone(), upper.clone())? {
        Relaxed::Infeasible => {
            let stats = SolveStats { pivots: search.lp.pivots(), nodes: search.nodes };
            Ok(SolveOutcome::Infeasible { stats })
        }
        Relaxed::Unbounded => {
            // An unbounded relaxation means the MILP is unbounded exactly when
            // it has any integral feasible point (rational data).
            search.zero_objective = true;
            search.integral_objective = true;
            let root = search.relax(lower, upper)?;
            let found = run(&mut search, root, true)?;
            let stats = SolveStats { pivots: search.lp.pivots(), nodes: search.nodes };
            let status = if found.is_some() { Status::Unbounded } else { Status::Infeasible };
            Ok(SolveOutcome::with_status(status, stats))
        }
        root @ Relaxed::Node(_) => {
            let best = run(&mut search, root, false)?;
            let stats = SolveStats { pivots: search.lp.pivots(), nodes: search.nodes };
            match best {
                Some(point) => optimal_at(p, point, stats),
                None => Ok(SolveOutcome::Infeasible { stats }),
            }
        }
    }
}

/// Best-first search from `root`. Returns the best integral point, or the
/// first one found when `first_feasible` is set.
fn run(search: &mut Search<'_>, root: Relaxed, first_feasible: bool) -> Result<Option<Vec<f64>>, SolveError> {
    let mut heap = BinaryHeap::new();
    match root {
        Relaxed::Node(n) => heap.push(n),
        Relaxed::Infeasible => return Ok(None),
        Relaxed::Unbounded => return Err(SolveError::Numerical("feasibility relaxation reported unbounded".into())),
    }
    let mut incumbent: Option<(f64, Vec<f64>)> = None;

    while let Some(node) = heap.pop() {
        if let Some((inc, _)) = &incumbent {
            if !search.can_improve(node.bound, *inc) {
                // best-first: no remaining node can improve either
                break;
            }
        }
        let Some(j) = search.branching_var(&node.point) else {
            let point = search.snap(&node.point);
            let value = search.min_form(search.p.objective.eval(&point));
            if first_feasible {
                return Ok(Some(point));
            }
            if incumbent.as_ref().is_none_or(|(inc, _)| value < *inc) {
                incumbent = Some((value, point));
            }
            continue;
        };

        let x = node.point[j];
        let mut down_upper = node.upper.clone();
        down_upper[j] = x.floor();
        let mut up_lower = node.lower.clone();
        up_lower[j] = x.ceil();

        for (lo, hi) in [(node.lower.clone(), down_upper), (up_lower, node.upper.clone())] {
            match search.relax(lo, hi)? {
                Relaxed::Node(child) => {
                    let promising = match &incumbent {
                        Some((inc, _)) => search.can_improve(child.bound, *inc),
                        None => true,
                    };
                    if promising {
                        heap.push(child);
                    }
                }
                Relaxed::Infeasible => {}
                Relaxed::Unbounded => {
                    return Err(SolveError::Numerical("child of a bounded relaxation reported unbounded".into()))
                }
            }
        }
    }
    Ok(incumbent.map(|(_, p)| p))
}
