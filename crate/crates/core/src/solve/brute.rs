use crate::model::{Problem, Relation, Sense, FEASIBILITY_TOL};

use super::{optimal_at, SolveError, SolveOutcome, SolveStats};

/// Largest grid [`brute_force`] will enumerate.
pub const MAX_GRID_POINTS: u64 = 10_000_000;

/// Exhaustive enumeration over the integer grid spanned by the variable
/// bounds. Every variable must be integral with finite bounds. Ties keep the
/// lexicographically first point (first variable slowest).
pub fn brute_force(problem: &Problem) -> Result<SolveOutcome, SolveError> {
    problem.validate()?;
    let p = problem.canonicalize();
    let n = p.variables.len();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut size: u64 = 1;
    for v in &p.variables {
        if !v.integral {
            return Err(SolveError::Unsupported(format!("variable {} is continuous", v.name)));
        }
        if !v.lower.is_finite() || !v.upper.is_finite() {
            return Err(SolveError::Unsupported(format!("variable {} is unbounded", v.name)));
        }
        let (l, u) = ((v.lower - FEASIBILITY_TOL).ceil(), (v.upper + FEASIBILITY_TOL).floor());
        if l > u {
            return Ok(SolveOutcome::Infeasible { stats: SolveStats::default() });
        }
        size = size.saturating_mul((u - l) as u64 + 1);
        if size > MAX_GRID_POINTS {
            return Err(SolveError::Unsupported(format!("grid exceeds {MAX_GRID_POINTS} points")));
        }
        lo.push(l);
        hi.push(u);
    }

    // Dense rows for a tight inner loop.
    let rows: Vec<(Vec<f64>, Relation, f64)> = p
        .constraints
        .iter()
        .map(|c| {
            let mut dense = vec![0.0; n];
            for t in &c.lhs.terms {
                dense[t.var] += t.coef;
            }
            (dense, c.relation, c.rhs)
        })
        .collect();
    let mut obj = vec![0.0; n];
    for t in &p.objective.terms {
        obj[t.var] += t.coef;
    }

    let mut x = lo.clone();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut visited = 0u64;
    loop {
        visited += 1;
        let feasible = rows.iter().all(|(a, rel, b)| {
            let act: f64 = a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum();
            match rel {
                Relation::Le => act - b <= FEASIBILITY_TOL,
                Relation::Ge => b - act <= FEASIBILITY_TOL,
                Relation::Eq => (act - b).abs() <= FEASIBILITY_TOL,
            }
        });
        if feasible {
            let v: f64 = obj.iter().zip(&x).map(|(c, xi)| c * xi).sum();
            let better = match &best {
                None => true,
                Some((bv, _)) => match p.sense {
                    Sense::Minimize => v < *bv,
                    Sense::Maximize => v > *bv,
                },
            };
            if better {
                best = Some((v, x.clone()));
            }
        }
        // odometer, last variable fastest
        let mut k = n;
        loop {
            if k == 0 {
                let stats = SolveStats { pivots: 0, nodes: visited };
                return match best {
                    Some((_, point)) => optimal_at(&p, point, stats),
                    None => Ok(SolveOutcome::Infeasible { stats }),
                };
            }
            k -= 1;
            if x[k] < hi[k] {
                x[k] += 1.0;
                break;
            }
            x[k] = lo[k];
        }
    }
}
