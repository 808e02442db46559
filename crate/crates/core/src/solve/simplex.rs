//! Dense two-phase primal simplex.
//!
//! The LP relaxation of a [`Problem`] (with optional bound overrides) is put
//! into standard form `min c'y, Ay = b, y >= 0, b >= 0`:
//!
//! * a variable with finite lower bound is shifted, `x = l + y`, and a finite
//!   upper bound becomes the row `y <= u - l`;
//! * a variable with only an upper bound is mirrored, `x = u - y`;
//! * a free variable is split, `x = y+ - y-`.
//!
//! Pricing is Dantzig's most negative reduced cost. After `2 (n + m)`
//! consecutive degenerate pivots the phase switches to Bland's rule for the
//! rest of the phase. Leaving-row ties always go to the lowest basic column
//! index, which keeps every run reproducible.

use std::time::Instant;

use crate::model::{Problem, Relation, Sense};

use super::{SolveError, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpStatus {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub(crate) struct LpResult {
    pub status: LpStatus,
}

#[derive(Debug, Clone, Copy)]
enum Column {
    Shift { col: usize, offset: f64 },
    Mirror { col: usize, offset: f64 },
    Split { pos: usize, neg: usize },
}

struct Row {
    coefs: Vec<(usize, f64)>,
    relation: Relation,
    rhs: f64,
}

pub(crate) struct Tableau {
    rows: usize,
    cols: usize,
    // row-major, `cols + 1` entries per row; the last one is the rhs
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize, obj: &mut [f64]) {
        let width = self.cols + 1;
        let piv = self.at(pr, pc);
        {
            let row = &mut self.data[pr * width..(pr + 1) * width];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[pc] = 1.0;
        }
        let pivot_row: Vec<f64> = self.data[pr * width..(pr + 1) * width].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let factor = self.data[r * width + pc];
            if factor == 0.0 {
                continue;
            }
            let row = &mut self.data[r * width..(r + 1) * width];
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
                if v.abs() < 1e-13 {
                    *v = 0.0;
                }
            }
            row[pc] = 0.0;
        }
        let factor = obj[pc];
        if factor != 0.0 {
            for (v, p) in obj.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            obj[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }
}

pub(crate) struct Lp<'a> {
    cfg: &'a SolverConfig,
    started: Instant,
    pivots: u64,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl<'a> Lp<'a> {
    pub fn new(cfg: &'a SolverConfig, started: Instant) -> Self {
        Lp { cfg, started, pivots: 0 }
    }

    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    /// Solves the relaxation of `p` with variable bounds replaced by
    /// `lower`/`upper`. Returns the optimal point in the original variable
    /// space. `zero_objective` turns the solve into a pure feasibility check.
    pub fn solve(
        &mut self,
        p: &Problem,
        lower: &[f64],
        upper: &[f64],
        zero_objective: bool,
    ) -> Result<LpResult, SolveError> {
        let n = p.variables.len();
        for j in 0..n {
            if lower[j] > upper[j] {
                return Ok(LpResult { status: LpStatus::Infeasible });
            }
        }

        // Column mapping.
        let mut map = Vec::with_capacity(n);
        let mut ncols = 0usize;
        let mut rows: Vec<Row> = Vec::new();
        for j in 0..n {
            let (l, u) = (lower[j], upper[j]);
            if l.is_finite() {
                map.push(Column::Shift { col: ncols, offset: l });
                if u.is_finite() {
                    rows.push(Row { coefs: vec![(ncols, 1.0)], relation: Relation::Le, rhs: u - l });
                }
                ncols += 1;
            } else if u.is_finite() {
                map.push(Column::Mirror { col: ncols, offset: u });
                ncols += 1;
            } else {
                map.push(Column::Split { pos: ncols, neg: ncols + 1 });
                ncols += 2;
            }
        }
        let structural = ncols;

        let substitute = |terms: &[crate::model::Term]| -> (Vec<(usize, f64)>, f64) {
            let mut coefs = Vec::with_capacity(terms.len());
            let mut constant = 0.0;
            for t in terms {
                match map[t.var] {
                    Column::Shift { col, offset } => {
                        coefs.push((col, t.coef));
                        constant += t.coef * offset;
                    }
                    Column::Mirror { col, offset } => {
                        coefs.push((col, -t.coef));
                        constant += t.coef * offset;
                    }
                    Column::Split { pos, neg } => {
                        coefs.push((pos, t.coef));
                        coefs.push((neg, -t.coef));
                    }
                }
            }
            (coefs, constant)
        };

        let mut constraint_rows: Vec<Row> = Vec::with_capacity(p.constraints.len());
        for c in &p.constraints {
            let c = c.canonical();
            let (coefs, constant) = substitute(&c.lhs.terms);
            constraint_rows.push(Row { coefs, relation: c.relation, rhs: c.rhs - constant });
        }
        constraint_rows.append(&mut rows);
        let mut rows = constraint_rows;

        // Nonnegative right-hand sides.
        for r in rows.iter_mut() {
            if r.rhs < 0.0 {
                r.rhs = -r.rhs;
                for (_, a) in r.coefs.iter_mut() {
                    *a = -*a;
                }
                r.relation = match r.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }

        let m = rows.len();
        let n_slack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.relation != Relation::Le).count();
        let first_slack = structural;
        let first_art = structural + n_slack;
        let cols = structural + n_slack + n_art;
        let width = cols + 1;

        let mut t = Tableau { rows: m, cols, data: vec![0.0; m * width], basis: vec![0; m] };
        let (mut next_slack, mut next_art) = (first_slack, first_art);
        for (i, r) in rows.iter().enumerate() {
            let base = i * width;
            for &(c, a) in &r.coefs {
                t.data[base + c] += a;
            }
            t.data[base + cols] = r.rhs;
            match r.relation {
                Relation::Le => {
                    t.data[base + next_slack] = 1.0;
                    t.basis[i] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    t.data[base + next_slack] = -1.0;
                    next_slack += 1;
                    t.data[base + next_art] = 1.0;
                    t.basis[i] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    t.data[base + next_art] = 1.0;
                    t.basis[i] = next_art;
                    next_art += 1;
                }
            }
        }

        let degenerate_limit = 2 * (structural + m);

        // Phase 1: minimise the sum of artificials.
        if n_art > 0 {
            let mut obj = vec![0.0; width];
            for c in first_art..cols {
                obj[c] = 1.0;
            }
            for i in 0..m {
                if t.basis[i] >= first_art {
                    for c in 0..width {
                        obj[c] -= t.at(i, c);
                    }
                }
            }
            match self.run_phase(&mut t, &mut obj, cols, degenerate_limit)? {
                PhaseEnd::Optimal => {}
                PhaseEnd::Unbounded => unreachable!("phase one objective is bounded below by zero"),
            }
            let infeasibility = -obj[cols];
            let scale = rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);
            if infeasibility > 1e-7 * scale {
                return Ok(LpResult { status: LpStatus::Infeasible });
            }
            // Drive remaining artificials out of the basis where possible.
            for i in 0..m {
                if t.basis[i] >= first_art {
                    if let Some(c) = (0..first_art).find(|&c| t.at(i, c).abs() > 1e-9) {
                        let mut dummy = vec![0.0; width];
                        t.pivot(i, c, &mut dummy);
                        self.pivots += 1;
                    }
                }
            }
        }

        // Phase 2 on the structural objective (always minimised internally).
        let mut obj = vec![0.0; width];
        if !zero_objective {
            let sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
            let (coefs, _) = substitute(&p.objective.canonical().terms);
            for (c, a) in coefs {
                obj[c] += sign * a;
            }
            for i in 0..m {
                let b = t.basis[i];
                let cb = obj[b];
                if cb != 0.0 {
                    for c in 0..width {
                        obj[c] -= cb * t.at(i, c);
                    }
                }
            }
        }
        let end = self.run_phase(&mut t, &mut obj, first_art, degenerate_limit)?;
        if let PhaseEnd::Unbounded = end {
            return Ok(LpResult { status: LpStatus::Unbounded });
        }

        let mut y = vec![0.0; cols];
        for i in 0..m {
            y[t.basis[i]] = t.rhs(i);
        }
        let x = map
            .iter()
            .enumerate()
            .map(|(j, col)| {
                let v = match *col {
                    Column::Shift { col, offset } => offset + y[col],
                    Column::Mirror { col, offset } => offset - y[col],
                    Column::Split { pos, neg } => y[pos] - y[neg],
                };
                v.clamp(lower[j], upper[j])
            })
            .collect();
        Ok(LpResult { status: LpStatus::Optimal(x) })
    }

    /// Pivots until no column below `entering_limit` has a negative reduced
    /// cost. Columns at or above the limit (artificials in phase two) never
    /// enter.
    fn run_phase(
        &mut self,
        t: &mut Tableau,
        obj: &mut [f64],
        entering_limit: usize,
        degenerate_limit: usize,
    ) -> Result<PhaseEnd, SolveError> {
        let tol = self.cfg.lp_tolerance;
        let mut bland = false;
        let mut degenerate_run = 0usize;
        let max_pivots = self.cfg.max_pivots.unwrap_or(200 * (t.rows + t.cols) as u64 + 10_000);
        let mut phase_pivots = 0u64;
        loop {
            let entering = if bland {
                (0..entering_limit).find(|&c| obj[c] < -tol)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for (c, &d) in obj.iter().enumerate().take(entering_limit) {
                    if d < -tol && best.is_none_or(|(_, bd)| d < bd) {
                        best = Some((c, d));
                    }
                }
                best.map(|(c, _)| c)
            };
            let Some(pc) = entering else {
                return Ok(PhaseEnd::Optimal);
            };

            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..t.rows {
                let a = t.at(r, pc);
                if a > tol {
                    let ratio = t.rhs(r) / a;
                    let better = match leaving {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - 1e-12 || (ratio <= lratio + 1e-12 && t.basis[r] < t.basis[lr])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((pr, ratio)) = leaving else {
                return Ok(PhaseEnd::Unbounded);
            };

            if ratio <= tol {
                degenerate_run += 1;
                if degenerate_run >= degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }

            t.pivot(pr, pc, obj);
            self.pivots += 1;
            phase_pivots += 1;
            if phase_pivots > max_pivots {
                return Err(SolveError::IterationLimit { pivots: self.pivots });
            }
            if phase_pivots % 64 == 0 {
                self.check_time()?;
            }
        }
    }

    pub fn check_time(&self) -> Result<(), SolveError> {
        if self.started.elapsed() > self.cfg.time_limit {
            return Err(SolveError::TimeLimit { seconds: self.cfg.time_limit.as_secs_f64() });
        }
        Ok(())
    }
}
