//! Structural and coefficient sampling for general linear instances.
//!
//! Generation runs in three steps. [`sample_structure`] draws the shape
//! (size, sense, bounds, sparsity, application domain). [`build_symbolic`]
//! names one parameter per active coefficient slot. [`sample_coefficients`]
//! instantiates the parameters from [`ParameterRanges`]. Candidates are then
//! screened by [`filter_feasible`], which keeps only instances with a finite
//! optimum and pairs each with its solver value.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Constraint, LinearExpr, Problem, Relation, Sense, Variable};
use crate::solve::{solve_milp, SolveError, SolveOutcome, SolverConfig};

/// Seed application domains for problem descriptions.
pub const DOMAINS: [&str; 18] = [
    "manufacturing and production",
    "supply chain management",
    "food and beverage",
    "transportation and logistics",
    "healthcare and medical",
    "retail and e-commerce",
    "environmental and sustainability",
    "agriculture and forestry",
    "science and research",
    "energy and power systems",
    "finance and banking",
    "sports and entertainment",
    "government and public sector",
    "education",
    "human resources",
    "telecommunications",
    "marketing and media",
    "aerospace and defense",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("no application domains configured")]
    EmptyDomains,
    #[error("invalid sampler configuration: {0}")]
    BadConfig(String),
    #[error("no range defined for parameter {0}")]
    MissingRange(String),
    #[error("invalid range for parameter {name}: [{min}, {max}]")]
    BadRange { name: String, min: f64, max: f64 },
    #[error("invalid structure: {0}")]
    BadStructure(String),
}

/// Structural distributions. Every field has a documented default and can be
/// overridden from a TOML generation config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub min_vars: usize,
    pub max_vars: usize,
    pub min_constraints: usize,
    pub max_constraints: usize,
    /// Probability of drawing `Maximize`.
    pub maximize_probability: f64,
    /// Per-slot probability that a coefficient is kept (nonzero).
    pub keep_probability: f64,
    pub lower_bound_probability: f64,
    pub upper_bound_probability: f64,
    pub integer_probability: f64,
    /// Probability that a row points "against" the objective (a `>=` row in
    /// a maximisation, a `<=` row in a minimisation).
    pub opposing_row_probability: f64,
    /// Coefficient resamples per symbolic problem before it is abandoned.
    pub retry_budget: usize,
    pub domains: Vec<String>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            min_vars: 2,
            max_vars: 8,
            min_constraints: 2,
            max_constraints: 8,
            maximize_probability: 0.5,
            keep_probability: 0.7,
            lower_bound_probability: 0.3,
            upper_bound_probability: 0.3,
            integer_probability: 0.5,
            opposing_row_probability: 0.15,
            retry_budget: 25,
            domains: DOMAINS.iter().map(|d| d.to_string()).collect(),
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), SampleError> {
        if self.domains.is_empty() {
            return Err(SampleError::EmptyDomains);
        }
        if self.min_vars == 0 || self.min_vars > self.max_vars {
            return Err(SampleError::BadConfig(format!("variable range [{}, {}]", self.min_vars, self.max_vars)));
        }
        if self.min_constraints == 0 || self.min_constraints > self.max_constraints {
            return Err(SampleError::BadConfig(format!(
                "constraint range [{}, {}]",
                self.min_constraints, self.max_constraints
            )));
        }
        for (name, p) in [
            ("maximize_probability", self.maximize_probability),
            ("keep_probability", self.keep_probability),
            ("lower_bound_probability", self.lower_bound_probability),
            ("upper_bound_probability", self.upper_bound_probability),
            ("integer_probability", self.integer_probability),
            ("opposing_row_probability", self.opposing_row_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SampleError::BadConfig(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }
}

/// Derives the seed of item `index` in a batch seeded with `seed`
/// (SplitMix64 finaliser over the pair).
pub fn child_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureSpec {
    pub n: usize,
    pub m: usize,
    pub sense: Sense,
    pub has_lower: Vec<bool>,
    pub has_upper: Vec<bool>,
    pub integral: Vec<bool>,
    pub objective_mask: Vec<bool>,
    pub constraint_masks: Vec<Vec<bool>>,
    pub relations: Vec<Relation>,
    pub domain: String,
}

impl StructureSpec {
    pub fn validate(&self) -> Result<(), SampleError> {
        let bad = |m: &str| Err(SampleError::BadStructure(m.to_string()));
        if self.n == 0 || self.m == 0 {
            return bad("n and m must be at least 1");
        }
        if self.has_lower.len() != self.n || self.has_upper.len() != self.n || self.integral.len() != self.n {
            return bad("per-variable flags must have length n");
        }
        if self.objective_mask.len() != self.n || !self.objective_mask.iter().any(|&b| b) {
            return bad("objective mask must have length n and at least one active slot");
        }
        if self.constraint_masks.len() != self.m || self.relations.len() != self.m {
            return bad("need one mask and one relation per constraint");
        }
        if self.constraint_masks.iter().any(|mask| mask.len() != self.n || !mask.iter().any(|&b| b)) {
            return bad("every constraint mask needs length n and at least one active slot");
        }
        Ok(())
    }
}

fn bernoulli_mask(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<bool> {
    let mut mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(p)).collect();
    if !mask.iter().any(|&b| b) {
        let j = rng.gen_range(0..n);
        mask[j] = true;
    }
    mask
}

/// Draws a structure. Pure function of `(seed, cfg)`.
pub fn sample_structure(seed: u64, cfg: &SamplerConfig) -> Result<StructureSpec, SampleError> {
    cfg.validate()?;
    let mut rng = rng_for(seed);
    let n = rng.gen_range(cfg.min_vars..=cfg.max_vars);
    let m = rng.gen_range(cfg.min_constraints..=cfg.max_constraints);
    let sense = if rng.gen_bool(cfg.maximize_probability) { Sense::Maximize } else { Sense::Minimize };
    let has_lower = (0..n).map(|_| rng.gen_bool(cfg.lower_bound_probability)).collect();
    let has_upper = (0..n).map(|_| rng.gen_bool(cfg.upper_bound_probability)).collect();
    let integral = (0..n).map(|_| rng.gen_bool(cfg.integer_probability)).collect();
    let objective_mask = bernoulli_mask(&mut rng, n, cfg.keep_probability);
    let constraint_masks = (0..m).map(|_| bernoulli_mask(&mut rng, n, cfg.keep_probability)).collect();
    let (natural, opposing) = match sense {
        Sense::Maximize => (Relation::Le, Relation::Ge),
        Sense::Minimize => (Relation::Ge, Relation::Le),
    };
    let relations = (0..m)
        .map(|_| if rng.gen_bool(cfg.opposing_row_probability) { opposing } else { natural })
        .collect();
    let domain = cfg.domains[rng.gen_range(0..cfg.domains.len())].clone();
    Ok(StructureSpec { n, m, sense, has_lower, has_upper, integral, objective_mask, constraint_masks, relations, domain })
}

/// Where a parameter lives in the instantiated problem. Indices are
/// zero-based; parameter names are one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamRole {
    Objective { var: usize },
    Coefficient { row: usize, var: usize },
    Rhs { row: usize },
    Lower { var: usize },
    Upper { var: usize },
}

impl ParamRole {
    /// `c_j`, `a_i_j`, `b_i`, `l_j`, `u_j`, one-based.
    pub fn name(self) -> String {
        match self {
            ParamRole::Objective { var } => format!("c_{}", var + 1),
            ParamRole::Coefficient { row, var } => format!("a_{}_{}", row + 1, var + 1),
            ParamRole::Rhs { row } => format!("b_{}", row + 1),
            ParamRole::Lower { var } => format!("l_{}", var + 1),
            ParamRole::Upper { var } => format!("u_{}", var + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub role: ParamRole,
}

/// A structure with named, uninstantiated parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicProblem {
    pub spec: StructureSpec,
    pub parameters: Vec<Parameter>,
}

impl SymbolicProblem {
    pub fn parameter_names(&self) -> Vec<&str> {
        self.parameters.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn variable_name(&self, var: usize) -> String {
        format!("x_{}", var + 1)
    }

    /// Compact text form of the symbolic model, used as the formulation
    /// context when prompting a teacher.
    pub fn formulation_text(&self) -> String {
        let s = &self.spec;
        let mut out = String::new();
        let obj: Vec<String> = (0..s.n)
            .filter(|&j| s.objective_mask[j])
            .map(|j| format!("c_{} x_{}", j + 1, j + 1))
            .collect();
        let verb = match s.sense {
            Sense::Maximize => "maximize",
            Sense::Minimize => "minimize",
        };
        out.push_str(&format!("{verb} {}\nsubject to\n", obj.join(" + ")));
        for (i, mask) in s.constraint_masks.iter().enumerate() {
            let lhs: Vec<String> =
                (0..s.n).filter(|&j| mask[j]).map(|j| format!("a_{}_{} x_{}", i + 1, j + 1, j + 1)).collect();
            out.push_str(&format!("  {} {} b_{}\n", lhs.join(" + "), s.relations[i], i + 1));
        }
        for j in 0..s.n {
            let lo = if s.has_lower[j] { format!("l_{}", j + 1) } else { "0".into() };
            let hi = if s.has_upper[j] { format!(" <= u_{}", j + 1) } else { String::new() };
            let kind = if s.integral[j] { "integer" } else { "continuous" };
            out.push_str(&format!("  {lo} <= x_{}{hi}, {kind}\n", j + 1));
        }
        out
    }
}

/// Names one parameter per active slot: objective coefficients, then
/// constraint coefficients row by row, right-hand sides, lower and upper
/// bounds.
pub fn build_symbolic(spec: &StructureSpec) -> SymbolicProblem {
    let mut roles = Vec::new();
    for j in 0..spec.n {
        if spec.objective_mask[j] {
            roles.push(ParamRole::Objective { var: j });
        }
    }
    for (i, mask) in spec.constraint_masks.iter().enumerate() {
        for (j, &active) in mask.iter().enumerate() {
            if active {
                roles.push(ParamRole::Coefficient { row: i, var: j });
            }
        }
    }
    for i in 0..spec.m {
        roles.push(ParamRole::Rhs { row: i });
    }
    for j in 0..spec.n {
        if spec.has_lower[j] {
            roles.push(ParamRole::Lower { var: j });
        }
    }
    for j in 0..spec.n {
        if spec.has_upper[j] {
            roles.push(ParamRole::Upper { var: j });
        }
    }
    let parameters = roles.into_iter().map(|role| Parameter { name: role.name(), role }).collect();
    SymbolicProblem { spec: spec.clone(), parameters }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
    pub integer: bool,
}

impl ParamRange {
    pub fn new(min: f64, max: f64, integer: bool) -> Self {
        ParamRange { min, max, integer }
    }
}

/// Value range per parameter name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParameterRanges(pub BTreeMap<String, ParamRange>);

impl ParameterRanges {
    pub fn insert(&mut self, name: impl Into<String>, range: ParamRange) {
        self.0.insert(name.into(), range);
    }

    pub fn get(&self, name: &str) -> Option<&ParamRange> {
        self.0.get(name)
    }

    /// Parameters of `sym` without a range, in parameter order.
    pub fn missing(&self, sym: &SymbolicProblem) -> Vec<String> {
        sym.parameters.iter().filter(|p| !self.0.contains_key(&p.name)).map(|p| p.name.clone()).collect()
    }

    /// Ranges used by the offline template teacher: positive objective
    /// weights with two decimals, small integer technology coefficients,
    /// right-hand sides scaled to the row width.
    pub fn default_for(sym: &SymbolicProblem) -> ParameterRanges {
        let mut out = ParameterRanges::default();
        for p in &sym.parameters {
            let range = match p.role {
                ParamRole::Objective { .. } => ParamRange::new(1.0, 30.0, false),
                ParamRole::Coefficient { .. } => ParamRange::new(1.0, 10.0, true),
                ParamRole::Rhs { row } => {
                    let width = sym.spec.constraint_masks[row].iter().filter(|&&b| b).count() as f64;
                    ParamRange::new(10.0 * width, 60.0 * width, true)
                }
                ParamRole::Lower { .. } => ParamRange::new(1.0, 4.0, true),
                ParamRole::Upper { .. } => ParamRange::new(8.0, 30.0, true),
            };
            out.insert(p.name.clone(), range);
        }
        out
    }
}

fn draw(rng: &mut ChaCha8Rng, name: &str, r: &ParamRange) -> Result<f64, SampleError> {
    if !(r.min <= r.max) || !r.min.is_finite() || !r.max.is_finite() {
        return Err(SampleError::BadRange { name: name.to_string(), min: r.min, max: r.max });
    }
    if r.integer {
        let (lo, hi) = (r.min.ceil() as i64, r.max.floor() as i64);
        if lo > hi {
            return Err(SampleError::BadRange { name: name.to_string(), min: r.min, max: r.max });
        }
        Ok(rng.gen_range(lo..=hi) as f64)
    } else {
        let v = rng.gen_range(r.min..=r.max);
        // two decimals, kept inside the range
        Ok(((v * 100.0).round() / 100.0).clamp(r.min, r.max))
    }
}

/// Draws every parameter from its range and instantiates the problem.
/// Integer-flagged ranges draw uniformly over the integers they contain.
pub fn sample_values(
    sym: &SymbolicProblem,
    ranges: &ParameterRanges,
    seed: u64,
) -> Result<BTreeMap<String, f64>, SampleError> {
    if let Some(name) = ranges.missing(sym).into_iter().next() {
        return Err(SampleError::MissingRange(name));
    }
    let mut rng = rng_for(seed);
    let mut values = BTreeMap::new();
    for p in &sym.parameters {
        let v = draw(&mut rng, &p.name, &ranges.0[&p.name])?;
        values.insert(p.name.clone(), v);
    }
    Ok(values)
}

/// Builds the concrete problem from parameter values.
pub fn instantiate_problem(sym: &SymbolicProblem, values: &BTreeMap<String, f64>) -> Result<Problem, SampleError> {
    let s = &sym.spec;
    s.validate()?;
    let get = |role: ParamRole| -> Result<f64, SampleError> {
        let name = role.name();
        values.get(&name).copied().ok_or(SampleError::MissingRange(name))
    };
    let mut p = Problem::new(s.sense).with_class("linear");
    for j in 0..s.n {
        let lower = if s.has_lower[j] { get(ParamRole::Lower { var: j })? } else { 0.0 };
        let upper = if s.has_upper[j] { get(ParamRole::Upper { var: j })?.max(lower) } else { f64::INFINITY };
        p.add_variable(Variable { name: sym.variable_name(j), lower, upper, integral: s.integral[j] });
    }
    let mut obj = LinearExpr::new();
    for j in 0..s.n {
        if s.objective_mask[j] {
            obj.add_term(j, get(ParamRole::Objective { var: j })?);
        }
    }
    p.set_objective(obj);
    for (i, mask) in s.constraint_masks.iter().enumerate() {
        let mut lhs = LinearExpr::new();
        for (j, &active) in mask.iter().enumerate() {
            if active {
                lhs.add_term(j, get(ParamRole::Coefficient { row: i, var: j })?);
            }
        }
        let rhs = get(ParamRole::Rhs { row: i })?;
        p.add_constraint(Constraint::new(lhs, s.relations[i], rhs).labeled(format!("con_{}", i + 1)));
    }
    p.metadata.insert("domain".into(), s.domain.clone());
    Ok(p.canonicalize())
}

/// Samples values and instantiates in one step. The result is canonical.
pub fn sample_coefficients(sym: &SymbolicProblem, ranges: &ParameterRanges, seed: u64) -> Result<Problem, SampleError> {
    let values = sample_values(sym, ranges, seed)?;
    instantiate_problem(sym, &values)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiscardReason {
    Infeasible,
    Unbounded,
    Solver(SolveError),
}

#[derive(Debug, Clone, Default)]
pub struct FilterReport {
    /// Retained problems with their optimal values, in input order.
    pub kept: Vec<(Problem, f64)>,
    /// Input index and reason for every discarded candidate.
    pub discarded: Vec<(usize, DiscardReason)>,
}

/// Classifies one candidate: `Ok(value)` when it has a finite optimum.
pub fn screen(problem: &Problem, cfg: &SolverConfig) -> Result<f64, DiscardReason> {
    match solve_milp(problem, cfg) {
        Ok(SolveOutcome::Optimal { value, .. }) => Ok(value),
        Ok(SolveOutcome::Infeasible { .. }) => Err(DiscardReason::Infeasible),
        Ok(SolveOutcome::Unbounded { .. }) => Err(DiscardReason::Unbounded),
        Err(e) => Err(DiscardReason::Solver(e)),
    }
}

/// Keeps exactly the candidates with an optimal solution.
pub fn filter_feasible(candidates: Vec<Problem>, cfg: &SolverConfig) -> FilterReport {
    let mut report = FilterReport::default();
    for (i, p) in candidates.into_iter().enumerate() {
        match screen(&p, cfg) {
            Ok(v) => report.kept.push((p, v)),
            Err(reason) => {
                log::debug!("discarding candidate {i}: {reason:?}");
                report.discarded.push((i, reason));
            }
        }
    }
    report
}

/// A verified instance together with the values that produced it.
#[derive(Debug, Clone)]
pub struct SampledInstance {
    pub problem: Problem,
    pub values: BTreeMap<String, f64>,
    pub optimum: f64,
    pub attempts: usize,
}

/// Resamples coefficients up to `budget` times until the instance has a
/// finite optimum. `Ok(None)` means the symbolic problem was abandoned.
pub fn sample_feasible(
    sym: &SymbolicProblem,
    ranges: &ParameterRanges,
    seed: u64,
    budget: usize,
    cfg: &SolverConfig,
) -> Result<Option<SampledInstance>, SampleError> {
    for attempt in 0..budget {
        let values = sample_values(sym, ranges, child_seed(seed, attempt as u64))?;
        let problem = instantiate_problem(sym, &values)?;
        match screen(&problem, cfg) {
            Ok(optimum) => return Ok(Some(SampledInstance { problem, values, optimum, attempts: attempt + 1 })),
            Err(reason) => log::debug!("attempt {attempt} discarded: {reason:?}"),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn structure_is_deterministic() {
        let cfg = SamplerConfig::default();
        assert_eq!(sample_structure(0, &cfg).unwrap(), sample_structure(0, &cfg).unwrap());
        assert_ne!(sample_structure(0, &cfg).unwrap(), sample_structure(1, &cfg).unwrap());
    }

    #[test]
    fn degenerate_ranges() {
        let cfg = SamplerConfig { min_vars: 2, max_vars: 2, min_constraints: 3, max_constraints: 3, ..Default::default() };
        for seed in 0..20 {
            let s = sample_structure(seed, &cfg).unwrap();
            assert_eq!((s.n, s.m), (2, 3));
            s.validate().unwrap();
        }
    }

    #[test]
    fn every_domain_appears_in_1000_draws() {
        // With 18 equally likely domains the chance that one is missing after
        // 1000 draws is below 18 * (17/18)^1000 < 1e-23.
        let cfg = SamplerConfig::default();
        let seen: BTreeSet<String> = (0..1000).map(|s| sample_structure(s, &cfg).unwrap().domain).collect();
        assert_eq!(seen.len(), 18);
    }

    #[test]
    fn empty_domains_rejected() {
        let cfg = SamplerConfig { domains: vec![], ..Default::default() };
        assert_eq!(sample_structure(0, &cfg), Err(SampleError::EmptyDomains));
    }

    fn dense_spec(n: usize, m: usize) -> StructureSpec {
        StructureSpec {
            n,
            m,
            sense: Sense::Maximize,
            has_lower: vec![false; n],
            has_upper: vec![false; n],
            integral: vec![false; n],
            objective_mask: vec![true; n],
            constraint_masks: vec![vec![true; n]; m],
            relations: vec![Relation::Le; m],
            domain: "education".into(),
        }
    }

    #[test]
    fn naming_scheme() {
        let sym = build_symbolic(&dense_spec(2, 1));
        assert_eq!(sym.parameter_names(), vec!["c_1", "c_2", "a_1_1", "a_1_2", "b_1"]);

        let mut spec = dense_spec(2, 1);
        spec.constraint_masks[0][1] = false;
        spec.has_lower[0] = true;
        let sym = build_symbolic(&spec);
        assert!(!sym.parameter_names().contains(&"a_1_2"));
        assert!(sym.parameter_names().contains(&"l_1"));
    }

    #[test]
    fn point_and_integer_ranges() {
        let sym = build_symbolic(&dense_spec(2, 1));
        let mut ranges = ParameterRanges::default();
        for name in sym.parameter_names() {
            ranges.insert(name, ParamRange::new(3.0, 3.0, false));
        }
        let p = sample_coefficients(&sym, &ranges, 7).unwrap();
        assert!(p.objective.terms.iter().all(|t| t.coef == 3.0));

        for name in sym.parameter_names() {
            ranges.insert(name, ParamRange::new(1.0, 5.0, true));
        }
        for seed in 0..50 {
            let values = sample_values(&sym, &ranges, seed).unwrap();
            assert!(values.values().all(|v| v.fract() == 0.0 && (1.0..=5.0).contains(v)));
        }
        assert_eq!(sample_values(&sym, &ranges, 9).unwrap(), sample_values(&sym, &ranges, 9).unwrap());
    }

    #[test]
    fn continuous_draws_have_two_decimals() {
        let sym = build_symbolic(&dense_spec(3, 2));
        let mut ranges = ParameterRanges::default_for(&sym);
        ranges.insert("c_1", ParamRange::new(0.0, 1.0, false));
        for seed in 0..50 {
            let v = sample_values(&sym, &ranges, seed).unwrap()["c_1"];
            assert!(((v * 100.0).round() - v * 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn missing_range_names_parameter() {
        let sym = build_symbolic(&dense_spec(2, 1));
        let mut ranges = ParameterRanges::default_for(&sym);
        ranges.0.remove("b_1");
        assert_eq!(sample_coefficients(&sym, &ranges, 0), Err(SampleError::MissingRange("b_1".into())));
    }

    #[test]
    fn filter_drops_infeasible_and_unbounded() {
        let cfg = SolverConfig::default();
        let mut empty = Problem::new(Sense::Minimize);
        let x = empty.add_variable(Variable::continuous("x", f64::NEG_INFINITY, f64::INFINITY));
        empty.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0)]), Relation::Ge, 1.0));
        empty.add_constraint(Constraint::new(LinearExpr::from_terms([(x, 1.0)]), Relation::Le, 0.0));

        let mut ray = Problem::new(Sense::Maximize);
        let x = ray.add_variable(Variable::nonneg("x"));
        ray.set_objective(LinearExpr::from_terms([(x, 1.0)]));

        let sym = build_symbolic(&dense_spec(2, 2));
        let good = sample_coefficients(&sym, &ParameterRanges::default_for(&sym), 3).unwrap();

        let report = filter_feasible(vec![empty, good.clone(), ray], &cfg);
        assert_eq!(report.kept.len(), 1);
        assert_eq!(report.kept[0].0, good);
        assert_eq!(report.discarded[0], (0, DiscardReason::Infeasible));
        assert_eq!(report.discarded[1], (2, DiscardReason::Unbounded));
    }

    #[test]
    fn child_seeds_differ() {
        let seeds: BTreeSet<u64> = (0..1000).map(|i| child_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(child_seed(0, 0), child_seed(1, 0));
    }
}
