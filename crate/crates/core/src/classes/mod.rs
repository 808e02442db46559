//! Structured problem classes with fixed formulations.
//!
//! Each class has a random generator, a MILP formulation ([`formulate`]) and
//! an exact combinatorial oracle ([`class_oracle`]) that never touches the
//! simplex engine. Instances carry a [`SemanticProxy`]: entity labels that
//! give the numbers a story when a description is written.

mod formulate;
mod labels;
mod oracle;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Problem;
use crate::sampler::{self, child_seed, rng_for, SampleError, SamplerConfig, SymbolicProblem};
use crate::solve::{solve_milp, SolveError, SolveOutcome, SolverConfig, Status};

pub use formulate::formulate;
pub use oracle::{class_oracle, max_flow_value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassId {
    Linear,
    Knapsack,
    Mdknapsack,
    SetCover,
    BinPacking,
    Tsp,
    ShiftScheduling,
    Transportation,
    MaxFlow,
    MinCostFlow,
}

impl ClassId {
    pub const ALL: [ClassId; 10] = [
        ClassId::Linear,
        ClassId::Knapsack,
        ClassId::Mdknapsack,
        ClassId::SetCover,
        ClassId::BinPacking,
        ClassId::Tsp,
        ClassId::ShiftScheduling,
        ClassId::Transportation,
        ClassId::MaxFlow,
        ClassId::MinCostFlow,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ClassId::Linear => "linear",
            ClassId::Knapsack => "knapsack",
            ClassId::Mdknapsack => "mdknapsack",
            ClassId::SetCover => "set_cover",
            ClassId::BinPacking => "bin_packing",
            ClassId::Tsp => "tsp",
            ClassId::ShiftScheduling => "shift_scheduling",
            ClassId::Transportation => "transportation",
            ClassId::MaxFlow => "max_flow",
            ClassId::MinCostFlow => "min_cost_flow",
        }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ClassId {
    type Err = ClassError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassId::ALL.into_iter().find(|c| c.tag() == s).ok_or_else(|| ClassError::UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassError {
    #[error("unknown problem class {0:?}")]
    UnknownClass(String),
    #[error("{class}: size out of supported range ({detail})")]
    SizeOutOfRange { class: ClassId, detail: String },
    #[error("{class}: instance exceeds oracle limits ({detail})")]
    OracleLimit { class: ClassId, detail: String },
    #[error("{0}: no combinatorial oracle")]
    NoOracle(ClassId),
    #[error("malformed {class} data: {detail}")]
    BadData { class: ClassId, detail: String },
    #[error("generated {class} instance is {status}")]
    NotOptimal { class: ClassId, status: Status },
    #[error("no feasible linear instance after {0} structures")]
    Exhausted(usize),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// A directed arc. Endpoints are zero-based node indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: f64,
    pub cost: f64,
}

/// Raw instance data, one variant per class.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassData {
    Linear { symbolic: SymbolicProblem, values: BTreeMap<String, f64> },
    Knapsack { capacity: f64, weights: Vec<f64>, values: Vec<f64> },
    /// `weights[d][i]` is the weight of item `i` in dimension `d`.
    Mdknapsack { capacities: Vec<f64>, weights: Vec<Vec<f64>>, values: Vec<f64> },
    /// Elements are `0..universe`.
    SetCover { universe: usize, sets: Vec<Vec<usize>>, costs: Vec<f64> },
    BinPacking { capacity: f64, sizes: Vec<f64> },
    /// Symmetric distances with a zero diagonal.
    Tsp { distances: Vec<Vec<f64>> },
    /// `patterns[k]` lists the periods shift `k` covers.
    ShiftScheduling { demand: Vec<f64>, patterns: Vec<Vec<usize>>, costs: Vec<f64> },
    Transportation { supply: Vec<f64>, demand: Vec<f64>, costs: Vec<Vec<f64>> },
    MaxFlow { nodes: usize, source: usize, sink: usize, arcs: Vec<Arc> },
    MinCostFlow { nodes: usize, source: usize, sink: usize, arcs: Vec<Arc>, flow: f64 },
}

impl ClassData {
    pub fn class(&self) -> ClassId {
        match self {
            ClassData::Linear { .. } => ClassId::Linear,
            ClassData::Knapsack { .. } => ClassId::Knapsack,
            ClassData::Mdknapsack { .. } => ClassId::Mdknapsack,
            ClassData::SetCover { .. } => ClassId::SetCover,
            ClassData::BinPacking { .. } => ClassId::BinPacking,
            ClassData::Tsp { .. } => ClassId::Tsp,
            ClassData::ShiftScheduling { .. } => ClassId::ShiftScheduling,
            ClassData::Transportation { .. } => ClassId::Transportation,
            ClassData::MaxFlow { .. } => ClassId::MaxFlow,
            ClassData::MinCostFlow { .. } => ClassId::MinCostFlow,
        }
    }

    /// Number of labelled entities: items, sets, cities, shifts, nodes, or
    /// suppliers followed by customers. Variables for the linear class.
    pub fn entity_count(&self) -> usize {
        match self {
            ClassData::Linear { symbolic, .. } => symbolic.spec.n,
            ClassData::Knapsack { values, .. } | ClassData::Mdknapsack { values, .. } => values.len(),
            ClassData::SetCover { sets, .. } => sets.len(),
            ClassData::BinPacking { sizes, .. } => sizes.len(),
            ClassData::Tsp { distances } => distances.len(),
            ClassData::ShiftScheduling { patterns, .. } => patterns.len(),
            ClassData::Transportation { supply, demand, .. } => supply.len() + demand.len(),
            ClassData::MaxFlow { nodes, .. } | ClassData::MinCostFlow { nodes, .. } => *nodes,
        }
    }
}

/// Entity labels and a one-line role for each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticProxy {
    pub class: ClassId,
    pub labels: Vec<String>,
    pub roles: Vec<String>,
}

impl SemanticProxy {
    pub fn validate(&self, expected: usize) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.labels.len() == expected
            && self.roles.len() == expected
            && self.labels.iter().all(|l| seen.insert(l.as_str()))
    }
}

/// Inclusive size range `[min, max]`.
pub type SizeRange = [usize; 2];

/// Per-class size parameters. Each size is drawn uniformly from its range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassSizes {
    pub knapsack_items: SizeRange,
    pub mdknapsack_items: SizeRange,
    pub mdknapsack_dims: SizeRange,
    pub set_cover_universe: SizeRange,
    pub set_cover_sets: SizeRange,
    pub bin_packing_items: SizeRange,
    pub tsp_cities: SizeRange,
    pub shift_periods: SizeRange,
    pub shift_patterns: SizeRange,
    pub transportation_sources: SizeRange,
    pub transportation_sinks: SizeRange,
    pub flow_nodes: SizeRange,
}

impl Default for ClassSizes {
    fn default() -> Self {
        ClassSizes {
            knapsack_items: [5, 12],
            mdknapsack_items: [5, 10],
            mdknapsack_dims: [2, 3],
            set_cover_universe: [4, 8],
            set_cover_sets: [4, 8],
            bin_packing_items: [3, 7],
            tsp_cities: [4, 6],
            shift_periods: [4, 7],
            shift_patterns: [3, 5],
            transportation_sources: [3, 3],
            transportation_sinks: [3, 3],
            flow_nodes: [5, 5],
        }
    }
}

/// Hard limits `(min, max)` enforced by the generators.
pub(crate) mod limits {
    pub const KNAPSACK_ITEMS: (usize, usize) = (1, 20);
    pub const MDKNAPSACK_DIMS: (usize, usize) = (1, 5);
    pub const SET_COVER: (usize, usize) = (1, 16);
    pub const BIN_PACKING_ITEMS: (usize, usize) = (1, 9);
    pub const TSP_CITIES: (usize, usize) = (3, 9);
    pub const SHIFT_PERIODS: (usize, usize) = (1, 12);
    pub const SHIFT_PATTERNS: (usize, usize) = (1, 6);
    pub const TRANSPORT_SIDE: (usize, usize) = (1, 6);
    pub const FLOW_NODES: (usize, usize) = (3, 12);
}

/// A generated instance with its verified optimum.
#[derive(Debug, Clone)]
pub struct ClassInstance {
    pub data: ClassData,
    pub problem: Problem,
    pub proxy: SemanticProxy,
    pub optimum: f64,
}

impl ClassInstance {
    pub fn class(&self) -> ClassId {
        self.data.class()
    }
}

fn draw_size(
    rng: &mut ChaCha8Rng,
    class: ClassId,
    what: &str,
    range: SizeRange,
    limit: (usize, usize),
) -> Result<usize, ClassError> {
    let [lo, hi] = range;
    if lo > hi || lo < limit.0 || hi > limit.1 {
        return Err(ClassError::SizeOutOfRange {
            class,
            detail: format!("{what} range [{lo}, {hi}] outside [{}, {}]", limit.0, limit.1),
        });
    }
    Ok(rng.gen_range(lo..=hi))
}

fn ints(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi) as f64).collect()
}

/// Draws random instance data for `class`.
pub fn sample_class_data(
    class: ClassId,
    sizes: &ClassSizes,
    sampler_cfg: &SamplerConfig,
    seed: u64,
    solver: &SolverConfig,
) -> Result<ClassData, ClassError> {
    let mut rng = rng_for(seed);
    let data = match class {
        ClassId::Linear => return sample_linear(sampler_cfg, seed, solver).map(|(d, _)| d),
        ClassId::Knapsack => {
            let n = draw_size(&mut rng, class, "items", sizes.knapsack_items, limits::KNAPSACK_ITEMS)?;
            let weights = ints(&mut rng, n, 1, 20);
            let values = ints(&mut rng, n, 1, 50);
            let total: f64 = weights.iter().sum();
            let capacity = (total * rng.gen_range(0.3..0.7)).floor().max(1.0);
            ClassData::Knapsack { capacity, weights, values }
        }
        ClassId::Mdknapsack => {
            let n = draw_size(&mut rng, class, "items", sizes.mdknapsack_items, limits::KNAPSACK_ITEMS)?;
            let d = draw_size(&mut rng, class, "dimensions", sizes.mdknapsack_dims, limits::MDKNAPSACK_DIMS)?;
            let weights: Vec<Vec<f64>> = (0..d).map(|_| ints(&mut rng, n, 1, 20)).collect();
            let values = ints(&mut rng, n, 1, 50);
            let capacities = weights
                .iter()
                .map(|row| (row.iter().sum::<f64>() * rng.gen_range(0.3..0.7)).floor().max(1.0))
                .collect();
            ClassData::Mdknapsack { capacities, weights, values }
        }
        ClassId::SetCover => {
            let u = draw_size(&mut rng, class, "universe", sizes.set_cover_universe, limits::SET_COVER)?;
            let k = draw_size(&mut rng, class, "sets", sizes.set_cover_sets, limits::SET_COVER)?;
            let mut sets: Vec<Vec<usize>> = (0..k).map(|_| (0..u).filter(|_| rng.gen_bool(0.35)).collect()).collect();
            for e in 0..u {
                if !sets.iter().any(|s| s.contains(&e)) {
                    let s = rng.gen_range(0..k);
                    sets[s].push(e);
                    sets[s].sort_unstable();
                }
            }
            for s in 0..k {
                if sets[s].is_empty() {
                    sets[s].push(rng.gen_range(0..u));
                }
            }
            let costs = ints(&mut rng, k, 1, 10);
            ClassData::SetCover { universe: u, sets, costs }
        }
        ClassId::BinPacking => {
            let n = draw_size(&mut rng, class, "items", sizes.bin_packing_items, limits::BIN_PACKING_ITEMS)?;
            let capacity = rng.gen_range(10..=20) as f64;
            let sizes = ints(&mut rng, n, 2, capacity as i64);
            ClassData::BinPacking { capacity, sizes }
        }
        ClassId::Tsp => {
            let n = draw_size(&mut rng, class, "cities", sizes.tsp_cities, limits::TSP_CITIES)?;
            let mut distances = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let d = rng.gen_range(5..=60) as f64;
                    distances[i][j] = d;
                    distances[j][i] = d;
                }
            }
            ClassData::Tsp { distances }
        }
        ClassId::ShiftScheduling => {
            let p = draw_size(&mut rng, class, "periods", sizes.shift_periods, limits::SHIFT_PERIODS)?;
            let k = draw_size(&mut rng, class, "patterns", sizes.shift_patterns, limits::SHIFT_PATTERNS)?;
            // contiguous blocks of 2..=4 periods, then patch coverage gaps
            let mut patterns: Vec<Vec<usize>> = (0..k)
                .map(|_| {
                    let len = rng.gen_range(2..=4usize).min(p);
                    let start = rng.gen_range(0..=p - len);
                    (start..start + len).collect()
                })
                .collect();
            for t in 0..p {
                if !patterns.iter().any(|s| s.contains(&t)) {
                    let s = rng.gen_range(0..k);
                    patterns[s].push(t);
                    patterns[s].sort_unstable();
                }
            }
            let demand = ints(&mut rng, p, 1, 6);
            let costs = ints(&mut rng, k, 2, 10);
            ClassData::ShiftScheduling { demand, patterns, costs }
        }
        ClassId::Transportation => {
            let s = draw_size(&mut rng, class, "sources", sizes.transportation_sources, limits::TRANSPORT_SIDE)?;
            let d = draw_size(&mut rng, class, "sinks", sizes.transportation_sinks, limits::TRANSPORT_SIDE)?;
            let demand = ints(&mut rng, d, 10, 40);
            let need: f64 = demand.iter().sum();
            // supplies cover the demand with some slack
            let mut supply = ints(&mut rng, s, 10, 40);
            let have: f64 = supply.iter().sum();
            if have < need {
                let extra = need - have;
                let per = (extra / s as f64).ceil();
                for v in &mut supply {
                    *v += per;
                }
            }
            let costs = (0..s).map(|_| ints(&mut rng, d, 1, 20)).collect();
            ClassData::Transportation { supply, demand, costs }
        }
        ClassId::MaxFlow | ClassId::MinCostFlow => {
            let n = draw_size(&mut rng, class, "nodes", sizes.flow_nodes, limits::FLOW_NODES)?;
            let (source, sink) = (0, n - 1);
            let mut arcs = Vec::new();
            let mut present = vec![vec![false; n]; n];
            let mut add = |rng: &mut ChaCha8Rng, arcs: &mut Vec<Arc>, i: usize, j: usize| {
                if !present[i][j] {
                    present[i][j] = true;
                    arcs.push(Arc { from: i, to: j, capacity: rng.gen_range(1..=10) as f64, cost: rng.gen_range(1..=10) as f64 });
                }
            };
            // a chain through every node guarantees a source-sink path
            for i in 0..n - 1 {
                add(&mut rng, &mut arcs, i, i + 1);
            }
            for i in 0..n {
                for j in 0..n {
                    if i != j && i != sink && j != source && rng.gen_bool(0.35) {
                        add(&mut rng, &mut arcs, i, j);
                    }
                }
            }
            arcs.sort_by_key(|a| (a.from, a.to));
            if class == ClassId::MaxFlow {
                ClassData::MaxFlow { nodes: n, source, sink, arcs }
            } else {
                let cap = max_flow_value(n, source, sink, &arcs) as i64;
                let flow = rng.gen_range(1..=cap.max(1)) as f64;
                ClassData::MinCostFlow { nodes: n, source, sink, arcs, flow }
            }
        }
    };
    Ok(data)
}

fn sample_linear(
    cfg: &SamplerConfig,
    seed: u64,
    solver: &SolverConfig,
) -> Result<(ClassData, sampler::SampledInstance), ClassError> {
    const MAX_STRUCTURES: usize = 64;
    for k in 0..MAX_STRUCTURES {
        let s = child_seed(seed, k as u64);
        let spec = sampler::sample_structure(s, cfg)?;
        let symbolic = sampler::build_symbolic(&spec);
        let ranges = sampler::ParameterRanges::default_for(&symbolic);
        if let Some(inst) = sampler::sample_feasible(&symbolic, &ranges, s, cfg.retry_budget, solver)? {
            let data = ClassData::Linear { symbolic, values: inst.values.clone() };
            return Ok((data, inst));
        }
    }
    Err(ClassError::Exhausted(MAX_STRUCTURES))
}

/// Builds the proxy for `data` from the bundled label pools.
pub fn semantic_proxy(data: &ClassData, seed: u64) -> SemanticProxy {
    let mut rng = rng_for(seed);
    let class = data.class();
    let pick = |rng: &mut ChaCha8Rng, pool: &[&str], n: usize| -> Vec<String> {
        let mut chosen: Vec<String> = pool.choose_multiple(rng, n.min(pool.len())).map(|s| s.to_string()).collect();
        // pools are larger than every supported size; numbered fallback anyway
        for i in chosen.len()..n {
            chosen.push(format!("{} {}", pool[0], i + 1));
        }
        chosen
    };
    let fmt = crate::template::format_number;
    let (labels, roles): (Vec<String>, Vec<String>) = match data {
        ClassData::Linear { symbolic, .. } => {
            let labels = pick(&mut rng, labels::PRODUCTS, symbolic.spec.n);
            let roles = (0..symbolic.spec.n).map(|j| format!("decision quantity {}", symbolic.variable_name(j))).collect();
            (labels, roles)
        }
        ClassData::Knapsack { weights, values, .. } => {
            let labels = pick(&mut rng, labels::ITEMS, values.len());
            let roles =
                weights.iter().zip(values).map(|(w, v)| format!("weighs {} and is worth {}", fmt(*w), fmt(*v))).collect();
            (labels, roles)
        }
        ClassData::Mdknapsack { weights, values, .. } => {
            let labels = pick(&mut rng, labels::PROJECTS, values.len());
            let roles = (0..values.len())
                .map(|i| {
                    let use_: Vec<String> = weights.iter().map(|row| fmt(row[i])).collect();
                    format!("uses {} and returns {}", use_.join("/"), fmt(values[i]))
                })
                .collect();
            (labels, roles)
        }
        ClassData::SetCover { sets, costs, .. } => {
            let labels = pick(&mut rng, labels::FACILITIES, sets.len());
            let roles = sets
                .iter()
                .zip(costs)
                .map(|(s, c)| {
                    let zones: Vec<String> = s.iter().map(|e| (e + 1).to_string()).collect();
                    format!("serves zones {} at cost {}", zones.join(", "), fmt(*c))
                })
                .collect();
            (labels, roles)
        }
        ClassData::BinPacking { sizes, .. } => {
            let labels = pick(&mut rng, labels::ITEMS, sizes.len());
            let roles = sizes.iter().map(|s| format!("has size {}", fmt(*s))).collect();
            (labels, roles)
        }
        ClassData::Tsp { distances } => {
            let labels = pick(&mut rng, labels::CITIES, distances.len());
            let roles = (0..distances.len()).map(|i| if i == 0 { "start and end of the tour".into() } else { "stop on the tour".into() }).collect();
            (labels, roles)
        }
        ClassData::ShiftScheduling { patterns, costs, .. } => {
            let labels = pick(&mut rng, labels::SHIFTS, patterns.len());
            let roles = patterns
                .iter()
                .zip(costs)
                .map(|(p, c)| {
                    let periods: Vec<String> = p.iter().map(|t| (t + 1).to_string()).collect();
                    format!("covers periods {} at cost {} per worker", periods.join(", "), fmt(*c))
                })
                .collect();
            (labels, roles)
        }
        ClassData::Transportation { supply, demand, .. } => {
            let mut labels = pick(&mut rng, labels::WAREHOUSES, supply.len());
            labels.extend(pick(&mut rng, labels::CITIES, demand.len()));
            let mut roles: Vec<String> = supply.iter().map(|s| format!("supplies up to {}", fmt(*s))).collect();
            roles.extend(demand.iter().map(|d| format!("requires {}", fmt(*d))));
            (labels, roles)
        }
        ClassData::MaxFlow { nodes, source, sink, .. } | ClassData::MinCostFlow { nodes, source, sink, .. } => {
            let labels = pick(&mut rng, labels::JUNCTIONS, *nodes);
            let roles = (0..*nodes)
                .map(|i| {
                    if i == *source {
                        "origin".to_string()
                    } else if i == *sink {
                        "destination".to_string()
                    } else {
                        "transit point".to_string()
                    }
                })
                .collect();
            (labels, roles)
        }
    };
    SemanticProxy { class, labels, roles }
}

/// Solves a formulation and insists on an optimum.
pub fn solve_instance(data: &ClassData, solver: &SolverConfig) -> Result<(Problem, f64), ClassError> {
    let problem = formulate(data)?;
    match solve_milp(&problem, solver)? {
        SolveOutcome::Optimal { value, .. } => Ok((problem, value)),
        other => Err(ClassError::NotOptimal { class: data.class(), status: other.status() }),
    }
}

/// Generates one instance of `class`: random data, its formulation, a proxy
/// and the solver optimum.
pub fn generate_class_instance(
    class: ClassId,
    sizes: &ClassSizes,
    sampler_cfg: &SamplerConfig,
    seed: u64,
    solver: &SolverConfig,
) -> Result<ClassInstance, ClassError> {
    let (data, problem, optimum) = if class == ClassId::Linear {
        let (data, inst) = sample_linear(sampler_cfg, seed, solver)?;
        (data, inst.problem, inst.optimum)
    } else {
        let data = sample_class_data(class, sizes, sampler_cfg, seed, solver)?;
        let (problem, optimum) = solve_instance(&data, solver)?;
        (data, problem, optimum)
    };
    let proxy = semantic_proxy(&data, child_seed(seed, u64::MAX));
    Ok(ClassInstance { data, problem, proxy, optimum })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for c in ClassId::ALL {
            assert_eq!(c.tag().parse::<ClassId>().unwrap(), c);
        }
        assert!("lp".parse::<ClassId>().is_err());
    }

    #[test]
    fn every_class_generates_with_a_valid_proxy() {
        let (sizes, scfg, solver) = (ClassSizes::default(), SamplerConfig::default(), SolverConfig::default());
        for c in ClassId::ALL {
            let inst = generate_class_instance(c, &sizes, &scfg, 11, &solver).unwrap();
            assert_eq!(inst.class(), c);
            assert_eq!(inst.problem.class_tag, c.tag());
            assert!(inst.proxy.validate(inst.data.entity_count()), "{c}: {:?}", inst.proxy);
        }
    }

    #[test]
    fn size_limits_enforced() {
        let sizes = ClassSizes { tsp_cities: [4, 12], ..Default::default() };
        let err = generate_class_instance(ClassId::Tsp, &sizes, &SamplerConfig::default(), 0, &SolverConfig::default());
        assert!(matches!(err, Err(ClassError::SizeOutOfRange { class: ClassId::Tsp, .. })));
    }

    #[test]
    fn generation_is_deterministic() {
        let (sizes, scfg, solver) = (ClassSizes::default(), SamplerConfig::default(), SolverConfig::default());
        for c in [ClassId::Linear, ClassId::BinPacking, ClassId::MinCostFlow] {
            let a = generate_class_instance(c, &sizes, &scfg, 5, &solver).unwrap();
            let b = generate_class_instance(c, &sizes, &scfg, 5, &solver).unwrap();
            assert_eq!(a.problem, b.problem);
            assert_eq!(a.proxy, b.proxy);
        }
    }
}
