use crate::model::{Constraint, LinearExpr, Problem, Relation, Sense, Variable};
use crate::sampler::instantiate_problem;

use super::{ClassData, ClassError, ClassId};

fn bad(class: ClassId, detail: impl Into<String>) -> ClassError {
    ClassError::BadData { class, detail: detail.into() }
}

fn row(terms: impl IntoIterator<Item = (usize, f64)>, rel: Relation, rhs: f64, label: String) -> Constraint {
    Constraint::new(LinearExpr::from_terms(terms), rel, rhs).labeled(label)
}

/// The MILP formulation of `data`, canonical and tagged with its class.
pub fn formulate(data: &ClassData) -> Result<Problem, ClassError> {
    let class = data.class();
    let mut p = match data {
        ClassData::Linear { symbolic, values } => return Ok(instantiate_problem(symbolic, values)?),

        ClassData::Knapsack { capacity, weights, values } => {
            if weights.len() != values.len() || weights.is_empty() {
                return Err(bad(class, "weights and values must be nonempty and equally long"));
            }
            knapsack(std::slice::from_ref(capacity), std::slice::from_ref(weights), values)
        }
        ClassData::Mdknapsack { capacities, weights, values } => {
            if capacities.len() != weights.len() || weights.iter().any(|w| w.len() != values.len()) || values.is_empty() {
                return Err(bad(class, "one weight row per capacity, one weight per item"));
            }
            knapsack(capacities, weights, values)
        }

        ClassData::SetCover { universe, sets, costs } => {
            if sets.len() != costs.len() || sets.iter().flatten().any(|&e| e >= *universe) {
                return Err(bad(class, "one cost per set and elements inside the universe"));
            }
            let mut p = Problem::new(Sense::Minimize);
            for s in 0..sets.len() {
                p.add_variable(Variable::binary(format!("y_{}", s + 1)));
            }
            p.set_objective(LinearExpr::from_terms(costs.iter().copied().enumerate()));
            for e in 0..*universe {
                let covering: Vec<(usize, f64)> =
                    sets.iter().enumerate().filter(|(_, s)| s.contains(&e)).map(|(k, _)| (k, 1.0)).collect();
                if covering.is_empty() {
                    return Err(bad(class, format!("element {} is in no set", e + 1)));
                }
                p.add_constraint(row(covering, Relation::Ge, 1.0, format!("cover_{}", e + 1)));
            }
            p
        }

        ClassData::BinPacking { capacity, sizes } => {
            if sizes.is_empty() || sizes.iter().any(|s| s > capacity) {
                return Err(bad(class, "every item must fit in an empty bin"));
            }
            // y_b opens bin b; x_i_b puts item i in bin b, only for b <= i
            let n = sizes.len();
            let mut p = Problem::new(Sense::Minimize);
            let y: Vec<usize> = (0..n).map(|b| p.add_variable(Variable::binary(format!("y_{}", b + 1)))).collect();
            let mut x = vec![vec![None; n]; n];
            for i in 0..n {
                for b in 0..=i {
                    x[i][b] = Some(p.add_variable(Variable::binary(format!("x_{}_{}", i + 1, b + 1))));
                }
            }
            p.set_objective(LinearExpr::from_terms(y.iter().map(|&v| (v, 1.0))));
            for i in 0..n {
                p.add_constraint(row((0..=i).map(|b| (x[i][b].unwrap(), 1.0)), Relation::Eq, 1.0, format!("assign_{}", i + 1)));
            }
            for b in 0..n {
                let mut terms: Vec<(usize, f64)> = (b..n).map(|i| (x[i][b].unwrap(), sizes[i])).collect();
                terms.push((y[b], -capacity));
                p.add_constraint(row(terms, Relation::Le, 0.0, format!("capacity_{}", b + 1)));
                for i in b..n {
                    p.add_constraint(row(
                        [(x[i][b].unwrap(), 1.0), (y[b], -1.0)],
                        Relation::Le,
                        0.0,
                        format!("open_{}_{}", i + 1, b + 1),
                    ));
                }
                if b + 1 < n {
                    p.add_constraint(row([(y[b], 1.0), (y[b + 1], -1.0)], Relation::Ge, 0.0, format!("order_{}", b + 1)));
                }
            }
            p
        }

        ClassData::Tsp { distances } => {
            let n = distances.len();
            if n < 3 || distances.iter().any(|r| r.len() != n) {
                return Err(bad(class, "need a square distance matrix with at least 3 cities"));
            }
            // Miller-Tucker-Zemlin with city 1 as the depot
            let mut p = Problem::new(Sense::Minimize);
            let mut x = vec![vec![usize::MAX; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        x[i][j] = p.add_variable(Variable::binary(format!("x_{}_{}", i + 1, j + 1)));
                    }
                }
            }
            let mut u = vec![usize::MAX; n];
            for (i, slot) in u.iter_mut().enumerate().skip(1) {
                *slot = p.add_variable(Variable::continuous(format!("u_{}", i + 1), 1.0, (n - 1) as f64));
            }
            let mut obj = LinearExpr::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        obj.add_term(x[i][j], distances[i][j]);
                    }
                }
            }
            p.set_objective(obj);
            for i in 0..n {
                let out = (0..n).filter(|&j| j != i).map(|j| (x[i][j], 1.0));
                p.add_constraint(row(out, Relation::Eq, 1.0, format!("leave_{}", i + 1)));
                let inn = (0..n).filter(|&j| j != i).map(|j| (x[j][i], 1.0));
                p.add_constraint(row(inn, Relation::Eq, 1.0, format!("enter_{}", i + 1)));
            }
            for i in 0..n {
                for j in i + 1..n {
                    p.add_constraint(row(
                        [(x[i][j], 1.0), (x[j][i], 1.0)],
                        Relation::Le,
                        1.0,
                        format!("pair_{}_{}", i + 1, j + 1),
                    ));
                }
            }
            let big = (n - 1) as f64;
            for i in 1..n {
                for j in 1..n {
                    if i != j {
                        p.add_constraint(row(
                            [(u[i], 1.0), (u[j], -1.0), (x[i][j], big)],
                            Relation::Le,
                            big - 1.0,
                            format!("order_{}_{}", i + 1, j + 1),
                        ));
                    }
                }
            }
            p
        }

        ClassData::ShiftScheduling { demand, patterns, costs } => {
            if patterns.len() != costs.len() || patterns.iter().flatten().any(|&t| t >= demand.len()) {
                return Err(bad(class, "one cost per pattern and periods inside the horizon"));
            }
            let cap = demand.iter().fold(0.0f64, |a, &b| a.max(b));
            let mut p = Problem::new(Sense::Minimize);
            for k in 0..patterns.len() {
                p.add_variable(Variable::integer(format!("w_{}", k + 1), 0.0, cap));
            }
            p.set_objective(LinearExpr::from_terms(costs.iter().copied().enumerate()));
            for (t, &d) in demand.iter().enumerate() {
                let cover: Vec<(usize, f64)> =
                    patterns.iter().enumerate().filter(|(_, s)| s.contains(&t)).map(|(k, _)| (k, 1.0)).collect();
                if cover.is_empty() {
                    return Err(bad(class, format!("period {} has no shift", t + 1)));
                }
                p.add_constraint(row(cover, Relation::Ge, d, format!("demand_{}", t + 1)));
            }
            p.metadata.insert("variable_domain".into(), "general_integer".into());
            p
        }

        ClassData::Transportation { supply, demand, costs } => {
            if costs.len() != supply.len() || costs.iter().any(|r| r.len() != demand.len()) {
                return Err(bad(class, "cost matrix must be sources x sinks"));
            }
            if supply.iter().sum::<f64>() < demand.iter().sum::<f64>() {
                return Err(bad(class, "total supply is below total demand"));
            }
            let (s, d) = (supply.len(), demand.len());
            let mut p = Problem::new(Sense::Minimize);
            for i in 0..s {
                for j in 0..d {
                    p.add_variable(Variable::integer(format!("x_{}_{}", i + 1, j + 1), 0.0, supply[i].min(demand[j])));
                }
            }
            let var = |i: usize, j: usize| i * d + j;
            p.set_objective(LinearExpr::from_terms((0..s).flat_map(|i| (0..d).map(move |j| (var(i, j), costs[i][j])))));
            for i in 0..s {
                p.add_constraint(row((0..d).map(|j| (var(i, j), 1.0)), Relation::Le, supply[i], format!("supply_{}", i + 1)));
            }
            for j in 0..d {
                p.add_constraint(row((0..s).map(|i| (var(i, j), 1.0)), Relation::Ge, demand[j], format!("demand_{}", j + 1)));
            }
            p
        }

        ClassData::MaxFlow { nodes, source, sink, arcs } | ClassData::MinCostFlow { nodes, source, sink, arcs, .. } => {
            let n = *nodes;
            if *source >= n || *sink >= n || source == sink {
                return Err(bad(class, "source and sink must be distinct nodes"));
            }
            let mut seen = std::collections::BTreeSet::new();
            for a in arcs {
                if a.from >= n || a.to >= n || a.from == a.to || !seen.insert((a.from, a.to)) {
                    return Err(bad(class, format!("bad or duplicate arc {} -> {}", a.from + 1, a.to + 1)));
                }
            }
            let sense = if class == ClassId::MaxFlow { Sense::Maximize } else { Sense::Minimize };
            let mut p = Problem::new(sense);
            for a in arcs {
                p.add_variable(Variable::integer(format!("f_{}_{}", a.from + 1, a.to + 1), 0.0, a.capacity));
            }
            // net outflow of node v
            let net = |v: usize| -> Vec<(usize, f64)> {
                arcs.iter()
                    .enumerate()
                    .filter_map(|(k, a)| {
                        if a.from == v {
                            Some((k, 1.0))
                        } else if a.to == v {
                            Some((k, -1.0))
                        } else {
                            None
                        }
                    })
                    .collect()
            };
            for v in 0..n {
                if v != *source && v != *sink {
                    p.add_constraint(row(net(v), Relation::Eq, 0.0, format!("balance_{}", v + 1)));
                }
            }
            match data {
                ClassData::MinCostFlow { flow, .. } => {
                    p.set_objective(LinearExpr::from_terms(arcs.iter().enumerate().map(|(k, a)| (k, a.cost))));
                    p.add_constraint(row(net(*source), Relation::Eq, *flow, "send".into()));
                }
                _ => p.set_objective(LinearExpr::from_terms(net(*source))),
            }
            p
        }
    };
    p.class_tag = class.tag().to_string();
    p.validate().map_err(|e| bad(class, e.to_string()))?;
    Ok(p.canonicalize())
}

fn knapsack(capacities: &[f64], weights: &[Vec<f64>], values: &[f64]) -> Problem {
    let mut p = Problem::new(Sense::Maximize);
    for i in 0..values.len() {
        p.add_variable(Variable::binary(format!("x_{}", i + 1)));
    }
    p.set_objective(LinearExpr::from_terms(values.iter().copied().enumerate()));
    for (d, (cap, w)) in capacities.iter().zip(weights).enumerate() {
        p.add_constraint(row(w.iter().copied().enumerate(), Relation::Le, *cap, format!("capacity_{}", d + 1)));
    }
    p
}
