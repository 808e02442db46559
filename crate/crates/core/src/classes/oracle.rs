//! Exact combinatorial solvers, one per structured class. None of them use
//! linear programming.

use std::collections::VecDeque;

use super::{Arc, ClassData, ClassError, ClassId};

const MAX_SUBSET_ITEMS: usize = 20;
const MAX_PARTITION_ITEMS: usize = 10;
const MAX_TOUR_CITIES: usize = 9;
const MAX_SHIFT_GRID: f64 = 5e6;

fn limit(class: ClassId, detail: impl Into<String>) -> ClassError {
    ClassError::OracleLimit { class, detail: detail.into() }
}

/// Exact optimum of a structured instance.
pub fn class_oracle(data: &ClassData) -> Result<f64, ClassError> {
    let class = data.class();
    match data {
        ClassData::Linear { .. } => Err(ClassError::NoOracle(class)),
        ClassData::Knapsack { capacity, weights, values } => {
            subset_knapsack(class, std::slice::from_ref(capacity), std::slice::from_ref(weights), values)
        }
        ClassData::Mdknapsack { capacities, weights, values } => subset_knapsack(class, capacities, weights, values),
        ClassData::SetCover { universe, sets, costs } => {
            if sets.len() > MAX_SUBSET_ITEMS || *universe > 64 {
                return Err(limit(class, format!("{} sets", sets.len())));
            }
            let masks: Vec<u64> = sets.iter().map(|s| s.iter().fold(0u64, |m, &e| m | 1 << e)).collect();
            let full = if *universe == 64 { u64::MAX } else { (1u64 << universe) - 1 };
            let mut best = f64::INFINITY;
            for pick in 0u32..(1u32 << sets.len()) {
                let mut covered = 0u64;
                let mut cost = 0.0;
                for k in 0..sets.len() {
                    if pick >> k & 1 == 1 {
                        covered |= masks[k];
                        cost += costs[k];
                    }
                }
                if covered & full == full && cost < best {
                    best = cost;
                }
            }
            finite(class, best)
        }
        ClassData::BinPacking { capacity, sizes } => {
            if sizes.len() > MAX_PARTITION_ITEMS {
                return Err(limit(class, format!("{} items", sizes.len())));
            }
            if sizes.iter().any(|s| s > capacity) {
                return Err(ClassError::BadData { class, detail: "item larger than a bin".into() });
            }
            let mut best = sizes.len();
            let mut loads = Vec::new();
            partition(sizes, *capacity, 0, &mut loads, &mut best);
            Ok(best as f64)
        }
        ClassData::Tsp { distances } => {
            let n = distances.len();
            if n > MAX_TOUR_CITIES {
                return Err(limit(class, format!("{n} cities")));
            }
            if n < 2 {
                return Ok(0.0);
            }
            let mut rest: Vec<usize> = (1..n).collect();
            let mut best = f64::INFINITY;
            permute(&mut rest, 0, &mut |order| {
                let mut len = distances[0][order[0]];
                for w in order.windows(2) {
                    len += distances[w[0]][w[1]];
                }
                len += distances[order[order.len() - 1]][0];
                if len < best {
                    best = len;
                }
            });
            Ok(best)
        }
        ClassData::ShiftScheduling { demand, patterns, costs } => {
            let cap = demand.iter().fold(0.0f64, |a, &b| a.max(b)) as usize;
            let grid = ((cap + 1) as f64).powi(patterns.len() as i32);
            if grid > MAX_SHIFT_GRID {
                return Err(limit(class, format!("{grid} staffing vectors")));
            }
            let mut counts = vec![0usize; patterns.len()];
            let mut best = f64::INFINITY;
            loop {
                let ok = demand.iter().enumerate().all(|(t, &d)| {
                    let staffed: usize = patterns.iter().zip(&counts).filter(|(p, _)| p.contains(&t)).map(|(_, c)| c).sum();
                    staffed as f64 >= d
                });
                if ok {
                    let cost: f64 = counts.iter().zip(costs).map(|(&c, k)| c as f64 * k).sum();
                    best = best.min(cost);
                }
                let mut k = 0;
                loop {
                    if k == counts.len() {
                        return finite(class, best);
                    }
                    if counts[k] < cap {
                        counts[k] += 1;
                        break;
                    }
                    counts[k] = 0;
                    k += 1;
                }
            }
        }
        ClassData::Transportation { supply, demand, costs } => {
            // super source 0, sources 1..=s, sinks s+1..=s+d, super sink s+d+1
            let (s, d) = (supply.len(), demand.len());
            let mut arcs = Vec::new();
            for i in 0..s {
                arcs.push(Arc { from: 0, to: 1 + i, capacity: supply[i], cost: 0.0 });
                for j in 0..d {
                    arcs.push(Arc { from: 1 + i, to: 1 + s + j, capacity: f64::INFINITY, cost: costs[i][j] });
                }
            }
            for j in 0..d {
                arcs.push(Arc { from: 1 + s + j, to: s + d + 1, capacity: demand[j], cost: 0.0 });
            }
            let need: f64 = demand.iter().sum();
            min_cost_flow(s + d + 2, 0, s + d + 1, &arcs, need).ok_or_else(|| ClassError::BadData {
                class,
                detail: "demand cannot be met".into(),
            })
        }
        ClassData::MaxFlow { nodes, source, sink, arcs } => Ok(max_flow_value(*nodes, *source, *sink, arcs)),
        ClassData::MinCostFlow { nodes, source, sink, arcs, flow } => min_cost_flow(*nodes, *source, *sink, arcs, *flow)
            .ok_or_else(|| ClassError::BadData { class, detail: format!("cannot route {flow} units") }),
    }
}

fn finite(class: ClassId, v: f64) -> Result<f64, ClassError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ClassError::BadData { class, detail: "no feasible selection".into() })
    }
}

fn subset_knapsack(class: ClassId, caps: &[f64], weights: &[Vec<f64>], values: &[f64]) -> Result<f64, ClassError> {
    let n = values.len();
    if n > MAX_SUBSET_ITEMS {
        return Err(limit(class, format!("{n} items")));
    }
    let mut best = 0.0f64;
    for pick in 0u32..(1u32 << n) {
        let chosen = |i: usize| pick >> i & 1 == 1;
        let fits = caps
            .iter()
            .zip(weights)
            .all(|(cap, w)| (0..n).filter(|&i| chosen(i)).map(|i| w[i]).sum::<f64>() <= *cap);
        if fits {
            best = best.max((0..n).filter(|&i| chosen(i)).map(|i| values[i]).sum());
        }
    }
    Ok(best)
}

/// Places item `i` into every open bin with room and into a new bin. Bins
/// are created in order, so each set partition is visited once.
fn partition(sizes: &[f64], cap: f64, i: usize, loads: &mut Vec<f64>, best: &mut usize) {
    if loads.len() >= *best {
        return;
    }
    if i == sizes.len() {
        *best = loads.len();
        return;
    }
    for b in 0..loads.len() {
        if loads[b] + sizes[i] <= cap {
            loads[b] += sizes[i];
            partition(sizes, cap, i + 1, loads, best);
            loads[b] -= sizes[i];
        }
    }
    loads.push(sizes[i]);
    partition(sizes, cap, i + 1, loads, best);
    loads.pop();
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Edmonds-Karp on a dense residual matrix.
pub fn max_flow_value(nodes: usize, source: usize, sink: usize, arcs: &[Arc]) -> f64 {
    let mut res = vec![vec![0.0f64; nodes]; nodes];
    for a in arcs {
        res[a.from][a.to] += a.capacity;
    }
    let mut total = 0.0;
    loop {
        let mut prev = vec![usize::MAX; nodes];
        prev[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for w in 0..nodes {
                if prev[w] == usize::MAX && res[v][w] > 0.0 {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return total;
        }
        let mut push = f64::INFINITY;
        let mut w = sink;
        while w != source {
            push = push.min(res[prev[w]][w]);
            w = prev[w];
        }
        let mut w = sink;
        while w != source {
            res[prev[w]][w] -= push;
            res[w][prev[w]] += push;
            w = prev[w];
        }
        total += push;
    }
}

/// Successive shortest paths with Bellman-Ford. `None` when `amount` units
/// cannot be routed.
fn min_cost_flow(nodes: usize, source: usize, sink: usize, arcs: &[Arc], amount: f64) -> Option<f64> {
    // residual edge list; edge k pairs with k ^ 1
    let mut to = Vec::new();
    let mut cap = Vec::new();
    let mut cost = Vec::new();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for a in arcs {
        for (f, t, c, k) in [(a.from, a.to, a.capacity, a.cost), (a.to, a.from, 0.0, -a.cost)] {
            out[f].push(to.len());
            to.push(t);
            cap.push(c);
            cost.push(k);
        }
    }
    let mut sent = 0.0;
    let mut total = 0.0;
    while sent < amount {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut via = vec![usize::MAX; nodes];
        dist[source] = 0.0;
        for _ in 0..nodes {
            let mut changed = false;
            for v in 0..nodes {
                if dist[v].is_infinite() {
                    continue;
                }
                for &e in &out[v] {
                    if cap[e] > 0.0 && dist[v] + cost[e] < dist[to[e]] {
                        dist[to[e]] = dist[v] + cost[e];
                        via[to[e]] = e;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink].is_infinite() {
            return None;
        }
        let mut push = amount - sent;
        let mut v = sink;
        while v != source {
            let e = via[v];
            push = push.min(cap[e]);
            v = to[e ^ 1];
        }
        let mut v = sink;
        while v != source {
            let e = via[v];
            cap[e] -= push;
            cap[e ^ 1] += push;
            v = to[e ^ 1];
        }
        sent += push;
        total += push * dist[sink];
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_city_tour() {
        let distances = vec![
            vec![0.0, 10.0, 15.0, 20.0],
            vec![10.0, 0.0, 35.0, 25.0],
            vec![15.0, 35.0, 0.0, 30.0],
            vec![20.0, 25.0, 30.0, 0.0],
        ];
        assert_eq!(class_oracle(&ClassData::Tsp { distances }).unwrap(), 80.0);
    }

    #[test]
    fn small_set_cover() {
        let data = ClassData::SetCover { universe: 3, sets: vec![vec![0, 1], vec![1, 2], vec![0, 1, 2]], costs: vec![1.0, 1.0, 3.0] };
        assert_eq!(class_oracle(&data).unwrap(), 2.0);
    }

    #[test]
    fn knapsack_subsets() {
        let data = ClassData::Knapsack {
            capacity: 10.0,
            weights: vec![5.0, 4.0, 6.0, 3.0],
            values: vec![10.0, 40.0, 30.0, 50.0],
        };
        assert_eq!(class_oracle(&data).unwrap(), 90.0);
    }

    #[test]
    fn five_unit_network() {
        let arc = |from, to, capacity| Arc { from, to, capacity, cost: 0.0 };
        // s=0, a=1, b=2, t=3
        let arcs = vec![arc(0, 1, 3.0), arc(0, 2, 2.0), arc(1, 3, 2.0), arc(2, 3, 3.0), arc(1, 2, 1.0)];
        assert_eq!(max_flow_value(4, 0, 3, &arcs), 5.0);
    }

    #[test]
    fn items_that_cannot_share() {
        let data = ClassData::BinPacking { capacity: 6.0, sizes: vec![6.0, 6.0] };
        assert_eq!(class_oracle(&data).unwrap(), 2.0);
        let data = ClassData::BinPacking { capacity: 10.0, sizes: vec![5.0, 5.0, 4.0, 6.0] };
        assert_eq!(class_oracle(&data).unwrap(), 2.0);
    }

    #[test]
    fn cheapest_routing_uses_negative_residuals() {
        // two units: direct arc capacity 1 cost 10, detour cost 2+2
        let arcs = vec![
            Arc { from: 0, to: 2, capacity: 1.0, cost: 10.0 },
            Arc { from: 0, to: 1, capacity: 1.0, cost: 2.0 },
            Arc { from: 1, to: 2, capacity: 1.0, cost: 2.0 },
        ];
        assert_eq!(min_cost_flow(3, 0, 2, &arcs, 1.0), Some(4.0));
        assert_eq!(min_cost_flow(3, 0, 2, &arcs, 2.0), Some(14.0));
        assert_eq!(min_cost_flow(3, 0, 2, &arcs, 3.0), None);
    }

    #[test]
    fn shift_enumeration() {
        // periods 1-2 need 2 and 3 workers; shift A covers both at cost 5, B only period 2 at cost 1
        let data = ClassData::ShiftScheduling {
            demand: vec![2.0, 3.0],
            patterns: vec![vec![0, 1], vec![1]],
            costs: vec![5.0, 1.0],
        };
        assert_eq!(class_oracle(&data).unwrap(), 11.0);
    }

    #[test]
    fn transportation_balanced() {
        let data = ClassData::Transportation {
            supply: vec![5.0, 5.0],
            demand: vec![4.0, 6.0],
            costs: vec![vec![1.0, 3.0], vec![2.0, 1.0]],
        };
        // 4 from source 1 to sink 1, 5 from source 2 to sink 2, 1 from source 1 to sink 2
        assert_eq!(class_oracle(&data).unwrap(), 4.0 + 5.0 + 3.0);
    }
}
