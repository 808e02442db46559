//! Cross-checks branch-and-bound against exhaustive enumeration.

use milpgen::solve::{brute_force, solve_lp, solve_milp, SolverConfig, Status};
use milpgen::{Constraint, LinearExpr, Problem, Relation, Sense, Variable};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random MILP with <= 6 integral variables, bounds inside [0, 10] and
/// <= 6 constraints. Coefficients are small integers so feasibility is never
/// decided inside the tolerance band.
fn random_milp(seed: u64) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(0..=6);
    let sense = if rng.gen_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let mut p = Problem::new(sense);
    for j in 0..n {
        let l = rng.gen_range(0..=3) as f64;
        let u = rng.gen_range(l as i32..=10) as f64;
        p.add_variable(Variable::integer(format!("x{j}"), l, u));
    }
    p.set_objective(LinearExpr::from_terms((0..n).map(|j| (j, rng.gen_range(-6..=10) as f64))));
    for _ in 0..m {
        let mut terms = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                terms.push((j, rng.gen_range(-4..=9) as f64));
            }
        }
        let relation = match rng.gen_range(0..10) {
            0..=5 => Relation::Le,
            6..=8 => Relation::Ge,
            _ => Relation::Eq,
        };
        let rhs = rng.gen_range(-5..=40) as f64;
        p.add_constraint(Constraint::new(LinearExpr::from_terms(terms), relation, rhs));
    }
    p
}

#[test]
fn branch_and_bound_matches_enumeration_on_500_instances() {
    let cfg = SolverConfig::default();
    let mut by_status = [0usize; 3];
    for seed in 0..500 {
        let p = random_milp(seed);
        let bb = solve_milp(&p, &cfg).unwrap();
        let bf = brute_force(&p).unwrap();
        assert_eq!(bb.status(), bf.status(), "seed {seed}");
        if let (Some(a), Some(b)) = (bb.value(), bf.value()) {
            assert!((a - b).abs() <= 1e-6, "seed {seed}: {a} vs {b}");
            assert!(p.evaluate(bb.point().unwrap()).unwrap().feasible, "seed {seed}");
        }
        by_status[bb.status() as usize] += 1;
    }
    // both statuses that can occur on bounded grids are exercised
    assert!(by_status[Status::Optimal as usize] > 100);
    assert!(by_status[Status::Infeasible as usize] > 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relaxation_bounds_the_integer_optimum(seed in any::<u64>()) {
        let p = random_milp(seed);
        let cfg = SolverConfig::default();
        let milp = solve_milp(&p, &cfg).unwrap();
        let lp = solve_lp(&p, &cfg).unwrap();
        if let (Some(iv), Some(rv)) = (milp.value(), lp.value()) {
            match p.sense {
                Sense::Maximize => prop_assert!(iv <= rv + 1e-9),
                Sense::Minimize => prop_assert!(iv >= rv - 1e-9),
            }
        }
    }

    #[test]
    fn solving_is_deterministic(seed in any::<u64>()) {
        let p = random_milp(seed);
        let cfg = SolverConfig::default();
        prop_assert_eq!(solve_milp(&p, &cfg).unwrap(), solve_milp(&p, &cfg).unwrap());
    }

    #[test]
    fn canonical_evaluation_is_exact(seed in any::<u64>(), point in proptest::collection::vec(-3.0f64..12.0, 6)) {
        let mut p = random_milp(seed);
        // duplicate terms and constants so canonicalisation has work to do
        if let Some(c) = p.constraints.first_mut() {
            c.lhs.add_term(0, 0.25);
            c.lhs.add_term(0, -0.125);
            c.lhs.constant = 1.5;
        }
        p.objective.add_term(0, 0.1);
        let a = point[..p.num_vars()].to_vec().into();
        prop_assert_eq!(p.evaluate(&a).unwrap(), p.canonicalize().evaluate(&a).unwrap());
    }

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let p = random_milp(seed);
        let text = milpgen::model::text::to_text(&p);
        prop_assert_eq!(milpgen::model::text::from_text(&text).unwrap(), p.canonicalize());
    }
}
