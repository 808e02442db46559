//! Reference scripts and stage texts derived directly from a [`Problem`].
//! They stand in for a perfect teacher when building replay transcripts.

use std::fmt::Write;

use crate::model::{LinearExpr, Problem, Relation, Sense, Variable};

use super::LanguageTag;

fn num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn expr(e: &LinearExpr, names: &[String], prefix: &str) -> String {
    let mut out = String::new();
    for t in &e.terms {
        let (sign, c) = if t.coef < 0.0 { ("-", -t.coef) } else { ("+", t.coef) };
        if out.is_empty() {
            if sign == "-" {
                out.push('-');
            }
        } else {
            write!(out, " {sign} ").unwrap();
        }
        if c != 1.0 {
            write!(out, "{}*", num(c)).unwrap();
        }
        write!(out, "{prefix}{}", names[t.var]).unwrap();
    }
    if e.constant != 0.0 || out.is_empty() {
        if out.is_empty() {
            out = num(e.constant);
        } else {
            write!(out, " {} {}", if e.constant < 0.0 { "-" } else { "+" }, num(e.constant.abs())).unwrap();
        }
    }
    out
}

fn op(r: Relation) -> &'static str {
    match r {
        Relation::Le => "<=",
        Relation::Ge => ">=",
        Relation::Eq => "==",
    }
}

fn is_binary(v: &Variable) -> bool {
    v.integral && v.lower == 0.0 && v.upper == 1.0
}

fn labels(p: &Problem) -> Vec<String> {
    p.constraints.iter().enumerate().map(|(i, c)| c.label.clone().unwrap_or_else(|| format!("c{}", i + 1))).collect()
}

fn bound(v: f64, none: &str) -> String {
    if v.is_finite() {
        num(v)
    } else {
        none.to_string()
    }
}

/// A script for `tag` that builds and solves `p` and prints its value.
pub fn reference_code(p: &Problem, tag: LanguageTag) -> String {
    let names: Vec<String> = p.variables.iter().map(|v| v.name.clone()).collect();
    let labels = labels(p);
    let max = p.sense == Sense::Maximize;
    let mut s = String::new();
    match tag {
        LanguageTag::Pyomo => {
            s.push_str("import pyomo.environ as pyo\n\nm = pyo.ConcreteModel()\n");
            for v in &p.variables {
                let domain = match (is_binary(v), v.integral) {
                    (true, _) => "pyo.Binary",
                    (_, true) => "pyo.Integers",
                    _ => "pyo.Reals",
                };
                let (lo, hi) = (bound(v.lower, "None"), bound(v.upper, "None"));
                writeln!(s, "m.{} = pyo.Var(domain={domain}, bounds=({lo}, {hi}))", v.name).unwrap();
            }
            let sense = if max { "pyo.maximize" } else { "pyo.minimize" };
            writeln!(s, "m.obj = pyo.Objective(expr={}, sense={sense})", expr(&p.objective, &names, "m.")).unwrap();
            for (c, l) in p.constraints.iter().zip(&labels) {
                writeln!(s, "m.{l} = pyo.Constraint(expr={} {} {})", expr(&c.lhs, &names, "m."), op(c.relation), num(c.rhs))
                    .unwrap();
            }
            s.push_str("\nresult = pyo.SolverFactory('cbc').solve(m)\nprint('Optimal value:', pyo.value(m.obj))\n");
        }
        LanguageTag::Gurobipy => {
            s.push_str("import gurobipy as gp\nfrom gurobipy import GRB\n\nm = gp.Model()\n");
            for v in &p.variables {
                let vtype = match (is_binary(v), v.integral) {
                    (true, _) => "GRB.BINARY",
                    (_, true) => "GRB.INTEGER",
                    _ => "GRB.CONTINUOUS",
                };
                let (lo, hi) = (bound(v.lower, "-GRB.INFINITY"), bound(v.upper, "GRB.INFINITY"));
                writeln!(s, "{0} = m.addVar(lb={lo}, ub={hi}, vtype={vtype}, name=\"{0}\")", v.name).unwrap();
            }
            let sense = if max { "GRB.MAXIMIZE" } else { "GRB.MINIMIZE" };
            writeln!(s, "m.setObjective({}, {sense})", expr(&p.objective, &names, "")).unwrap();
            for (c, l) in p.constraints.iter().zip(&labels) {
                writeln!(s, "m.addConstr({} {} {}, name=\"{l}\")", expr(&c.lhs, &names, ""), op(c.relation), num(c.rhs)).unwrap();
            }
            s.push_str("\nm.optimize()\nprint('Optimal value:', m.ObjVal)\n");
        }
        LanguageTag::Docplex => {
            s.push_str("from docplex.mp.model import Model\n\nm = Model()\n");
            for v in &p.variables {
                let kind = match (is_binary(v), v.integral) {
                    (true, _) => {
                        writeln!(s, "{0} = m.binary_var(name=\"{0}\")", v.name).unwrap();
                        continue;
                    }
                    (_, true) => "integer_var",
                    _ => "continuous_var",
                };
                let (lo, hi) = (bound(v.lower, "-m.infinity"), bound(v.upper, "m.infinity"));
                writeln!(s, "{0} = m.{kind}(lb={lo}, ub={hi}, name=\"{0}\")", v.name).unwrap();
            }
            let sense = if max { "maximize" } else { "minimize" };
            writeln!(s, "m.{sense}({})", expr(&p.objective, &names, "")).unwrap();
            for (c, l) in p.constraints.iter().zip(&labels) {
                writeln!(s, "m.add_constraint({} {} {}, ctname=\"{l}\")", expr(&c.lhs, &names, ""), op(c.relation), num(c.rhs))
                    .unwrap();
            }
            s.push_str("\nsolution = m.solve()\nprint('Optimal value:', solution.objective_value)\n");
        }
        LanguageTag::Cvxpy => {
            s.push_str("import cvxpy as cp\n\n");
            let mut cons = Vec::new();
            for v in &p.variables {
                let flag = match (is_binary(v), v.integral) {
                    (true, _) => ", boolean=True",
                    (_, true) => ", integer=True",
                    _ => "",
                };
                writeln!(s, "{0} = cp.Variable(name=\"{0}\"{flag})", v.name).unwrap();
                if !is_binary(v) {
                    if v.lower.is_finite() {
                        cons.push(format!("{} >= {},", v.name, num(v.lower)));
                    }
                    if v.upper.is_finite() {
                        cons.push(format!("{} <= {},", v.name, num(v.upper)));
                    }
                }
            }
            for (c, l) in p.constraints.iter().zip(&labels) {
                cons.push(format!("{} {} {},  # {l}", expr(&c.lhs, &names, ""), op(c.relation), num(c.rhs)));
            }
            s.push_str("\nconstraints = [\n");
            for c in cons {
                writeln!(s, "    {c}").unwrap();
            }
            let sense = if max { "cp.Maximize" } else { "cp.Minimize" };
            writeln!(s, "]\nproblem = cp.Problem({sense}({}), constraints)", expr(&p.objective, &names, "")).unwrap();
            s.push_str("problem.solve()\nprint('Optimal value:', problem.value)\n");
        }
        LanguageTag::Pyscipopt => {
            s.push_str("from pyscipopt import Model\n\nm = Model()\n");
            for v in &p.variables {
                let vtype = match (is_binary(v), v.integral) {
                    (true, _) => "B",
                    (_, true) => "I",
                    _ => "C",
                };
                let (lo, hi) = (bound(v.lower, "None"), bound(v.upper, "None"));
                writeln!(s, "{0} = m.addVar(name=\"{0}\", vtype=\"{vtype}\", lb={lo}, ub={hi})", v.name).unwrap();
            }
            let sense = if max { "maximize" } else { "minimize" };
            writeln!(s, "m.setObjective({}, \"{sense}\")", expr(&p.objective, &names, "")).unwrap();
            for (c, l) in p.constraints.iter().zip(&labels) {
                writeln!(s, "m.addCons({} {} {}, name=\"{l}\")", expr(&c.lhs, &names, ""), op(c.relation), num(c.rhs)).unwrap();
            }
            s.push_str("\nm.optimize()\nprint('Optimal value:', m.getObjVal())\n");
        }
    }
    s
}

/// Plain-language component list: variables with domains, then the
/// objective, then each constraint.
pub fn components_text(p: &Problem) -> String {
    let names: Vec<String> = p.variables.iter().map(|v| v.name.clone()).collect();
    let mut s = String::from("Decision variables:\n");
    for v in &p.variables {
        let domain = match (is_binary(v), v.integral) {
            (true, _) => "binary".to_string(),
            (_, true) => format!("integer between {} and {}", bound(v.lower, "-inf"), bound(v.upper, "inf")),
            _ => format!("real between {} and {}", bound(v.lower, "-inf"), bound(v.upper, "inf")),
        };
        writeln!(s, "- {}: {domain}", v.name).unwrap();
    }
    let sense = if p.sense == Sense::Maximize { "maximize" } else { "minimize" };
    writeln!(s, "Objective:\n- {sense} {}", expr(&p.objective, &names, "")).unwrap();
    s.push_str("Constraints:\n");
    for (c, l) in p.constraints.iter().zip(labels(p)) {
        writeln!(s, "- {l}: {} {} {}", expr(&c.lhs, &names, ""), op(c.relation), num(c.rhs)).unwrap();
    }
    s.pop();
    s
}

/// Demonstration bound to the infeasibility prompt: a small model whose
/// capacity row was typed with the wrong direction, and its repair.
pub fn infeasibility_example(tag: LanguageTag) -> String {
    let mut p = Problem::new(Sense::Maximize);
    let x = p.add_variable(Variable::integer("x_1", 0.0, 10.0));
    let y = p.add_variable(Variable::integer("x_2", 0.0, 10.0));
    p.set_objective(LinearExpr::from_terms([(x, 3.0), (y, 2.0)]));
    let row = LinearExpr::from_terms([(x, 1.0), (y, 1.0)]);
    p.add_constraint(crate::model::Constraint::new(row, Relation::Ge, 25.0).labeled("capacity"));
    let broken = reference_code(&p, tag);
    p.constraints[0].relation = Relation::Le;
    p.constraints[0].rhs = 4.0;
    let fixed = reference_code(&p, tag);
    format!(
        "Infeasible code:\n{broken}\nBoth variables are capped at 10, so x_1 + x_2 >= 25 can never hold. The problem \
         states a capacity of 4 units, so the row must read x_1 + x_2 <= 4. This is a modeling issue.\n```\n{fixed}```"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, Variable};

    fn sample() -> Problem {
        let mut p = Problem::new(Sense::Minimize);
        let a = p.add_variable(Variable::continuous("a", 0.0, f64::INFINITY));
        let b = p.add_variable(Variable::binary("b"));
        p.set_objective(LinearExpr::from_terms([(a, 2.5), (b, -1.0)]).with_constant(3.0));
        p.add_constraint(Constraint::new(LinearExpr::from_terms([(a, 1.0), (b, 4.0)]), Relation::Ge, 2.0).labeled("need"));
        p
    }

    #[test]
    fn expression_rendering() {
        let p = sample();
        let names = vec!["a".to_string(), "b".to_string()];
        assert_eq!(expr(&p.objective, &names, "m."), "2.5*m.a - m.b + 3");
        assert_eq!(expr(&LinearExpr::new(), &names, ""), "0");
    }

    #[test]
    fn every_tag_prints_the_value() {
        for tag in LanguageTag::ALL {
            let code = reference_code(&sample(), tag);
            assert!(code.contains("print('Optimal value:'"), "{tag}");
            assert!(code.contains("need"), "{tag}");
        }
        let py = reference_code(&sample(), LanguageTag::Pyomo);
        assert!(py.contains("m.a = pyo.Var(domain=pyo.Reals, bounds=(0, None))"));
        assert!(py.contains("m.need = pyo.Constraint(expr=m.a + 4*m.b >= 2)"));
        let cvx = reference_code(&sample(), LanguageTag::Cvxpy);
        assert!(cvx.contains("    a >= 0,\n") && !cvx.contains("b >= 0"));
    }

    #[test]
    fn components_list() {
        assert_eq!(
            components_text(&sample()),
            "Decision variables:\n- a: real between 0 and inf\n- b: binary\nObjective:\n- minimize 2.5*a - b + 3\n\
             Constraints:\n- need: a + 4*b >= 2"
        );
    }
}
