//! Mixed-integer linear program representation.
//!
//! A [`Problem`] is the instantiated form of
//!
//! ```text
//! optimize   sum_j c_j x_j (+ constant)
//! subject to sum_j a_ij x_j  (<= | = | >=)  b_i    i = 1..m
//!            l_j <= x_j <= u_j                     j = 1..n
//!            x_j integral                          j in I
//! ```
//!
//! Binary variables are integral variables with bounds `[0, 1]`; there is no
//! separate sort for them.
//!
//! Everything here is a plain value type. [`Problem::canonicalize`] produces
//! the normal form used by the solver and by the text format in [`text`].

pub mod text;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Absolute tolerance on constraint residuals, bound violations and
/// integrality gaps used by [`Problem::evaluate`].
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("point has {actual} values but the problem has {expected} variables")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("problem has no variables")]
    NoVariables,
    #[error("invalid variable name {0:?}")]
    InvalidName(String),
    #[error("duplicate variable name {0:?}")]
    DuplicateName(String),
    #[error("variable {name:?} has lower bound {lower} above upper bound {upper}")]
    InvertedBounds { name: String, lower: f64, upper: f64 },
    #[error("term references variable index {index} but only {n} variables exist")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("metadata {0:?} must be a single line with a whitespace-free key")]
    BadMetadata(String),
    #[error("constraint label {0:?} must be non-empty and contain no whitespace or ':'")]
    BadLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    pub fn keyword(self) -> &'static str {
        match self {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        }
    }

    /// `true` when `a` is a strictly better objective value than `b`.
    pub fn improves(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    pub fn parse(token: &str) -> Option<Relation> {
        match token {
            "<=" => Some(Relation::Le),
            "=" => Some(Relation::Eq),
            ">=" => Some(Relation::Ge),
            _ => None,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integral: bool,
}

impl Variable {
    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Variable { name: name.into(), lower, upper, integral: false }
    }

    pub fn integer(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Variable { name: name.into(), lower, upper, integral: true }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Variable::integer(name, 0.0, 1.0)
    }

    /// Nonnegative continuous variable, the common default.
    pub fn nonneg(name: impl Into<String>) -> Self {
        Variable::continuous(name, 0.0, f64::INFINITY)
    }
}

/// `true` for names matching `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub var: usize,
    pub coef: f64,
}

/// Sum of `coef * x[var]` terms plus a constant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearExpr {
    pub terms: Vec<Term>,
    pub constant: f64,
}

impl LinearExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, f64)>>(terms: I) -> Self {
        LinearExpr {
            terms: terms.into_iter().map(|(var, coef)| Term { var, coef }).collect(),
            constant: 0.0,
        }
    }

    pub fn with_constant(mut self, constant: f64) -> Self {
        self.constant = constant;
        self
    }

    pub fn add_term(&mut self, var: usize, coef: f64) -> &mut Self {
        self.terms.push(Term { var, coef });
        self
    }

    /// Value at `point`, summing terms in stored order.
    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            acc += t.coef * point[t.var];
        }
        acc + self.constant
    }

    /// Strictly increasing indices and no zero coefficients.
    pub fn is_canonical(&self) -> bool {
        self.terms.iter().all(|t| t.coef != 0.0)
            && self.terms.windows(2).all(|w| w[0].var < w[1].var)
    }

    /// Sorted, merged, zero-free copy. Merged coefficients are summed in
    /// their original relative order so the result is deterministic.
    pub fn canonical(&self) -> LinearExpr {
        if self.is_canonical() {
            return self.clone();
        }
        let mut sorted = self.terms.clone();
        sorted.sort_by_key(|t| t.var);
        let mut terms: Vec<Term> = Vec::with_capacity(sorted.len());
        for t in sorted {
            match terms.last_mut() {
                Some(last) if last.var == t.var => last.coef += t.coef,
                _ => terms.push(t),
            }
        }
        terms.retain(|t| t.coef != 0.0);
        LinearExpr { terms, constant: self.constant }
    }

    pub fn coef_of(&self, var: usize) -> f64 {
        self.terms.iter().filter(|t| t.var == var).map(|t| t.coef).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub label: Option<String>,
    pub lhs: LinearExpr,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(lhs: LinearExpr, relation: Relation, rhs: f64) -> Self {
        Constraint { label: None, lhs, relation, rhs }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn is_canonical(&self) -> bool {
        self.lhs.constant == 0.0 && self.lhs.is_canonical()
    }

    /// Canonical lhs with its constant folded into the right-hand side.
    pub fn canonical(&self) -> Constraint {
        if self.is_canonical() {
            return self.clone();
        }
        let mut lhs = self.lhs.canonical();
        let rhs = self.rhs - lhs.constant;
        lhs.constant = 0.0;
        Constraint { label: self.label.clone(), lhs, relation: self.relation, rhs }
    }

    /// Nonnegative amount by which `activity` (the lhs value) violates the row.
    pub fn violation(&self, activity: f64) -> f64 {
        match self.relation {
            Relation::Le => (activity - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - activity).max(0.0),
            Relation::Eq => (activity - self.rhs).abs(),
        }
    }

    fn display_label(&self, index: usize) -> String {
        self.label.clone().unwrap_or_else(|| format!("r{index}"))
    }
}

/// A point in variable space, one value per variable.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment {
    pub values: Vec<f64>,
}

impl From<Vec<f64>> for Assignment {
    fn from(values: Vec<f64>) -> Self {
        Assignment { values }
    }
}

impl Assignment {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub label: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub sense: Sense,
    pub variables: Vec<Variable>,
    pub objective: LinearExpr,
    pub constraints: Vec<Constraint>,
    pub class_tag: String,
    pub metadata: BTreeMap<String, String>,
}

impl Problem {
    pub fn new(sense: Sense) -> Self {
        Problem {
            sense,
            variables: Vec::new(),
            objective: LinearExpr::new(),
            constraints: Vec::new(),
            class_tag: String::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_class(mut self, tag: impl Into<String>) -> Self {
        self.class_tag = tag.into();
        self
    }

    /// Appends a variable and returns its index.
    pub fn add_variable(&mut self, var: Variable) -> usize {
        self.variables.push(var);
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, c: Constraint) -> usize {
        self.constraints.push(c);
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, objective: LinearExpr) {
        self.objective = objective;
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn has_integers(&self) -> bool {
        self.variables.iter().any(|v| v.integral)
    }

    /// Checks every structural invariant of the representation.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.variables.len();
        if n == 0 {
            return Err(ModelError::NoVariables);
        }
        let mut seen = HashSet::with_capacity(n);
        for v in &self.variables {
            if !is_valid_name(&v.name) {
                return Err(ModelError::InvalidName(v.name.clone()));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(ModelError::DuplicateName(v.name.clone()));
            }
            if v.lower.is_nan() || v.upper.is_nan() || v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
                return Err(ModelError::NonFinite(format!("bounds of {}", v.name)));
            }
            if v.lower > v.upper {
                return Err(ModelError::InvertedBounds { name: v.name.clone(), lower: v.lower, upper: v.upper });
            }
        }
        check_expr(&self.objective, n, "objective")?;
        for (i, c) in self.constraints.iter().enumerate() {
            let what = c.display_label(i);
            if let Some(label) = &c.label {
                if label.is_empty() || label.contains(':') || label.chars().any(char::is_whitespace) {
                    return Err(ModelError::BadLabel(label.clone()));
                }
            }
            check_expr(&c.lhs, n, &what)?;
            if !c.rhs.is_finite() {
                return Err(ModelError::NonFinite(format!("right-hand side of {what}")));
            }
        }
        for (k, v) in &self.metadata {
            if k.is_empty() || k.chars().any(char::is_whitespace) || v.contains('\n') || v.contains('\r') {
                return Err(ModelError::BadMetadata(k.clone()));
            }
        }
        if self.class_tag.chars().any(char::is_whitespace) {
            return Err(ModelError::BadMetadata(format!("class {}", self.class_tag)));
        }
        Ok(())
    }

    pub fn is_canonical(&self) -> bool {
        self.objective.is_canonical() && self.constraints.iter().all(Constraint::is_canonical)
    }

    /// Sorts and merges every term list, drops zero coefficients and folds
    /// constraint constants into the right-hand side. Idempotent.
    pub fn canonicalize(&self) -> Problem {
        Problem {
            sense: self.sense,
            variables: self.variables.clone(),
            objective: self.objective.canonical(),
            constraints: self.constraints.iter().map(Constraint::canonical).collect(),
            class_tag: self.class_tag.clone(),
            metadata: self.metadata.clone(),
        }
    }

    /// Objective value and feasibility report at `point`.
    ///
    /// Expressions are evaluated in canonical form, so a problem and its
    /// canonicalization always produce identical reports.
    pub fn evaluate(&self, point: &Assignment) -> Result<Evaluation, ModelError> {
        let n = self.variables.len();
        if point.len() != n {
            return Err(ModelError::DimensionMismatch { expected: n, actual: point.len() });
        }
        let x = &point.values;
        let mut violations = Vec::new();

        for (v, &value) in self.variables.iter().zip(x) {
            if v.lower - value > FEASIBILITY_TOL {
                violations.push(Violation { label: format!("{}>={}", v.name, v.lower), magnitude: v.lower - value });
            }
            if value - v.upper > FEASIBILITY_TOL {
                violations.push(Violation { label: format!("{}<={}", v.name, v.upper), magnitude: value - v.upper });
            }
            if v.integral {
                let gap = (value - value.round()).abs();
                if gap > FEASIBILITY_TOL {
                    violations.push(Violation { label: format!("{} integral", v.name), magnitude: gap });
                }
            }
            if value.is_nan() {
                violations.push(Violation { label: format!("{} is NaN", v.name), magnitude: f64::INFINITY });
            }
        }

        for (i, c) in self.constraints.iter().enumerate() {
            let canon = c.canonical();
            let magnitude = canon.violation(canon.lhs.eval(x));
            if magnitude > FEASIBILITY_TOL || magnitude.is_nan() {
                violations.push(Violation { label: c.display_label(i), magnitude });
            }
        }

        let objective = self.objective.canonical().eval(x);
        Ok(Evaluation { objective, feasible: violations.is_empty(), violations })
    }
}

fn check_expr(expr: &LinearExpr, n: usize, what: &str) -> Result<(), ModelError> {
    for t in &expr.terms {
        if t.var >= n {
            return Err(ModelError::IndexOutOfRange { index: t.var, n });
        }
        if !t.coef.is_finite() {
            return Err(ModelError::NonFinite(format!("coefficient in {what}")));
        }
    }
    if !expr.constant.is_finite() {
        return Err(ModelError::NonFinite(format!("constant in {what}")));
    }
    Ok(())
}
