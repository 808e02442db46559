//! Line-oriented instance file format.
//!
//! ```text
//! file       := line*
//! line       := blank | comment | class | meta | var | objective | row
//! comment    := '#' any*
//! class      := 'class' WS tag
//! meta       := 'meta' WS key ' ' value          value is the rest of the line
//! var        := 'var' WS name WS bound WS bound WS ('int' | 'cont')
//! objective  := ('min' | 'max') WS expr
//! row        := 'st' WS [label ':' WS] expr WS relation WS number
//! relation   := '<=' | '=' | '>='
//! expr       := term (WS ('+' | '-') WS term)*
//! term       := number '*' name | number | name | '-' name
//! bound      := number | 'inf' | '-inf'
//! name       := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! Tokens are separated by ASCII whitespace. Numbers use Rust's shortest
//! round-trip decimal rendering, so writing and re-reading a canonical problem
//! reproduces it bit for bit. Exactly one objective line is required and
//! variables must be declared before they are referenced.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{is_valid_name, Constraint, LinearExpr, Problem, Relation, Sense, Variable};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Renders the canonical form of `problem`.
pub fn to_text(problem: &Problem) -> String {
    let p = problem.canonicalize();
    let mut out = String::new();
    if !p.class_tag.is_empty() {
        let _ = writeln!(out, "class {}", p.class_tag);
    }
    for (k, v) in &p.metadata {
        let _ = writeln!(out, "meta {k} {v}");
    }
    for v in &p.variables {
        let kind = if v.integral { "int" } else { "cont" };
        let _ = writeln!(out, "var {} {} {} {}", v.name, v.lower, v.upper, kind);
    }
    let _ = writeln!(out, "{} {}", p.sense.keyword(), write_expr(&p, &p.objective));
    for c in &p.constraints {
        out.push_str("st ");
        if let Some(label) = &c.label {
            out.push_str(label);
            out.push_str(": ");
        }
        let _ = writeln!(out, "{} {} {}", write_expr(&p, &c.lhs), c.relation, c.rhs);
    }
    out
}

fn write_expr(p: &Problem, e: &LinearExpr) -> String {
    let mut out = String::new();
    for (k, t) in e.terms.iter().enumerate() {
        let name = &p.variables[t.var].name;
        if k == 0 {
            let _ = write!(out, "{}*{}", t.coef, name);
        } else if t.coef < 0.0 {
            let _ = write!(out, " - {}*{}", -t.coef, name);
        } else {
            let _ = write!(out, " + {}*{}", t.coef, name);
        }
    }
    if e.constant != 0.0 || e.terms.is_empty() {
        let c = if e.constant == 0.0 { 0.0 } else { e.constant };
        if e.terms.is_empty() {
            let _ = write!(out, "{c}");
        } else if c < 0.0 {
            let _ = write!(out, " - {}", -c);
        } else {
            let _ = write!(out, " + {c}");
        }
    }
    out
}

struct Tok<'a> {
    text: &'a str,
    column: usize,
    start: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        if ch.is_ascii_whitespace() {
            if let Some(s) = start.take() {
                toks.push(Tok { text: &line[s..i], column: line[..s].chars().count() + 1, start: s });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        toks.push(Tok { text: &line[s..], column: line[..s].chars().count() + 1, start: s });
    }
    toks
}

struct LineCtx {
    line: usize,
}

impl LineCtx {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column, message: message.into() }
    }
}

fn parse_number(ctx: &LineCtx, tok: &Tok<'_>, allow_inf: bool) -> Result<f64, ParseError> {
    let v: f64 = tok
        .text
        .parse()
        .map_err(|_| ctx.err(tok.column, format!("expected a number, found {:?}", tok.text)))?;
    if v.is_nan() || (!allow_inf && v.is_infinite()) {
        return Err(ctx.err(tok.column, format!("number {:?} is not finite", tok.text)));
    }
    Ok(v)
}

fn parse_expr(ctx: &LineCtx, toks: &[Tok<'_>], names: &HashMap<String, usize>) -> Result<LinearExpr, ParseError> {
    let mut expr = LinearExpr::new();
    let mut sign = 1.0;
    let mut expect_term = true;
    for tok in toks {
        if !expect_term {
            sign = match tok.text {
                "+" => 1.0,
                "-" => -1.0,
                other => return Err(ctx.err(tok.column, format!("expected '+' or '-', found {other:?}"))),
            };
            expect_term = true;
            continue;
        }
        expect_term = false;
        let text = tok.text;
        if let Some((coef, name)) = text.split_once('*') {
            let coef_tok = Tok { text: coef, column: tok.column, start: tok.start };
            let c = parse_number(ctx, &coef_tok, false)?;
            let idx = lookup(ctx, tok.column + coef.chars().count() + 1, name, names)?;
            expr.add_term(idx, sign * c);
        } else if let Ok(c) = text.parse::<f64>() {
            if !c.is_finite() {
                return Err(ctx.err(tok.column, format!("number {text:?} is not finite")));
            }
            expr.constant += sign * c;
        } else if let Some(name) = text.strip_prefix('-') {
            let idx = lookup(ctx, tok.column + 1, name, names)?;
            expr.add_term(idx, -sign);
        } else {
            let idx = lookup(ctx, tok.column, text, names)?;
            expr.add_term(idx, sign);
        }
    }
    if expect_term {
        let column = toks.last().map(|t| t.column).unwrap_or(1);
        return Err(ctx.err(column, "expression is empty or ends with an operator"));
    }
    Ok(expr)
}

fn lookup(ctx: &LineCtx, column: usize, name: &str, names: &HashMap<String, usize>) -> Result<usize, ParseError> {
    names
        .get(name)
        .copied()
        .ok_or_else(|| ctx.err(column, format!("unknown variable {name:?}")))
}

/// Parses an instance file. The result is canonical.
pub fn from_text(input: &str) -> Result<Problem, ParseError> {
    let mut problem = Problem::new(Sense::Minimize);
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut seen_objective = false;

    for (lineno, raw) in input.lines().enumerate() {
        let ctx = LineCtx { line: lineno + 1 };
        let toks = tokenize(raw);
        let Some(head) = toks.first() else { continue };
        if head.text.starts_with('#') {
            continue;
        }
        match head.text {
            "class" => {
                if toks.len() != 2 {
                    return Err(ctx.err(head.column, "expected `class <tag>`"));
                }
                problem.class_tag = toks[1].text.to_string();
            }
            "meta" => {
                let key = toks.get(1).ok_or_else(|| ctx.err(head.column, "expected `meta <key> <value>`"))?;
                // value is everything after the single space following the key
                let value = raw.get(key.start + key.text.len() + 1..).unwrap_or("");
                problem.metadata.insert(key.text.to_string(), value.to_string());
            }
            "var" => {
                if toks.len() != 5 {
                    return Err(ctx.err(head.column, "expected `var <name> <lower> <upper> <int|cont>`"));
                }
                let name = toks[1].text;
                if !is_valid_name(name) {
                    return Err(ctx.err(toks[1].column, format!("invalid variable name {name:?}")));
                }
                if names.contains_key(name) {
                    return Err(ctx.err(toks[1].column, format!("duplicate variable {name:?}")));
                }
                let lower = parse_number(&ctx, &toks[2], true)?;
                let upper = parse_number(&ctx, &toks[3], true)?;
                if lower == f64::INFINITY || upper == f64::NEG_INFINITY || lower > upper {
                    return Err(ctx.err(toks[2].column, format!("invalid bounds [{lower}, {upper}]")));
                }
                let integral = match toks[4].text {
                    "int" => true,
                    "cont" => false,
                    other => return Err(ctx.err(toks[4].column, format!("expected `int` or `cont`, found {other:?}"))),
                };
                names.insert(name.to_string(), problem.variables.len());
                problem.add_variable(Variable { name: name.to_string(), lower, upper, integral });
            }
            "min" | "max" => {
                if seen_objective {
                    return Err(ctx.err(head.column, "second objective line"));
                }
                seen_objective = true;
                problem.sense = if head.text == "min" { Sense::Minimize } else { Sense::Maximize };
                problem.objective = parse_expr(&ctx, &toks[1..], &names)?;
            }
            "st" => {
                let mut rest = &toks[1..];
                let mut label = None;
                if let Some(first) = rest.first() {
                    if let Some(l) = first.text.strip_suffix(':') {
                        if l.is_empty() || l.contains(':') {
                            return Err(ctx.err(first.column, "empty constraint label"));
                        }
                        label = Some(l.to_string());
                        rest = &rest[1..];
                    }
                }
                if rest.len() < 3 {
                    return Err(ctx.err(head.column, "expected `st [label:] <expr> <relation> <rhs>`"));
                }
                let rel_tok = &rest[rest.len() - 2];
                let relation = Relation::parse(rel_tok.text).ok_or_else(|| {
                    ctx.err(rel_tok.column, format!("expected relation `<=`, `=` or `>=`, found {:?}", rel_tok.text))
                })?;
                let rhs = parse_number(&ctx, &rest[rest.len() - 1], false)?;
                let lhs = parse_expr(&ctx, &rest[..rest.len() - 2], &names)?;
                problem.add_constraint(Constraint { label, lhs, relation, rhs });
            }
            other => return Err(ctx.err(head.column, format!("unknown declaration {other:?}"))),
        }
    }
    if !seen_objective {
        return Err(ParseError { line: input.lines().count().max(1), column: 1, message: "missing objective line".into() });
    }
    if problem.variables.is_empty() {
        return Err(ParseError { line: 1, column: 1, message: "no variables declared".into() });
    }
    Ok(problem.canonicalize())
}
