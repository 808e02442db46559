//! Symbolic descriptions: text with `\parameter{name}` placeholders,
//! instantiation against sampled values, coverage checks and shuffled
//! coefficient tables.

mod library;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::sampler::{rng_for, SymbolicProblem};

pub use library::{describe, describe_class, template_infos, Described, TemplateError, TemplateInfo, TEMPLATES};

const OPEN: &str = "\\parameter{";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaceholderError {
    #[error("unterminated placeholder at byte {offset}")]
    Unterminated { offset: usize },
    #[error("invalid parameter name {name:?} at byte {offset}")]
    BadName { name: String, offset: usize },
    #[error("missing values for {}", .0.iter().cloned().collect::<Vec<_>>().join(", "))]
    Missing(BTreeSet<String>),
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Walks the placeholders of `text` as `(start, end, name)` byte spans.
fn scan(text: &str) -> Result<Vec<(usize, usize, &str)>, PlaceholderError> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(rel) = text[from..].find(OPEN) {
        let start = from + rel;
        let name_start = start + OPEN.len();
        let close = text[name_start..].find('}').ok_or(PlaceholderError::Unterminated { offset: start })?;
        let name = &text[name_start..name_start + close];
        if !valid_name(name) {
            return Err(PlaceholderError::BadName { name: name.to_string(), offset: start });
        }
        let end = name_start + close + 1;
        out.push((start, end, name));
        from = end;
    }
    Ok(out)
}

/// The set of names referenced by `\parameter{...}` in `text`.
pub fn extract_placeholders(text: &str) -> Result<BTreeSet<String>, PlaceholderError> {
    Ok(scan(text)?.into_iter().map(|(_, _, n)| n.to_string()).collect())
}

/// Number rendering: at most two decimals, trailing zeros trimmed, no
/// thousands separators.
pub fn format_number(v: f64) -> String {
    let s = format!("{:.2}", v);
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Which parameters render as integers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FormatRules {
    pub integer: BTreeSet<String>,
}

impl FormatRules {
    pub fn format(&self, name: &str, v: f64) -> String {
        if self.integer.contains(name) {
            format_number(v.round())
        } else {
            format_number(v)
        }
    }
}

/// Coefficient table with parameter names in the cells. `None` cells are
/// structurally empty and render as `-`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub caption: String,
    pub corner: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<Option<String>>>,
}

impl TableSpec {
    pub fn names(&self) -> BTreeSet<String> {
        self.cells.iter().flatten().flatten().cloned().collect()
    }

    pub fn is_well_formed(&self) -> bool {
        self.cells.len() == self.rows.len() && self.cells.iter().all(|r| r.len() == self.columns.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicDescription {
    pub text: String,
    pub referenced: BTreeSet<String>,
    pub tables: Vec<TableSpec>,
}

impl SymbolicDescription {
    pub fn new(text: impl Into<String>) -> Result<Self, PlaceholderError> {
        Self::with_tables(text, Vec::new())
    }

    pub fn with_tables(text: impl Into<String>, tables: Vec<TableSpec>) -> Result<Self, PlaceholderError> {
        let text = text.into();
        let referenced = extract_placeholders(&text)?;
        Ok(SymbolicDescription { text, referenced, tables })
    }

    /// Placeholders in the text plus table cells.
    pub fn covered(&self) -> BTreeSet<String> {
        let mut all = self.referenced.clone();
        for t in &self.tables {
            all.extend(t.names());
        }
        all
    }
}

/// Replaces every placeholder in the text with its formatted value.
pub fn instantiate(
    desc: &SymbolicDescription,
    values: &BTreeMap<String, f64>,
    rules: &FormatRules,
) -> Result<String, PlaceholderError> {
    let spans = scan(&desc.text)?;
    let missing: BTreeSet<String> =
        spans.iter().filter(|(_, _, n)| !values.contains_key(*n)).map(|(_, _, n)| n.to_string()).collect();
    if !missing.is_empty() {
        return Err(PlaceholderError::Missing(missing));
    }
    let mut out = String::with_capacity(desc.text.len());
    let mut last = 0;
    for (start, end, name) in spans {
        out.push_str(&desc.text[last..start]);
        out.push_str(&rules.format(name, values[name]));
        last = end;
    }
    out.push_str(&desc.text[last..]);
    Ok(out)
}

/// Instantiated text followed by every table, each after a blank line.
pub fn render_description(
    desc: &SymbolicDescription,
    values: &BTreeMap<String, f64>,
    rules: &FormatRules,
    table_seed: Option<u64>,
) -> Result<String, PlaceholderError> {
    let mut out = instantiate(desc, values, rules)?;
    for (k, t) in desc.tables.iter().enumerate() {
        out.push_str("\n\n");
        out.push_str(&render_table(t, values, rules, table_seed.map(|s| crate::sampler::child_seed(s, k as u64)))?);
    }
    Ok(out)
}

/// Parameters of `sym` referenced neither in the text nor in a table.
pub fn coverage_check(desc: &SymbolicDescription, sym: &SymbolicProblem) -> BTreeSet<String> {
    missing_parameters(desc, sym.parameters.iter().map(|p| p.name.as_str()))
}

pub fn missing_parameters<'a>(desc: &SymbolicDescription, names: impl IntoIterator<Item = &'a str>) -> BTreeSet<String> {
    let covered = desc.covered();
    names.into_iter().filter(|n| !covered.contains(*n)).map(str::to_string).collect()
}

/// Pipe-delimited aligned table. With a seed, rows and columns are
/// independently shuffled; `None` keeps the declared order.
pub fn render_table(
    spec: &TableSpec,
    values: &BTreeMap<String, f64>,
    rules: &FormatRules,
    seed: Option<u64>,
) -> Result<String, PlaceholderError> {
    let missing: BTreeSet<String> = spec.names().into_iter().filter(|n| !values.contains_key(n)).collect();
    if !missing.is_empty() {
        return Err(PlaceholderError::Missing(missing));
    }
    let mut row_order: Vec<usize> = (0..spec.rows.len()).collect();
    let mut col_order: Vec<usize> = (0..spec.columns.len()).collect();
    if let Some(s) = seed {
        let mut rng = rng_for(s);
        row_order.shuffle(&mut rng);
        col_order.shuffle(&mut rng);
    }
    let mut grid: Vec<Vec<String>> = Vec::with_capacity(spec.rows.len() + 1);
    let mut header = vec![spec.corner.clone()];
    header.extend(col_order.iter().map(|&j| spec.columns[j].clone()));
    grid.push(header);
    for &i in &row_order {
        let mut line = vec![spec.rows[i].clone()];
        for &j in &col_order {
            line.push(match spec.cells.get(i).and_then(|r| r.get(j)).cloned().flatten() {
                Some(name) => rules.format(&name, values[&name]),
                None => "-".into(),
            });
        }
        grid.push(line);
    }
    let widths: Vec<usize> =
        (0..grid[0].len()).map(|j| grid.iter().map(|r| r[j].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    if !spec.caption.is_empty() {
        out.push_str(&spec.caption);
        out.push('\n');
    }
    for (k, line) in grid.iter().enumerate() {
        let cells: Vec<String> = line.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(&format!("| {} |", cells.join(" | ")));
        if k + 1 < grid.len() {
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vals(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn placeholders() {
        let s = extract_placeholders("with a minimum of \\parameter{l_1} microscopes").unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec!["l_1"]);
        assert!(extract_placeholders("no parameters here").unwrap().is_empty());
        assert_eq!(extract_placeholders("\\parameter{a} and \\parameter{a}").unwrap().len(), 1);
        assert_eq!(extract_placeholders("x \\parameter{b_1"), Err(PlaceholderError::Unterminated { offset: 2 }));
        assert!(matches!(extract_placeholders("\\parameter{1x}"), Err(PlaceholderError::BadName { .. })));
    }

    #[test]
    fn instantiation_and_formatting() {
        let d = SymbolicDescription::new("with a minimum of \\parameter{l_1} microscopes").unwrap();
        assert_eq!(instantiate(&d, &vals(&[("l_1", 5.0)]), &FormatRules::default()).unwrap(), "with a minimum of 5 microscopes");

        let d = SymbolicDescription::new("\\parameter{n} at \\parameter{p}").unwrap();
        let rules = FormatRules { integer: ["n".to_string()].into() };
        assert_eq!(instantiate(&d, &vals(&[("n", 5.0), ("p", 2.50)]), &rules).unwrap(), "5 at 2.5");

        let d = SymbolicDescription::new("\\parameter{c_1} \\parameter{c_2}").unwrap();
        let err = instantiate(&d, &vals(&[("c_1", 1.0)]), &FormatRules::default()).unwrap_err();
        assert_eq!(err, PlaceholderError::Missing(["c_2".to_string()].into()));
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(5.0), "5");
        assert_eq!(format_number(2.5), "2.5");
        assert_eq!(format_number(1234567.0), "1234567");
        assert_eq!(format_number(0.127), "0.13");
        assert_eq!(format_number(-0.001), "0");
    }

    #[test]
    fn instantiated_text_has_no_placeholders() {
        let d = SymbolicDescription::new("a \\parameter{x} b \\parameter{y_2} c").unwrap();
        let out = instantiate(&d, &vals(&[("x", 1.0), ("y_2", 3.25)]), &FormatRules::default()).unwrap();
        assert!(extract_placeholders(&out).unwrap().is_empty());
    }
}
