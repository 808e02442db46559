//! Bundled description templates, one file per (class, variant).
//!
//! A template file starts with TOML front-matter between `+++` lines
//! (`class`, `variant`, `parameters`) followed by a minijinja body. The body
//! receives entity records whose numeric fields are already placeholders, so
//! rendering produces a symbolic description; values are substituted later
//! by [`super::instantiate`]. Front-matter parameter patterns use `{i}`-style
//! index wildcards.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use minijinja::{context, Environment, Value};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{ClassData, ClassId, ClassInstance, SemanticProxy};
use crate::model::{Relation, Sense};
use crate::sampler::{rng_for, ParamRole};

use super::{FormatRules, PlaceholderError, SymbolicDescription, TableSpec};

pub const TEMPLATES: &[(&str, &str)] = &[
    ("linear/narrative", include_str!("../../templates/linear/narrative.tmpl")),
    ("linear/tabular", include_str!("../../templates/linear/tabular.tmpl")),
    ("knapsack/narrative", include_str!("../../templates/knapsack/narrative.tmpl")),
    ("knapsack/expedition", include_str!("../../templates/knapsack/expedition.tmpl")),
    ("mdknapsack/narrative", include_str!("../../templates/mdknapsack/narrative.tmpl")),
    ("set_cover/narrative", include_str!("../../templates/set_cover/narrative.tmpl")),
    ("bin_packing/narrative", include_str!("../../templates/bin_packing/narrative.tmpl")),
    ("tsp/tabular", include_str!("../../templates/tsp/tabular.tmpl")),
    ("shift_scheduling/narrative", include_str!("../../templates/shift_scheduling/narrative.tmpl")),
    ("transportation/tabular", include_str!("../../templates/transportation/tabular.tmpl")),
    ("max_flow/narrative", include_str!("../../templates/max_flow/narrative.tmpl")),
    ("min_cost_flow/narrative", include_str!("../../templates/min_cost_flow/narrative.tmpl")),
];

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("no template {0:?}")]
    Unknown(String),
    #[error("template {id}: bad front-matter: {detail}")]
    FrontMatter { id: String, detail: String },
    #[error("template {id}: {source}")]
    Render { id: String, source: minijinja::Error },
    #[error(transparent)]
    Placeholder(#[from] PlaceholderError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateInfo {
    pub class: ClassId,
    pub variant: String,
    pub parameters: Vec<String>,
}

impl TemplateInfo {
    /// Whether `name` matches one of the declared patterns.
    pub fn declares(&self, name: &str) -> bool {
        self.parameters.iter().any(|p| pattern_matches(p, name))
    }
}

/// `w_{i}` matches `w_` followed by digits; `{...}` stands for one or more
/// ASCII digits.
fn pattern_matches(pattern: &str, name: &str) -> bool {
    match pattern.find('{') {
        None => pattern == name,
        Some(open) => {
            let Some(close) = pattern[open..].find('}') else { return false };
            let (head, tail) = (&pattern[..open], &pattern[open + close + 1..]);
            let Some(rest) = name.strip_prefix(head) else { return false };
            let digits = rest.bytes().take_while(u8::is_ascii_digit).count();
            (1..=digits).any(|k| pattern_matches(tail, &rest[k..]))
        }
    }
}

fn split(id: &str, source: &'static str) -> Result<(TemplateInfo, &'static str), TemplateError> {
    let fm = |detail: &str| TemplateError::FrontMatter { id: id.to_string(), detail: detail.to_string() };
    let rest = source.strip_prefix("+++\n").ok_or_else(|| fm("missing opening +++"))?;
    let end = rest.find("\n+++\n").ok_or_else(|| fm("missing closing +++"))?;
    let info: TemplateInfo = toml::from_str(&rest[..end]).map_err(|e| fm(&e.to_string()))?;
    if format!("{}/{}", info.class, info.variant) != id {
        return Err(fm("class/variant do not match the file name"));
    }
    Ok((info, &rest[end + 5..]))
}

/// Front-matter of every bundled template.
pub fn template_infos() -> Result<Vec<TemplateInfo>, TemplateError> {
    TEMPLATES.iter().map(|(id, src)| split(id, src).map(|(i, _)| i)).collect()
}

fn environment() -> &'static Environment<'static> {
    static ENV: OnceLock<Environment<'static>> = OnceLock::new();
    ENV.get_or_init(|| {
        let mut env = Environment::new();
        env.set_trim_blocks(true);
        for (id, src) in TEMPLATES {
            let (_, body) = split(id, src).expect("bundled template front-matter");
            env.add_template(id, body).expect("bundled template syntax");
        }
        env
    })
}

fn ph(name: impl AsRef<str>) -> String {
    format!("\\parameter{{{}}}", name.as_ref())
}

/// A rendered symbolic description with everything needed to instantiate it.
#[derive(Debug, Clone)]
pub struct Described {
    pub template: String,
    pub desc: SymbolicDescription,
    pub values: BTreeMap<String, f64>,
    pub rules: FormatRules,
}

impl Described {
    pub fn render(&self, table_seed: Option<u64>) -> Result<String, PlaceholderError> {
        super::render_description(&self.desc, &self.values, &self.rules, table_seed)
    }
}

pub fn describe_class(inst: &ClassInstance, variant: Option<&str>, seed: u64) -> Result<Described, TemplateError> {
    describe(&inst.data, &inst.proxy, variant, seed)
}

/// Renders the symbolic description of `data`. Without a variant one is
/// drawn from the class's templates using `seed`.
pub fn describe(
    data: &ClassData,
    proxy: &SemanticProxy,
    variant: Option<&str>,
    seed: u64,
) -> Result<Described, TemplateError> {
    let class = data.class();
    let prefix = format!("{class}/");
    let ids: Vec<&str> = TEMPLATES.iter().map(|(id, _)| *id).filter(|id| id.starts_with(&prefix)).collect();
    let id = match variant {
        Some(v) => {
            let want = format!("{class}/{v}");
            *ids.iter().find(|id| **id == want).ok_or(TemplateError::Unknown(want))?
        }
        None => ids[rng_for(seed).gen_range(0..ids.len())],
    };
    let (ctx, values, tables) = build_context(data, proxy);
    let tmpl = environment().get_template(id).map_err(|source| TemplateError::Render { id: id.into(), source })?;
    let text = tmpl.render(ctx).map_err(|source| TemplateError::Render { id: id.into(), source })?;
    let tables = if id.ends_with("/tabular") { tables } else { Vec::new() };
    let desc = SymbolicDescription::with_tables(text.trim_end().to_string(), tables)?;
    Ok(Described { template: id.to_string(), desc, values, rules: FormatRules::default() })
}

type Context = (Value, BTreeMap<String, f64>, Vec<TableSpec>);

fn build_context(data: &ClassData, proxy: &SemanticProxy) -> Context {
    let labels = &proxy.labels;
    let mut values = BTreeMap::new();
    let mut put = |name: String, v: f64| -> String {
        values.insert(name.clone(), v);
        ph(name)
    };
    match data {
        ClassData::Linear { symbolic, values: sampled } => {
            let s = &symbolic.spec;
            let vars: Vec<Value> = (0..s.n)
                .map(|j| {
                    let role = |r: ParamRole| sampled.contains_key(&r.name()).then(|| ph(r.name()));
                    context! {
                        label => labels[j],
                        obj => if s.objective_mask[j] { role(ParamRole::Objective { var: j }) } else { None },
                        lower => if s.has_lower[j] { role(ParamRole::Lower { var: j }) } else { None },
                        upper => if s.has_upper[j] { role(ParamRole::Upper { var: j }) } else { None },
                        integral => s.integral[j],
                    }
                })
                .collect();
            let rows: Vec<Value> = s
                .constraint_masks
                .iter()
                .enumerate()
                .map(|(i, mask)| {
                    let terms: Vec<Value> = (0..s.n)
                        .filter(|&j| mask[j])
                        .map(|j| context! { label => labels[j], coef => ph(ParamRole::Coefficient { row: i, var: j }.name()) })
                        .collect();
                    context! {
                        index => i + 1,
                        terms => terms,
                        relation => relation_words(s.relations[i]),
                        rhs => ph(ParamRole::Rhs { row: i }.name()),
                    }
                })
                .collect();
            let table = TableSpec {
                caption: "Usage per unit:".into(),
                corner: "".into(),
                rows: (1..=s.m).map(|i| format!("Limit {i}")).collect(),
                columns: labels.clone(),
                cells: s
                    .constraint_masks
                    .iter()
                    .enumerate()
                    .map(|(i, mask)| {
                        (0..s.n).map(|j| mask[j].then(|| ParamRole::Coefficient { row: i, var: j }.name())).collect()
                    })
                    .collect(),
            };
            let ctx = context! {
                domain => s.domain,
                maximize => s.sense == Sense::Maximize,
                labels => labels.join(", "),
                vars => vars,
                rows => rows,
                all_integral => s.integral.iter().all(|&b| b),
                any_integral => s.integral.iter().any(|&b| b),
            };
            (ctx, sampled.clone(), vec![table])
        }
        ClassData::Knapsack { capacity, weights, values: worth } => {
            let items: Vec<Value> = (0..worth.len())
                .map(|i| {
                    context! {
                        label => labels[i],
                        weight => put(format!("w_{}", i + 1), weights[i]),
                        value => put(format!("v_{}", i + 1), worth[i]),
                    }
                })
                .collect();
            let capacity = put("capacity".into(), *capacity);
            (context! { capacity, items }, values, vec![])
        }
        ClassData::Mdknapsack { capacities, weights, values: worth } => {
            let resources: Vec<Value> = capacities
                .iter()
                .enumerate()
                .map(|(d, c)| context! { index => d + 1, capacity => put(format!("cap_{}", d + 1), *c) })
                .collect();
            let items: Vec<Value> = (0..worth.len())
                .map(|i| {
                    let uses: Vec<String> =
                        (0..weights.len()).map(|d| put(format!("w_{}_{}", d + 1, i + 1), weights[d][i])).collect();
                    context! { label => labels[i], uses => uses, value => put(format!("v_{}", i + 1), worth[i]) }
                })
                .collect();
            (context! { resources, items }, values, vec![])
        }
        ClassData::SetCover { universe, sets, costs } => {
            let sites: Vec<Value> = sets
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    let zones: Vec<String> = s.iter().map(|e| (e + 1).to_string()).collect();
                    context! { label => labels[k], zones => zones.join(", "), cost => put(format!("cost_{}", k + 1), costs[k]) }
                })
                .collect();
            (context! { universe => *universe, sites }, values, vec![])
        }
        ClassData::BinPacking { capacity, sizes } => {
            let items: Vec<Value> = sizes
                .iter()
                .enumerate()
                .map(|(i, s)| context! { label => labels[i], size => put(format!("s_{}", i + 1), *s) })
                .collect();
            let capacity = put("capacity".into(), *capacity);
            (context! { capacity, items, count => sizes.len() }, values, vec![])
        }
        ClassData::Tsp { distances } => {
            let n = distances.len();
            let mut cells = vec![vec![None; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let name = format!("d_{}_{}", i + 1, j + 1);
                        values.insert(name.clone(), distances[i][j]);
                        cells[i][j] = Some(name);
                    }
                }
            }
            let table = TableSpec {
                caption: "Distances:".into(),
                corner: "from \\ to".into(),
                rows: labels.clone(),
                columns: labels.clone(),
                cells,
            };
            (context! { start => labels[0], cities => labels.join(", "), count => n }, values, vec![table])
        }
        ClassData::ShiftScheduling { demand, patterns, costs } => {
            let periods: Vec<Value> = demand
                .iter()
                .enumerate()
                .map(|(t, d)| context! { index => t + 1, demand => put(format!("demand_{}", t + 1), *d) })
                .collect();
            let shifts: Vec<Value> = patterns
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    let covers: Vec<String> = p.iter().map(|t| (t + 1).to_string()).collect();
                    context! { label => labels[k], covers => covers.join(", "), cost => put(format!("cost_{}", k + 1), costs[k]) }
                })
                .collect();
            (context! { horizon => demand.len(), periods, shifts }, values, vec![])
        }
        ClassData::Transportation { supply, demand, costs } => {
            let s = supply.len();
            let plants: Vec<Value> = supply
                .iter()
                .enumerate()
                .map(|(i, v)| context! { label => labels[i], supply => put(format!("supply_{}", i + 1), *v) })
                .collect();
            let customers: Vec<Value> = demand
                .iter()
                .enumerate()
                .map(|(j, v)| context! { label => labels[s + j], demand => put(format!("demand_{}", j + 1), *v) })
                .collect();
            let mut cells = Vec::new();
            for (i, row) in costs.iter().enumerate() {
                let mut line = Vec::new();
                for (j, c) in row.iter().enumerate() {
                    let name = format!("cost_{}_{}", i + 1, j + 1);
                    values.insert(name.clone(), *c);
                    line.push(Some(name));
                }
                cells.push(line);
            }
            let table = TableSpec {
                caption: "Shipping cost per unit:".into(),
                corner: "".into(),
                rows: labels[..s].to_vec(),
                columns: labels[s..].to_vec(),
                cells,
            };
            (context! { plants, customers }, values, vec![table])
        }
        ClassData::MaxFlow { source, sink, arcs, nodes } | ClassData::MinCostFlow { source, sink, arcs, nodes, .. } => {
            let links: Vec<Value> = arcs
                .iter()
                .map(|a| {
                    let key = format!("{}_{}", a.from + 1, a.to + 1);
                    context! {
                        from => labels[a.from],
                        to => labels[a.to],
                        capacity => put(format!("cap_{key}"), a.capacity),
                        cost => put(format!("cost_{key}"), a.cost),
                    }
                })
                .collect();
            let flow = match data {
                ClassData::MinCostFlow { flow, .. } => Some(put("flow".into(), *flow)),
                _ => None,
            };
            if flow.is_none() {
                values.retain(|k, _| k.starts_with("cap_"));
            }
            (context! { count => *nodes, source => labels[*source], sink => labels[*sink], links, flow }, values, vec![])
        }
    }
}

fn relation_words(r: Relation) -> &'static str {
    match r {
        Relation::Le => "at most",
        Relation::Ge => "at least",
        Relation::Eq => "exactly",
    }
}
