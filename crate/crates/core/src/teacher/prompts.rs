use std::collections::{BTreeMap, BTreeSet};

use super::TeacherError;

/// Version directory of the bundled prompt library.
pub const PROMPT_VERSION: &str = "v1";

macro_rules! prompts {
    ($($id:literal),* $(,)?) => {
        &[$(($id, include_str!(concat!("../../prompts/v1/", $id, ".txt")))),*]
    };
}

const SOURCES: &[(&str, &str)] = prompts![
    "decomposition",
    "decomposition_verifier",
    "formulation",
    "formulation_verifier",
    "programmer",
    "code_debugging",
    "infeasibility_debugging",
    "description_seed",
    "variable_definition",
    "variable_definition_debugging",
    "objective_definition",
    "objective_definition_debugging",
    "constraint_definition",
    "constraint_definition_debugging",
    "parameter_range_definition",
    "parameter_range_debugging",
    "description",
    "symbolic_debugging",
];

/// Templates whose published text is known to be abridged. They ship
/// verbatim.
pub const PARTIALLY_SPECIFIED: &[&str] = &["formulation_verifier"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub id: &'static str,
    pub body: &'static str,
    pub slots: BTreeSet<String>,
}

impl PromptTemplate {
    pub fn is_partially_specified(&self) -> bool {
        PARTIALLY_SPECIFIED.contains(&self.id)
    }
}

/// `{name}` slots with lowercase names. Other braces are literal text.
fn slot_spans(body: &str) -> Vec<(usize, usize)> {
    let bytes = body.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            let len = bytes[i + 1..].iter().take_while(|b| b.is_ascii_lowercase() || **b == b'_').count();
            if len > 0 && bytes.get(i + 1 + len) == Some(&b'}') {
                out.push((i, i + len + 2));
                i += len + 2;
                continue;
            }
        }
        i += 1;
    }
    out
}

fn template(id: &'static str, body: &'static str) -> PromptTemplate {
    let slots = slot_spans(body).into_iter().map(|(a, b)| body[a + 1..b - 1].to_string()).collect();
    PromptTemplate { id, body, slots }
}

pub fn prompt_ids() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(id, _)| *id)
}

pub fn prompt(id: &str) -> Result<PromptTemplate, TeacherError> {
    SOURCES
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(k, body)| template(k, body))
        .ok_or_else(|| TeacherError::UnknownTemplate(id.to_string()))
}

/// Substitutes every slot in one pass; bound values are never rescanned.
/// Bindings for names the template does not use are ignored.
pub fn render_prompt(id: &str, bindings: &BTreeMap<String, String>) -> Result<String, TeacherError> {
    let t = prompt(id)?;
    if let Some(slot) = t.slots.iter().find(|s| !bindings.contains_key(*s)) {
        return Err(TeacherError::MissingBinding { template: id.to_string(), slot: slot.clone() });
    }
    let mut out = String::with_capacity(t.body.len());
    let mut last = 0;
    for (a, b) in slot_spans(t.body) {
        out.push_str(&t.body[last..a]);
        out.push_str(&bindings[&t.body[a + 1..b - 1]]);
        last = b;
    }
    out.push_str(&t.body[last..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bind(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn eighteen_templates() {
        assert_eq!(prompt_ids().count(), 18);
        for id in prompt_ids() {
            let t = prompt(id).unwrap();
            assert!(!t.slots.is_empty(), "{id}");
            assert!(!t.body.ends_with('\n') || id == "formulation_verifier", "{id}");
        }
        assert!(prompt("formulation_verifier").unwrap().is_partially_specified());
    }

    #[test]
    fn decomposition_keeps_its_framing() {
        let out = render_prompt("decomposition", &bind(&[("description", "D")])).unwrap();
        assert!(out.contains("\nHere is a description of the problem we need you to find the components for:\n-----\nD\n-----\n"));
    }

    #[test]
    fn programmer_names_the_solver() {
        let b = bind(&[("solver", "X"), ("description", "d"), ("components", "c"), ("formulation", "f")]);
        let out = render_prompt("programmer", &b).unwrap();
        assert!(out.contains("create a Python script to solve an optimization problem using X"));
    }

    #[test]
    fn missing_binding() {
        let err = render_prompt("decomposition", &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, TeacherError::MissingBinding { slot, .. } if slot == "description"));
        assert!(matches!(render_prompt("nope", &BTreeMap::new()), Err(TeacherError::UnknownTemplate(_))));
    }

    #[test]
    fn values_are_not_rescanned() {
        let out = render_prompt("decomposition", &bind(&[("description", "{description}")])).unwrap();
        assert!(out.contains("-----\n{description}\n-----"));
    }
}
