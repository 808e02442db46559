use std::collections::BTreeSet;

use super::{Bindings, Teacher, TeacherError};

/// Which debugging prompt handles an incomplete teacher artefact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepairKind {
    Variables,
    Objective,
    Constraint,
    Ranges,
    Description,
}

impl RepairKind {
    pub fn template(self) -> &'static str {
        match self {
            RepairKind::Variables => "variable_definition_debugging",
            RepairKind::Objective => "objective_definition_debugging",
            RepairKind::Constraint => "constraint_definition_debugging",
            RepairKind::Ranges => "parameter_range_debugging",
            RepairKind::Description => "symbolic_debugging",
        }
    }

    fn missing_slot(self) -> &'static str {
        match self {
            RepairKind::Objective | RepairKind::Constraint => "missing_params",
            _ => "missing_components",
        }
    }

    /// Slot that carries the text being repaired. The variable prompt has no
    /// separate slot for it and takes it as `description`.
    fn previous_slot(self) -> &'static str {
        match self {
            RepairKind::Variables => "description",
            _ => "previous_description",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    pub text: String,
    /// Teacher requests spent, counting re-asks.
    pub calls: usize,
}

/// Asks the teacher to fix `text` until `check` reports nothing missing or
/// `budget` requests are spent. `context` supplies the template's other
/// slots.
pub fn repair_loop<F>(
    teacher: &Teacher,
    kind: RepairKind,
    context: &Bindings,
    text: &str,
    missing: BTreeSet<String>,
    budget: usize,
    mut check: F,
) -> Result<Repair, TeacherError>
where
    F: FnMut(&str) -> BTreeSet<String>,
{
    let (mut text, mut missing, mut calls) = (text.to_string(), missing, 0);
    if missing.is_empty() {
        return Ok(Repair { text, calls });
    }
    if budget == 0 {
        return Err(TeacherError::BadBudget);
    }
    while calls < budget {
        let mut b = context.clone();
        b.insert(kind.previous_slot().into(), text.clone());
        b.insert(kind.missing_slot().into(), missing.iter().cloned().collect::<Vec<_>>().join(", "));
        let answer = teacher.ask(kind.template(), &b)?;
        calls += answer.requests;
        text = answer.content;
        missing = check(&text);
        if missing.is_empty() {
            return Ok(Repair { text, calls });
        }
    }
    Err(TeacherError::BudgetExhausted { last_text: text, missing: missing.into_iter().collect(), calls })
}
