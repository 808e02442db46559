//! Prompt library and chat backends for the teacher model.

mod backend;
mod fenced;
mod prompts;
mod repair;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use backend::{
    open_backend, read_transcript, write_transcript, Backend, BackendSpec, ChatExchange, Completion, FnBackend, LiveBackend,
    Message, RecordingBackend, ReplayBackend, RequestKey, Role, TranscriptEntry, Transport, UreqTransport,
};
pub use fenced::{extract_fenced, Fenced, NoFencedBlock};
pub use prompts::{prompt, prompt_ids, render_prompt, PromptTemplate, PARTIALLY_SPECIFIED, PROMPT_VERSION};
pub use repair::{repair_loop, Repair, RepairKind};

pub type Bindings = BTreeMap<String, String>;

pub const DEFAULT_TEMPERATURE: f64 = 0.7;
pub const DEFAULT_SEED: u64 = 0;

/// Follow-up sent once when an answer has no fenced block.
pub const REASK_MESSAGE: &str =
    "Your answer did not contain a fenced code block. Repeat your final answer inside a block delimited by ``` lines.";

#[derive(Debug, thiserror::Error)]
pub enum TeacherError {
    #[error("unknown prompt template `{0}`")]
    UnknownTemplate(String),
    #[error("template `{template}` needs a binding for `{slot}`")]
    MissingBinding { template: String, slot: String },
    #[error("bad exchange: {0}")]
    BadExchange(String),
    #[error("transport failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("unexpected response body: {0}")]
    BadResponse(String),
    #[error("replay mismatch for `{template}`: expected request {expected}, got {actual}")]
    ReplayMismatch { template: String, expected: String, actual: String },
    #[error("replay transcript exhausted at `{template}` (request {actual})")]
    ReplayExhausted { template: String, actual: String },
    #[error("transcript: {0}")]
    Transcript(String),
    #[error("no fenced block in the answer to `{template}`, even after asking again")]
    NoFencedBlock { template: String },
    #[error("repair budget must be positive when parameters are missing")]
    BadBudget,
    #[error("repair budget of {calls} calls exhausted, still missing {}", missing.join(", "))]
    BudgetExhausted { last_text: String, missing: Vec<String>, calls: usize },
}

/// One answered prompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub raw: String,
    pub reasoning: String,
    pub content: String,
    /// Backend calls spent, 2 when the answer had to be re-asked.
    pub requests: usize,
    pub reasked: bool,
}

#[derive(Clone)]
pub struct Teacher {
    backend: Arc<dyn Backend>,
    pub model: String,
    pub temperature: f64,
    pub seed: Option<u64>,
}

impl std::fmt::Debug for Teacher {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Teacher").field("model", &self.model).field("temperature", &self.temperature).finish()
    }
}

impl Teacher {
    pub fn new(backend: Arc<dyn Backend>) -> Self {
        Teacher { backend, model: String::new(), temperature: DEFAULT_TEMPERATURE, seed: Some(DEFAULT_SEED) }
    }

    pub fn backend(&self) -> &Arc<dyn Backend> {
        &self.backend
    }

    /// The replay key: the template's own slots plus `__` control keys.
    pub fn request_key(template: &PromptTemplate, bindings: &Bindings) -> RequestKey {
        let bindings = bindings
            .iter()
            .filter(|(k, _)| template.slots.contains(*k) || k.starts_with("__"))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        RequestKey { template: template.id.to_string(), bindings }
    }

    fn exchange(&self, key: RequestKey, messages: Vec<Message>) -> ChatExchange {
        ChatExchange { messages, model: self.model.clone(), temperature: self.temperature, seed: self.seed, key }
    }

    /// Renders `template`, sends it and extracts the fenced answer. A reply
    /// without a fenced block is re-asked once.
    pub fn ask(&self, template: &str, bindings: &Bindings) -> Result<Answer, TeacherError> {
        let t = prompt(template)?;
        let text = render_prompt(template, bindings)?;
        let key = Self::request_key(&t, bindings);
        let mut messages = vec![Message::user(text)];
        let first = self.backend.complete(&self.exchange(key.clone(), messages.clone()))?;
        if let Ok(f) = extract_fenced(&first.text) {
            return Ok(Answer { raw: first.text, reasoning: f.reasoning, content: f.content, requests: 1, reasked: false });
        }
        log::debug!("no fenced block from `{template}`, asking again");
        messages.push(Message { role: Role::Assistant, content: first.text });
        messages.push(Message::user(REASK_MESSAGE));
        let mut key = key;
        key.bindings.insert("__reask".into(), "1".into());
        let second = self.backend.complete(&self.exchange(key, messages))?;
        let f = extract_fenced(&second.text).map_err(|_| TeacherError::NoFencedBlock { template: template.into() })?;
        Ok(Answer { raw: second.text, reasoning: f.reasoning, content: f.content, requests: 2, reasked: true })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bindings(d: &str) -> Bindings {
        [("description".to_string(), d.to_string()), ("unused".to_string(), "x".to_string())].into()
    }

    fn entry(key: RequestKey, response: &str) -> TranscriptEntry {
        TranscriptEntry { request_hash: key.hash(), template: Some(key.template.clone()), response: response.into() }
    }

    #[test]
    fn unused_bindings_do_not_change_the_key() {
        let t = prompt("decomposition").unwrap();
        let mut b = bindings("D");
        let k1 = Teacher::request_key(&t, &b);
        b.insert("other".into(), "y".into());
        assert_eq!(Teacher::request_key(&t, &b), k1);
        assert_eq!(k1.bindings.len(), 1);
    }

    #[test]
    fn ask_extracts_fenced_content() {
        let t = prompt("decomposition").unwrap();
        let key = Teacher::request_key(&t, &bindings("D"));
        let replay = Arc::new(ReplayBackend::new(vec![entry(key, "thinking\n```\nparts\n```")]));
        let teacher = Teacher::new(replay.clone());
        let a = teacher.ask("decomposition", &bindings("D")).unwrap();
        assert_eq!((a.reasoning.as_str(), a.content.as_str(), a.requests), ("thinking", "parts", 1));
        assert_eq!(replay.remaining(), 0);
    }

    #[test]
    fn reasks_once() {
        let t = prompt("decomposition").unwrap();
        let key = Teacher::request_key(&t, &bindings("D"));
        let mut again = key.clone();
        again.bindings.insert("__reask".into(), "1".into());
        let replay = Arc::new(ReplayBackend::new(vec![entry(key.clone(), "no block"), entry(again.clone(), "```\nok\n```")]));
        let a = Teacher::new(replay).ask("decomposition", &bindings("D")).unwrap();
        assert!(a.reasked);
        assert_eq!((a.content.as_str(), a.requests), ("ok", 2));

        let replay = Arc::new(ReplayBackend::new(vec![entry(key, "no block"), entry(again, "still none")]));
        let err = Teacher::new(replay).ask("decomposition", &bindings("D")).unwrap_err();
        assert!(matches!(err, TeacherError::NoFencedBlock { .. }));
    }
}
