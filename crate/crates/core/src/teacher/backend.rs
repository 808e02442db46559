use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::TeacherError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn user(content: impl Into<String>) -> Self {
        Message { role: Role::User, content: content.into() }
    }
}

/// What a request asks for, independent of prompt wording. Replay
/// transcripts are keyed by its hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestKey {
    pub template: String,
    pub bindings: BTreeMap<String, String>,
}

impl RequestKey {
    /// SHA-256 over the template id and the bindings sorted by name, with
    /// CRLF folded to LF and trailing whitespace trimmed from each value.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.template.as_bytes());
        for (k, v) in &self.bindings {
            let v = v.replace("\r\n", "\n");
            h.update([0u8]);
            h.update(k.as_bytes());
            h.update([0u8]);
            h.update(v.trim_end().as_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatExchange {
    pub messages: Vec<Message>,
    pub model: String,
    pub temperature: f64,
    pub seed: Option<u64>,
    pub key: RequestKey,
}

impl ChatExchange {
    pub fn validate(&self) -> Result<(), TeacherError> {
        if self.messages.is_empty() {
            return Err(TeacherError::BadExchange("no messages".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(TeacherError::BadExchange(format!("temperature {}", self.temperature)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    /// Transport attempts used, 1 when the first try succeeded.
    pub attempts: u32,
}

/// A chat model endpoint. Implementations are shared between threads.
pub trait Backend: Send + Sync {
    fn complete(&self, exchange: &ChatExchange) -> Result<Completion, TeacherError>;
}

/// Answers with a closure; handy for scripting by template id.
pub struct FnBackend<F>(pub F);

impl<F> Backend for FnBackend<F>
where
    F: Fn(&ChatExchange) -> String + Send + Sync,
{
    fn complete(&self, exchange: &ChatExchange) -> Result<Completion, TeacherError> {
        exchange.validate()?;
        Ok(Completion { text: (self.0)(exchange), attempts: 1 })
    }
}

/// Backend configuration as written in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BackendSpec {
    Live {
        endpoint: String,
        model: String,
        /// Environment variable holding the API key.
        credential_env: String,
    },
    Replay {
        transcript: PathBuf,
    },
}

/// One transcript line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub request_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
    pub response: String,
}

pub fn read_transcript(text: &str) -> Result<Vec<TranscriptEntry>, TeacherError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| TeacherError::Transcript(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn write_transcript(entries: &[TranscriptEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&serde_json::to_string(e).expect("transcript entry serializes"));
        out.push('\n');
    }
    out
}

/// Serves scripted responses. A request consumes the first unused entry
/// with the same request hash, so concurrent callers need not arrive in
/// transcript order.
#[derive(Debug)]
pub struct ReplayBackend {
    entries: Vec<TranscriptEntry>,
    used: Mutex<Vec<bool>>,
}

impl ReplayBackend {
    pub fn new(entries: Vec<TranscriptEntry>) -> Self {
        let used = Mutex::new(vec![false; entries.len()]);
        ReplayBackend { entries, used }
    }

    pub fn from_path(path: &Path) -> Result<Self, TeacherError> {
        let text = fs::read_to_string(path).map_err(|e| TeacherError::Transcript(format!("{}: {e}", path.display())))?;
        Ok(Self::new(read_transcript(&text)?))
    }

    /// Entries not yet served.
    pub fn remaining(&self) -> usize {
        self.used.lock().expect("replay cursor").iter().filter(|u| !**u).count()
    }

    pub fn assert_exhausted(&self) -> Result<(), TeacherError> {
        match self.remaining() {
            0 => Ok(()),
            n => Err(TeacherError::Transcript(format!("{n} scripted responses were never requested"))),
        }
    }
}

impl Backend for ReplayBackend {
    fn complete(&self, exchange: &ChatExchange) -> Result<Completion, TeacherError> {
        exchange.validate()?;
        let actual = exchange.key.hash();
        let mut used = self.used.lock().expect("replay cursor");
        if let Some(i) = (0..self.entries.len()).find(|&i| !used[i] && self.entries[i].request_hash == actual) {
            used[i] = true;
            return Ok(Completion { text: self.entries[i].response.clone(), attempts: 1 });
        }
        match (0..self.entries.len()).find(|&i| !used[i]) {
            Some(i) => Err(TeacherError::ReplayMismatch {
                template: exchange.key.template.clone(),
                expected: self.entries[i].request_hash.clone(),
                actual,
            }),
            None => Err(TeacherError::ReplayExhausted { template: exchange.key.template.clone(), actual }),
        }
    }
}

/// Wraps another backend and keeps every exchange for a transcript.
pub struct RecordingBackend<B> {
    inner: B,
    log: Mutex<Vec<TranscriptEntry>>,
}

impl<B: Backend> RecordingBackend<B> {
    pub fn new(inner: B) -> Self {
        RecordingBackend { inner, log: Mutex::new(Vec::new()) }
    }

    pub fn entries(&self) -> Vec<TranscriptEntry> {
        self.log.lock().expect("recording log").clone()
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(write_transcript(&self.entries()).as_bytes())
    }
}

impl<B: Backend> Backend for RecordingBackend<B> {
    fn complete(&self, exchange: &ChatExchange) -> Result<Completion, TeacherError> {
        let out = self.inner.complete(exchange)?;
        self.log.lock().expect("recording log").push(TranscriptEntry {
            request_hash: exchange.key.hash(),
            template: Some(exchange.key.template.clone()),
            response: out.text.clone(),
        });
        Ok(out)
    }
}

/// HTTP layer of the live backend, replaceable in tests.
pub trait Transport: Send + Sync {
    fn post_json(
        &self,
        url: &str,
        bearer: Option<&str>,
        body: &serde_json::Value,
    ) -> Result<serde_json::Value, String>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder().timeout_global(Some(timeout)).build();
        UreqTransport { agent: config.into() }
    }
}

impl Transport for UreqTransport {
    fn post_json(
        &self,
        url: &str,
        bearer: Option<&str>,
        body: &serde_json::Value,
    ) -> Result<serde_json::Value, String> {
        let mut req = self.agent.post(url);
        if let Some(key) = bearer {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(|e| e.to_string())?;
        resp.body_mut().read_json::<serde_json::Value>().map_err(|e| e.to_string())
    }
}

/// Chat-completions endpoint with retries on transport failure.
pub struct LiveBackend {
    pub endpoint: String,
    pub model: String,
    credential: Option<String>,
    transport: Box<dyn Transport>,
    pub max_attempts: u32,
    pub backoff: Duration,
}

impl LiveBackend {
    /// Reads the credential from `credential_env`; a missing variable
    /// means unauthenticated requests.
    pub fn new(endpoint: &str, model: &str, credential_env: &str, transport: Box<dyn Transport>) -> Self {
        LiveBackend {
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            credential: std::env::var(credential_env).ok(),
            transport,
            max_attempts: 3,
            backoff: Duration::from_millis(500),
        }
    }

    fn request_body(&self, ex: &ChatExchange) -> serde_json::Value {
        let mut body = serde_json::json!({
            "model": if ex.model.is_empty() { &self.model } else { &ex.model },
            "messages": ex.messages,
            "temperature": ex.temperature,
        });
        if let Some(seed) = ex.seed {
            body["seed"] = seed.into();
        }
        body
    }
}

impl Backend for LiveBackend {
    fn complete(&self, exchange: &ChatExchange) -> Result<Completion, TeacherError> {
        exchange.validate()?;
        let body = self.request_body(exchange);
        let mut last = String::new();
        for attempt in 1..=self.max_attempts {
            if attempt > 1 {
                std::thread::sleep(self.backoff * 2u32.pow(attempt - 2));
            }
            match self.transport.post_json(&self.endpoint, self.credential.as_deref(), &body) {
                Ok(v) => {
                    let text = v["choices"][0]["message"]["content"]
                        .as_str()
                        .ok_or_else(|| TeacherError::BadResponse(v.to_string()))?;
                    return Ok(Completion { text: text.to_string(), attempts: attempt });
                }
                Err(e) => {
                    log::warn!("attempt {attempt} to {} failed: {e}", self.endpoint);
                    last = e;
                }
            }
        }
        Err(TeacherError::Transport { attempts: self.max_attempts, message: last })
    }
}

/// Builds the backend described by `spec`.
pub fn open_backend(spec: &BackendSpec) -> Result<Box<dyn Backend>, TeacherError> {
    Ok(match spec {
        BackendSpec::Live { endpoint, model, credential_env } => Box::new(LiveBackend::new(
            endpoint,
            model,
            credential_env,
            Box::new(UreqTransport::new(Duration::from_secs(300))),
        )),
        BackendSpec::Replay { transcript } => Box::new(ReplayBackend::from_path(transcript)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};

    fn exchange(template: &str, description: &str) -> ChatExchange {
        ChatExchange {
            messages: vec![Message::user("hi")],
            model: String::new(),
            temperature: 0.7,
            seed: Some(0),
            key: RequestKey {
                template: template.into(),
                bindings: [("description".to_string(), description.to_string())].into(),
            },
        }
    }

    #[test]
    fn hash_normalises_line_endings() {
        assert_eq!(exchange("t", "a\r\nb  \n").key.hash(), exchange("t", "a\nb").key.hash());
        assert_ne!(exchange("t", "a").key.hash(), exchange("u", "a").key.hash());
    }

    #[test]
    fn replay_matching() {
        let ex = exchange("decomposition", "D");
        let backend = ReplayBackend::new(vec![TranscriptEntry {
            request_hash: ex.key.hash(),
            template: None,
            response: "scripted".into(),
        }]);
        let other = exchange("decomposition", "E");
        match backend.complete(&other) {
            Err(TeacherError::ReplayMismatch { expected, actual, .. }) => {
                assert_eq!(expected, ex.key.hash());
                assert_eq!(actual, other.key.hash());
            }
            r => panic!("{r:?}"),
        }
        assert_eq!(backend.complete(&ex).unwrap().text, "scripted");
        backend.assert_exhausted().unwrap();
        assert!(matches!(backend.complete(&ex), Err(TeacherError::ReplayExhausted { .. })));
    }

    #[test]
    fn transcript_round_trip() {
        let entries = vec![
            TranscriptEntry { request_hash: "ab".into(), template: Some("x".into()), response: "line\nline".into() },
            TranscriptEntry { request_hash: "cd".into(), template: None, response: String::new() },
        ];
        assert_eq!(read_transcript(&write_transcript(&entries)).unwrap(), entries);
        assert!(read_transcript("{not json").is_err());
    }

    struct Flaky {
        failures: u32,
        calls: AtomicU32,
    }

    impl Transport for Flaky {
        fn post_json(&self, _: &str, _: Option<&str>, body: &serde_json::Value) -> Result<serde_json::Value, String> {
            assert_eq!(body["temperature"], 0.7);
            assert_eq!(body["seed"], 0);
            let n = self.calls.fetch_add(1, Ordering::SeqCst) + 1;
            if n <= self.failures {
                Err(format!("connection reset {n}"))
            } else {
                Ok(serde_json::json!({"choices": [{"message": {"role": "assistant", "content": "done"}}]}))
            }
        }
    }

    fn live(failures: u32) -> LiveBackend {
        let mut b = LiveBackend::new("http://stub", "m", "MILPGEN_TEST_UNSET_KEY", Box::new(Flaky { failures, calls: 0.into() }));
        b.backoff = Duration::ZERO;
        b
    }

    #[test]
    fn live_retries_then_succeeds() {
        let out = live(2).complete(&exchange("t", "d")).unwrap();
        assert_eq!(out, Completion { text: "done".into(), attempts: 3 });
    }

    #[test]
    fn live_gives_up_after_three() {
        match live(3).complete(&exchange("t", "d")) {
            Err(TeacherError::Transport { attempts: 3, message }) => assert_eq!(message, "connection reset 3"),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn backend_spec_from_toml() {
        let spec: BackendSpec = toml::from_str("kind = \"replay\"\ntranscript = \"t.jsonl\"").unwrap();
        assert_eq!(spec, BackendSpec::Replay { transcript: "t.jsonl".into() });
        let spec: BackendSpec =
            toml::from_str("kind = \"live\"\nendpoint = \"https://x/v1/chat/completions\"\nmodel = \"m\"\ncredential_env = \"KEY\"")
                .unwrap();
        assert!(matches!(spec, BackendSpec::Live { .. }));
    }
}
