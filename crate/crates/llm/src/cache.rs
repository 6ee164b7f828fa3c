//! The exchange log and the record/replay cache built from it.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::endpoint::{ChatRequest, ChatResponse};
use crate::prompt::{Message, PromptRung};

/// One request/response pair as persisted for audit and replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatExchange {
    pub episode_id: u64,
    pub rung: PromptRung,
    pub key: String,
    pub model: String,
    pub temperature: f64,
    pub request: Vec<Message>,
    /// Verbatim completion, absent if every attempt failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<ChatResponse>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub latency_ms: u64,
    pub retries: u32,
    /// Whether the response came from the replay cache.
    #[serde(default)]
    pub cached: bool,
}

/// Hex SHA-256 over the model, temperature and messages.
pub fn cache_key(req: &ChatRequest) -> String {
    let mut h = Sha256::new();
    h.update(req.model.as_bytes());
    h.update([0]);
    h.update(req.temperature.to_bits().to_le_bytes());
    h.update(serde_json::to_vec(&req.messages).expect("messages serialise"));
    hex::encode(h.finalize())
}

/// Appends exchanges as JSON lines; safe to share between workers.
pub struct ExchangeLog {
    out: Mutex<Box<dyn Write + Send>>,
}

impl ExchangeLog {
    pub fn new(out: impl Write + Send + 'static) -> ExchangeLog {
        ExchangeLog { out: Mutex::new(Box::new(out)) }
    }

    pub fn append(&self, ex: &ChatExchange) -> std::io::Result<()> {
        let mut line = serde_json::to_vec(ex).map_err(std::io::Error::other)?;
        line.push(b'\n');
        let mut out = self.out.lock().expect("log lock");
        out.write_all(&line)?;
        out.flush()
    }
}

/// Responses indexed by cache key.
#[derive(Debug, Clone, Default)]
pub struct ReplayCache {
    entries: HashMap<String, ChatResponse>,
}

impl ReplayCache {
    /// Loads every successful exchange from a log; later lines win.
    pub fn load(input: impl BufRead) -> std::io::Result<ReplayCache> {
        let mut entries = HashMap::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let ex: ChatExchange = serde_json::from_str(&line)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1)))?;
            if let Some(r) = ex.response {
                entries.insert(ex.key, r);
            }
        }
        Ok(ReplayCache { entries })
    }

    pub fn get(&self, key: &str) -> Option<&ChatResponse> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
