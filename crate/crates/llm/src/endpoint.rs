//! Chat-completion endpoints: an HTTP client for chat-completions style
//! APIs and in-process mocks.

use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompt::Message;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    pub messages: Vec<Message>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_tokens: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion_tokens: Option<u64>,
}

impl ChatResponse {
    pub fn text(text: impl Into<String>) -> ChatResponse {
        ChatResponse { text: text.into(), prompt_tokens: None, completion_tokens: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndpointError {
    /// The server could not be reached at all.
    #[error("endpoint unreachable: {0}")]
    Unreachable(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("rate limited")]
    RateLimited,
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed response: {0}")]
    Malformed(String),
}

impl EndpointError {
    /// Whether a retry could help.
    pub fn retryable(&self) -> bool {
        match self {
            EndpointError::Transport(_) | EndpointError::RateLimited => true,
            EndpointError::Status { status, .. } => *status >= 500,
            EndpointError::Unreachable(_) | EndpointError::Malformed(_) => false,
        }
    }
}

pub trait ChatEndpoint: Send + Sync {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, EndpointError>;
}

/// A chat-completions style HTTP endpoint. The API key is read from the
/// named environment variable on every call and never stored.
#[derive(Debug, Clone)]
pub struct HttpEndpoint {
    pub base_url: String,
    pub api_key_env: String,
    agent: ureq::Agent,
}

impl HttpEndpoint {
    pub fn new(base_url: &str, api_key_env: &str, timeout: Duration) -> HttpEndpoint {
        HttpEndpoint {
            base_url: base_url.trim_end_matches('/').to_owned(),
            api_key_env: api_key_env.to_owned(),
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    #[serde(default)]
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize)]
struct WireUsage {
    prompt_tokens: Option<u64>,
    completion_tokens: Option<u64>,
}

impl ChatEndpoint for HttpEndpoint {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, EndpointError> {
        let mut call = self.agent.post(&format!("{}/chat/completions", self.base_url));
        if let Ok(key) = std::env::var(&self.api_key_env) {
            call = call.set("Authorization", &format!("Bearer {key}"));
        }
        let resp = match call.send_json(req) {
            Ok(r) => r,
            Err(ureq::Error::Status(429, _)) => return Err(EndpointError::RateLimited),
            Err(ureq::Error::Status(status, r)) => {
                let body = r.into_string().unwrap_or_default();
                return Err(EndpointError::Status { status, body: body.chars().take(500).collect() });
            }
            Err(ureq::Error::Transport(t)) => {
                return Err(match t.kind() {
                    ureq::ErrorKind::Dns | ureq::ErrorKind::ConnectionFailed | ureq::ErrorKind::InvalidUrl => {
                        EndpointError::Unreachable(t.to_string())
                    }
                    _ => EndpointError::Transport(t.to_string()),
                })
            }
        };
        let wire: WireResponse = resp.into_json().map_err(|e| EndpointError::Malformed(e.to_string()))?;
        let choice = wire.choices.into_iter().next().ok_or_else(|| EndpointError::Malformed("no choices".into()))?;
        Ok(ChatResponse {
            text: choice.message.content.unwrap_or_default(),
            prompt_tokens: wire.usage.as_ref().and_then(|u| u.prompt_tokens),
            completion_tokens: wire.usage.as_ref().and_then(|u| u.completion_tokens),
        })
    }
}

/// Answers from a table keyed by the last message's content, falling back
/// to a fixed reply.
#[derive(Debug, Clone, Default)]
pub struct MockEndpoint {
    pub answers: HashMap<String, String>,
    pub fallback: String,
}

impl MockEndpoint {
    pub fn constant(reply: &str) -> MockEndpoint {
        MockEndpoint { answers: HashMap::new(), fallback: reply.to_owned() }
    }
}

impl ChatEndpoint for MockEndpoint {
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, EndpointError> {
        let last = req.messages.last().map(|m| m.content.as_str()).unwrap_or("");
        Ok(ChatResponse::text(self.answers.get(last).unwrap_or(&self.fallback).clone()))
    }
}

/// Wraps any closure as an endpoint.
pub struct FnEndpoint<F>(pub F);

impl<F> ChatEndpoint for FnEndpoint<F>
where
    F: Fn(&ChatRequest) -> Result<ChatResponse, EndpointError> + Send + Sync,
{
    fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, EndpointError> {
        (self.0)(req)
    }
}
