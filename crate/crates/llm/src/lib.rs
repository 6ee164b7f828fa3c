//! Evaluating chat-completion models on the household benchmark: prompt
//! construction for four prompting rungs, action parsing, a record/replay
//! cache and a bounded-concurrency runner that scores plans exactly like
//! the local agents.

pub mod cache;
pub mod endpoint;
pub mod parse;
pub mod prompt;
pub mod run;

pub use cache::{cache_key, ChatExchange, ExchangeLog, ReplayCache};
pub use endpoint::{ChatEndpoint, ChatRequest, ChatResponse, EndpointError, FnEndpoint, HttpEndpoint, MockEndpoint};
pub use parse::{parse_actions, ParseError};
pub use prompt::{build_prompt, Message, PromptRung, Role};
pub use run::{call_with_retries, run_llm_eval, CacheMode, LlmError, LlmRunConfig};
