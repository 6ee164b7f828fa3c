//! Running a chat model over a dataset and scoring it like a local agent.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use hmt_bench::agents::{Decision, Refusal};
use hmt_bench::config::BenchmarkConfig;
use hmt_bench::dataset::Dataset;
use hmt_bench::evaluate::{score, EpisodeResult};
use hmt_bench::filter::filter_episode;
use hmt_bench::Report;
use hmt_core::episode::Episode;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cache::{cache_key, ChatExchange, ExchangeLog, ReplayCache};
use crate::endpoint::{ChatEndpoint, ChatRequest, ChatResponse, EndpointError};
use crate::parse::{parse_actions, ParseError};
use crate::prompt::{build_prompt, PromptRung};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CacheMode {
    /// Always call the endpoint.
    Live,
    /// Answer only from the cache; a miss fails the episode.
    Replay,
    /// Use the cache when it has the answer, else call the endpoint.
    ReadThrough,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmRunConfig {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: Option<u32>,
    pub rung: PromptRung,
    /// Maximum requests in flight.
    pub concurrency: usize,
    pub max_retries: u32,
    /// Delay before the first retry; doubled on each further one.
    pub backoff: Duration,
    pub cache_mode: CacheMode,
}

impl Default for LlmRunConfig {
    fn default() -> Self {
        LlmRunConfig {
            model: "gpt-4-turbo".to_owned(),
            temperature: 0.0,
            max_tokens: Some(1024),
            rung: PromptRung::FiserPr,
            concurrency: 4,
            max_retries: 3,
            backoff: Duration::from_millis(500),
            cache_mode: CacheMode::ReadThrough,
        }
    }
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("endpoint unreachable: {0}")]
    EndpointUnreachable(String),
    #[error("writing the exchange log: {0}")]
    Log(#[from] std::io::Error),
}

/// Calls the endpoint with exponential backoff on retryable errors.
/// Returns the outcome and the number of retries used.
pub fn call_with_retries(
    endpoint: &dyn ChatEndpoint,
    req: &ChatRequest,
    max_retries: u32,
    backoff: Duration,
) -> (Result<ChatResponse, EndpointError>, u32) {
    let mut retries = 0;
    loop {
        match endpoint.complete(req) {
            Err(e) if e.retryable() && retries < max_retries => {
                std::thread::sleep(backoff * 2u32.pow(retries));
                retries += 1;
            }
            r => return (r, retries),
        }
    }
}

fn decision_from(text: &str, ep: &Episode) -> Decision {
    let plan = parse_actions(text, &ep.current()).map_err(|e| match e {
        ParseError::NoActionsBlock => Refusal::NoActionsBlock,
        ParseError::UnparsableLine { line, text } => Refusal::UnparsableLine { line, text },
    });
    Decision { chosen: None, plan }
}

/// Prompts, calls, parses and scores one episode.
fn run_episode(
    ep: &Episode,
    endpoint: &dyn ChatEndpoint,
    cache: Option<&ReplayCache>,
    cfg: &LlmRunConfig,
    budget: usize,
) -> (EpisodeResult, ChatExchange, bool) {
    let start = Instant::now();
    let req = ChatRequest {
        model: cfg.model.clone(),
        temperature: cfg.temperature,
        max_tokens: cfg.max_tokens,
        messages: build_prompt(ep, cfg.rung),
    };
    let key = cache_key(&req);
    let hit = match cfg.cache_mode {
        CacheMode::Live => None,
        CacheMode::Replay | CacheMode::ReadThrough => cache.and_then(|c| c.get(&key)).cloned(),
    };
    let cached = hit.is_some();
    let (outcome, retries) = match (hit, cfg.cache_mode) {
        (Some(r), _) => (Ok(r), 0),
        (None, CacheMode::Replay) => (Err(EndpointError::Malformed("not in replay cache".into())), 0),
        (None, _) => call_with_retries(endpoint, &req, cfg.max_retries, cfg.backoff),
    };
    let decision = match &outcome {
        Ok(r) => decision_from(&r.text, ep),
        Err(e) => Decision { chosen: None, plan: Err(Refusal::Other { message: e.to_string() }) },
    };
    let unreachable = matches!(outcome, Err(EndpointError::Unreachable(_)));
    let mut result = score(ep, &decision, budget);
    result.wall_time = start.elapsed();
    let exchange = ChatExchange {
        episode_id: ep.id,
        rung: cfg.rung,
        key,
        model: cfg.model.clone(),
        temperature: cfg.temperature,
        request: req.messages,
        response: outcome.as_ref().ok().cloned(),
        error: outcome.as_ref().err().map(|e| e.to_string()),
        latency_ms: start.elapsed().as_millis() as u64,
        retries,
        cached,
    };
    (result, exchange, unreachable)
}

/// Evaluates a chat model on every episode with at most
/// `cfg.concurrency` requests in flight. Per-episode failures are scored
/// as failures; an unreachable endpoint stops the run.
pub fn run_llm_eval(
    ds: &Dataset,
    endpoint: &dyn ChatEndpoint,
    cache: Option<&ReplayCache>,
    log: Option<&ExchangeLog>,
    cfg: &LlmRunConfig,
    bench: &BenchmarkConfig,
) -> Result<Report, LlmError> {
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let failure: Mutex<Option<LlmError>> = Mutex::new(None);
    let results: Mutex<Vec<EpisodeResult>> = Mutex::new(Vec::with_capacity(ds.episodes.len()));
    let budget = bench.budget();
    std::thread::scope(|scope| {
        for _ in 0..cfg.concurrency.max(1) {
            scope.spawn(|| loop {
                if abort.load(Ordering::SeqCst) {
                    return;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(ep) = ds.episodes.get(i) else { return };
                let ep = filter_episode(ep, bench.filter_fraction);
                let (result, exchange, unreachable) = run_episode(&ep, endpoint, cache, cfg, budget);
                let logged = log.map_or(Ok(()), |l| l.append(&exchange));
                let err = match logged {
                    Err(e) => Some(LlmError::Log(e)),
                    Ok(()) if unreachable => Some(LlmError::EndpointUnreachable(exchange.error.unwrap_or_default())),
                    Ok(()) => None,
                };
                if let Some(e) = err {
                    abort.store(true, Ordering::SeqCst);
                    failure.lock().expect("failure lock").get_or_insert(e);
                    return;
                }
                results.lock().expect("results lock").push(result);
            });
        }
    });
    if let Some(e) = failure.into_inner().expect("failure lock") {
        return Err(e);
    }
    let mut results = results.into_inner().expect("results lock");
    results.sort_by_key(|r| r.episode_id);
    Ok(Report::new(&format!("llm:{}:{}", cfg.model, cfg.rung), bench, results))
}
