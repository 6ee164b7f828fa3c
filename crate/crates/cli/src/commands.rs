use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, ValueEnum};
use hmt_bench::agents::{AgentId, Decision};
use hmt_bench::config::{BenchmarkConfig, ConfigError};
use hmt_bench::dataset::{generate_dataset, read_dataset, write_dataset, Dataset, DatasetError};
use hmt_bench::evaluate::{evaluate, score};
use hmt_bench::{render_failures, render_table, Report};
use hmt_core::baselines::oracle_act;
use hmt_core::episode::{Episode, GenerationError};
use hmt_core::goal::templates;
use hmt_core::human::Level;
use hmt_core::render::{action_text, render_state};
use hmt_core::{apply_action, candidate_referents, Agent};
use hmt_llm::prompt::data_block;
use hmt_llm::{
    build_prompt, parse_actions, run_llm_eval, CacheMode, ChatEndpoint, ExchangeLog, HttpEndpoint, LlmRunConfig,
    MockEndpoint, PromptRung, ReplayCache,
};

use crate::ConfigArgs;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn other(e: impl std::fmt::Display) -> Failure {
    Failure { code: 1, message: e.to_string() }
}

fn schema(e: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: e.to_string() }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Failure {
        match e {
            ConfigError::Io { .. } => other(e),
            _ => schema(e),
        }
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Failure {
        match e {
            DatasetError::Io(_) => other(e),
            _ => schema(e),
        }
    }
}

impl From<GenerationError> for Failure {
    fn from(e: GenerationError) -> Failure {
        Failure { code: 3, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn build_config(a: &ConfigArgs) -> Result<BenchmarkConfig, Failure> {
    let mut cfg = match &a.config {
        Some(p) => BenchmarkConfig::load(p)?,
        None => BenchmarkConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.episodes {
        cfg.episodes_per_level = n;
    }
    if let Some(ls) = &a.levels {
        cfg.levels = ls.iter().map(|&n| Level::try_from(n)).collect::<Result<_, _>>().map_err(schema)?;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(b) = a.budget {
        cfg.generation.budget = b;
    }
    if let Some(f) = a.filter {
        cfg.filter_fraction = f;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load(path: &Path) -> Result<Dataset, Failure> {
    let file = File::open(path).map_err(|e| other(format!("{}: {e}", path.display())))?;
    Ok(read_dataset(BufReader::new(file))?)
}

fn episode(ds: &Dataset, id: u64) -> Result<&Episode, Failure> {
    ds.episodes.iter().find(|e| e.id == id).ok_or_else(|| other(format!("no episode with id {id}")))
}

fn write_json(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, format!("{text}\n")).map_err(|e| other(format!("{}: {e}", path.display())))
}

pub fn gen(a: &ConfigArgs, out: &Path) -> Outcome {
    let cfg = build_config(a)?;
    eprintln!("master seed: {}", cfg.seed);
    let start = Instant::now();
    let ds = generate_dataset(&cfg)?;
    let file = File::create(out).map_err(|e| other(format!("{}: {e}", out.display())))?;
    write_dataset(&ds, BufWriter::new(file)).map_err(other)?;
    eprintln!("wrote {} episodes to {} in {:.1?}", ds.episodes.len(), out.display(), start.elapsed());
    Ok(())
}

pub fn eval(a: &ConfigArgs, dataset: &Path, agents: &[String], out: Option<&Path>) -> Outcome {
    let mut cfg = build_config(a)?;
    let ds = load(dataset)?;
    cfg.seed = ds.header.master_seed;
    cfg.generation = ds.header.generation.clone();
    if let Some(b) = a.budget {
        cfg.generation.budget = b;
    }
    eprintln!("master seed: {}", cfg.seed);
    let ids: Vec<AgentId> = if agents.iter().any(|s| s == "all") {
        AgentId::ALL.to_vec()
    } else {
        agents.iter().map(|s| s.parse()).collect::<Result<_, _>>().map_err(other)?
    };
    let mut reports = Vec::new();
    for id in ids {
        let start = Instant::now();
        let r = evaluate(id, &ds, &cfg);
        eprintln!("{}: {:.1?}", id.name(), start.elapsed());
        reports.push(r);
    }
    println!("{}", render_table(&reports));
    for r in &reports {
        println!("{}", render_failures(r));
    }
    if let Some(p) = out {
        let text = match reports.as_slice() {
            [one] => one.to_json(),
            many => serde_json::to_string_pretty(many).map_err(other)?,
        };
        write_json(p, &text)?;
    }
    Ok(())
}

pub fn inspect(dataset: &Path, id: u64) -> Outcome {
    let ds = load(dataset)?;
    let ep = episode(&ds, id)?;
    let now = ep.current();
    let t = &templates()[ep.goal.template];
    println!("episode {} | level {} | seed {}", ep.id, ep.level.number(), ep.seed);
    println!("goal: {} ({}): {}", t.id, t.name, t.description);
    for p in &ep.goal.predicates {
        println!("  {p}");
    }
    println!("subgoal: {}", ep.subgoal);
    println!("robot task: {}", ep.task.describe(&now));
    if let Some(c) = ep.preference {
        println!("preference: {c:?}");
    }
    println!("utterance: {:?}  [{}]", ep.utterance.surface, ep.utterance.formula);
    let cands: Vec<String> =
        candidate_referents(&ep.utterance.formula, &now).iter().map(|&o| now.object(o).map_or(o.to_string(), |e| e.name())).collect();
    println!("literal candidates: {}", cands.join(", "));
    if let Ok(v) = oracle_act(ep, ds.header.generation.budget) {
        let plan: Vec<String> = plan_text(&now, &v.plan);
        println!("oracle plan: {}", plan.join("; "));
    }
    println!("\n{}", data_block(&ep.initial, &ep.trajectory, &ep.utterance.surface));
    Ok(())
}

fn plan_text(s: &hmt_core::WorldState, plan: &[hmt_core::Action]) -> Vec<String> {
    let mut state = s.clone();
    plan.iter()
        .map(|a| {
            let t = action_text(&state, a);
            state = apply_action(&state, Agent::Robot, a).unwrap_or(state.clone());
            t
        })
        .collect()
}

pub fn play(dataset: &Path, id: u64, budget: usize) -> Outcome {
    let ds = load(dataset)?;
    let ep = episode(&ds, id)?;
    println!("{}", data_block(&ep.initial, &ep.trajectory, &ep.utterance.surface));
    println!("\nType one action per line (`look` re-renders, `done` scores, `quit` leaves). Budget: {budget}.");
    let mut state = ep.current();
    let mut plan = Vec::new();
    let stdin = std::io::stdin();
    for line in stdin.lock().lines() {
        let line = line.map_err(other)?;
        match line.trim() {
            "" => continue,
            "quit" => return Ok(()),
            "look" => println!("{}", render_state(&state)),
            "done" => break,
            text => match parse_actions(&format!("Actions:\n{text}"), &state) {
                Ok(actions) => {
                    for a in actions {
                        match apply_action(&state, Agent::Robot, &a) {
                            Ok(next) => {
                                println!("ok: {}", action_text(&state, &a));
                                state = next;
                            }
                            Err(e) => println!("cannot: {e}"),
                        }
                        plan.push(a);
                    }
                    if ep.task.satisfied(&state) {
                        println!("the human has what they wanted");
                        break;
                    }
                    if plan.len() >= budget {
                        println!("budget used up");
                        break;
                    }
                }
                Err(e) => println!("{e}"),
            },
        }
    }
    let r = score(ep, &Decision { chosen: None, plan: Ok(plan) }, budget);
    println!("result: {:?} in {} steps", r.failure, r.steps_used);
    Ok(())
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Mock {
    /// Answers with the oracle plan.
    Oracle,
    /// Answers with prose and no action block.
    Prose,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CacheArg {
    Live,
    Replay,
    ReadThrough,
}

#[derive(Args)]
pub struct LlmArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long, short)]
    dataset: PathBuf,
    /// Base URL of a chat-completions endpoint, e.g. https://host/v1.
    #[arg(long, default_value = "https://api.openai.com/v1")]
    endpoint: String,
    #[arg(long, default_value = "gpt-4-turbo")]
    model: String,
    #[arg(long, default_value = "fiser-pr")]
    rung: String,
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    #[arg(long, default_value_t = 1024)]
    max_tokens: u32,
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    /// Environment variable holding the API key.
    #[arg(long, default_value = "HMT_LLM_API_KEY")]
    api_key_env: String,
    #[arg(long, value_enum, default_value = "read-through")]
    cache_mode: CacheArg,
    /// Exchange log: read as the replay cache, appended to with new exchanges.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Use an offline mock instead of the endpoint.
    #[arg(long, value_enum)]
    mock: Option<Mock>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

pub fn llm_eval(a: &LlmArgs) -> Outcome {
    let mut cfg = build_config(&a.cfg)?;
    let ds = load(&a.dataset)?;
    cfg.seed = ds.header.master_seed;
    cfg.generation = ds.header.generation.clone();
    if let Some(b) = a.cfg.budget {
        cfg.generation.budget = b;
    }
    eprintln!("master seed: {}", cfg.seed);
    let rung: PromptRung = a.rung.parse().map_err(other)?;
    let run = LlmRunConfig {
        model: a.model.clone(),
        temperature: a.temperature,
        max_tokens: Some(a.max_tokens),
        rung,
        concurrency: a.concurrency,
        cache_mode: match a.cache_mode {
            CacheArg::Live => CacheMode::Live,
            CacheArg::Replay => CacheMode::Replay,
            CacheArg::ReadThrough => CacheMode::ReadThrough,
        },
        ..LlmRunConfig::default()
    };
    let cache = match &a.log {
        Some(p) if p.exists() => Some(ReplayCache::load(BufReader::new(File::open(p).map_err(other)?)).map_err(schema)?),
        _ => None,
    };
    let log = match &a.log {
        Some(p) => Some(ExchangeLog::new(OpenOptions::new().create(true).append(true).open(p).map_err(other)?)),
        None => None,
    };
    let endpoint: Box<dyn ChatEndpoint> = match a.mock {
        Some(Mock::Prose) => Box::new(MockEndpoint::constant("I would find the object and hand it over.")),
        Some(Mock::Oracle) => {
            let mut mock = MockEndpoint::default();
            for ep in &ds.episodes {
                let ep = hmt_bench::filter::filter_episode(ep, cfg.filter_fraction);
                if let Ok(v) = oracle_act(&ep, cfg.budget()) {
                    let answer = format!("Actions:\n{}", plan_text(&ep.current(), &v.plan).join("\n"));
                    mock.answers.insert(build_prompt(&ep, rung).pop().expect("user message").content, answer);
                }
            }
            Box::new(mock)
        }
        None => Box::new(HttpEndpoint::new(&a.endpoint, &a.api_key_env, Duration::from_secs(120))),
    };
    let report = run_llm_eval(&ds, endpoint.as_ref(), cache.as_ref(), log.as_ref(), &run, &cfg).map_err(other)?;
    println!("{}", render_table(std::slice::from_ref(&report)));
    println!("{}", render_failures(&report));
    if let Some(p) = &a.out {
        write_json(p, &report.to_json())?;
    }
    Ok(())
}

pub fn report(paths: &[PathBuf]) -> Outcome {
    let mut reports: Vec<Report> = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(p).map_err(|e| other(format!("{}: {e}", p.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(schema)?;
        if value.is_array() {
            reports.extend(serde_json::from_value::<Vec<Report>>(value).map_err(schema)?);
        } else {
            reports.push(serde_json::from_value(value).map_err(schema)?);
        }
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", render_table(&reports)).map_err(other)?;
    for r in &reports {
        writeln!(out, "{}", render_failures(r)).map_err(other)?;
    }
    Ok(())
}
