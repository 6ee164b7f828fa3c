//! `hmt`: generate, inspect, play and evaluate household benchmark episodes.
//!
//! Exit codes: 0 on success, 2 for schema or config errors, 3 when episode
//! generation runs out of attempts, 1 for anything else.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "hmt", version, about = "Household instruction-following benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every command that builds a benchmark config.
#[derive(Args, Clone)]
pub struct ConfigArgs {
    /// TOML config file; defaults apply to missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub episodes: Option<usize>,
    /// Comma-separated level numbers, e.g. 1,2.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<u8>>,
    /// Worker threads; 0 picks one per core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Step budget of the robot's single trial.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Share of irrelevant objects removed before the agent acts.
    #[arg(long)]
    pub filter: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset file.
    Gen {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Evaluate local agents on a dataset.
    Eval {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, short)]
        dataset: PathBuf,
        /// Agent names (oracle, heuristic, random, fiser, fiser-pr) or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        agent: Vec<String>,
        /// Write the JSON results here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print one episode with its renderings.
    Inspect {
        #[arg(long, short)]
        dataset: PathBuf,
        #[arg(long)]
        id: u64,
    },
    /// Step through an episode as the robot, typing actions.
    Play {
        #[arg(long, short)]
        dataset: PathBuf,
        #[arg(long)]
        id: u64,
        #[arg(long, default_value_t = 5)]
        budget: usize,
    },
    /// Evaluate a chat-completion model.
    LlmEval(commands::LlmArgs),
    /// Render saved results files as one table.
    Report {
        results: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen { cfg, out } => commands::gen(&cfg, &out),
        Command::Eval { cfg, dataset, agent, out } => commands::eval(&cfg, &dataset, &agent, out.as_deref()),
        Command::Inspect { dataset, id } => commands::inspect(&dataset, id),
        Command::Play { dataset, id, budget } => commands::play(&dataset, id, budget),
        Command::LlmEval(args) => commands::llm_eval(&args),
        Command::Report { results } => commands::report(&results),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
