//! Uniform dispatch over the local agents.

use hmt_core::baselines::{heuristic_act, oracle_act, random_act, BaselineError};
use hmt_core::episode::{Episode, GenerationConfig};
use hmt_core::fiser::{fiser_act, FiserError, Observation, Variant};
use hmt_core::human::HumanModel;
use hmt_core::{Action, ObjectId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentId {
    Oracle,
    Heuristic,
    Random,
    Fiser,
    FiserPr,
}

impl AgentId {
    pub const ALL: [AgentId; 5] = [AgentId::Random, AgentId::Heuristic, AgentId::Fiser, AgentId::FiserPr, AgentId::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            AgentId::Oracle => "oracle",
            AgentId::Heuristic => "heuristic",
            AgentId::Random => "random",
            AgentId::Fiser => "fiser",
            AgentId::FiserPr => "fiser-pr",
        }
    }
}

impl std::str::FromStr for AgentId {
    type Err = String;
    fn from_str(s: &str) -> Result<AgentId, String> {
        AgentId::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| format!("unknown agent {s:?}"))
    }
}

/// Why an agent produced no plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Refusal {
    NoCandidate,
    NoPlan,
    NoActionsBlock,
    UnparsableLine { line: usize, text: String },
    Other { message: String },
}

/// An agent's single trial: the object it meant to hand over, if known,
/// and its plan or the reason it has none.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub chosen: Option<ObjectId>,
    pub plan: Result<Vec<Action>, Refusal>,
}

fn from_baseline(r: Result<hmt_core::baselines::AgentVerdict, BaselineError>) -> Decision {
    match r {
        Ok(v) => Decision { chosen: v.task.map(|t| t.object()), plan: Ok(v.plan) },
        Err(BaselineError::NoCandidate) => Decision { chosen: None, plan: Err(Refusal::NoCandidate) },
        Err(BaselineError::Plan(_)) => Decision { chosen: None, plan: Err(Refusal::NoPlan) },
    }
}

/// Runs a local agent on the robot's view of an episode. The random agent
/// draws from a stream seeded by the episode seed.
pub fn act(agent: AgentId, ep: &Episode, cfg: &GenerationConfig, model: &mut HumanModel) -> Decision {
    let s = ep.current();
    let budget = cfg.budget;
    let formula = &ep.utterance.formula;
    match agent {
        AgentId::Oracle => from_baseline(oracle_act(ep, budget)),
        AgentId::Heuristic => from_baseline(heuristic_act(&s, &ep.trajectory, formula, budget)),
        AgentId::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(ep.seed ^ 0x5EED_0F_4A2D);
            from_baseline(random_act(&s, formula, budget, &mut rng))
        }
        AgentId::Fiser | AgentId::FiserPr => {
            let variant = if agent == AgentId::Fiser { Variant::Fiser } else { Variant::FiserPr };
            let obs = Observation { initial: &ep.initial, trajectory: &ep.trajectory, formula };
            match fiser_act(model, obs, variant, budget, &cfg.rationality, &cfg.preference_prior) {
                Ok(out) => Decision { chosen: Some(out.task.object()), plan: Ok(out.plan) },
                Err(FiserError::NoCandidate) => Decision { chosen: None, plan: Err(Refusal::NoCandidate) },
                Err(FiserError::Plan(_)) => Decision { chosen: None, plan: Err(Refusal::NoPlan) },
                Err(e @ FiserError::EmptyGoalSpace) => {
                    Decision { chosen: None, plan: Err(Refusal::Other { message: e.to_string() }) }
                }
            }
        }
    }
}
