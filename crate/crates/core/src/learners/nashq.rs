//! Learner that models every player's payoffs and plays an equilibrium of the
//! estimated game.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::common::{mix_with_uniform, sample, JointSpace, QTable};
use super::{Learner, LearnerConfig, LearnerContext, Observation, ObservationLevel};
use crate::error::{Error, Result};
use crate::game::{expected_payoff, RepeatedGame, StrategyProfile};
use crate::solvers::{find_nash, profile_order, EquilibriumList};

/// Estimates closer than this to the cached ones reuse the cached equilibrium.
pub const RECOMPUTE_TOLERANCE: f64 = 1e-9;

const SELECTION_TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NashQState {
    pub action_counts: Vec<usize>,
    /// One table per player over joint actions.
    pub estimates: Vec<QTable>,
}

impl NashQState {
    pub fn zeros(action_counts: &[usize]) -> Self {
        let k = action_counts.iter().product();
        Self {
            action_counts: action_counts.to_vec(),
            estimates: vec![QTable::zeros(k); action_counts.len()],
        }
    }

    pub fn estimate_game(&self) -> Result<RepeatedGame> {
        RepeatedGame::new(
            self.action_counts.clone(),
            self.estimates.iter().map(|q| q.values().to_vec()).collect(),
        )
    }

    fn max_change(&self, other: &NashQState) -> f64 {
        self.estimates
            .iter()
            .zip(&other.estimates)
            .flat_map(|(a, b)| a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// Picks the equilibrium best for `player`; ties go to the first profile in
/// the solver's listing order.
pub fn select_equilibrium(
    game: &RepeatedGame,
    list: &EquilibriumList,
    player: usize,
) -> Result<StrategyProfile> {
    let mut best: Option<(&StrategyProfile, f64)> = None;
    for profile in list.profiles() {
        let v = expected_payoff(game, profile, player)?;
        best = match best {
            None => Some((profile, v)),
            Some((bp, bv)) => {
                let better = v > bv + SELECTION_TIE
                    || ((v - bv).abs() <= SELECTION_TIE && profile_order(profile, bp) == Ordering::Less);
                if better {
                    Some((profile, v))
                } else {
                    Some((bp, bv))
                }
            }
        };
    }
    best.map(|(p, _)| p.clone())
        .ok_or_else(|| Error::PlayFailed("equilibrium list is empty".into()))
}

/// The selected equilibrium of the estimated game. Fails when the solver finds
/// no verified equilibrium.
pub fn nashq_strategy(state: &NashQState, player: usize) -> Result<StrategyProfile> {
    let game = state.estimate_game()?;
    let list = find_nash(&game)?;
    if list.failed {
        return Err(Error::PlayFailed("no equilibrium of the estimated game verified".into()));
    }
    select_equilibrium(&game, &list, player)
}

#[derive(Debug, Clone)]
pub struct NashQ {
    player: usize,
    space: JointSpace,
    config: LearnerConfig,
    state: NashQState,
    cached_state: NashQState,
    selected: StrategyProfile,
    steps: u64,
    diagnostics: Vec<String>,
    rng: ChaCha8Rng,
}

impl NashQ {
    pub fn new(ctx: &LearnerContext) -> Result<Self> {
        ctx.config.validate()?;
        let state = NashQState::zeros(&ctx.action_counts);
        let mut learner = Self {
            player: ctx.player,
            space: ctx.joint_space(),
            config: ctx.config.clone(),
            cached_state: state.clone(),
            selected: StrategyProfile::uniform(&ctx.action_counts),
            state,
            steps: 0,
            diagnostics: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(ctx.seed),
        };
        learner.recompute()?;
        Ok(learner)
    }

    /// Equilibrium profile currently followed.
    pub fn selected_profile(&self) -> &StrategyProfile {
        &self.selected
    }

    pub fn state(&self) -> &NashQState {
        &self.state
    }

    fn recompute(&mut self) -> Result<()> {
        self.selected = match nashq_strategy(&self.state, self.player) {
            Ok(profile) => profile,
            Err(Error::PlayFailed(msg)) => {
                self.diagnostics.push(format!("step {}: {msg}; playing uniform", self.steps));
                StrategyProfile::uniform(&self.state.action_counts)
            }
            Err(e) => return Err(e),
        };
        self.cached_state = self.state.clone();
        Ok(())
    }
}

impl Learner for NashQ {
    fn name(&self) -> &str {
        "nashq"
    }

    fn observation_level(&self) -> ObservationLevel {
        ObservationLevel::Full
    }

    fn current_strategy(&self) -> Vec<f64> {
        self.selected.player(self.player).to_vec()
    }

    fn behaviour_strategy(&self) -> Vec<f64> {
        mix_with_uniform(self.selected.player(self.player), self.config.epsilon)
    }

    fn select_action(&mut self) -> usize {
        let dist = self.behaviour_strategy();
        sample(&dist, &mut self.rng)
    }

    fn observe(&mut self, observation: &Observation) -> Result<()> {
        let joint = observation.require_joint()?;
        let payoffs = observation.require_payoffs()?;
        let idx = self.space.index(joint);
        for (q, &r) in self.state.estimates.iter_mut().zip(payoffs) {
            q.update(idx, r, self.config.alpha);
        }
        self.steps += 1;
        if self.state.max_change(&self.cached_state) > RECOMPUTE_TOLERANCE {
            self.recompute()?;
        }
        Ok(())
    }

    fn diagnostics(&self) -> Vec<String> {
        self.diagnostics.clone()
    }
}
