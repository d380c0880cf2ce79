//! Policy hill climbing with the win-or-learn-fast step size.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::common::{argmax, mix_with_uniform, sample, QTable};
use super::{Learner, LearnerConfig, LearnerContext, Observation, ObservationLevel};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    pub policy: Vec<f64>,
    pub average: Vec<f64>,
    pub count: u64,
    /// Step size applied by the most recent update.
    pub last_delta: f64,
}

impl PolicyState {
    pub fn uniform(m: usize) -> Self {
        Self {
            policy: vec![1.0 / m as f64; m],
            average: vec![1.0 / m as f64; m],
            count: 0,
            last_delta: 0.0,
        }
    }
}

/// Moves `delta` of probability mass toward the greedy action of `q`.
pub fn hill_climb(policy: &[f64], q: &[f64], delta: f64) -> Vec<f64> {
    let m = policy.len();
    if m == 1 {
        return vec![1.0];
    }
    let greedy = argmax(q);
    let share = delta / (m - 1) as f64;
    let mut next: Vec<f64> = policy
        .iter()
        .enumerate()
        .map(|(a, &p)| if a == greedy { (p + delta).min(1.0) } else { (p - share).max(0.0) })
        .collect();
    let total: f64 = next.iter().sum();
    next.iter_mut().for_each(|p| *p /= total);
    next
}

fn value(policy: &[f64], q: &[f64]) -> f64 {
    policy.iter().zip(q).map(|(p, v)| p * v).sum()
}

/// One WoLF-PHC step: update the average policy, decide winning or losing
/// against it, and hill-climb with the matching rate.
pub fn wolf_phc_update(state: &PolicyState, q: &[f64], t: u64, config: &LearnerConfig) -> PolicyState {
    let count = state.count + 1;
    let average: Vec<f64> = state
        .average
        .iter()
        .zip(&state.policy)
        .map(|(avg, p)| avg + (p - avg) / count as f64)
        .collect();
    let winning = value(&state.policy, q) >= value(&average, q);
    let delta = if winning {
        config.wolf_winning_rate(t)
    } else {
        config.wolf_losing_rate(t)
    };
    PolicyState {
        policy: hill_climb(&state.policy, q, delta),
        average,
        count,
        last_delta: delta,
    }
}

#[derive(Debug, Clone)]
pub struct WolfPhc {
    config: LearnerConfig,
    q: QTable,
    state: PolicyState,
    steps: u64,
    rng: ChaCha8Rng,
}

impl WolfPhc {
    pub fn new(ctx: &LearnerContext) -> Result<Self> {
        ctx.config.validate()?;
        let m = ctx.own_actions();
        Ok(Self {
            config: ctx.config.clone(),
            q: QTable::zeros(m),
            state: PolicyState::uniform(m),
            steps: 0,
            rng: ChaCha8Rng::seed_from_u64(ctx.seed),
        })
    }

    pub fn policy_state(&self) -> &PolicyState {
        &self.state
    }
}

impl Learner for WolfPhc {
    fn name(&self) -> &str {
        "wolfphc"
    }

    fn observation_level(&self) -> ObservationLevel {
        ObservationLevel::Own
    }

    fn current_strategy(&self) -> Vec<f64> {
        self.state.policy.clone()
    }

    fn behaviour_strategy(&self) -> Vec<f64> {
        mix_with_uniform(&self.state.policy, self.config.epsilon)
    }

    fn select_action(&mut self) -> usize {
        let dist = self.behaviour_strategy();
        sample(&dist, &mut self.rng)
    }

    fn observe(&mut self, observation: &Observation) -> Result<()> {
        self.steps += 1;
        self.q.update(observation.own_action, observation.own_payoff, self.config.alpha);
        self.state = wolf_phc_update(&self.state, self.q.values(), self.steps, &self.config);
        Ok(())
    }
}
