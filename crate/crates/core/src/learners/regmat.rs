//! Regret matching on unconditional (Hannan) regrets with decaying exploration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::common::{mix_with_uniform, sample, JointSpace};
use super::{Learner, LearnerConfig, LearnerContext, Observation, ObservationLevel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RegretState {
    /// Per own action, the payoff it would have earned against the realised
    /// opponent actions, summed over steps.
    pub counterfactual_sums: Vec<f64>,
    pub realized_sum: f64,
    pub steps: u64,
}

pub fn hannan_regrets(state: &RegretState) -> Vec<f64> {
    if state.steps == 0 {
        return vec![0.0; state.counterfactual_sums.len()];
    }
    let t = state.steps as f64;
    state
        .counterfactual_sums
        .iter()
        .map(|cf| (cf - state.realized_sum) / t)
        .collect()
}

/// Exploration weight at step `t`: `delta / t^gamma`.
pub fn exploration_weight(delta: f64, gamma: f64, t: u64) -> f64 {
    delta / (t.max(1) as f64).powf(gamma)
}

/// Switching rule without exploration. Each other action `j` takes
/// `min(R+(j) / mu, 1/(m-1))`; the rest stays on `current`.
fn switching_distribution(regrets: &[f64], current: usize, mu: f64) -> Vec<f64> {
    let m = regrets.len();
    let mut dist = vec![0.0; m];
    if m == 1 {
        dist[0] = 1.0;
        return dist;
    }
    let cap = 1.0 / (m - 1) as f64;
    for (j, &r) in regrets.iter().enumerate() {
        if j != current {
            dist[j] = (r.max(0.0) / mu).min(cap);
        }
    }
    dist[current] = (1.0 - dist.iter().sum::<f64>()).max(0.0);
    dist
}

pub fn regmat_play_distribution(
    regrets: &[f64],
    current: usize,
    delta: f64,
    gamma: f64,
    t: u64,
    mu: f64,
) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&delta) || gamma < 0.0 || !(mu > 0.0) {
        return Err(Error::Config(format!(
            "regret matching needs delta in [0,1], gamma >= 0 and mu > 0 (got {delta}, {gamma}, {mu})"
        )));
    }
    if current >= regrets.len() {
        return Err(Error::InvalidInput(format!("action {current} out of range")));
    }
    let base = switching_distribution(regrets, current, mu);
    Ok(mix_with_uniform(&base, exploration_weight(delta, gamma, t)))
}

#[derive(Debug, Clone)]
pub struct RegMat {
    player: usize,
    space: JointSpace,
    others: JointSpace,
    config: LearnerConfig,
    mu: f64,
    /// Own payoff seen at each joint action, once observed.
    payoff_memory: Vec<Option<f64>>,
    opponent_counts: Vec<u64>,
    realized_sum: f64,
    steps: u64,
    anchor: usize,
    rng: ChaCha8Rng,
}

impl RegMat {
    pub fn new(ctx: &LearnerContext) -> Result<Self> {
        ctx.config.validate()?;
        let space = ctx.joint_space();
        let others = space.without(ctx.player);
        Ok(Self {
            player: ctx.player,
            payoff_memory: vec![None; space.len()],
            opponent_counts: vec![0; others.len()],
            space,
            others,
            config: ctx.config.clone(),
            mu: ctx.max_rank(),
            realized_sum: 0.0,
            steps: 0,
            anchor: 0,
            rng: ChaCha8Rng::seed_from_u64(ctx.seed),
        })
    }

    /// Counterfactual sums rebuilt from opponent counts and remembered
    /// payoffs. Cells never seen count as zero.
    pub fn regret_state(&self) -> RegretState {
        let counterfactual_sums = (0..self.space.counts()[self.player])
            .map(|own| {
                self.opponent_counts
                    .iter()
                    .enumerate()
                    .filter(|&(_, &n)| n > 0)
                    .map(|(o, &n)| {
                        let idx = self.space.compose(self.player, own, &self.others.action(o));
                        n as f64 * self.payoff_memory[idx].unwrap_or(0.0)
                    })
                    .sum()
            })
            .collect();
        RegretState {
            counterfactual_sums,
            realized_sum: self.realized_sum,
            steps: self.steps,
        }
    }

    pub fn regrets(&self) -> Vec<f64> {
        hannan_regrets(&self.regret_state())
    }

    fn next_step(&self) -> u64 {
        self.steps + 1
    }
}

impl Learner for RegMat {
    fn name(&self) -> &str {
        "regmat"
    }

    fn observation_level(&self) -> ObservationLevel {
        ObservationLevel::JointAction
    }

    fn current_strategy(&self) -> Vec<f64> {
        switching_distribution(&self.regrets(), self.anchor, self.mu)
    }

    fn behaviour_strategy(&self) -> Vec<f64> {
        let weight = exploration_weight(self.config.regmat_delta, self.config.regmat_gamma, self.next_step());
        mix_with_uniform(&self.current_strategy(), weight)
    }

    fn select_action(&mut self) -> usize {
        let weight = exploration_weight(self.config.regmat_delta, self.config.regmat_gamma, self.next_step());
        let m = self.space.counts()[self.player];
        if self.rng.gen::<f64>() < weight {
            // exploration draws leave the anchor alone
            return self.rng.gen_range(0..m);
        }
        let base = self.current_strategy();
        self.anchor = sample(&base, &mut self.rng);
        self.anchor
    }

    fn observe(&mut self, observation: &Observation) -> Result<()> {
        let joint = observation.require_joint()?;
        self.payoff_memory[self.space.index(joint)] = Some(observation.own_payoff);
        let opp = self.others.index(&JointSpace::others(joint, self.player));
        self.opponent_counts[opp] += 1;
        self.realized_sum += observation.own_payoff;
        self.steps += 1;
        Ok(())
    }
}
