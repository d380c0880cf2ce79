//! Joint-action learner with independent opponent models.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::common::{argmax, epsilon_greedy_distribution, sample, JointSpace, QTable};
use super::{Learner, LearnerConfig, LearnerContext, Observation, ObservationLevel};
use crate::error::Result;
use crate::game::point_mass;

/// Empirical distribution per opponent; uniform before any observation.
pub fn marginals_from_counts(counts: &[Vec<u64>]) -> Vec<Vec<f64>> {
    counts
        .iter()
        .map(|c| {
            let total: u64 = c.iter().sum();
            if total == 0 {
                vec![1.0 / c.len() as f64; c.len()]
            } else {
                c.iter().map(|&n| n as f64 / total as f64).collect()
            }
        })
        .collect()
}

/// Expected value of each own action when opponents play the given marginals
/// independently. `space` is the full joint action space.
pub fn jal_expected_values(
    q: &QTable,
    space: &JointSpace,
    player: usize,
    marginals: &[Vec<f64>],
) -> Vec<f64> {
    let others = space.without(player);
    (0..space.counts()[player])
        .map(|own| {
            (0..others.len())
                .map(|o| {
                    let opp = others.action(o);
                    let weight: f64 = opp.iter().zip(marginals).map(|(&a, m)| m[a]).product();
                    weight * q.get(space.compose(player, own, &opp))
                })
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Jal {
    player: usize,
    space: JointSpace,
    config: LearnerConfig,
    q: QTable,
    counts: Vec<Vec<u64>>,
    greedy: usize,
    rng: ChaCha8Rng,
}

impl Jal {
    pub fn new(ctx: &LearnerContext) -> Result<Self> {
        ctx.config.validate()?;
        let space = ctx.joint_space();
        let counts = space.without(ctx.player).counts().iter().map(|&m| vec![0; m]).collect();
        Ok(Self {
            player: ctx.player,
            q: QTable::zeros(space.len()),
            space,
            config: ctx.config.clone(),
            counts,
            greedy: 0,
            rng: ChaCha8Rng::seed_from_u64(ctx.seed),
        })
    }

    pub fn expected_values(&self) -> Vec<f64> {
        jal_expected_values(&self.q, &self.space, self.player, &marginals_from_counts(&self.counts))
    }

    pub fn q_table(&self) -> &QTable {
        &self.q
    }
}

impl Learner for Jal {
    fn name(&self) -> &str {
        "jal"
    }

    fn observation_level(&self) -> ObservationLevel {
        ObservationLevel::JointAction
    }

    fn current_strategy(&self) -> Vec<f64> {
        point_mass(self.space.counts()[self.player], self.greedy)
    }

    fn behaviour_strategy(&self) -> Vec<f64> {
        let mut values = vec![0.0; self.space.counts()[self.player]];
        values[self.greedy] = 1.0;
        epsilon_greedy_distribution(&values, self.config.epsilon).expect("non-empty action set")
    }

    fn select_action(&mut self) -> usize {
        let dist = self.behaviour_strategy();
        sample(&dist, &mut self.rng)
    }

    fn observe(&mut self, observation: &Observation) -> Result<()> {
        let joint = observation.require_joint()?;
        self.q.update(self.space.index(joint), observation.own_payoff, self.config.alpha);
        for (counts, &a) in self.counts.iter_mut().zip(JointSpace::others(joint, self.player).iter()) {
            counts[a] += 1;
        }
        self.greedy = argmax(&self.expected_values());
        Ok(())
    }
}
