//! Joint-action learner whose opponent model is conditioned on its own action.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::common::{argmax, epsilon_greedy_distribution, sample, JointSpace, QTable};
use super::{Learner, LearnerConfig, LearnerContext, Observation, ObservationLevel};
use crate::error::Result;
use crate::game::point_mass;

/// Counts of opponent joint actions, one row per own action.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalCounts {
    rows: Vec<Vec<u64>>,
}

impl ConditionalCounts {
    pub fn new(own_actions: usize, opponent_joint_actions: usize) -> Self {
        Self {
            rows: vec![vec![0; opponent_joint_actions]; own_actions],
        }
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Self {
        Self { rows }
    }

    pub fn record(&mut self, own: usize, opponents: usize) {
        self.rows[own][opponents] += 1;
    }

    /// Times the own action was played.
    pub fn own_count(&self, own: usize) -> u64 {
        self.rows[own].iter().sum()
    }

    /// Conditional distribution of opponent joint actions; uniform if unseen.
    pub fn conditional(&self, own: usize) -> Vec<f64> {
        let row = &self.rows[own];
        let total = self.own_count(own);
        if total == 0 {
            vec![1.0 / row.len() as f64; row.len()]
        } else {
            row.iter().map(|&n| n as f64 / total as f64).collect()
        }
    }
}

pub fn cjal_expected_values(
    q: &QTable,
    space: &JointSpace,
    player: usize,
    counts: &ConditionalCounts,
) -> Vec<f64> {
    let others = space.without(player);
    (0..space.counts()[player])
        .map(|own| {
            counts
                .conditional(own)
                .iter()
                .enumerate()
                .map(|(o, p)| p * q.get(space.compose(player, own, &others.action(o))))
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Cjal {
    player: usize,
    space: JointSpace,
    others: JointSpace,
    config: LearnerConfig,
    q: QTable,
    counts: ConditionalCounts,
    greedy: usize,
    rng: ChaCha8Rng,
}

impl Cjal {
    pub fn new(ctx: &LearnerContext) -> Result<Self> {
        ctx.config.validate()?;
        let space = ctx.joint_space();
        let others = space.without(ctx.player);
        Ok(Self {
            player: ctx.player,
            q: QTable::zeros(space.len()),
            counts: ConditionalCounts::new(ctx.own_actions(), others.len()),
            space,
            others,
            config: ctx.config.clone(),
            greedy: 0,
            rng: ChaCha8Rng::seed_from_u64(ctx.seed),
        })
    }

    pub fn expected_values(&self) -> Vec<f64> {
        cjal_expected_values(&self.q, &self.space, self.player, &self.counts)
    }
}

impl Learner for Cjal {
    fn name(&self) -> &str {
        "cjal"
    }

    fn observation_level(&self) -> ObservationLevel {
        ObservationLevel::JointAction
    }

    fn current_strategy(&self) -> Vec<f64> {
        point_mass(self.space.counts()[self.player], self.greedy)
    }

    fn behaviour_strategy(&self) -> Vec<f64> {
        let values = self.current_strategy();
        epsilon_greedy_distribution(&values, self.config.epsilon).expect("non-empty action set")
    }

    fn select_action(&mut self) -> usize {
        let dist = self.behaviour_strategy();
        sample(&dist, &mut self.rng)
    }

    fn observe(&mut self, observation: &Observation) -> Result<()> {
        let joint = observation.require_joint()?;
        self.q.update(self.space.index(joint), observation.own_payoff, self.config.alpha);
        let opp = self.others.index(&JointSpace::others(joint, self.player));
        self.counts.record(joint[self.player], opp);
        self.greedy = argmax(&self.expected_values());
        Ok(())
    }
}
