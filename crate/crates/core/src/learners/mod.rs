//! Learning agents and the registry that builds them by name.
//!
//! Every algorithm implements [`Learner`]. A play asks each learner for its
//! strategy, draws an action from it, and then hands back an [`Observation`]
//! trimmed to what that learner is allowed to see.

mod cjal;
mod common;
mod fixed;
mod jal;
mod nashq;
mod regmat;
mod wolf;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cjal::{cjal_expected_values, Cjal, ConditionalCounts};
pub use common::{
    argmax, epsilon_greedy_distribution, mix_with_uniform, q_update, sample, JointSpace, QTable,
};
pub use fixed::FixedAction;
pub use jal::{jal_expected_values, marginals_from_counts, Jal};
pub use nashq::{nashq_strategy, select_equilibrium, NashQ, NashQState};
pub use regmat::{hannan_regrets, regmat_play_distribution, RegMat, RegretState};
pub use wolf::{hill_climb, wolf_phc_update, PolicyState, WolfPhc};

/// Parameters shared by all learners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub regmat_delta: f64,
    pub regmat_gamma: f64,
    /// WoLF winning rate is `1 / (wolf_base + t)`; the losing rate is twice that.
    pub wolf_base: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            epsilon: 0.05,
            regmat_delta: 0.1,
            regmat_gamma: 0.2,
            wolf_base: 1000.0,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, v: f64| Err(Error::Config(format!("`{key}` out of range: {v}")));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha", self.alpha);
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad("epsilon", self.epsilon);
        }
        if !(self.regmat_delta > 0.0 && self.regmat_delta < 1.0) {
            return bad("regmat_delta", self.regmat_delta);
        }
        if !(self.regmat_gamma > 0.0 && self.regmat_gamma < 1.0) {
            return bad("regmat_gamma", self.regmat_gamma);
        }
        if !(self.wolf_base > 0.0 && self.wolf_base.is_finite()) {
            return bad("wolf_base", self.wolf_base);
        }
        Ok(())
    }

    /// Winning learning rate at step `t`.
    pub fn wolf_winning_rate(&self, t: u64) -> f64 {
        1.0 / (self.wolf_base + t as f64)
    }

    /// Losing learning rate at step `t`.
    pub fn wolf_losing_rate(&self, t: u64) -> f64 {
        2.0 * self.wolf_winning_rate(t)
    }
}

/// What a learner gets to see after each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservationLevel {
    /// Own action and own payoff.
    Own,
    /// The full joint action and own payoff.
    JointAction,
    /// The full joint action and every player's payoff.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub own_action: usize,
    pub own_payoff: f64,
    pub joint_action: Option<Vec<usize>>,
    pub payoffs: Option<Vec<f64>>,
}

impl Observation {
    /// Trims a full round outcome to the given level.
    pub fn for_player(player: usize, joint: &[usize], payoffs: &[f64], level: ObservationLevel) -> Self {
        Self {
            own_action: joint[player],
            own_payoff: payoffs[player],
            joint_action: (level != ObservationLevel::Own).then(|| joint.to_vec()),
            payoffs: (level == ObservationLevel::Full).then(|| payoffs.to_vec()),
        }
    }

    pub(crate) fn require_joint(&self) -> Result<&[usize]> {
        self.joint_action
            .as_deref()
            .ok_or_else(|| Error::PlayFailed("learner needs the joint action".into()))
    }

    pub(crate) fn require_payoffs(&self) -> Result<&[f64]> {
        self.payoffs
            .as_deref()
            .ok_or_else(|| Error::PlayFailed("learner needs every player's payoff".into()))
    }
}

/// A learning agent seated as one player of a repeated game.
pub trait Learner: Send {
    /// Registry name of the algorithm.
    fn name(&self) -> &str;

    fn observation_level(&self) -> ObservationLevel;

    /// The strategy the learner is currently following, without exploration
    /// noise. This is what the play metrics record.
    fn current_strategy(&self) -> Vec<f64>;

    /// The distribution [`Learner::select_action`] actually samples from.
    fn behaviour_strategy(&self) -> Vec<f64>;

    fn select_action(&mut self) -> usize;

    fn observe(&mut self, observation: &Observation) -> Result<()>;

    /// Non-fatal events worth reporting (solver fallbacks and the like).
    fn diagnostics(&self) -> Vec<String> {
        Vec::new()
    }
}

impl fmt::Debug for dyn Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Learner").field("name", &self.name()).finish()
    }
}

/// Everything a learner is told when it is created.
#[derive(Debug, Clone)]
pub struct LearnerContext {
    pub player: usize,
    pub action_counts: Vec<usize>,
    pub config: LearnerConfig,
    pub seed: u64,
}

impl LearnerContext {
    pub fn own_actions(&self) -> usize {
        self.action_counts[self.player]
    }

    pub fn joint_space(&self) -> JointSpace {
        JointSpace::new(self.action_counts.clone())
    }

    /// Largest payoff of a strictly ordinal game of this shape.
    pub fn max_rank(&self) -> f64 {
        self.action_counts.iter().product::<usize>() as f64
    }
}

/// Builds fresh learners of one algorithm.
pub trait LearnerFactory: Send + Sync {
    /// Display name used in report tables.
    fn label(&self) -> &str;

    fn build(&self, ctx: &LearnerContext) -> Result<Box<dyn Learner>>;
}

struct FnFactory<F> {
    label: String,
    build: F,
}

impl<F> LearnerFactory for FnFactory<F>
where
    F: Fn(&LearnerContext) -> Result<Box<dyn Learner>> + Send + Sync,
{
    fn label(&self) -> &str {
        &self.label
    }

    fn build(&self, ctx: &LearnerContext) -> Result<Box<dyn Learner>> {
        (self.build)(ctx)
    }
}

/// Name -> factory map.
pub struct LearnerRegistry {
    factories: BTreeMap<String, Box<dyn LearnerFactory>>,
}

impl Default for LearnerRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl LearnerRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// The five benchmark algorithms.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register_fn("jal", "JAL", |ctx| Ok(Box::new(Jal::new(ctx)?) as Box<dyn Learner>));
        r.register_fn("cjal", "CJAL", |ctx| Ok(Box::new(Cjal::new(ctx)?) as Box<dyn Learner>));
        r.register_fn("wolfphc", "WOLF-PHC", |ctx| {
            Ok(Box::new(WolfPhc::new(ctx)?) as Box<dyn Learner>)
        });
        r.register_fn("regmat", "RegMat", |ctx| {
            Ok(Box::new(RegMat::new(ctx)?) as Box<dyn Learner>)
        });
        r.register_fn("nashq", "NashQ", |ctx| Ok(Box::new(NashQ::new(ctx)?) as Box<dyn Learner>));
        r
    }

    pub fn register(&mut self, name: impl Into<String>, factory: Box<dyn LearnerFactory>) {
        self.factories.insert(name.into(), factory);
    }

    pub fn register_fn<F>(&mut self, name: &str, label: &str, build: F)
    where
        F: Fn(&LearnerContext) -> Result<Box<dyn Learner>> + Send + Sync + 'static,
    {
        self.register(
            name,
            Box::new(FnFactory {
                label: label.to_string(),
                build,
            }),
        );
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn label(&self, name: &str) -> Option<&str> {
        self.factories.get(name).map(|f| f.label())
    }

    pub fn build(&self, name: &str, ctx: &LearnerContext) -> Result<Box<dyn Learner>> {
        self.factories
            .get(name)
            .ok_or_else(|| Error::UnknownLearner(name.to_string()))?
            .build(ctx)
    }
}
