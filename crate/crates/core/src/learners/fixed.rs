//! A learner that never learns. Used as a stationary opponent in tests.

use super::{Learner, Observation, ObservationLevel};
use crate::error::Result;
use crate::game::point_mass;

#[derive(Debug, Clone)]
pub struct FixedAction {
    actions: usize,
    action: usize,
}

impl FixedAction {
    pub fn new(actions: usize, action: usize) -> Self {
        assert!(action < actions, "fixed action out of range");
        Self { actions, action }
    }
}

impl Learner for FixedAction {
    fn name(&self) -> &str {
        "fixed"
    }

    fn observation_level(&self) -> ObservationLevel {
        ObservationLevel::Own
    }

    fn current_strategy(&self) -> Vec<f64> {
        point_mass(self.actions, self.action)
    }

    fn behaviour_strategy(&self) -> Vec<f64> {
        self.current_strategy()
    }

    fn select_action(&mut self) -> usize {
        self.action
    }

    fn observe(&mut self, _observation: &Observation) -> Result<()> {
        Ok(())
    }
}
