//! Play records and the per-play metrics computed from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{expected_payoffs, RepeatedGame, StrategyProfile};
use crate::solvers::{
    best_pure_response, build_payoff_polytope, distance_to_pareto_front, fairness,
    maximize_fairness, maximize_welfare, pareto_front, welfare, ParetoFront,
};

pub const CONVERGENCE_BAND: f64 = 0.05;
pub const RATIO_THRESHOLD: f64 = 1.05;
pub const PARETO_DISTANCE: f64 = 0.1;

/// Which learner distribution a play records as the strategy at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyRecording {
    /// Exploration-free policy.
    #[default]
    Policy,
    /// The sampling distribution, exploration included.
    Behaviour,
}

/// Per-step strategies, joint actions and payoffs of one play. Steps are
/// stored flat; step `t` (1-based) lives at offset `t - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayRecord {
    action_counts: Vec<usize>,
    horizon: usize,
    strategies: Vec<f64>,
    joint_actions: Vec<usize>,
    payoffs: Vec<f64>,
}

impl PlayRecord {
    pub fn with_capacity(action_counts: &[usize], horizon: usize) -> Self {
        let n = action_counts.len();
        let stride: usize = action_counts.iter().sum();
        Self {
            action_counts: action_counts.to_vec(),
            horizon: 0,
            strategies: Vec::with_capacity(horizon * stride),
            joint_actions: Vec::with_capacity(horizon * n),
            payoffs: Vec::with_capacity(horizon * n),
        }
    }

    /// Appends one step. `strategies` holds each player's distribution.
    pub fn push(&mut self, strategies: &[Vec<f64>], joint: &[usize], payoffs: &[f64]) {
        for s in strategies {
            self.strategies.extend_from_slice(s);
        }
        self.joint_actions.extend_from_slice(joint);
        self.payoffs.extend_from_slice(payoffs);
        self.horizon += 1;
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn player_count(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    fn stride(&self) -> usize {
        self.action_counts.iter().sum()
    }

    /// Player `i`'s strategy at step `t` (1-based).
    pub fn strategy(&self, t: usize, player: usize) -> &[f64] {
        let offset: usize = self.action_counts[..player].iter().sum();
        let start = (t - 1) * self.stride() + offset;
        &self.strategies[start..start + self.action_counts[player]]
    }

    pub fn profile(&self, t: usize) -> StrategyProfile {
        StrategyProfile::new((0..self.player_count()).map(|i| self.strategy(t, i).to_vec()).collect())
            .expect("recorded strategies are distributions")
    }

    pub fn joint_action(&self, t: usize) -> &[usize] {
        let n = self.player_count();
        &self.joint_actions[(t - 1) * n..t * n]
    }

    pub fn payoffs(&self, t: usize) -> &[f64] {
        let n = self.player_count();
        &self.payoffs[(t - 1) * n..t * n]
    }

    /// Checks lengths, distributions and that payoffs match the game.
    pub fn validate(&self, game: &RepeatedGame) -> Result<()> {
        if game.action_counts() != self.action_counts.as_slice() {
            return Err(Error::DimensionMismatch("play and game shapes differ".into()));
        }
        for t in 1..=self.horizon {
            let joint = self.joint_action(t);
            for (i, &r) in self.payoffs(t).iter().enumerate() {
                if r != game.payoff(i, joint) {
                    return Err(Error::InvalidInput(format!("payoff mismatch at step {t}")));
                }
            }
            for i in 0..self.player_count() {
                crate::game::validate_distribution(self.strategy(t, i))
                    .map_err(|e| Error::InvalidInput(format!("step {t}: {e}")))?;
            }
        }
        Ok(())
    }
}

/// First step of the final window, `ceil(0.8 t_f)`.
pub fn final_window_start(horizon: usize) -> Result<usize> {
    if horizon < 5 {
        return Err(Error::InvalidInput(format!("horizon {horizon} is below 5")));
    }
    Ok((horizon * 4).div_ceil(5).clamp(1, horizon))
}

pub fn converged(play: &PlayRecord, player: usize) -> Result<bool> {
    let ts = final_window_start(play.horizon())?;
    let anchor = play.strategy(ts, player);
    Ok((ts..=play.horizon()).all(|t| {
        play.strategy(t, player)
            .iter()
            .zip(anchor)
            .all(|(p, q)| (p - q).abs() <= CONVERGENCE_BAND)
    }))
}

/// Mean realised payoff over the final window.
pub fn final_expected_payoff(play: &PlayRecord, player: usize) -> Result<f64> {
    let ts = final_window_start(play.horizon())?;
    let sum: f64 = (ts..=play.horizon()).map(|t| play.payoffs(t)[player]).sum();
    Ok(sum / (play.horizon() - ts + 1) as f64)
}

pub fn welfare_and_fairness(final_payoffs: &[f64]) -> (f64, f64) {
    (welfare(final_payoffs), fairness(final_payoffs))
}

/// Mean strategy profile over the final window.
pub fn averaged_final_profile(play: &PlayRecord) -> Result<StrategyProfile> {
    let ts = final_window_start(play.horizon())?;
    let len = (play.horizon() - ts + 1) as f64;
    let dists = (0..play.player_count())
        .map(|i| {
            let mut acc = vec![0.0; play.action_counts()[i]];
            for t in ts..=play.horizon() {
                for (a, p) in acc.iter_mut().zip(play.strategy(t, i)) {
                    *a += p;
                }
            }
            acc.iter_mut().for_each(|a| *a /= len);
            acc
        })
        .collect();
    StrategyProfile::new(dists)
}

/// `None` when a ratio is undefined because its denominator is not positive.
fn ratio_within(best: f64, achieved: f64) -> Option<bool> {
    (achieved > 0.0).then(|| best / achieved <= RATIO_THRESHOLD)
}

/// Every player's best-response value is within 5% of what the AFP gives it.
pub fn is_nash(game: &RepeatedGame, afp: &StrategyProfile) -> Result<Option<bool>> {
    let values = expected_payoffs(game, afp)?;
    let mut all = true;
    for (i, &v) in values.iter().enumerate() {
        let (_, best) = best_pure_response(game, i, afp);
        match ratio_within(best, v) {
            None => return Ok(None),
            Some(ok) => all &= ok,
        }
    }
    Ok(Some(all))
}

pub fn is_pareto_optimal(game: &RepeatedGame, afp: &StrategyProfile) -> Result<bool> {
    GameAnalysis::new(game)?.is_pareto_optimal(afp)
}

pub fn is_welfare_optimal(game: &RepeatedGame, afp: &StrategyProfile) -> Result<Option<bool>> {
    let max = maximize_welfare(game)?.value;
    Ok(ratio_within(max, welfare(&expected_payoffs(game, afp)?)))
}

pub fn is_fairness_optimal(game: &RepeatedGame, afp: &StrategyProfile) -> Result<Option<bool>> {
    let max = maximize_fairness(game)?.value;
    Ok(ratio_within(max, fairness(&expected_payoffs(game, afp)?)))
}

/// Per-game quantities shared by every play of that game.
#[derive(Debug, Clone)]
pub struct GameAnalysis {
    game: RepeatedGame,
    front: ParetoFront,
    max_welfare: f64,
    max_fairness: f64,
}

impl GameAnalysis {
    pub fn new(game: &RepeatedGame) -> Result<Self> {
        let front = pareto_front(&build_payoff_polytope(game)?);
        Ok(Self {
            game: game.clone(),
            front,
            max_welfare: maximize_welfare(game)?.value,
            max_fairness: maximize_fairness(game)?.value,
        })
    }

    pub fn game(&self) -> &RepeatedGame {
        &self.game
    }

    pub fn front(&self) -> &ParetoFront {
        &self.front
    }

    pub fn max_welfare(&self) -> f64 {
        self.max_welfare
    }

    pub fn max_fairness(&self) -> f64 {
        self.max_fairness
    }

    pub fn is_pareto_optimal(&self, afp: &StrategyProfile) -> Result<bool> {
        let point = expected_payoffs(&self.game, afp)?;
        Ok(distance_to_pareto_front(&point, &self.front) <= PARETO_DISTANCE)
    }

    pub fn evaluate(&self, play: &PlayRecord) -> Result<MetricsReport> {
        let n = play.player_count();
        let converged = (0..n).map(|i| converged(play, i)).collect::<Result<Vec<_>>>()?;
        let final_payoffs = (0..n)
            .map(|i| final_expected_payoff(play, i))
            .collect::<Result<Vec<_>>>()?;
        let (w, f) = welfare_and_fairness(&final_payoffs);
        let afp = averaged_final_profile(play)?;
        let afp_payoffs = expected_payoffs(&self.game, &afp)?;
        Ok(MetricsReport {
            converged,
            final_payoffs,
            welfare: w,
            fairness: f,
            nash: is_nash(&self.game, &afp)?,
            pareto_optimal: self.is_pareto_optimal(&afp)?,
            welfare_optimal: ratio_within(self.max_welfare, welfare(&afp_payoffs)),
            fairness_optimal: ratio_within(self.max_fairness, fairness(&afp_payoffs)),
            afp: afp.distributions().to_vec(),
        })
    }
}

/// The seven metrics of one play. Undefined ratio metrics are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub converged: Vec<bool>,
    pub final_payoffs: Vec<f64>,
    pub welfare: f64,
    pub fairness: f64,
    pub afp: Vec<Vec<f64>>,
    pub nash: Option<bool>,
    pub pareto_optimal: bool,
    pub welfare_optimal: Option<bool>,
    pub fairness_optimal: Option<bool>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::figure_one_game;
    use approx::assert_abs_diff_eq;

    fn constant_play(game: &RepeatedGame, joint: &[usize], horizon: usize) -> PlayRecord {
        let mut play = PlayRecord::with_capacity(game.action_counts(), horizon);
        let profile = StrategyProfile::pure(game.action_counts(), joint);
        let payoffs: Vec<f64> = (0..game.player_count()).map(|i| game.payoff(i, joint)).collect();
        for _ in 0..horizon {
            play.push(profile.distributions(), joint, &payoffs);
        }
        play
    }

    fn two_action_play(first: &[(f64, f64)]) -> PlayRecord {
        let mut play = PlayRecord::with_capacity(&[2], first.len());
        for &(p, r) in first {
            play.push(&[vec![p, 1.0 - p]], &[0], &[r]);
        }
        play
    }

    #[test]
    fn window_start_examples() {
        assert_eq!(final_window_start(100_000).unwrap(), 80_000);
        assert_eq!(final_window_start(10).unwrap(), 8);
        assert_eq!(final_window_start(7).unwrap(), 6);
        assert!(final_window_start(4).is_err());
    }

    #[test]
    fn convergence_examples() {
        let constant = two_action_play(&[(0.3, 1.0); 20]);
        assert!(converged(&constant, 0).unwrap());

        let alternating: Vec<(f64, f64)> = (0..20).map(|t| ((t % 2) as f64, 1.0)).collect();
        assert!(!converged(&two_action_play(&alternating), 0).unwrap());

        // drift from 0.5 to 0.56 across the window of steps 80..=100
        let drift: Vec<(f64, f64)> = (1..=100)
            .map(|t| {
                let x = if t < 80 { 0.5 } else { 0.5 + 0.06 * (t - 80) as f64 / 20.0 };
                (x, 1.0)
            })
            .collect();
        assert!(!converged(&two_action_play(&drift), 0).unwrap());
    }

    #[test]
    fn payoff_window_examples() {
        assert_eq!(final_expected_payoff(&two_action_play(&[(1.0, 3.0); 10]), 0).unwrap(), 3.0);
        // window of 4 steps (12..=15) alternating 1 and 4
        let alt: Vec<(f64, f64)> = (0..15).map(|t| (1.0, if t % 2 == 0 { 1.0 } else { 4.0 })).collect();
        assert_eq!(final_expected_payoff(&two_action_play(&alt), 0).unwrap(), 2.5);
        let g = figure_one_game();
        let play = constant_play(&g, &[1, 1], 50);
        assert_eq!(final_expected_payoff(&play, 0).unwrap(), 3.0);
        assert_eq!(final_expected_payoff(&play, 1).unwrap(), 3.0);
    }

    #[test]
    fn welfare_fairness_examples() {
        assert_eq!(welfare_and_fairness(&[3.0, 3.0]), (6.0, 9.0));
        assert_eq!(welfare_and_fairness(&[4.0, 4.0]), (8.0, 16.0));
        assert_eq!(welfare_and_fairness(&[2.5, 0.0]).1, 0.0);
    }

    #[test]
    fn averaged_profile_examples() {
        let alt: Vec<(f64, f64)> = (0..15).map(|t| ((t % 2) as f64, 1.0)).collect();
        let afp = averaged_final_profile(&two_action_play(&alt)).unwrap();
        assert_abs_diff_eq!(afp.player(0)[0], 0.5, epsilon = 1e-12);
        // window steps 12..=15: three at (1,0), one at (0,1)
        let mixed: Vec<(f64, f64)> = (1..=15).map(|t| (if t <= 14 { 1.0 } else { 0.0 }, 1.0)).collect();
        let afp = averaged_final_profile(&two_action_play(&mixed)).unwrap();
        assert_abs_diff_eq!(afp.player(0)[0], 0.75, epsilon = 1e-12);
    }

    #[test]
    fn figure_one_solution_flags() {
        let g = figure_one_game();
        let pure = |a: usize, b: usize| StrategyProfile::pure(&[2, 2], &[a, b]);
        assert_eq!(is_nash(&g, &pure(1, 1)).unwrap(), Some(false));
        assert_eq!(is_nash(&g, &pure(0, 1)).unwrap(), Some(true));
        assert!(is_pareto_optimal(&g, &pure(1, 1)).unwrap());
        assert!(!is_pareto_optimal(&g, &StrategyProfile::uniform(&[2, 2])).unwrap());
        assert_eq!(is_welfare_optimal(&g, &pure(0, 1)).unwrap(), Some(false));
        assert_eq!(is_welfare_optimal(&g, &pure(1, 1)).unwrap(), Some(true));
        assert_eq!(is_fairness_optimal(&g, &pure(1, 1)).unwrap(), Some(true));
    }

    #[test]
    fn undefined_ratio_is_reported() {
        let g = RepeatedGame::bimatrix(&[&[0.0, 0.0], &[0.0, 0.0]], &[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert_eq!(is_nash(&g, &StrategyProfile::uniform(&[2, 2])).unwrap(), None);
    }

    #[test]
    fn report_matches_parts() {
        let g = figure_one_game();
        let play = constant_play(&g, &[1, 1], 40);
        play.validate(&g).unwrap();
        let report = GameAnalysis::new(&g).unwrap().evaluate(&play).unwrap();
        assert_eq!(report.converged, vec![true, true]);
        assert_eq!(report.final_payoffs, vec![3.0, 3.0]);
        assert_eq!(report.welfare, 6.0);
        assert_eq!(report.fairness, 9.0);
        assert_eq!(report.nash, Some(false));
        assert!(report.pareto_optimal);
    }
}
