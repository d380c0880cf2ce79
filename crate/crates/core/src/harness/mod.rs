//! Plays, sweeps and the three benchmark suites.

mod config;
mod stats;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::game::{enumerate_distinct_2x2, random_strictly_ordinal, ClassFilter, GameClass, RepeatedGame};
use crate::learners::{Learner, LearnerConfig, LearnerContext, LearnerRegistry, Observation};
use crate::metrics::{GameAnalysis, MetricsReport, PlayRecord, StrategyRecording};

pub use config::{SuiteConfig, SuiteKind};
pub use stats::{
    aggregate_overall, equivalence_pairs, paired_samples, paired_t_test, summarize, AlgorithmSummary,
    Metric, OverallRow, OverallSummary, TTest,
};

/// Hash of the master seed and a list of labels.
pub fn derive_seed(master: u64, parts: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Fresh learners for one play, seated in the given order.
pub fn build_seating(
    registry: &LearnerRegistry,
    seating: &[String],
    action_counts: &[usize],
    config: &LearnerConfig,
    play_seed: u64,
) -> Result<Vec<Box<dyn Learner>>> {
    seating
        .iter()
        .enumerate()
        .map(|(player, name)| {
            let ctx = LearnerContext {
                player,
                action_counts: action_counts.to_vec(),
                config: config.clone(),
                seed: derive_seed(play_seed, &["seat", &player.to_string()]),
            };
            registry.build(name, &ctx)
        })
        .collect()
}

/// Runs `horizon` rounds. Each step records the strategies, samples every
/// learner's action, pays out and lets each learner observe what it may see.
pub fn run_play(
    game: &RepeatedGame,
    learners: &mut [Box<dyn Learner>],
    horizon: usize,
    recording: StrategyRecording,
) -> Result<PlayRecord> {
    if horizon == 0 {
        return Err(Error::InvalidInput("a play needs at least one step".into()));
    }
    if learners.len() != game.player_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} learners for a {}-player game",
            learners.len(),
            game.player_count()
        )));
    }
    let n = game.player_count();
    let mut play = PlayRecord::with_capacity(game.action_counts(), horizon);
    let mut joint = vec![0; n];
    let mut payoffs = vec![0.0; n];
    for _ in 0..horizon {
        let strategies: Vec<Vec<f64>> = learners
            .iter()
            .map(|l| match recording {
                StrategyRecording::Policy => l.current_strategy(),
                StrategyRecording::Behaviour => l.behaviour_strategy(),
            })
            .collect();
        for (slot, learner) in joint.iter_mut().zip(learners.iter_mut()) {
            *slot = learner.select_action();
        }
        let idx = game.joint_index(&joint);
        for (i, r) in payoffs.iter_mut().enumerate() {
            *r = game.payoffs(i)[idx];
        }
        play.push(&strategies, &joint, &payoffs);
        for (i, learner) in learners.iter_mut().enumerate() {
            let obs = Observation::for_player(i, &joint, &payoffs, learner.observation_level());
            learner.observe(&obs)?;
        }
    }
    Ok(play)
}

/// All orderings of `0..n`, lexicographic.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !prefix.contains(&i) {
                prefix.push(i);
                extend(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), n, &mut out);
    out
}

/// One stored play with its metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub suite: SuiteKind,
    pub game_id: usize,
    /// Team as configured, before seating.
    pub team: Vec<String>,
    /// Learner name per seat.
    pub seating: Vec<String>,
    pub sweep: usize,
    pub permutation: usize,
    pub seed: u64,
    /// Seat whose metrics count for its algorithm; `None` means every seat.
    pub focal_seat: Option<usize>,
    pub report: Option<MetricsReport>,
    pub error: Option<String>,
    pub diagnostics: Vec<String>,
}

impl ResultRow {
    pub fn play_index(&self) -> usize {
        self.sweep * permutations(self.seating.len()).len() + self.permutation
    }

    /// Seats whose metrics are attributed to their algorithm.
    pub fn scored_seats(&self) -> Vec<usize> {
        match self.focal_seat {
            Some(s) => vec![s],
            None => (0..self.seating.len()).collect(),
        }
    }
}

struct PlayJob<'a> {
    game_id: usize,
    analysis: &'a GameAnalysis,
    team: Vec<String>,
    seating: Vec<String>,
    sweep: usize,
    permutation: usize,
    focal_seat: Option<usize>,
}

fn execute(job: PlayJob<'_>, suite: SuiteKind, config: &SuiteConfig, registry: &LearnerRegistry) -> ResultRow {
    let seed = derive_seed(
        config.seed,
        &[
            suite.as_str(),
            &job.game_id.to_string(),
            &job.team.join(","),
            &job.permutation.to_string(),
            &job.sweep.to_string(),
        ],
    );
    let game = job.analysis.game();
    let outcome = build_seating(registry, &job.seating, game.action_counts(), &config.learner_config(), seed)
        .and_then(|mut learners| {
            let play = run_play(game, &mut learners, config.repetitions, config.recording)?;
            let report = job.analysis.evaluate(&play)?;
            let diagnostics = learners
                .iter()
                .enumerate()
                .flat_map(|(seat, l)| l.diagnostics().into_iter().map(move |d| format!("seat {seat}: {d}")))
                .collect();
            Ok((report, diagnostics))
        });
    let (report, error, diagnostics) = match outcome {
        Ok((r, d)) => (Some(r), None, d),
        Err(e) => (None, Some(e.to_string()), Vec::new()),
    };
    ResultRow {
        suite,
        game_id: job.game_id,
        team: job.team,
        seating: job.seating,
        sweep: job.sweep,
        permutation: job.permutation,
        seed,
        focal_seat: job.focal_seat,
        report,
        error,
        diagnostics,
    }
}

/// Jobs for one sweep: every seating order of `team`.
fn sweep_jobs<'a>(analysis: &'a GameAnalysis, game_id: usize, team: &[String], sweep: usize) -> Vec<PlayJob<'a>> {
    permutations(team.len())
        .into_iter()
        .enumerate()
        .map(|(p, perm)| PlayJob {
            game_id,
            analysis,
            team: team.to_vec(),
            seating: perm.iter().map(|&i| team[i].clone()).collect(),
            sweep,
            permutation: p,
            focal_seat: None,
        })
        .collect()
}

/// One sweep: a play for every seating order of the team.
pub fn run_sweep(
    game: &RepeatedGame,
    game_id: usize,
    team: &[String],
    sweep: usize,
    config: &SuiteConfig,
    registry: &LearnerRegistry,
) -> Result<Vec<ResultRow>> {
    if team.len() != game.player_count() {
        return Err(Error::DimensionMismatch(format!(
            "team of {} for a {}-player game",
            team.len(),
            game.player_count()
        )));
    }
    let analysis = GameAnalysis::new(game)?;
    Ok(sweep_jobs(&analysis, game_id, team, sweep)
        .into_iter()
        .map(|j| execute(j, config.suite, config, registry))
        .collect())
}

/// The games of a pairwise suite in enumeration order.
pub fn suite_games(kind: SuiteKind) -> Result<Vec<RepeatedGame>> {
    let class = match kind {
        SuiteKind::NoConflict => GameClass::NoConflict,
        SuiteKind::Conflict => GameClass::Conflict,
        SuiteKind::Random => {
            return Err(Error::Config("the random suite has no fixed game list".into()));
        }
    };
    Ok(enumerate_distinct_2x2(ClassFilter::Only(class))
        .into_iter()
        .map(|g| g.into_game())
        .collect())
}

/// Unordered pairs of roster entries, self-pairs included.
pub fn roster_pairs(roster: &[String]) -> Vec<Vec<String>> {
    let mut pairs = Vec::new();
    for i in 0..roster.len() {
        for j in i..roster.len() {
            pairs.push(vec![roster[i].clone(), roster[j].clone()]);
        }
    }
    pairs
}

fn check_roster(config: &SuiteConfig, registry: &LearnerRegistry) -> Result<()> {
    config.validate()?;
    for name in &config.roster {
        if !registry.contains(name) {
            return Err(Error::UnknownLearner(name.clone()));
        }
    }
    Ok(())
}

fn analyse_all(games: &[RepeatedGame]) -> Result<Vec<GameAnalysis>> {
    games.par_iter().map(GameAnalysis::new).collect()
}

/// Every unordered pair on every game of the suite class, all sweeps.
pub fn run_pairwise_suite(config: &SuiteConfig, registry: &LearnerRegistry) -> Result<Vec<ResultRow>> {
    check_roster(config, registry)?;
    let games = suite_games(config.suite)?;
    let analyses = analyse_all(&games)?;
    let mut jobs = Vec::new();
    for team in roster_pairs(&config.roster) {
        for (game_id, analysis) in analyses.iter().enumerate() {
            for sweep in 0..config.sweeps {
                jobs.extend(sweep_jobs(analysis, game_id, &team, sweep));
            }
        }
    }
    Ok(jobs
        .into_par_iter()
        .map(|j| execute(j, config.suite, config, registry))
        .collect())
}

/// Random 2x2x2 games and the partner team drawn for each.
pub fn adhoc_draws(config: &SuiteConfig) -> Result<Vec<(RepeatedGame, Vec<String>)>> {
    let mut game_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &["random", "games"]));
    let mut team_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &["random", "teams"]));
    (0..config.games)
        .map(|_| {
            let game = random_strictly_ordinal(&[2, 2, 2], &mut game_rng)?.into_game();
            let team = (0..2)
                .map(|_| config.roster[team_rng.gen_range(0..config.roster.len())].clone())
                .collect();
            Ok((game, team))
        })
        .collect()
}

/// Each roster algorithm joins the drawn pair as player 1 on every game.
/// Only player 1's metrics are scored.
pub fn run_adhoc_procedure(config: &SuiteConfig, registry: &LearnerRegistry) -> Result<Vec<ResultRow>> {
    check_roster(config, registry)?;
    if config.suite != SuiteKind::Random {
        return Err(Error::Config("the ad hoc procedure runs the random suite".into()));
    }
    let draws = adhoc_draws(config)?;
    let games: Vec<RepeatedGame> = draws.iter().map(|(g, _)| g.clone()).collect();
    let analyses = analyse_all(&games)?;
    let mut jobs = Vec::new();
    for (game_id, ((_, partners), analysis)) in draws.iter().zip(&analyses).enumerate() {
        for name in &config.roster {
            let mut seating = vec![name.clone()];
            seating.extend(partners.iter().cloned());
            jobs.push(PlayJob {
                game_id,
                analysis,
                team: seating.clone(),
                seating,
                sweep: 0,
                permutation: 0,
                focal_seat: Some(0),
            });
        }
    }
    Ok(jobs
        .into_par_iter()
        .map(|j| execute(j, SuiteKind::Random, config, registry))
        .collect())
}

/// Dispatches on the configured suite.
pub fn run_suite(config: &SuiteConfig, registry: &LearnerRegistry) -> Result<Vec<ResultRow>> {
    match config.suite {
        SuiteKind::Random => run_adhoc_procedure(config, registry),
        _ => run_pairwise_suite(config, registry),
    }
}
