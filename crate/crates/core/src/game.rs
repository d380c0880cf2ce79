//! Repeated matrix games, strategy profiles and the strictly ordinal game catalogue.
//!
//! Payoff tensors are stored flat, one vector per player ("player-major"). Inside a
//! player's vector the joint action `(a_1, ..., a_n)` sits at the row-major index
//! `((a_1 * m_2) + a_2) * m_3 + a_3 ...`, so the last player's action varies fastest.
//! Canonical forms and serialized game documents both rely on this order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for probability vectors summing to one.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedGame {
    action_counts: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
}

impl RepeatedGame {
    pub fn new(action_counts: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if action_counts.len() < 2 {
            return Err(Error::InvalidGame(format!(
                "need at least two players, got {}",
                action_counts.len()
            )));
        }
        if let Some(m) = action_counts.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidGame(format!(
                "every player needs at least two actions, got {m}"
            )));
        }
        if payoffs.len() != action_counts.len() {
            return Err(Error::InvalidGame(format!(
                "{} payoff tensors for {} players",
                payoffs.len(),
                action_counts.len()
            )));
        }
        let k: usize = action_counts.iter().product();
        for (i, u) in payoffs.iter().enumerate() {
            if u.len() != k {
                return Err(Error::InvalidGame(format!(
                    "player {i} has {} payoffs, expected {k}",
                    u.len()
                )));
            }
            if u.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidGame(format!("player {i} has a non-finite payoff")));
            }
        }
        Ok(Self {
            action_counts,
            payoffs,
        })
    }

    /// Two-player game from row-major payoff matrices, `u1[r][c]` and `u2[r][c]`.
    pub fn bimatrix(u1: &[&[f64]], u2: &[&[f64]]) -> Result<Self> {
        let rows = u1.len();
        let cols = u1.first().map_or(0, |r| r.len());
        let flat = |u: &[&[f64]]| -> Result<Vec<f64>> {
            if u.len() != rows || u.iter().any(|r| r.len() != cols) {
                return Err(Error::InvalidGame("ragged payoff matrix".into()));
            }
            Ok(u.iter().flat_map(|r| r.iter().copied()).collect())
        };
        Self::new(vec![rows, cols], vec![flat(u1)?, flat(u2)?])
    }

    pub fn player_count(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    /// Number of joint actions, `k = m_1 * ... * m_n`.
    pub fn joint_action_count(&self) -> usize {
        self.payoffs[0].len()
    }

    /// Flat payoff tensor of one player.
    pub fn payoffs(&self, player: usize) -> &[f64] {
        &self.payoffs[player]
    }

    pub fn joint_index(&self, joint: &[usize]) -> usize {
        debug_assert_eq!(joint.len(), self.action_counts.len());
        joint
            .iter()
            .zip(&self.action_counts)
            .fold(0, |idx, (&a, &m)| {
                debug_assert!(a < m);
                idx * m + a
            })
    }

    pub fn joint_action(&self, mut index: usize) -> Vec<usize> {
        let mut joint = vec![0; self.action_counts.len()];
        for (slot, &m) in joint.iter_mut().zip(&self.action_counts).rev() {
            *slot = index % m;
            index /= m;
        }
        joint
    }

    pub fn payoff(&self, player: usize, joint: &[usize]) -> f64 {
        self.payoffs[player][self.joint_index(joint)]
    }

    /// Payoff point `(u_1(a), ..., u_n(a))` of the joint action at a flat index.
    pub fn payoff_point(&self, index: usize) -> Vec<f64> {
        self.payoffs.iter().map(|u| u[index]).collect()
    }

    /// All `k` payoff points in flat joint-action order.
    pub fn payoff_points(&self) -> Vec<Vec<f64>> {
        (0..self.joint_action_count())
            .map(|idx| self.payoff_point(idx))
            .collect()
    }

    pub fn is_strictly_ordinal(&self) -> bool {
        let k = self.joint_action_count();
        self.payoffs.iter().all(|u| is_rank_permutation(u, k))
    }

    /// Index of the player's unique best joint action, if it is unique.
    fn unique_argmax(&self, player: usize) -> Option<usize> {
        let u = &self.payoffs[player];
        let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut hits = u.iter().enumerate().filter(|(_, &x)| x == max);
        let first = hits.next().map(|(i, _)| i);
        if hits.next().is_some() {
            None
        } else {
            first
        }
    }
}

fn is_rank_permutation(u: &[f64], k: usize) -> bool {
    let mut seen = vec![false; k];
    for &x in u {
        if x.fract() != 0.0 || x < 1.0 || x > k as f64 {
            return false;
        }
        let r = x as usize - 1;
        if seen[r] {
            return false;
        }
        seen[r] = true;
    }
    true
}

/// A game whose payoffs, per player, are exactly the ranks `1..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrictlyOrdinalGame(RepeatedGame);

impl StrictlyOrdinalGame {
    pub fn new(game: RepeatedGame) -> Result<Self> {
        if !game.is_strictly_ordinal() {
            return Err(Error::NotStrictlyOrdinal(
                "every player's payoffs must be a permutation of 1..=k".into(),
            ));
        }
        Ok(Self(game))
    }

    pub fn max_rank(&self) -> usize {
        self.0.joint_action_count()
    }

    pub fn as_game(&self) -> &RepeatedGame {
        &self.0
    }

    pub fn into_game(self) -> RepeatedGame {
        self.0
    }
}

impl Deref for StrictlyOrdinalGame {
    type Target = RepeatedGame;

    fn deref(&self) -> &RepeatedGame {
        &self.0
    }
}

impl TryFrom<RepeatedGame> for StrictlyOrdinalGame {
    type Error = Error;

    fn try_from(game: RepeatedGame) -> Result<Self> {
        Self::new(game)
    }
}

/// Per-player mixed strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    distributions: Vec<Vec<f64>>,
}

impl StrategyProfile {
    pub fn new(distributions: Vec<Vec<f64>>) -> Result<Self> {
        for (i, d) in distributions.iter().enumerate() {
            validate_distribution(d).map_err(|e| {
                Error::InvalidInput(format!("strategy of player {i}: {e}"))
            })?;
        }
        Ok(Self { distributions })
    }

    pub fn pure(action_counts: &[usize], joint: &[usize]) -> Self {
        let distributions = action_counts
            .iter()
            .zip(joint)
            .map(|(&m, &a)| point_mass(m, a))
            .collect();
        Self { distributions }
    }

    pub fn uniform(action_counts: &[usize]) -> Self {
        let distributions = action_counts
            .iter()
            .map(|&m| vec![1.0 / m as f64; m])
            .collect();
        Self { distributions }
    }

    /// Two-action profile from each player's probability of playing action 0.
    pub fn from_first_action_probs(probs: &[f64]) -> Self {
        Self {
            distributions: probs.iter().map(|&p| vec![p, 1.0 - p]).collect(),
        }
    }

    pub fn player_count(&self) -> usize {
        self.distributions.len()
    }

    pub fn player(&self, i: usize) -> &[f64] {
        &self.distributions[i]
    }

    pub fn distributions(&self) -> &[Vec<f64>] {
        &self.distributions
    }

    pub fn with_player(&self, i: usize, strategy: Vec<f64>) -> Self {
        let mut distributions = self.distributions.clone();
        distributions[i] = strategy;
        Self { distributions }
    }

    pub fn matches(&self, game: &RepeatedGame) -> bool {
        self.distributions.len() == game.player_count()
            && self
                .distributions
                .iter()
                .zip(game.action_counts())
                .all(|(d, &m)| d.len() == m)
    }

    /// Probability of the joint action at a flat index.
    pub fn joint_probability(&self, game: &RepeatedGame, index: usize) -> f64 {
        game.joint_action(index)
            .iter()
            .zip(&self.distributions)
            .map(|(&a, d)| d[a])
            .product()
    }

    /// The pure joint action, if every player's strategy is a point mass.
    pub fn as_pure(&self) -> Option<Vec<usize>> {
        self.distributions
            .iter()
            .map(|d| d.iter().position(|&p| p == 1.0))
            .collect()
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .distributions
            .iter()
            .map(|d| {
                let xs: Vec<String> = d.iter().map(|p| format!("{p:.4}")).collect();
                format!("({})", xs.join(", "))
            })
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

pub fn point_mass(m: usize, a: usize) -> Vec<f64> {
    let mut d = vec![0.0; m];
    d[a] = 1.0;
    d
}

pub fn validate_distribution(d: &[f64]) -> std::result::Result<(), String> {
    if d.is_empty() {
        return Err("empty distribution".into());
    }
    if let Some(p) = d.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(format!("invalid probability {p}"));
    }
    let total: f64 = d.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(format!("probabilities sum to {total}"));
    }
    Ok(())
}

/// Exact multilinear expected payoff `U_i(pi)`.
pub fn expected_payoff(game: &RepeatedGame, profile: &StrategyProfile, player: usize) -> Result<f64> {
    if !profile.matches(game) {
        return Err(Error::DimensionMismatch(format!(
            "profile shape does not match action counts {:?}",
            game.action_counts()
        )));
    }
    if player >= game.player_count() {
        return Err(Error::DimensionMismatch(format!("no player {player}")));
    }
    Ok(expected_payoff_unchecked(game, profile, player))
}

pub(crate) fn expected_payoff_unchecked(
    game: &RepeatedGame,
    profile: &StrategyProfile,
    player: usize,
) -> f64 {
    let u = game.payoffs(player);
    (0..game.joint_action_count())
        .map(|idx| profile.joint_probability(game, idx) * u[idx])
        .sum()
}

/// Expected payoff of every player under the profile.
pub fn expected_payoffs(game: &RepeatedGame, profile: &StrategyProfile) -> Result<Vec<f64>> {
    if !profile.matches(game) {
        return Err(Error::DimensionMismatch(format!(
            "profile shape does not match action counts {:?}",
            game.action_counts()
        )));
    }
    let mut out = vec![0.0; game.player_count()];
    for idx in 0..game.joint_action_count() {
        let p = profile.joint_probability(game, idx);
        if p == 0.0 {
            continue;
        }
        for (i, slot) in out.iter_mut().enumerate() {
            *slot += p * game.payoffs(i)[idx];
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GameClass {
    NoConflict,
    Conflict,
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameClass::NoConflict => f.write_str("no-conflict"),
            GameClass::Conflict => f.write_str("conflict"),
        }
    }
}

/// Which classes [`enumerate_distinct_2x2`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassFilter {
    All,
    Only(GameClass),
}

impl ClassFilter {
    pub fn accepts(self, class: GameClass) -> bool {
        match self {
            ClassFilter::All => true,
            ClassFilter::Only(c) => c == class,
        }
    }
}

/// No-conflict iff all players' rank-k cells are the same joint action.
pub fn classify(game: &StrictlyOrdinalGame) -> GameClass {
    let first = game.unique_argmax(0);
    let all_same = (1..game.player_count()).all(|i| game.unique_argmax(i) == first);
    if all_same {
        GameClass::NoConflict
    } else {
        GameClass::Conflict
    }
}

/// Classify an arbitrary game, rejecting payoffs that are not strictly ordinal.
pub fn classify_game(game: &RepeatedGame) -> Result<GameClass> {
    let ordinal = StrictlyOrdinalGame::new(game.clone())?;
    Ok(classify(&ordinal))
}

fn require_2x2(game: &RepeatedGame) -> Result<()> {
    if game.action_counts() != [2, 2] {
        return Err(Error::UnsupportedShape(format!(
            "expected a 2x2 game, got {:?}",
            game.action_counts()
        )));
    }
    Ok(())
}

/// Apply a structural transformation to a 2x2 game. The player swap is applied
/// first, then the row and column swaps.
pub fn transform_2x2(
    game: &RepeatedGame,
    row_swap: bool,
    col_swap: bool,
    player_swap: bool,
) -> Result<RepeatedGame> {
    require_2x2(game)?;
    let src = |i: usize, r: usize, c: usize| game.payoffs(i)[r * 2 + c];
    let mut payoffs = vec![vec![0.0; 4]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let (sr, sc) = (r ^ row_swap as usize, c ^ col_swap as usize);
            for (i, u) in payoffs.iter_mut().enumerate() {
                u[r * 2 + c] = if player_swap {
                    src(1 - i, sc, sr)
                } else {
                    src(i, sr, sc)
                };
            }
        }
    }
    RepeatedGame::new(vec![2, 2], payoffs)
}

/// All eight images of a 2x2 game under row, column and player swaps.
pub fn orbit_2x2(game: &RepeatedGame) -> Result<Vec<RepeatedGame>> {
    let mut out = Vec::with_capacity(8);
    for player_swap in [false, true] {
        for row_swap in [false, true] {
            for col_swap in [false, true] {
                out.push(transform_2x2(game, row_swap, col_swap, player_swap)?);
            }
        }
    }
    Ok(out)
}

/// Flattened key `(u_1 tensor, u_2 tensor)` used for lexicographic comparison.
fn flat_key(game: &RepeatedGame) -> Vec<i64> {
    (0..game.player_count())
        .flat_map(|i| game.payoffs(i).iter().map(|&x| x as i64))
        .collect()
}

/// Lexicographically minimal member of the game's orbit, comparing the flattened
/// `(u_1, u_2)` payoff vectors.
pub fn canonical_form(game: &StrictlyOrdinalGame) -> Result<StrictlyOrdinalGame> {
    let best = orbit_2x2(game)?
        .into_iter()
        .min_by_key(flat_key)
        .expect("orbit is nonempty");
    StrictlyOrdinalGame::new(best)
}

fn permutations(items: &[f64]) -> Vec<Vec<f64>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// One representative per structural equivalence class of strictly ordinal 2x2
/// games, sorted by canonical key.
pub fn enumerate_distinct_2x2(filter: ClassFilter) -> Vec<StrictlyOrdinalGame> {
    let ranks = permutations(&[1.0, 2.0, 3.0, 4.0]);
    let mut classes: BTreeMap<Vec<i64>, StrictlyOrdinalGame> = BTreeMap::new();
    for u1 in &ranks {
        for u2 in &ranks {
            let game = RepeatedGame::new(vec![2, 2], vec![u1.clone(), u2.clone()])
                .and_then(StrictlyOrdinalGame::new)
                .expect("rank permutations form a strictly ordinal game");
            let canon = canonical_form(&game).expect("2x2 shape");
            classes.entry(flat_key(&canon)).or_insert(canon);
        }
    }
    classes
        .into_values()
        .filter(|g| filter.accepts(classify(g)))
        .collect()
}

/// Random strictly ordinal game: every player's tensor is an independent uniform
/// permutation of `1..=k`.
pub fn random_strictly_ordinal<R: Rng + ?Sized>(
    action_counts: &[usize],
    rng: &mut R,
) -> Result<StrictlyOrdinalGame> {
    let k: usize = action_counts.iter().product();
    let payoffs = (0..action_counts.len())
        .map(|_| {
            let mut ranks: Vec<f64> = (1..=k).map(|r| r as f64).collect();
            ranks.shuffle(rng);
            ranks
        })
        .collect();
    StrictlyOrdinalGame::new(RepeatedGame::new(action_counts.to_vec(), payoffs)?)
}

/// On-disk form of a game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub players: usize,
    pub action_counts: Vec<usize>,
    pub payoffs: Vec<Vec<f64>>,
}

impl From<&RepeatedGame> for GameDocument {
    fn from(game: &RepeatedGame) -> Self {
        Self {
            players: game.player_count(),
            action_counts: game.action_counts().to_vec(),
            payoffs: game.payoffs.clone(),
        }
    }
}

impl TryFrom<GameDocument> for RepeatedGame {
    type Error = Error;

    fn try_from(doc: GameDocument) -> Result<Self> {
        if doc.players != doc.action_counts.len() {
            return Err(Error::InvalidGame(format!(
                "players = {} but {} action counts",
                doc.players,
                doc.action_counts.len()
            )));
        }
        RepeatedGame::new(doc.action_counts, doc.payoffs)
    }
}

pub fn game_to_json(game: &RepeatedGame) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&GameDocument::from(game))?;
    s.push('\n');
    Ok(s)
}

pub fn game_from_json(text: &str) -> Result<RepeatedGame> {
    let doc: GameDocument = serde_json::from_str(text)?;
    doc.try_into()
}

/// The 2x2 example game with payoff pairs `(1,1) (4,1) / (1,4) (3,3)`.
pub fn figure_one_game() -> RepeatedGame {
    RepeatedGame::bimatrix(&[&[1.0, 4.0], &[1.0, 3.0]], &[&[1.0, 1.0], &[4.0, 3.0]])
        .expect("valid game")
}

/// Ordinal Prisoner's Dilemma, action 0 = cooperate.
pub fn prisoners_dilemma() -> RepeatedGame {
    RepeatedGame::bimatrix(&[&[3.0, 1.0], &[4.0, 2.0]], &[&[3.0, 4.0], &[1.0, 2.0]])
        .expect("valid game")
}

/// Ordinal Chicken, action 0 = swerve.
pub fn chicken() -> RepeatedGame {
    RepeatedGame::bimatrix(&[&[3.0, 2.0], &[4.0, 1.0]], &[&[3.0, 4.0], &[2.0, 1.0]])
        .expect("valid game")
}
