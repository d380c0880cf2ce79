//! Nash equilibria of games where every player has two actions (2x2 and 2x2x2).
//!
//! Support enumeration: each player is either pure on one action or mixing over
//! both. Profiles are parameterised by `p[i]`, player i's probability of action 0.
//! A mixing player must be indifferent, which is a condition on the others.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::game::{expected_payoff_unchecked, RepeatedGame, StrategyProfile};

/// Maximum unilateral gain allowed for a listed equilibrium.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-6;

const INDIFFERENCE_TOL: f64 = 1e-12;
const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub profile: StrategyProfile,
    /// Largest gain any player gets from a unilateral deviation.
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EquilibriumList {
    pub equilibria: Vec<Equilibrium>,
    /// Payoff ties made a continuum of equilibria possible; only extreme points
    /// are listed.
    pub degenerate: bool,
    /// No verified equilibrium was found and the single entry is a uniform
    /// fallback with its (too large) violation.
    pub failed: bool,
}

impl EquilibriumList {
    pub fn len(&self) -> usize {
        self.equilibria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equilibria.is_empty()
    }

    pub fn profiles(&self) -> impl Iterator<Item = &StrategyProfile> {
        self.equilibria.iter().map(|e| &e.profile)
    }
}

/// Largest gain any single player can get by switching to a pure action.
pub fn equilibrium_violation(game: &RepeatedGame, profile: &StrategyProfile) -> f64 {
    (0..game.player_count())
        .map(|i| {
            let current = expected_payoff_unchecked(game, profile, i);
            let (_, best) = super::best_pure_response(game, i, profile);
            (best - current).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// `U_i(action 0) - U_i(action 1)` with the others playing `p`.
fn gain_of_first_action(game: &RepeatedGame, player: usize, p: &[f64]) -> f64 {
    let u = game.payoffs(player);
    let n = p.len();
    let mut diff = 0.0;
    for (idx, &value) in u.iter().enumerate() {
        // every player has two actions, so bit n-1-j of idx is player j's action
        let mut weight = if (idx >> (n - 1 - player)) & 1 == 0 { 1.0 } else { -1.0 };
        for (j, &pj) in p.iter().enumerate() {
            if j != player {
                weight *= if (idx >> (n - 1 - j)) & 1 == 0 { pj } else { 1.0 - pj };
            }
        }
        diff += weight * value;
    }
    diff
}

/// Coefficients `(a, b, c, d)` of `gain_of_first_action(player)` as the
/// bilinear form `a + b x + c y + d x y` in the two other players' first-action
/// probabilities `x` (lower index) and `y`.
fn bilinear_gain(game: &RepeatedGame, player: usize) -> [f64; 4] {
    let others: Vec<usize> = (0..3).filter(|&j| j != player).collect();
    let at = |x: f64, y: f64| {
        let mut p = [0.0; 3];
        p[others[0]] = x;
        p[others[1]] = y;
        gain_of_first_action(game, player, &p)
    };
    let (f00, f10, f01, f11) = (at(0.0, 0.0), at(1.0, 0.0), at(0.0, 1.0), at(1.0, 1.0));
    [f00, f10 - f00, f01 - f00, f11 - f10 - f01 + f00]
}

/// Real roots of `a t^2 + b t + c`; `None` when the polynomial vanishes.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Option<Vec<f64>> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale < 1e-12 {
        return None;
    }
    let (a, b, c) = (a / scale, b / scale, c / scale);
    if a.abs() < 1e-12 {
        return Some(if b.abs() < 1e-12 { Vec::new() } else { vec![-c / b] });
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-12 {
        return Some(Vec::new());
    }
    let sq = disc.max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = vec![q / a];
    if q.abs() > 1e-300 {
        roots.push(c / q);
    }
    Some(roots)
}

/// Writes `gain_of_first_action(player)` as `c0 + c1 * p[var]` with the rest of `p` fixed.
fn linear_in(game: &RepeatedGame, player: usize, var: usize, p: &[f64]) -> (f64, f64) {
    let mut q = p.to_vec();
    q[var] = 0.0;
    let at0 = gain_of_first_action(game, player, &q);
    q[var] = 1.0;
    let at1 = gain_of_first_action(game, player, &q);
    (at0, at1 - at0)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Support {
    First,
    Second,
    Both,
}

struct Search<'a> {
    game: &'a RepeatedGame,
    candidates: Vec<Vec<f64>>,
    degenerate: bool,
}

impl<'a> Search<'a> {
    fn new(game: &'a RepeatedGame) -> Self {
        Self {
            game,
            candidates: Vec::new(),
            degenerate: false,
        }
    }

    fn run(&mut self) {
        let n = self.game.player_count();
        let choices = [Support::First, Support::Second, Support::Both];
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut rest = code;
            let supports: Vec<Support> = (0..n)
                .map(|_| {
                    let s = choices[rest % 3];
                    rest /= 3;
                    s
                })
                .collect();
            self.solve_support(&supports);
        }
    }

    fn solve_support(&mut self, supports: &[Support]) {
        let mut p: Vec<f64> = supports
            .iter()
            .map(|s| match s {
                Support::First => 1.0,
                Support::Second => 0.0,
                Support::Both => 0.5,
            })
            .collect();
        let mixed: Vec<usize> = (0..supports.len())
            .filter(|&i| supports[i] == Support::Both)
            .collect();
        match mixed.len() {
            0 => self.candidates.push(p),
            1 => self.one_mixed(mixed[0], p),
            2 => {
                let (i, j) = (mixed[0], mixed[1]);
                // i's indifference pins down j's mix, and vice versa
                let (a0, a1) = linear_in(self.game, i, j, &p);
                let (b0, b1) = linear_in(self.game, j, i, &p);
                if a1.abs() <= INDIFFERENCE_TOL || b1.abs() <= INDIFFERENCE_TOL {
                    if (a1.abs() <= INDIFFERENCE_TOL && a0.abs() <= INDIFFERENCE_TOL)
                        || (b1.abs() <= INDIFFERENCE_TOL && b0.abs() <= INDIFFERENCE_TOL)
                    {
                        self.degenerate = true;
                    }
                    return;
                }
                p[j] = -a0 / a1;
                p[i] = -b0 / b1;
                if in_unit(p[i]) && in_unit(p[j]) {
                    p[i] = p[i].clamp(0.0, 1.0);
                    p[j] = p[j].clamp(0.0, 1.0);
                    self.candidates.push(p);
                }
            }
            _ => {
                if !self.all_mixed_closed_form() {
                    self.all_mixed(&mixed, p);
                }
            }
        }
    }

    /// Player `i` mixes while everyone else is pure. Only possible when `i` is
    /// exactly indifferent; the pure players' best-response conditions then cut
    /// an interval of admissible mixes whose endpoints are listed.
    fn one_mixed(&mut self, i: usize, p: Vec<f64>) {
        if gain_of_first_action(self.game, i, &p).abs() > INDIFFERENCE_TOL {
            return;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for j in (0..p.len()).filter(|&j| j != i) {
            let sign = if p[j] == 1.0 { 1.0 } else { -1.0 };
            // need sign * (c0 + c1 * x) >= 0 for x = p[i]
            let (c0, c1) = linear_in(self.game, j, i, &p);
            let (c0, c1) = (sign * c0, sign * c1);
            if c1.abs() <= INDIFFERENCE_TOL {
                if c0 < -INDIFFERENCE_TOL {
                    return;
                }
            } else if c1 > 0.0 {
                lo = lo.max(-c0 / c1);
            } else {
                hi = hi.min(-c0 / c1);
            }
        }
        if lo > hi + INDIFFERENCE_TOL {
            return;
        }
        if hi - lo > INDIFFERENCE_TOL {
            self.degenerate = true;
        }
        for x in [lo, hi] {
            let mut q = p.clone();
            q[i] = x.clamp(0.0, 1.0);
            self.candidates.push(q);
        }
    }

    /// Three mixing players in closed form. Players 0 and 1's indifference
    /// conditions give `p1` and `p0` as ratios of affine functions of `t = p2`;
    /// substituting both into player 2's condition leaves a quadratic in `t`.
    /// Returns false for degenerate games, which need the numerical search.
    fn all_mixed_closed_form(&mut self) -> bool {
        let [a0, b0, c0, d0] = bilinear_gain(self.game, 0);
        let [a1, b1, c1, d1] = bilinear_gain(self.game, 1);
        let [a2, b2, c2, d2] = bilinear_gain(self.game, 2);
        // p1 = n1(t) / e1(t), p0 = n0(t) / e0(t), each as (constant, slope)
        let (n1, e1) = ((-a0, -c0), (b0, d0));
        let (n0, e0) = ((-a1, -c1), (b1, d1));
        let mul = |x: (f64, f64), y: (f64, f64)| [x.0 * y.0, x.0 * y.1 + x.1 * y.0, x.1 * y.1];
        let terms = [
            mul(e0, e1).map(|v| a2 * v),
            mul(n0, e1).map(|v| b2 * v),
            mul(n1, e0).map(|v| c2 * v),
            mul(n0, n1).map(|v| d2 * v),
        ];
        let coef = |k: usize| terms.iter().map(|t| t[k]).sum::<f64>();
        let Some(roots) = quadratic_roots(coef(2), coef(1), coef(0)) else {
            return false;
        };
        for t in roots {
            if !in_unit(t) {
                continue;
            }
            let (num0, den0) = (n0.0 + n0.1 * t, e0.0 + e0.1 * t);
            let (num1, den1) = (n1.0 + n1.1 * t, e1.0 + e1.1 * t);
            let free0 = den0.abs() < 1e-9 && num0.abs() < 1e-9;
            let free1 = den1.abs() < 1e-9 && num1.abs() < 1e-9;
            let p = match (free0, free1) {
                (true, true) => return false,
                // player 1 is indifferent for every p0 here; player 2's condition fixes p0
                (true, false) if den1.abs() >= 1e-9 => {
                    let p1 = num1 / den1;
                    let den = b2 + d2 * p1;
                    if den.abs() < 1e-9 {
                        return false;
                    }
                    vec![-(a2 + c2 * p1) / den, p1, t]
                }
                (false, true) if den0.abs() >= 1e-9 => {
                    let p0 = num0 / den0;
                    let den = c2 + d2 * p0;
                    if den.abs() < 1e-9 {
                        return false;
                    }
                    vec![p0, -(a2 + b2 * p0) / den, t]
                }
                // a pole: the root came from clearing denominators
                _ if den0.abs() < 1e-9 || den1.abs() < 1e-9 => continue,
                _ => vec![num0 / den0, num1 / den1, t],
            };
            if p.iter().all(|&x| in_unit(x)) {
                self.candidates.push(p.iter().map(|x| x.clamp(0.0, 1.0)).collect());
            }
        }
        true
    }

    /// Three mixing players: damped Newton on the three indifference conditions
    /// from a fixed grid of interior starting points.
    fn all_mixed(&mut self, mixed: &[usize], base: Vec<f64>) {
        let grid = [1.0 / 6.0, 0.5, 5.0 / 6.0];
        let k = mixed.len();
        let starts = grid.len().pow(k as u32);
        for code in 0..starts {
            let mut rest = code;
            let mut p = base.clone();
            for &i in mixed {
                p[i] = grid[rest % grid.len()];
                rest /= grid.len();
            }
            if let Some(root) = self.newton(mixed, p) {
                self.candidates.push(root);
            }
        }
    }

    fn residual(&self, mixed: &[usize], p: &[f64]) -> Vec<f64> {
        mixed
            .iter()
            .map(|&i| gain_of_first_action(self.game, i, p))
            .collect()
    }

    fn newton(&self, mixed: &[usize], mut p: Vec<f64>) -> Option<Vec<f64>> {
        let k = mixed.len();
        let norm = |r: &[f64]| r.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let mut r = self.residual(mixed, &p);
        for _ in 0..NEWTON_MAX_ITERS {
            if norm(&r) < NEWTON_TOL {
                break;
            }
            // each residual is affine in every other mixing player's probability
            let mut jac = vec![vec![0.0; k]; k];
            for (row, &i) in mixed.iter().enumerate() {
                for (col, &j) in mixed.iter().enumerate() {
                    if i != j {
                        jac[row][col] = linear_in(self.game, i, j, &p).1;
                    }
                }
            }
            let step = solve_linear(jac, r.clone())?;
            let mut scale = 1.0;
            let mut accepted = false;
            while scale > 1e-6 {
                let trial: Vec<f64> = {
                    let mut q = p.clone();
                    for (col, &j) in mixed.iter().enumerate() {
                        q[j] = (p[j] - scale * step[col]).clamp(-0.5, 1.5);
                    }
                    q
                };
                let tr = self.residual(mixed, &trial);
                if norm(&tr) < norm(&r) {
                    p = trial;
                    r = tr;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                return None;
            }
        }
        if norm(&r) > 1e-10 {
            return None;
        }
        if mixed.iter().all(|&i| in_unit(p[i])) {
            for &i in mixed {
                p[i] = p[i].clamp(0.0, 1.0);
            }
            Some(p)
        } else {
            None
        }
    }
}

fn in_unit(x: f64) -> bool {
    (-1e-12..=1.0 + 1e-12).contains(&x)
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Ordering used for listing and tie-breaking: lexicographic on each player's
/// mean action index, so the all-zeros pure profile comes first.
pub(crate) fn profile_order(a: &StrategyProfile, b: &StrategyProfile) -> Ordering {
    let key = |p: &StrategyProfile| -> Vec<f64> {
        p.distributions()
            .iter()
            .map(|d| d.iter().enumerate().map(|(j, x)| j as f64 * x).sum())
            .collect()
    };
    let (ka, kb) = (key(a), key(b));
    for (x, y) in ka.iter().zip(&kb) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn finish(game: &RepeatedGame, search: Search<'_>) -> EquilibriumList {
    let mut equilibria: Vec<Equilibrium> = Vec::new();
    for p in search.candidates {
        let profile = StrategyProfile::from_first_action_probs(&p);
        let violation = equilibrium_violation(game, &profile);
        if violation > EQUILIBRIUM_TOLERANCE {
            continue;
        }
        let duplicate = equilibria.iter().any(|e| {
            e.profile
                .distributions()
                .iter()
                .zip(profile.distributions())
                .all(|(a, b)| (a[0] - b[0]).abs() < 1e-9)
        });
        if !duplicate {
            equilibria.push(Equilibrium { profile, violation });
        }
    }
    equilibria.sort_by(|a, b| profile_order(&a.profile, &b.profile));
    if equilibria.is_empty() {
        let profile = StrategyProfile::uniform(game.action_counts());
        let violation = equilibrium_violation(game, &profile);
        return EquilibriumList {
            equilibria: vec![Equilibrium { profile, violation }],
            degenerate: search.degenerate,
            failed: true,
        };
    }
    EquilibriumList {
        equilibria,
        degenerate: search.degenerate,
        failed: false,
    }
}

/// All equilibria of a 2x2 game: the four pure profiles, the closed-form
/// full-support solution of the indifference equations, and (for games with
/// payoff ties) the extreme points of equilibrium segments.
pub fn find_nash_2x2(game: &RepeatedGame) -> Result<EquilibriumList> {
    if game.action_counts() != [2, 2] {
        return Err(Error::UnsupportedShape(format!(
            "expected 2x2, got {:?}",
            game.action_counts()
        )));
    }
    let mut search = Search::new(game);
    search.run();
    Ok(finish(game, search))
}

/// Equilibria of a 2x2x2 game by enumeration of the 27 support profiles.
pub fn find_nash_2x2x2(game: &RepeatedGame) -> Result<EquilibriumList> {
    if game.action_counts() != [2, 2, 2] {
        return Err(Error::UnsupportedShape(format!(
            "expected 2x2x2, got {:?}",
            game.action_counts()
        )));
    }
    let mut search = Search::new(game);
    search.run();
    Ok(finish(game, search))
}

/// Dispatch on the game's shape.
pub fn find_nash(game: &RepeatedGame) -> Result<EquilibriumList> {
    match game.action_counts() {
        [2, 2] => find_nash_2x2(game),
        [2, 2, 2] => find_nash_2x2x2(game),
        other => Err(Error::UnsupportedShape(format!(
            "equilibrium search supports 2x2 and 2x2x2, got {other:?}"
        ))),
    }
}
