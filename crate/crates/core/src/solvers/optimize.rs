//! Maximum social welfare and fairness over all strategy profiles.

use crate::error::{Error, Result};
use crate::game::{expected_payoffs, RepeatedGame, StrategyProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub profile: StrategyProfile,
    pub value: f64,
}

pub fn welfare(payoffs: &[f64]) -> f64 {
    payoffs.iter().sum()
}

pub fn fairness(payoffs: &[f64]) -> f64 {
    payoffs.iter().product()
}

fn require_binary(game: &RepeatedGame) -> Result<()> {
    let n = game.player_count();
    if !(2..=3).contains(&n) || game.action_counts().iter().any(|&m| m != 2) {
        return Err(Error::UnsupportedShape(format!(
            "welfare/fairness optimisation supports 2x2 and 2x2x2, got {:?}",
            game.action_counts()
        )));
    }
    Ok(())
}

/// Welfare is multilinear in the players' mixing probabilities, so the maximum
/// over the product of simplices sits at a pure joint action.
pub fn maximize_welfare(game: &RepeatedGame) -> Result<Optimum> {
    require_binary(game)?;
    let (best, value) = (0..game.joint_action_count())
        .map(|idx| (idx, welfare(&game.payoff_point(idx))))
        .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    Ok(Optimum {
        profile: StrategyProfile::pure(game.action_counts(), &game.joint_action(best)),
        value,
    })
}

fn fairness_at(game: &RepeatedGame, p: &[f64]) -> f64 {
    let profile = StrategyProfile::from_first_action_probs(p);
    fairness(&expected_payoffs(game, &profile).expect("binary profile matches"))
}

const GOLDEN_TOL: f64 = 1e-10;
const GRID_STEPS: usize = 100;

/// Maximise `f` on [0, 1] by golden-section search; endpoints are compared too
/// because the objective need not be unimodal.
fn golden_section(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [(0.0, f(0.0)), (1.0, f(1.0)), (mid, f(mid))]
        .into_iter()
        .fold((0.0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
}

/// Cyclic coordinate ascent until a full sweep gains less than the tolerance.
fn coordinate_ascent(game: &RepeatedGame, mut p: Vec<f64>) -> (Vec<f64>, f64) {
    let mut value = fairness_at(game, &p);
    for _ in 0..200 {
        let before = value;
        for i in 0..p.len() {
            let (x, v) = golden_section(|x| {
                let mut q = p.clone();
                q[i] = x;
                fairness_at(game, &q)
            });
            if v > value {
                p[i] = x;
                value = v;
            }
        }
        if value - before < GOLDEN_TOL {
            break;
        }
    }
    (p, value)
}

/// The product objective is not multilinear, so interior optima exist. Runs
/// coordinate ascent from every pure profile and the uniform profile, and from
/// the best point of a 0.01 grid over the mixing cube.
pub fn maximize_fairness(game: &RepeatedGame) -> Result<Optimum> {
    require_binary(game)?;
    let n = game.player_count();
    let mut starts: Vec<Vec<f64>> = (0..1usize << n)
        .map(|bits| (0..n).map(|i| ((bits >> i) & 1) as f64).collect())
        .collect();
    starts.push(vec![0.5; n]);

    let mut grid_best = (vec![0.0; n], f64::NEG_INFINITY);
    let total = (GRID_STEPS + 1).pow(n as u32);
    for code in 0..total {
        let mut rest = code;
        let p: Vec<f64> = (0..n)
            .map(|_| {
                let s = rest % (GRID_STEPS + 1);
                rest /= GRID_STEPS + 1;
                s as f64 / GRID_STEPS as f64
            })
            .collect();
        let v = fairness_at(game, &p);
        if v > grid_best.1 {
            grid_best = (p, v);
        }
    }
    starts.push(grid_best.0.clone());

    let mut best = grid_best;
    for start in starts {
        let (p, v) = coordinate_ascent(game, start);
        if v > best.1 {
            best = (p, v);
        }
    }
    Ok(Optimum {
        profile: StrategyProfile::from_first_action_probs(&best.0),
        value: best.1,
    })
}
