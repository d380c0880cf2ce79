//! Exact and numerical solvers for small games.

mod nash;
mod optimize;
mod polytope;

pub use nash::{
    equilibrium_violation, find_nash, find_nash_2x2, find_nash_2x2x2, Equilibrium,
    EquilibriumList, EQUILIBRIUM_TOLERANCE,
};
pub(crate) use nash::profile_order;
pub use optimize::{fairness, maximize_fairness, maximize_welfare, welfare, Optimum};
pub use polytope::{
    build_payoff_polytope, distance_to_pareto_front, pareto_front, Constraint, Face, FrontFace,
    ParetoFront, PayoffPolytope, GEOMETRY_TOLERANCE,
};

use crate::game::{expected_payoff_unchecked, point_mass, RepeatedGame, StrategyProfile};

/// Best own pure action against the other players' fixed strategies, and its value.
///
/// The objective is linear on the player's simplex, so a vertex is optimal.
/// Ties go to the lowest action index. The player's own entry in `others` is
/// ignored.
pub fn best_pure_response(
    game: &RepeatedGame,
    player: usize,
    others: &StrategyProfile,
) -> (usize, f64) {
    let m = game.action_counts()[player];
    let mut best = (0, f64::NEG_INFINITY);
    for a in 0..m {
        let profile = others.with_player(player, point_mass(m, a));
        let v = expected_payoff_unchecked(game, &profile, player);
        if v > best.1 {
            best = (a, v);
        }
    }
    best
}
