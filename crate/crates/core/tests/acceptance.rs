//! Acceptance checks, one `criterion N: PASS|FAIL` line each.
//!
//! The suite bands (criteria 5 to 7) are stochastic reproduction targets. A
//! band miss is printed as FAIL with the measured values; set
//! `MALBENCH_STRICT_BANDS=1` to make it fail the run.

use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use malbench::game::{
    enumerate_distinct_2x2, figure_one_game, random_strictly_ordinal, ClassFilter, GameClass, RepeatedGame,
    StrategyProfile,
};
use malbench::harness::{paired_t_test, run_suite, summarize, AlgorithmSummary, Metric, SuiteConfig, SuiteKind};
use malbench::learners::LearnerRegistry;
use malbench::metrics::is_nash;
use malbench::report::{write_store, MANIFEST_FILE, ROWS_FILE};
use malbench::solvers::{
    build_payoff_polytope, distance_to_pareto_front, find_nash, maximize_fairness, maximize_welfare, pareto_front,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    /// Band criteria only fail the run in strict mode.
    band: bool,
}

fn exact(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail, band: false }
}

fn band(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail, band: true }
}

fn strict_bands() -> bool {
    std::env::var("MALBENCH_STRICT_BANDS").is_ok_and(|v| v == "1")
}

// Independent evaluation of a player's expected payoff by summing over every
// joint action.
fn oracle_payoff(game: &RepeatedGame, profile: &[Vec<f64>], player: usize) -> f64 {
    let counts = game.action_counts();
    let k: usize = counts.iter().product();
    let mut total = 0.0;
    for idx in 0..k {
        let mut rest = idx;
        let mut joint = vec![0; counts.len()];
        for i in (0..counts.len()).rev() {
            joint[i] = rest % counts[i];
            rest /= counts[i];
        }
        let p: f64 = joint.iter().enumerate().map(|(i, &a)| profile[i][a]).product();
        total += p * game.payoff(player, &joint);
    }
    total
}

fn oracle_deviation_gains(game: &RepeatedGame, profile: &[Vec<f64>]) -> Vec<(f64, f64)> {
    (0..game.player_count())
        .map(|i| {
            let current = oracle_payoff(game, profile, i);
            let best = (0..game.action_counts()[i])
                .map(|a| {
                    let mut dev = profile.to_vec();
                    dev[i] = (0..game.action_counts()[i]).map(|b| if a == b { 1.0 } else { 0.0 }).collect();
                    oracle_payoff(game, &dev, i)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            (current, best)
        })
        .collect()
}

fn random_profile(counts: &[usize], rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    counts
        .iter()
        .map(|&m| {
            if rng.gen_bool(0.3) {
                let a = rng.gen_range(0..m);
                (0..m).map(|b| if a == b { 1.0 } else { 0.0 }).collect()
            } else {
                let p: f64 = rng.gen();
                vec![p, 1.0 - p]
            }
        })
        .collect()
}

fn pure_equilibria(game: &RepeatedGame) -> Vec<Vec<usize>> {
    (0..game.joint_action_count())
        .map(|idx| game.joint_action(idx))
        .filter(|joint| {
            (0..game.player_count()).all(|i| {
                (0..game.action_counts()[i]).all(|a| {
                    let mut dev = joint.clone();
                    dev[i] = a;
                    game.payoff(i, &dev) <= game.payoff(i, joint)
                })
            })
        })
        .collect()
}

fn criterion_1_enumeration() -> Outcome {
    let start = Instant::now();
    let all = enumerate_distinct_2x2(ClassFilter::All);
    let no_conflict = enumerate_distinct_2x2(ClassFilter::Only(GameClass::NoConflict));
    let conflict = enumerate_distinct_2x2(ClassFilter::Only(GameClass::Conflict));
    let elapsed = start.elapsed();
    let pass = no_conflict.len() == 21 && conflict.len() == 57 && all.len() == 78 && elapsed < Duration::from_secs(1);
    exact(
        pass,
        format!("{} no-conflict, {} conflict, {} total in {elapsed:.2?}", no_conflict.len(), conflict.len(), all.len()),
    )
}

fn criterion_2_metric_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    let mut nash_mismatch = 0;
    let mut welfare_mismatch = 0;
    for g in 0..1000 {
        let counts: &[usize] = if g % 2 == 0 { &[2, 2] } else { &[2, 2, 2] };
        let game = random_strictly_ordinal(counts, &mut rng).unwrap().into_game();
        let afp = random_profile(counts, &mut rng);
        let expected = oracle_deviation_gains(&game, &afp).iter().all(|&(v, best)| best / v <= 1.05);
        let got = is_nash(&game, &StrategyProfile::new(afp).unwrap()).unwrap();
        if got != Some(expected) {
            nash_mismatch += 1;
        }
        let brute = (0..game.joint_action_count())
            .map(|idx| game.payoff_point(idx).iter().sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        if maximize_welfare(&game).unwrap().value != brute {
            welfare_mismatch += 1;
        }
    }

    let mut fairness_error: f64 = 0.0;
    for _ in 0..100 {
        let game = random_strictly_ordinal(&[2, 2], &mut rng).unwrap().into_game();
        let mut grid = f64::NEG_INFINITY;
        for i in 0..=1000 {
            for j in 0..=1000 {
                let (p, q) = (i as f64 / 1000.0, j as f64 / 1000.0);
                let profile = [vec![p, 1.0 - p], vec![q, 1.0 - q]];
                grid = grid.max(oracle_payoff(&game, &profile, 0) * oracle_payoff(&game, &profile, 1));
            }
        }
        let got = maximize_fairness(&game).unwrap().value;
        fairness_error = fairness_error.max((got - grid).abs());
    }

    let mut distance_error: f64 = 0.0;
    for _ in 0..200 {
        let game = random_strictly_ordinal(&[2, 2], &mut rng).unwrap().into_game();
        let front = pareto_front(&build_payoff_polytope(&game).unwrap());
        let samples = sampled_front(&game, 10_000);
        let afp = random_profile(&[2, 2], &mut rng);
        let x = [oracle_payoff(&game, &afp, 0), oracle_payoff(&game, &afp, 1)];
        let oracle = samples
            .iter()
            .map(|s| ((s[0] - x[0]).powi(2) + (s[1] - x[1]).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        distance_error = distance_error.max((distance_to_pareto_front(&x, &front) - oracle).abs());
    }

    let elapsed = start.elapsed();
    let pass = nash_mismatch == 0
        && welfare_mismatch == 0
        && fairness_error <= 1e-4
        && distance_error <= 1e-3
        && elapsed < Duration::from_secs(300);
    exact(
        pass,
        format!(
            "is_nash mismatches {nash_mismatch}/1000, welfare mismatches {welfare_mismatch}/1000, \
             fairness error {fairness_error:.2e}, distance error {distance_error:.2e}, {elapsed:.2?}"
        ),
    )
}

// Points on every segment between two payoff points, reduced to those no
// other sample dominates.
fn sampled_front(game: &RepeatedGame, total: usize) -> Vec<[f64; 2]> {
    let points: Vec<[f64; 2]> = game.payoff_points().iter().map(|p| [p[0], p[1]]).collect();
    let pairs: Vec<(usize, usize)> =
        (0..points.len()).flat_map(|i| (i + 1..points.len()).map(move |j| (i, j))).collect();
    let per = total / pairs.len();
    let mut samples = Vec::with_capacity(total);
    for &(i, j) in &pairs {
        for s in 0..=per {
            let w = s as f64 / per as f64;
            samples.push([
                (1.0 - w) * points[i][0] + w * points[j][0],
                (1.0 - w) * points[i][1] + w * points[j][1],
            ]);
        }
    }
    // skyline: sort by first coordinate descending, keep strict records in the second
    samples.sort_by(|a, b| b[0].total_cmp(&a[0]).then(b[1].total_cmp(&a[1])));
    let mut front = Vec::new();
    let mut best_second = f64::NEG_INFINITY;
    for s in samples {
        if s[1] > best_second {
            best_second = s[1];
            front.push(s);
        }
    }
    front
}

fn criterion_3_figure_one() -> Outcome {
    let game = figure_one_game();
    let polytope = build_payoff_polytope(&game).unwrap();
    let mut vertices: Vec<Vec<f64>> = polytope.vertices().into_iter().map(|v| v.to_vec()).collect();
    vertices.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let front = pareto_front(&polytope);
    let mut edges: Vec<(Vec<f64>, Vec<f64>)> = front
        .segments()
        .into_iter()
        .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
        .collect();
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let distance = distance_to_pareto_front(&[2.25, 2.25], &front);

    let hull_ok = vertices == vec![vec![1.0, 1.0], vec![1.0, 4.0], vec![3.0, 3.0], vec![4.0, 1.0]];
    let edges_ok = edges
        == vec![
            (vec![1.0, 4.0], vec![3.0, 3.0]),
            (vec![3.0, 3.0], vec![4.0, 1.0]),
        ];
    let distance_ok = (distance - 1.0062).abs() <= 1e-3;
    exact(
        hull_ok && edges_ok && distance_ok,
        format!("hull {vertices:?}, front {edges:?}, distance {distance:.4}"),
    )
}

fn criterion_4_solver_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut games: Vec<RepeatedGame> = enumerate_distinct_2x2(ClassFilter::All)
        .into_iter()
        .map(|g| g.into_game())
        .collect();
    for _ in 0..1000 {
        games.push(random_strictly_ordinal(&[2, 2, 2], &mut rng).unwrap().into_game());
    }
    let mut worst: f64 = 0.0;
    let mut missing_pure = 0;
    let mut empty = 0;
    for game in &games {
        let list = find_nash(game).unwrap();
        if list.is_empty() || list.failed {
            empty += 1;
        }
        for profile in list.profiles() {
            let gain = oracle_deviation_gains(game, profile.distributions())
                .iter()
                .map(|&(v, best)| (best - v).max(0.0))
                .fold(0.0, f64::max);
            worst = worst.max(gain);
        }
        for joint in pure_equilibria(game) {
            let pure = StrategyProfile::pure(game.action_counts(), &joint);
            if !list.profiles().any(|p| *p == pure) {
                missing_pure += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-6 && missing_pure == 0 && empty == 0 && elapsed < Duration::from_secs(120);
    exact(
        pass,
        format!(
            "{} games, worst deviation gain {worst:.2e}, missing pure equilibria {missing_pure}, \
             failed solves {empty}, {elapsed:.2?}",
            games.len()
        ),
    )
}

fn run_band_suite(config: &SuiteConfig) -> (Vec<AlgorithmSummary>, Duration, usize) {
    let start = Instant::now();
    let rows = run_suite(config, &LearnerRegistry::standard()).unwrap();
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    (summarize(&rows, &config.roster), start.elapsed(), failed)
}

fn band_config(suite: SuiteKind) -> SuiteConfig {
    SuiteConfig {
        suite,
        sweeps: 5,
        repetitions: 20_000,
        games: 100,
        ..SuiteConfig::default()
    }
}

fn describe(summaries: &[AlgorithmSummary], metrics: &[Metric]) -> String {
    summaries
        .iter()
        .map(|s| {
            let values: Vec<String> = metrics
                .iter()
                .map(|&m| format!("{} {:.4}", m.header(), s.mean(m).unwrap_or(f64::NAN)))
                .collect();
            format!("{} [{}]", s.name, values.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn within(s: &AlgorithmSummary, metric: Metric, lo: f64, hi: f64) -> bool {
    s.mean(metric).is_some_and(|v| v >= lo && v <= hi)
}

fn criterion_5_no_conflict_band() -> Outcome {
    let (summaries, elapsed, failed) = run_band_suite(&band_config(SuiteKind::NoConflict));
    let pass = failed == 0
        && summaries.len() == 5
        && summaries.iter().all(|s| {
            within(s, Metric::Conv, 0.95, 1.0)
                && within(s, Metric::Fexp, 3.8, 4.0)
                && within(s, Metric::Ne, 0.95, 1.0)
                && within(s, Metric::Po, 0.90, 1.0)
        });
    let detail = format!(
        "{}; {failed} failed plays; {elapsed:.0?}",
        describe(&summaries, &[Metric::Conv, Metric::Fexp, Metric::Ne, Metric::Po])
    );
    band(pass, detail)
}

fn criterion_6_conflict_band() -> Outcome {
    let (summaries, elapsed, failed) = run_band_suite(&band_config(SuiteKind::Conflict));
    let pass = failed == 0
        && summaries.len() == 5
        && summaries.iter().all(|s| {
            within(s, Metric::Fexp, 2.8, 3.2) && within(s, Metric::Welfare, 5.7, 6.4) && within(s, Metric::Ne, 0.75, 0.95)
        });
    let detail = format!(
        "{}; {failed} failed plays; {elapsed:.0?}",
        describe(&summaries, &[Metric::Fexp, Metric::Welfare, Metric::Ne])
    );
    band(pass, detail)
}

fn criterion_7_random_suite_ordering() -> Outcome {
    let (summaries, elapsed, failed) = run_band_suite(&band_config(SuiteKind::Random));
    let conv = |name: &str| summaries.iter().find(|s| s.name == name).and_then(|s| s.mean(Metric::Conv));
    let nashq = conv("nashq").unwrap_or(f64::NAN);
    let highest = summaries
        .iter()
        .filter(|s| s.name != "nashq")
        .all(|s| s.mean(Metric::Conv).is_some_and(|c| c < nashq));
    let pass = failed == 0
        && summaries.len() == 5
        && highest
        && summaries.iter().all(|s| within(s, Metric::Fexp, 5.3, 6.1));
    let detail = format!(
        "{}; {failed} failed plays; {elapsed:.0?}",
        describe(&summaries, &[Metric::Conv, Metric::Fexp])
    );
    band(pass, detail)
}

fn criterion_8_determinism() -> Outcome {
    let registry = LearnerRegistry::standard();
    let tmp = tempfile::TempDir::new().unwrap();
    let mut identical = true;
    let mut rows_seen = 0;
    for suite in SuiteKind::ALL {
        let config = SuiteConfig {
            suite,
            sweeps: 1,
            repetitions: 300,
            games: 6,
            seed: 99,
            ..SuiteConfig::default()
        };
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let parallel = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let stores: Vec<_> = [serial, parallel]
            .iter()
            .enumerate()
            .map(|(i, pool)| {
                let rows = pool.install(|| run_suite(&config, &registry)).unwrap();
                rows_seen += rows.len();
                let dir = tmp.path().join(format!("{suite}-{i}"));
                write_store(&dir, &config, &rows).unwrap();
                dir
            })
            .collect();
        for file in [ROWS_FILE, MANIFEST_FILE] {
            identical &= fs::read(stores[0].join(file)).unwrap() == fs::read(stores[1].join(file)).unwrap();
        }
    }
    exact(
        identical,
        format!("3 suites, {rows_seen} rows, stores from 1-thread and 4-thread runs compared byte for byte"),
    )
}

fn criterion_9_paired_t_test() -> Outcome {
    let a = [2.0, 3.0, 4.0, 5.0, 6.0];
    let b = [1.0; 5];
    let test = paired_t_test(&a, &b, 0.05).unwrap();
    let pass = (test.t - 4.243).abs() <= 1e-3 && test.significant && test.df == 4;
    exact(pass, format!("t = {:.4}, df {}, p = {:.4}", test.t, test.df, test.p_value))
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 9] = [
        criterion_1_enumeration,
        criterion_2_metric_oracles,
        criterion_3_figure_one,
        criterion_4_solver_soundness,
        criterion_5_no_conflict_band,
        criterion_6_conflict_band,
        criterion_7_random_suite_ordering,
        criterion_8_determinism,
        criterion_9_paired_t_test,
    ];
    let strict = strict_bands();
    let mut failed = Vec::new();
    for (i, run) in criteria.iter().enumerate() {
        let n = i + 1;
        let outcome = run();
        println!("criterion {n}: {} ({})", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
        if !outcome.pass && (!outcome.band || strict) {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
