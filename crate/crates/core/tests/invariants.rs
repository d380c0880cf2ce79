use malbench::game::{
    canonical_form, classify, expected_payoff, orbit_2x2, random_strictly_ordinal, validate_distribution,
    StrategyProfile,
};
use malbench::harness::run_play;
use malbench::learners::{wolf_phc_update, Learner, LearnerConfig, LearnerContext, LearnerRegistry, PolicyState};
use malbench::metrics::{GameAnalysis, StrategyRecording};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shape() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![Just(vec![2, 2]), Just(vec![2, 2, 2])]
}

fn distribution(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, m).prop_map(|w| {
        let total: f64 = w.iter().sum::<f64>() + 1e-9;
        let mut d: Vec<f64> = w.iter().map(|x| x / total).collect();
        let rest = 1.0 - d.iter().sum::<f64>();
        d[0] += rest;
        d
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recorded_strategies_are_distributions(
        counts in shape(),
        game_seed in any::<u64>(),
        learner_seed in any::<u64>(),
        names in prop::collection::vec(0usize..5, 3),
    ) {
        let registry = LearnerRegistry::standard();
        let all: Vec<&str> = registry.names().collect();
        let game = random_strictly_ordinal(&counts, &mut ChaCha8Rng::seed_from_u64(game_seed)).unwrap().into_game();
        for recording in [StrategyRecording::Policy, StrategyRecording::Behaviour] {
            let mut learners: Vec<Box<dyn Learner>> = (0..counts.len())
                .map(|p| {
                    let ctx = LearnerContext {
                        player: p,
                        action_counts: counts.clone(),
                        config: LearnerConfig::default(),
                        seed: learner_seed.wrapping_add(p as u64),
                    };
                    registry.build(all[names[p]], &ctx).unwrap()
                })
                .collect();
            let play = run_play(&game, &mut learners, 300, recording).unwrap();
            prop_assert!(play.validate(&game).is_ok());
            for t in 1..=play.horizon() {
                for p in 0..counts.len() {
                    prop_assert!(validate_distribution(play.strategy(t, p)).is_ok());
                }
            }
        }
    }

    #[test]
    fn wolf_policy_stays_in_the_simplex(
        m in 2usize..5,
        steps in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 4), 1..60),
        start in 1u64..100_000,
    ) {
        let config = LearnerConfig { wolf_base: 1.0, ..LearnerConfig::default() };
        let mut state = PolicyState::uniform(m);
        for (i, q) in steps.iter().enumerate() {
            state = wolf_phc_update(&state, &q[..m], start + i as u64, &config);
            for d in [&state.policy, &state.average] {
                prop_assert!(d.iter().all(|&p| (0.0..=1.0).contains(&p)));
                prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn canonical_form_is_constant_on_orbits(seed in any::<u64>()) {
        let game = random_strictly_ordinal(&[2, 2], &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let canon = canonical_form(&game).unwrap();
        prop_assert_eq!(canonical_form(&canon).unwrap(), canon.clone());
        for g in orbit_2x2(game.as_game()).unwrap() {
            let g = malbench::game::StrictlyOrdinalGame::new(g).unwrap();
            prop_assert_eq!(canonical_form(&g).unwrap(), canon.clone());
            prop_assert_eq!(classify(&g), classify(&game));
        }
    }

    #[test]
    fn expected_payoff_is_bounded_and_multilinear(
        seed in any::<u64>(),
        a in distribution(2),
        b in distribution(2),
        c in distribution(2),
        d in distribution(2),
        w in 0.0f64..1.0,
    ) {
        let game = random_strictly_ordinal(&[2, 2, 2], &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().into_game();
        let p = StrategyProfile::new(vec![a.clone(), b.clone(), c.clone()]).unwrap();
        let q = StrategyProfile::new(vec![d.clone(), b.clone(), c.clone()]).unwrap();
        let mix: Vec<f64> = a.iter().zip(&d).map(|(x, y)| w * x + (1.0 - w) * y).collect();
        let r = StrategyProfile::new(vec![mix, b, c]).unwrap();
        for i in 0..3 {
            let (up, uq, ur) = (
                expected_payoff(&game, &p, i).unwrap(),
                expected_payoff(&game, &q, i).unwrap(),
                expected_payoff(&game, &r, i).unwrap(),
            );
            prop_assert!((ur - (w * up + (1.0 - w) * uq)).abs() < 1e-9);
            prop_assert!((1.0 - 1e-9..=8.0 + 1e-9).contains(&up));
        }
    }

    #[test]
    fn play_metrics_are_consistent(
        counts in shape(),
        seed in any::<u64>(),
        horizon in 5usize..400,
    ) {
        let registry = LearnerRegistry::standard();
        let game = random_strictly_ordinal(&counts, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap().into_game();
        let analysis = GameAnalysis::new(&game).unwrap();
        let names = ["jal", "wolfphc", "regmat"];
        let mut learners: Vec<Box<dyn Learner>> = (0..counts.len())
            .map(|p| {
                let ctx = LearnerContext {
                    player: p,
                    action_counts: counts.clone(),
                    config: LearnerConfig::default(),
                    seed: seed ^ p as u64,
                };
                registry.build(names[p], &ctx).unwrap()
            })
            .collect();
        let play = run_play(&game, &mut learners, horizon, StrategyRecording::Policy).unwrap();
        let report = analysis.evaluate(&play).unwrap();
        let k = game.joint_action_count() as f64;
        prop_assert!(report.final_payoffs.iter().all(|&r| (1.0..=k).contains(&r)));
        prop_assert!((report.welfare - report.final_payoffs.iter().sum::<f64>()).abs() < 1e-9);
        prop_assert!((report.fairness - report.final_payoffs.iter().product::<f64>()).abs() < 1e-6);
        prop_assert!(report.welfare <= analysis.max_welfare() + 1e-9);
        for d in &report.afp {
            prop_assert!(validate_distribution(d).is_ok());
        }
    }
}
