mod common;

use proptest::prelude::*;
use qgame_core::equilibrium::{
    best_response_classical, best_response_quantum, solve_matrix, theorem1_lift, theorem2_improve, verify_equilibrium,
    DeviationClass, SolverConfig,
};
use qgame_core::matrix::random_unitary;
use qgame_core::payoff::{evolve_channels, evolve_expanded};
use qgame_core::pennyflip::Q;
use qgame_core::{
    behavioral_to_mixed, conjugate, emit_game, enumerate_pure, evolve, expected_payoff, hermitian_eig, load_game,
    make_u, mix_channels, DensityMatrix, Player, Strategy, StrategyProfile, UnitParams, Unitary,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_player(r: &mut ChaCha8Rng) -> Player {
    if r.gen_bool(0.5) { Player::P1 } else { Player::P2 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn channels_preserve_density_matrices(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(2..=4);
        let rho = DensityMatrix::random(&mut r, dim);
        let k = r.gen_range(1..=4);
        let w: Vec<f64> = (0..k).map(|_| r.gen_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        let terms: Vec<(f64, Unitary)> = w.iter().map(|x| (x / total, random_unitary(&mut r, dim))).collect();
        let out = mix_channels(&terms, &rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.matrix().hermiticity_error() < 1e-12);
        let (eig, _) = hermitian_eig(out.matrix()).unwrap();
        prop_assert!(eig.iter().all(|&e| e > -1e-12));
        prop_assert!((eig.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn make_u_has_determinant_minus_one(theta in 0.0..std::f64::consts::FRAC_PI_2, alpha in 0.0..6.3f64, beta in 0.0..6.3f64) {
        let u = make_u(UnitParams::from_angles(theta, alpha, beta));
        prop_assert!((u.determinant() + 1.0).norm() < 1e-12);
        prop_assert!(qgame_core::matrix::unitarity_error(u.matrix()) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn global_phase_is_invisible(seed in any::<u64>(), phi in -10.0..10.0f64) {
        let mut r = rng(seed);
        let dim = r.gen_range(2..=4);
        let rho = DensityMatrix::random(&mut r, dim);
        let u = random_unitary(&mut r, dim);
        let a = conjugate(&u, &rho).unwrap();
        let b = conjugate(&u.with_phase(phi), &rho).unwrap();
        prop_assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
        let single = mix_channels(&[(1.0, u.clone())], &rho).unwrap();
        prop_assert!(single.matrix().max_abs_diff(a.matrix()) < 1e-12);
    }

    #[test]
    fn channel_path_matches_expansion(seed in any::<u64>()) {
        let mut r = rng(seed);
        let game = common::random_game(&mut r, 4, 4);
        let p1 = common::random_product_strategy(&mut r, &game, Player::P1);
        let p2 = common::random_product_strategy(&mut r, &game, Player::P2);
        let profile = StrategyProfile::new(p1, p2).unwrap();
        let c1 = profile.p1.move_channels(&game).unwrap().unwrap();
        let c2 = profile.p2.move_channels(&game).unwrap().unwrap();
        let a = evolve_channels(&game, &c1, &c2).unwrap();
        let b = evolve_expanded(&game, &profile).unwrap();
        prop_assert_eq!(a.states.len(), game.moves().len() + 1);
        for (x, y) in a.states.iter().zip(&b.states) {
            prop_assert!(x.matrix().max_abs_diff(y.matrix()) < 1e-12);
        }
    }

    #[test]
    fn payoffs_are_zero_sum_and_affine(seed in any::<u64>(), lambda in 0.0..=1.0f64) {
        let mut r = rng(seed);
        let game = common::random_game(&mut r, 4, 4);
        let owner = random_player(&mut r);
        let (a, b) = if r.gen_bool(0.5) {
            (Strategy::Mixed(common::random_mixed(&mut r, &game, owner)), Strategy::Mixed(common::random_mixed(&mut r, &game, owner)))
        } else {
            (
                Strategy::MixedQuantum(common::random_mixed_quantum(&mut r, &game, owner)),
                Strategy::MixedQuantum(common::random_mixed_quantum(&mut r, &game, owner)),
            )
        };
        let other = common::random_strategy(&mut r, &game, owner.other());
        let pay = |s: &Strategy, who: Player| {
            expected_payoff(&game, &StrategyProfile::with(s.clone(), other.clone()).unwrap(), who).unwrap()
        };
        prop_assert!((pay(&a, Player::P1) + pay(&a, Player::P2)).abs() < 1e-12);
        if let Some(m) = common::blend(lambda, &a, &b) {
            let lhs = pay(&m, Player::P1);
            let rhs = lambda * pay(&a, Player::P1) + (1.0 - lambda) * pay(&b, Player::P1);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
        let (lo, hi) = game.payoff_range();
        let v = pay(&a, Player::P1);
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }

    #[test]
    fn behavioral_mixture_is_a_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let game = common::random_game(&mut r, 3, 4);
        let owner = random_player(&mut r);
        let names: Vec<String> = game.actions().keys().cloned().collect();
        let per_move: Vec<Vec<(String, f64)>> = (0..game.move_count(owner))
            .map(|_| {
                let w: Vec<f64> = names.iter().map(|_| r.gen_range(0.05..1.0)).collect();
                let s: f64 = w.iter().sum();
                names.iter().cloned().zip(w.into_iter().map(|x| x / s)).collect()
            })
            .collect();
        let mixed = behavioral_to_mixed(owner, &per_move).unwrap();
        prop_assert_eq!(mixed.support().len(), names.len().pow(per_move.len() as u32));
        for (p, s) in mixed.support() {
            let expect: f64 = s.actions.iter().zip(&per_move).map(|(a, d)| d.iter().find(|(n, _)| n == a).unwrap().1).product();
            prop_assert!((p - expect).abs() < 1e-12);
        }
        prop_assert_eq!(
            enumerate_pure(&game, owner).len(),
            game.actions().len().pow(game.move_count(owner) as u32)
        );
    }

    #[test]
    fn game_documents_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let game = common::random_game(&mut r, 4, 4);
        let back = load_game(&emit_game(&game)).unwrap();
        prop_assert_eq!(back, game);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lp_solutions_satisfy_duality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.gen_range(1..=6);
        let n = r.gen_range(1..=6);
        let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| r.gen_range(-5.0..5.0)).collect()).collect();
        let s = solve_matrix(&a).unwrap();
        prop_assert!((s.row_guarantee - s.value).abs() < 1e-9);
        prop_assert!((s.col_guarantee - s.value).abs() < 1e-9);
        prop_assert!((s.row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((s.col.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_row_lp_matches_breakpoint_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let a: Vec<Vec<f64>> = (0..2).map(|_| (0..n).map(|_| r.gen_range(-5.0..5.0)).collect()).collect();
        let s = solve_matrix(&a).unwrap();
        prop_assert!((s.value - common::two_row_value(&a)).abs() < 1e-9);
    }

    #[test]
    fn exactly_one_deviation_branch_wins(seed in any::<u64>(), fix_head in any::<bool>()) {
        let mut r = rng(seed);
        let mut u: Vec<Unitary> = (0..3).map(|_| random_unitary(&mut r, 2)).collect();
        if fix_head {
            u[2] = u[0].inverse().compose(&u[1].inverse());
        }
        let cert = theorem2_improve(&u[0], &u[1], &u[2]).unwrap();
        let head = conjugate(&u[2].compose(&u[1]).compose(&u[0]), &DensityMatrix::basis(2, 0)).unwrap().diagonal()[0];
        prop_assert_eq!(cert.deviator == Q, head < 1.0 - 1e-9);
        prop_assert!((cert.improved_payoff - 1.0).abs() < 1e-9);
        prop_assert!(cert.improved_payoff > cert.original_payoff + 1e-9);
    }

    #[test]
    fn lift_matches_classical_stages(seed in any::<u64>()) {
        let mut r = rng(seed);
        let game = loop {
            let g = common::random_game(&mut r, 2, 4);
            let flips = game_has_flip(&g);
            if flips { break g; }
        };
        let p1 = Strategy::Mixed(common::random_behavioral(&mut r, &game, Player::P1));
        let p2 = Strategy::Mixed(common::random_behavioral(&mut r, &game, Player::P2));
        let classical = StrategyProfile::new(p1, p2).unwrap();
        let who = random_player(&mut r);
        let lifted = theorem1_lift(&game, &classical, who).unwrap();
        prop_assert!(lifted.max_error() < 1e-9);
        let quantum = StrategyProfile::with(Strategy::Quantum(lifted.strategy), classical.get(who.other()).clone()).unwrap();
        let a = evolve(&game, &classical).unwrap().diagonals();
        let b = evolve(&game, &quantum).unwrap().diagonals();
        for (x, y) in a.iter().zip(&b) {
            for (u, v) in x.iter().zip(y) {
                prop_assert!((u - v).abs() < 1e-9);
            }
        }
    }
}

fn game_has_flip(g: &qgame_core::GameSpec) -> bool {
    g.actions().values().any(|u| *u == Unitary::flip())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn quantum_response_dominates_classical(seed in any::<u64>()) {
        let mut r = rng(seed);
        let game = common::random_game(&mut r, 3, 3);
        let responder = random_player(&mut r);
        let opponent = common::random_strategy(&mut r, &game, responder.other());
        let config = SolverConfig { restarts: 3, seed, ..SolverConfig::default() };
        let (_, classical) = best_response_classical(&game, &opponent, responder).unwrap();
        let q = best_response_quantum(&game, &opponent, responder, 3, &config).unwrap();
        prop_assert!(q.value >= classical - 1e-9);
        prop_assert!(q.history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        let profile = StrategyProfile::with(Strategy::Quantum(q.strategy), opponent.clone()).unwrap();
        prop_assert!((expected_payoff(&game, &profile, responder).unwrap() - q.value).abs() < 1e-9);
    }

    #[test]
    fn verification_reports_are_consistent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let game = common::random_game(&mut r, 3, 3);
        let profile = StrategyProfile::new(
            common::random_strategy(&mut r, &game, Player::P1),
            common::random_strategy(&mut r, &game, Player::P2),
        )
        .unwrap();
        let classes = [DeviationClass::MixedClassical, DeviationClass::Quantum];
        let config = SolverConfig { restarts: 2, seed, ..SolverConfig::default() };
        let rep = verify_equilibrium(&game, &profile, classes, &config).unwrap();
        let (lo, hi) = game.payoff_range();
        prop_assert!(rep.exploitability_p1 >= -1e-9 && rep.exploitability_p2 >= -1e-9);
        prop_assert!(rep.value >= lo - 1e-9 && rep.value <= hi + 1e-9);
    }
}
