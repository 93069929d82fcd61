//! Property tests for the closed-form layer: the variational route must
//! reproduce the direct free energy, branch points must join continuously,
//! and the frozen reference values must never drift.

use eulerlab::theory::{
    f_sigma, gamma_c, gamma_star, high_points_exponent, lambda_star, limiting_free_energy,
    limiting_overlap_law, rem_free_energy, variational_free_energy, TheoryPoint,
};
use proptest::prelude::*;

fn pt(beta: f64, alpha: f64, u: f64) -> TheoryPoint {
    TheoryPoint::new(beta, alpha, u).unwrap()
}

#[test]
fn frozen_reference_values() {
    assert_eq!(f_sigma(1.0, 1.0).unwrap(), 0.25);
    assert_eq!(f_sigma(4.0, 1.0).unwrap(), 3.0);
    assert!((limiting_free_energy(&pt(3.0, 0.5, 0.5)) - 2.75).abs() < 1e-12);
    assert!((limiting_free_energy(&pt(3.0, 0.5, -0.5)) - 1.371_708_245_126_284_5).abs() < 1e-12);
    assert_eq!(rem_free_energy(1.0).unwrap(), 1.25);
    assert_eq!(rem_free_energy(4.0).unwrap(), 4.0);
    assert_eq!(limiting_overlap_law(4.0, -0.01, 0.01).unwrap(), 0.5);
    assert_eq!(limiting_overlap_law(4.0, 0.99, 1.0).unwrap(), 0.5);
}

#[test]
fn untilted_free_energy_is_the_scalar_kernel() {
    for beta in [0.25, 1.0, 1.99, 2.0, 2.01, 5.0, 32.0] {
        for alpha in [0.1, 0.5, 0.9] {
            let fe = limiting_free_energy(&pt(beta, alpha, 0.0));
            let scalar = f_sigma(beta, 1.0).unwrap();
            assert!((fe - scalar).abs() < 1e-14, "beta {beta} alpha {alpha}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn variational_route_agrees_with_closed_form(
        beta in 0.1f64..8.0,
        alpha in 0.05f64..0.95,
        u in -0.9f64..0.9,
    ) {
        let p = pt(beta, alpha, u);
        let direct = limiting_free_energy(&p);
        let grid = variational_free_energy(&p, 100_000).unwrap();
        prop_assert!(
            (direct - grid).abs() <= 1e-6,
            "direct {} vs variational {}", direct, grid
        );
    }

    #[test]
    fn free_energy_is_continuous_at_zero_tilt(
        beta in 0.1f64..8.0,
        alpha in 0.05f64..0.95,
    ) {
        let h = 1e-8;
        let center = limiting_free_energy(&pt(beta, alpha, 0.0));
        let right = limiting_free_energy(&pt(beta, alpha, h));
        let left = limiting_free_energy(&pt(beta, alpha, -h));
        prop_assert!((right - center).abs() <= 1e-6);
        prop_assert!((left - center).abs() <= 1e-6);
    }

    #[test]
    fn exponent_at_the_top_level_is_minus_one(
        alpha in 0.05f64..0.95,
        u in -0.9f64..0.9,
    ) {
        let gs = gamma_star(alpha, u).unwrap();
        let e = high_points_exponent(gs, &pt(1.0, alpha, u)).unwrap();
        prop_assert!((e + 1.0).abs() <= 1e-9, "exponent {}", e);
    }

    #[test]
    fn optimizer_is_continuous_at_the_branch_level(
        alpha in 0.05f64..0.95,
        u in 0.0f64..0.9,
    ) {
        let gc = gamma_c(alpha, u).unwrap();
        let below = lambda_star(gc * (1.0 - 1e-9), alpha, u).unwrap();
        let above = lambda_star((gc * (1.0 + 1e-9)).min(gamma_star(alpha, u).unwrap()), alpha, u)
            .unwrap();
        prop_assert!((below - above).abs() <= 1e-7);
        prop_assert!((below - (1.0 + u) * alpha).abs() <= 1e-7);
    }

    #[test]
    fn exponent_is_decreasing_and_bounded(
        alpha in 0.05f64..0.95,
        u in -0.9f64..0.9,
        t in 0.05f64..1.0,
    ) {
        // On (0, gamma_star] the exponent decreases from near 0 to -1.
        let p = pt(1.0, alpha, u);
        let gs = gamma_star(alpha, u).unwrap();
        let lo = high_points_exponent((t * 0.5) * gs, &p).unwrap();
        let hi = high_points_exponent(t * gs, &p).unwrap();
        prop_assert!(lo >= hi - 1e-12);
        prop_assert!((-1.0..=0.0).contains(&hi));
    }

    #[test]
    fn overlap_law_is_a_two_atom_probability(beta in 2.0001f64..64.0) {
        let full = limiting_overlap_law(beta, -1.0, 1.0).unwrap();
        prop_assert!((full - 1.0).abs() < 1e-15);
        let at_zero = limiting_overlap_law(beta, 0.0, 0.0).unwrap();
        let at_one = limiting_overlap_law(beta, 1.0, 1.0).unwrap();
        prop_assert!((at_zero + at_one - 1.0).abs() < 1e-15);
        let middle = limiting_overlap_law(beta, 0.25, 0.75).unwrap();
        prop_assert!(middle == 0.0);
    }
}
