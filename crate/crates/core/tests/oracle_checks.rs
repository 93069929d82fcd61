//! Cross-checks between independent computation routes: product formula
//! against Monte Carlo, quadrature against series, finite differences
//! against perturbation theory, and tails against committed bounds.

use eulerlab::calibration::TAIL_BOUND_FACTOR;
use eulerlab::field::field_variance;
use eulerlab::gibbs::EnsembleParams;
use eulerlab::oracle::{
    by_parts_residual, high_points_measure_estimate, joint_tail_factorization, max_field_check,
    mgf_monte_carlo, mgf_product_formula, single_prime_derivative_check, smoothing_max_check,
    tail_bound_check, ByPartsTestFn,
};
use eulerlab::primes::{PrimeTable, ScaleRange};

#[test]
fn product_formula_matches_monte_carlo_on_a_four_prime_window() {
    // Window {2, 3, 5, 7}: small enough that the Monte Carlo error is
    // tight and the product formula is four explicit factors.
    let table = PrimeTable::sieve(100).unwrap();
    let range = ScaleRange::new(0.0, 0.7, 2.9).unwrap();
    let (lambda, lambda_prime, delta) = (0.8, 0.5, 0.3);
    let exact = mgf_product_formula(&table, &range, lambda, lambda_prime, delta).unwrap();
    let mc = mgf_monte_carlo(&table, &range, lambda, lambda_prime, delta, 17, 40_000).unwrap();
    assert!(
        (mc.mean - exact).abs() <= 3.0 * mc.std_error,
        "mc {} vs exact {exact} (se {})",
        mc.mean,
        mc.std_error
    );
}

#[test]
fn second_tilt_difference_recovers_the_variance() {
    // The second derivative of log E[exp(lambda X)] at lambda = 0 is the
    // field variance; the centered second difference has O(step^2) bias.
    let table = PrimeTable::sieve(1_000_000).unwrap();
    let range = ScaleRange::full((1_000_000f64).ln()).unwrap();
    let step = 3e-3;
    let plus = mgf_product_formula(&table, &range, step, 0.0, 0.0).unwrap().ln();
    let minus = mgf_product_formula(&table, &range, -step, 0.0, 0.0).unwrap().ln();
    let second = (plus + minus) / (step * step);
    let variance = field_variance(&table, &range).unwrap();
    assert!(
        (second - variance).abs() <= 1e-6 * variance,
        "second difference {second} vs variance {variance}"
    );
}

#[test]
fn by_parts_residuals_respect_their_bounds() {
    for lambda in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for test_fn in [
            ByPartsTestFn::Linear,
            ByPartsTestFn::Exponential,
            ByPartsTestFn::Polynomial,
        ] {
            let check = by_parts_residual(test_fn, lambda).unwrap();
            assert!(
                check.residual <= check.bound + 1e-12,
                "{test_fn:?} lambda {lambda}: residual {} bound {}",
                check.residual,
                check.bound
            );
        }
    }
}

#[test]
fn single_prime_pipeline_agrees_with_perturbation_theory() {
    let check = single_prime_derivative_check(5, 2.0, 8, 23, 20_000).unwrap();
    assert!(
        (check.fd_mean - check.closed_form).abs()
            <= 3.0 * check.fd_std_error + check.correction_bound,
        "fd {} vs closed {} (se {}, bound {})",
        check.fd_mean,
        check.closed_form,
        check.fd_std_error,
        check.correction_bound
    );
}

#[test]
fn tails_respect_the_chernoff_ceiling() {
    let table = PrimeTable::sieve(100_000).unwrap();
    let range = ScaleRange::full((100_000f64).ln()).unwrap();
    for gamma in [0.3, 0.6, 1.0] {
        let check = tail_bound_check(&table, &range, gamma, 31, 4_000).unwrap();
        assert!(
            check.probability <= check.bound + 3.0 * check.std_error,
            "gamma {gamma}: probability {} vs bound {}",
            check.probability,
            check.bound
        );
    }
    // The bound embeds the committed factor exactly.
    let zero = tail_bound_check(&table, &range, 0.0, 31, 100).unwrap();
    assert_eq!(zero.bound, TAIL_BOUND_FACTOR);
}

#[test]
fn distant_joint_tails_approximately_factorize() {
    // At separation 0.9 the overlap is weak, so the joint tail stays
    // within a factor-two band of the product of the marginals.
    let table = PrimeTable::sieve(100_000).unwrap();
    let range = ScaleRange::full((100_000f64).ln()).unwrap();
    let check = joint_tail_factorization(&table, &range, 0.5, 0.9, 37, 20_000).unwrap();
    let noise = 3.0 * (check.joint_std_error + check.product_std_error);
    assert!(
        check.joint <= 2.0 * check.product + noise,
        "joint {} vs product {}",
        check.joint,
        check.product
    );
    assert!(
        check.joint >= 0.5 * check.product - noise,
        "joint {} vs product {}",
        check.joint,
        check.product
    );
}

#[test]
fn interval_maximum_tail_stays_near_the_point_tail() {
    use eulerlab::calibration::SMOOTHING_MAX_FACTOR;
    let table = PrimeTable::sieve(100_000).unwrap();
    let range = ScaleRange::full((100_000f64).ln()).unwrap();
    let check = smoothing_max_check(&table, &range, 0.5, 16, 41, 4_000).unwrap();
    assert!(check.interval_tail >= check.point_tail);
    let noise = 3.0 * (check.interval_std_error + check.point_std_error);
    assert!(
        check.interval_tail <= SMOOTHING_MAX_FACTOR * check.point_tail + noise,
        "interval {} vs point {}",
        check.interval_tail,
        check.point_tail
    );
}

#[test]
fn grid_maximum_sits_below_the_top_growth_level() {
    // At finite T the normalized maximum approaches its limit level 1 from
    // below; assert the sane window rather than the asymptote.
    let table = PrimeTable::sieve(1_000_000).unwrap();
    let params = EnsembleParams {
        log_t: (1_000_000f64).ln(),
        alpha: 0.5,
        u: 0.0,
        n_points: 512,
        n_replicas: 400,
        seed: 47,
    };
    let max = max_field_check(&table, &params).unwrap();
    assert!(
        max.mean > 0.45 && max.mean < 1.05,
        "normalized maximum {}",
        max.mean
    );
}

#[test]
fn high_point_fractions_give_a_finite_exponent() {
    let table = PrimeTable::sieve(1_000_000).unwrap();
    let params = EnsembleParams {
        log_t: (1_000_000f64).ln(),
        alpha: 0.5,
        u: 0.0,
        n_points: 2_048,
        n_replicas: 100,
        seed: 53,
    };
    let estimate = high_points_measure_estimate(&table, &params, 0.4).unwrap();
    let exponent = estimate.expect("level-0.4 high points are common at this scale");
    assert!(
        exponent > -1.2 && exponent < 0.0,
        "empirical exponent {exponent}"
    );
    // An unreachable level reports None instead of a fake exponent.
    let unreachable = high_points_measure_estimate(&table, &params, 3.0).unwrap();
    assert!(unreachable.is_none());
}
