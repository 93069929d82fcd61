//! Built-in verification suite.
//!
//! Every numerical route in the library is exercised against an
//! independent oracle at pinned desk-scale settings: closed forms against
//! frozen values and the variational route, the binned field sampler
//! against direct summation, Monte Carlo statistics against product
//! formulas and committed ceilings, and the pair sampler against exact
//! enumeration. The report is a pure function of the seed, so two runs
//! with the same seed produce byte-identical files at any worker count.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use eulerlab::calibration::{FAST_FIELD_REL_TOL, SMOOTHING_MAX_FACTOR};
use eulerlab::field::{
    covariance_exact, field_variance, map_replicas, sample_field, sample_window_direct,
    uniform_shifts, OverlapKernel,
};
use eulerlab::gibbs::{
    free_energy_estimate, gibbs_weights, overlap_cdf_integral, overlap_ensemble,
    sample_overlap_pairs, EnsembleParams, OverlapHistogram,
};
use eulerlab::numeric::mean_and_se;
use eulerlab::oracle::{
    by_parts_residual, joint_tail_factorization, mgf_monte_carlo, mgf_product_formula,
    single_prime_derivative_check, smoothing_max_check, tail_bound_check, ByPartsTestFn,
};
use eulerlab::primes::{prime_reciprocal_sum, PrimeTable, ScaleRange};
use eulerlab::rng::{StreamDomain, StreamKey};
use eulerlab::theory::{f_sigma, limiting_free_energy, variational_free_energy, TheoryPoint};

/// Meissel-Mertens constant; prime reciprocal sums grow like
/// loglog x plus this.
const MERTENS: f64 = 0.261_497_212_847_642_8;

/// One suite entry: `passed` means `observed <= threshold`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub passed: bool,
    pub observed: f64,
    pub threshold: f64,
    pub detail: String,
}

/// The full suite outcome; serialized as the deterministic report file.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckRow>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

pub fn write_validation_report(dir: &Path, report: &ValidationReport) -> Result<PathBuf> {
    let path = dir.join("validate_report.json");
    let text = serde_json::to_string_pretty(report)?;
    std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

struct Suite {
    seed: u64,
    checks: Vec<CheckRow>,
}

impl Suite {
    fn push(&mut self, name: &'static str, observed: f64, threshold: f64, detail: String) {
        self.checks.push(CheckRow {
            name,
            passed: observed <= threshold,
            observed,
            threshold,
            detail,
        });
    }
}

/// Runs the whole suite. Thresholds are the library's committed bounds;
/// statistical checks use three standard errors (or a preregistered
/// outlier fraction where many comparisons are made at once).
pub fn run_validation(seed: u64) -> Result<ValidationReport> {
    let mut suite = Suite {
        seed,
        checks: Vec::new(),
    };

    theory_checks(&mut suite)?;
    prime_checks(&mut suite)?;
    field_checks(&mut suite)?;
    oracle_checks(&mut suite)?;
    gibbs_checks(&mut suite)?;

    let passed = suite.checks.iter().filter(|c| c.passed).count();
    let failed = suite.checks.len() - passed;
    Ok(ValidationReport {
        seed,
        passed,
        failed,
        checks: suite.checks,
    })
}

fn theory_checks(suite: &mut Suite) -> Result<()> {
    let frozen = [
        (f_sigma(1.0, 1.0)?, 0.25),
        (f_sigma(4.0, 1.0)?, 3.0),
        (
            limiting_free_energy(&TheoryPoint::new(3.0, 0.5, 0.5)?),
            2.75,
        ),
        (
            limiting_free_energy(&TheoryPoint::new(3.0, 0.5, -0.5)?),
            1.371_708_245_126_284_5,
        ),
    ];
    let worst = frozen
        .iter()
        .map(|(got, want)| (got - want).abs())
        .fold(0.0, f64::max);
    suite.push(
        "theory-frozen-values",
        worst,
        1e-12,
        "four pinned reference values of the limiting free energy".to_string(),
    );

    let mut worst = 0.0f64;
    for beta in [0.5, 2.0, 4.0] {
        for alpha in [0.3, 0.7] {
            for u in [-0.4, 0.0, 0.4] {
                let point = TheoryPoint::new(beta, alpha, u)?;
                let gap =
                    (variational_free_energy(&point, 100_000)? - limiting_free_energy(&point)).abs();
                worst = worst.max(gap);
            }
        }
    }
    suite.push(
        "theory-variational-agreement",
        worst,
        1e-6,
        "grid maximization against the closed form on 18 parameter points".to_string(),
    );
    Ok(())
}

fn prime_checks(suite: &mut Suite) -> Result<()> {
    let table = PrimeTable::sieve(1_000_000)?;
    suite.push(
        "prime-count",
        (table.len() as f64 - 78_498.0).abs(),
        0.0,
        "primes below 10^6 against the reference count".to_string(),
    );

    let range = ScaleRange::full((1_000_000f64).ln())?;
    let sum = prime_reciprocal_sum(&table, &range)?;
    let asymptotic = (1_000_000f64).ln().ln() + MERTENS;
    suite.push(
        "prime-reciprocal-growth",
        (sum - asymptotic).abs(),
        0.05,
        format!("sum 1/p = {sum} vs loglog x + Mertens = {asymptotic}"),
    );
    Ok(())
}

fn field_checks(suite: &mut Suite) -> Result<()> {
    let table = PrimeTable::sieve(1_000_000)?;
    let log_t = (1_000_000f64).ln();
    let range = ScaleRange::full(log_t)?;
    let shifts = uniform_shifts(64);
    let key = StreamKey::new(suite.seed, 0, StreamDomain::FieldAngles);
    let fast = sample_field(&table, log_t, 0.5, key, &shifts)?;
    let direct = sample_window_direct(&table, &range, key, &shifts)?;
    let worst = fast
        .total()
        .iter()
        .zip(&direct)
        .map(|(f, d)| (f - d).abs() / d.abs().max(1.0))
        .fold(0.0, f64::max);
    suite.push(
        "field-binned-vs-direct",
        worst,
        FAST_FIELD_REL_TOL,
        "binned-moment evaluation against direct summation at 64 shifts".to_string(),
    );

    // Empirical covariances on a 16-point grid: count how many of the
    // 136 (i <= j) pairs fall outside three standard errors.
    let small = PrimeTable::sieve(100_000)?;
    let small_log_t = (100_000f64).ln();
    let small_range = ScaleRange::full(small_log_t)?;
    let grid = uniform_shifts(16);
    let n_replicas = 4_000u64;
    let samples: Vec<Vec<f64>> = map_replicas(n_replicas, |replica| {
        let key = StreamKey::new(suite.seed, replica, StreamDomain::FieldAngles);
        sample_field(&small, small_log_t, 0.5, key, &grid).map(|s| s.total())
    })
    .into_iter()
    .collect::<eulerlab::Result<_>>()?;
    let mut outliers = 0usize;
    let mut total = 0usize;
    for i in 0..grid.len() {
        for j in i..grid.len() {
            let series: Vec<f64> = samples.iter().map(|row| row[i] * row[j]).collect();
            let (mean, se) = mean_and_se(&series);
            let exact = if i == j {
                field_variance(&small, &small_range)?
            } else {
                covariance_exact(&small, &small_range, grid[j] - grid[i])?
            };
            total += 1;
            if (mean - exact).abs() > 3.0 * se {
                outliers += 1;
            }
        }
    }
    suite.push(
        "field-covariance-grid",
        outliers as f64 / total as f64,
        0.05,
        format!("{outliers} of {total} grid covariances outside three standard errors"),
    );
    Ok(())
}

fn oracle_checks(suite: &mut Suite) -> Result<()> {
    // Four-prime window where the exact product formula is cheap.
    let table = PrimeTable::sieve(100)?;
    let range = ScaleRange::new(0.0, 0.7, 2.9)?;
    let exact = mgf_product_formula(&table, &range, 0.8, 0.5, 0.3)?;
    let mc = mgf_monte_carlo(&table, &range, 0.8, 0.5, 0.3, suite.seed, 40_000)?;
    suite.push(
        "mgf-product-vs-monte-carlo",
        (mc.mean - exact).abs() / mc.std_error,
        3.0,
        format!("joint exponential moment {} vs product formula {exact}", mc.mean),
    );

    for (name, test_fn, lambda, tight) in [
        ("by-parts-linear", ByPartsTestFn::Linear, 1.0, true),
        ("by-parts-polynomial", ByPartsTestFn::Polynomial, 1.0, true),
        ("by-parts-exponential", ByPartsTestFn::Exponential, 1.0, false),
    ] {
        let check = by_parts_residual(test_fn, lambda)?;
        let threshold = if tight { 1e-12 } else { check.bound };
        suite.push(
            name,
            check.residual,
            threshold,
            format!("circle quadrature residual, curvature bound {}", check.bound),
        );
    }

    let single = single_prime_derivative_check(3, 2.0, 8, suite.seed, 20_000)?;
    suite.push(
        "single-prime-derivative",
        (single.fd_mean - single.closed_form).abs(),
        3.0 * single.fd_std_error + single.correction_bound,
        format!(
            "difference quotient {} vs perturbative value {}",
            single.fd_mean, single.closed_form
        ),
    );

    let tail_table = PrimeTable::sieve(100_000)?;
    let tail_range = ScaleRange::full((100_000f64).ln())?;
    let tail = tail_bound_check(&tail_table, &tail_range, 1.0, suite.seed, 4_000)?;
    suite.push(
        "tail-ceiling",
        tail.probability,
        tail.bound + 3.0 * tail.std_error,
        format!("one-point exceedance {} vs ceiling {}", tail.probability, tail.bound),
    );

    let small = PrimeTable::sieve(10_000)?;
    let small_range = ScaleRange::full((10_000f64).ln())?;
    let joint = joint_tail_factorization(&small, &small_range, 0.5, 0.9, suite.seed, 20_000)?;
    let noise = 3.0 * (joint.joint_std_error + joint.product_std_error);
    let above = joint.joint - 2.0 * joint.product - noise;
    let below = joint.product / 2.0 - noise - joint.joint;
    suite.push(
        "joint-tail-factorization",
        above.max(below).max(0.0),
        0.0,
        format!(
            "joint tail {} vs marginal product {} within a factor-two band",
            joint.joint, joint.product
        ),
    );

    let smoothing = smoothing_max_check(&small, &small_range, 0.5, 16, suite.seed, 4_000)?;
    suite.push(
        "smoothing-interval-max",
        smoothing.interval_tail,
        SMOOTHING_MAX_FACTOR * smoothing.point_tail
            + 3.0 * (smoothing.interval_std_error + smoothing.point_std_error),
        format!(
            "maximum over a width-{} interval vs the one-point tail {}",
            smoothing.width, smoothing.point_tail
        ),
    );
    Ok(())
}

fn gibbs_checks(suite: &mut Suite) -> Result<()> {
    // Pair sampler against exact enumeration under uniform weights.
    let table = PrimeTable::sieve(100_000)?;
    let range = ScaleRange::full((100_000f64).ln())?;
    let n = 32usize;
    let kernel = OverlapKernel::new(&table, &range, n)?;
    let edges: Vec<f64> = (0..=20).map(|k| -1.0 + 0.1 * k as f64).collect();
    let mut exact = OverlapHistogram::new(&edges)?;
    for i in 0..n {
        for j in 0..n {
            exact.record(kernel.rho(i, j))?;
        }
    }
    let weights = vec![1.0 / n as f64; n];
    let n_pairs = 50_000u64;
    let sampled = sample_overlap_pairs(
        &weights,
        &kernel,
        n_pairs,
        StreamKey::new(suite.seed, 0, StreamDomain::OverlapPairs),
        &edges,
    )?;
    let mut worst = 0.0f64;
    for k in 0..edges.len() - 1 {
        let expected = exact.counts()[k] as f64 / (n * n) as f64;
        let observed = sampled.counts()[k] as f64 / n_pairs as f64;
        let sigma = (expected * (1.0 - expected) / n_pairs as f64).sqrt();
        if sigma > 0.0 {
            worst = worst.max((observed - expected).abs() / sigma);
        } else if sampled.counts()[k] > 0 {
            // A bin the kernel cannot reach must stay empty.
            worst = f64::MAX;
        }
    }
    suite.push(
        "pair-sampler-enumeration",
        worst,
        4.0,
        "uniform-weight pair draws against the exact kernel histogram".to_string(),
    );

    // The two routes to the overlap CDF integral on a live histogram.
    let params = EnsembleParams {
        log_t: (100_000f64).ln(),
        alpha: 0.5,
        u: 0.0,
        n_points: 256,
        n_replicas: 50,
        seed: suite.seed,
    };
    let histogram = overlap_ensemble(
        &table,
        &params,
        4.0,
        200,
        &eulerlab::gibbs::default_overlap_edges(),
    )?;
    let integral = overlap_cdf_integral(&histogram, 0.5)?;
    suite.push(
        "overlap-cdf-two-routes",
        (integral.via_cdf - integral.via_identity).abs(),
        integral.binning_tolerance + 1e-12,
        format!(
            "step-CDF route {} vs expectation route {}",
            integral.via_cdf, integral.via_identity
        ),
    );

    // Bitwise replica determinism of a full estimator pipeline.
    let small = PrimeTable::sieve(10_000)?;
    let det_params = EnsembleParams {
        log_t: (10_000f64).ln(),
        alpha: 0.5,
        u: 0.2,
        n_points: 128,
        n_replicas: 50,
        seed: suite.seed,
    };
    let first = free_energy_estimate(&small, &det_params, 4.0)?;
    let second = free_energy_estimate(&small, &det_params, 4.0)?;
    let drift = (first.mean - second.mean).abs() + (first.std_error - second.std_error).abs();
    suite.push(
        "replica-determinism",
        drift,
        0.0,
        "two identical runs of the free energy estimator agree bitwise".to_string(),
    );

    // Log-partition value of a hand-checkable two-point measure.
    let measure = gibbs_weights(&[1.0, 0.0], 2.0)?;
    let expected = ((2.0f64.exp() + 1.0) / 2.0).ln();
    suite.push(
        "gibbs-log-partition",
        (measure.log_partition() - expected).abs(),
        1e-14,
        "closed two-point partition value".to_string(),
    );
    Ok(())
}
