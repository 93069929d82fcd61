//! Joint moment generating function of the field at two shifts: an exact
//! product over primes, and a Monte Carlo route to check the sampler
//! against it.
//!
//! For one prime the tilt lambda * X(h) + lambda' * X(h') collapses to a
//! single cosine with amplitude r_p / sqrt(p), where r_p^2 = lambda^2 +
//! lambda'^2 + 2 lambda lambda' cos(delta log p), and averaging over the
//! angle gives the order-zero modified Bessel value of that amplitude. The
//! full expectation is the product over the window.

use crate::calibration::{MGF_MAX_LAMBDA, MGF_SERIES_TOL};
use crate::error::{Error, Result};
use crate::field::sample_window_direct;
use crate::numeric::{mean_and_se, CompensatedSum};
use crate::primes::{PrimeTable, ScaleRange};
use crate::rng::{StreamDomain, StreamKey};

use super::MonteCarloEstimate;

use rayon::prelude::*;

/// Modified Bessel function of order zero by its power series, summed to
/// relative tolerance [`MGF_SERIES_TOL`].
pub(crate) fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > MGF_SERIES_TOL * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// Modified Bessel function of order one by its power series; the series
/// companion the quadrature checks compare against.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn bessel_i1(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    let mut k = 1.0;
    while term.abs() > MGF_SERIES_TOL * sum.abs() {
        term *= q / (k * (k + 1.0));
        sum += term;
        k += 1.0;
    }
    sum
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda.abs() <= MGF_MAX_LAMBDA) {
        return Err(Error::invalid(format!(
            "tilt must satisfy |lambda| <= {MGF_MAX_LAMBDA}, got {lambda}"
        )));
    }
    Ok(())
}

/// Exact E[exp(lambda * X(h) + lambda' * X(h + delta))] as a product of
/// per-prime Bessel factors over the window.
pub fn mgf_product_formula(
    table: &PrimeTable,
    range: &ScaleRange,
    lambda: f64,
    lambda_prime: f64,
    delta: f64,
) -> Result<f64> {
    check_lambda(lambda)?;
    check_lambda(lambda_prime)?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid(format!("delta must be >= 0, got {delta}")));
    }
    let window = table.window(range)?;
    let log_p = table.log_p();
    let inv_sqrt_p = table.inv_sqrt_p();
    let mut log_product = CompensatedSum::new();
    for i in window.lo..window.hi {
        let cross = 2.0 * lambda * lambda_prime * (delta * log_p[i]).cos();
        let amplitude_sq = (lambda * lambda + lambda_prime * lambda_prime + cross).max(0.0);
        log_product.add(bessel_i0(amplitude_sq.sqrt() * inv_sqrt_p[i]).ln());
    }
    Ok(log_product.value().exp())
}

/// Monte Carlo estimate of the same expectation from direct field samples,
/// one exp(lambda * X(0) + lambda' * X(delta)) per replica.
pub fn mgf_monte_carlo(
    table: &PrimeTable,
    range: &ScaleRange,
    lambda: f64,
    lambda_prime: f64,
    delta: f64,
    seed: u64,
    n_replicas: u64,
) -> Result<MonteCarloEstimate> {
    check_lambda(lambda)?;
    check_lambda(lambda_prime)?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid(format!("delta must be >= 0, got {delta}")));
    }
    if n_replicas < 2 {
        return Err(Error::invalid("n_replicas must be >= 2"));
    }
    let shifts = [0.0, delta];
    let values: Vec<Result<f64>> = (0..n_replicas)
        .into_par_iter()
        .map(|replica| {
            let key = StreamKey::new(seed, replica, StreamDomain::FieldAngles);
            let field = sample_window_direct(table, range, key, &shifts)?;
            Ok((lambda * field[0] + lambda_prime * field[1]).exp())
        })
        .collect();
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    let (mean, std_error) = mean_and_se(&values);
    Ok(MonteCarloEstimate {
        mean,
        std_error,
        n_replicas,
    })
}
