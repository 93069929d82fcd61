//! Tail and extreme-value checks: one-point tails against Chernoff
//! bounds, joint tails against factorization, interval maxima against
//! one-point tails, and the measure of high points against its limiting
//! log-asymptotics.

use crate::calibration::TAIL_BOUND_FACTOR;
use crate::error::{Error, Result};
use crate::field::{map_replicas, sample_field, sample_window_direct, uniform_shifts};
use crate::gibbs::EnsembleParams;
use crate::numeric::{mean_and_se, median};
use crate::primes::{PrimeTable, ScaleRange};
use crate::rng::{StreamDomain, StreamKey};

use super::MonteCarloEstimate;

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
    }
    Ok(())
}

fn check_replicas(n_replicas: u64) -> Result<()> {
    if n_replicas < 2 {
        return Err(Error::invalid("n_replicas must be >= 2"));
    }
    Ok(())
}

fn field_key(seed: u64, replica: u64) -> StreamKey {
    StreamKey::new(seed, replica, StreamDomain::FieldAngles)
}

/// Empirical tail probability with its committed Chernoff-type ceiling.
#[derive(Clone, Copy, Debug)]
pub struct TailCheck {
    pub probability: f64,
    pub std_error: f64,
    /// TAIL_BOUND_FACTOR * (log T)^(-gamma^2 / window width in alpha).
    pub bound: f64,
}

/// Estimates P(X(0) >= gamma * loglog T) over the window and reports it
/// next to the bound it must respect.
pub fn tail_bound_check(
    table: &PrimeTable,
    range: &ScaleRange,
    gamma: f64,
    seed: u64,
    n_replicas: u64,
) -> Result<TailCheck> {
    check_gamma(gamma)?;
    check_replicas(n_replicas)?;
    let width = range.alpha_hi() - range.alpha_lo();
    if width <= 0.0 {
        return Err(Error::invalid("tail check needs a nonempty scale window"));
    }
    let level = gamma * range.loglog_t();
    let hits: Vec<Result<f64>> = map_replicas(n_replicas, |replica| {
        let field = sample_window_direct(table, range, field_key(seed, replica), &[0.0])?;
        Ok(if field[0] >= level { 1.0 } else { 0.0 })
    });
    let hits = hits.into_iter().collect::<Result<Vec<_>>>()?;
    let (probability, std_error) = mean_and_se(&hits);
    let bound = TAIL_BOUND_FACTOR * (-gamma * gamma * range.loglog_t() / width).exp();
    Ok(TailCheck {
        probability,
        std_error,
        bound,
    })
}

/// Joint tail of the field at two shifts against the product of the
/// marginal tails, all estimated on the same replicas.
#[derive(Clone, Copy, Debug)]
pub struct JointTailCheck {
    pub joint: f64,
    pub joint_std_error: f64,
    pub product: f64,
    pub product_std_error: f64,
}

/// Estimates P(X(0) >= level, X(delta) >= level) and the product of the
/// two marginal probabilities, with level = gamma * loglog T.
pub fn joint_tail_factorization(
    table: &PrimeTable,
    range: &ScaleRange,
    gamma: f64,
    delta: f64,
    seed: u64,
    n_replicas: u64,
) -> Result<JointTailCheck> {
    check_gamma(gamma)?;
    check_replicas(n_replicas)?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::invalid(format!("delta must be >= 0, got {delta}")));
    }
    let level = gamma * range.loglog_t();
    let shifts = [0.0, delta];
    let rows: Vec<Result<[f64; 3]>> = map_replicas(n_replicas, |replica| {
        let field = sample_window_direct(table, range, field_key(seed, replica), &shifts)?;
        let first = (field[0] >= level) as u8 as f64;
        let second = (field[1] >= level) as u8 as f64;
        Ok([first * second, first, second])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let (joint, joint_std_error) = mean_and_se(&column(0));
    let (first, first_se) = mean_and_se(&column(1));
    let (second, second_se) = mean_and_se(&column(2));
    Ok(JointTailCheck {
        joint,
        joint_std_error,
        product: first * second,
        product_std_error: (second * first_se).hypot(first * second_se),
    })
}

/// Tail of the maximum over a short interval against the one-point tail
/// at the same level.
#[derive(Clone, Copy, Debug)]
pub struct SmoothingCheck {
    pub interval_tail: f64,
    pub interval_std_error: f64,
    pub point_tail: f64,
    pub point_std_error: f64,
    /// Interval width (log T)^(-alpha_hi) the maximum ranges over.
    pub width: f64,
}

/// Compares P(max over [0, w] >= level) with P(X(0) >= level), where w is
/// the window's own smoothness scale (log T)^(-alpha_hi) and the maximum
/// runs over `n_subpoints` equally spaced shifts.
pub fn smoothing_max_check(
    table: &PrimeTable,
    range: &ScaleRange,
    gamma: f64,
    n_subpoints: usize,
    seed: u64,
    n_replicas: u64,
) -> Result<SmoothingCheck> {
    check_gamma(gamma)?;
    check_replicas(n_replicas)?;
    if n_subpoints < 2 {
        return Err(Error::invalid("n_subpoints must be >= 2"));
    }
    let level = gamma * range.loglog_t();
    let width = (-range.alpha_hi() * range.loglog_t()).exp();
    let shifts: Vec<f64> = (0..n_subpoints)
        .map(|j| width * j as f64 / (n_subpoints - 1) as f64)
        .collect();
    let rows: Vec<Result<[f64; 2]>> = map_replicas(n_replicas, |replica| {
        let field = sample_window_direct(table, range, field_key(seed, replica), &shifts)?;
        let max = field.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok([(max >= level) as u8 as f64, (field[0] >= level) as u8 as f64])
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let (interval_tail, interval_std_error) = mean_and_se(&column(0));
    let (point_tail, point_std_error) = mean_and_se(&column(1));
    Ok(SmoothingCheck {
        interval_tail,
        interval_std_error,
        point_tail,
        point_std_error,
        width,
    })
}

/// Mean of the grid maximum of the tilted field, normalized by loglog T.
/// Its large-T limit is the top growth level of the tilted model.
pub fn max_field_check(
    table: &PrimeTable,
    params: &EnsembleParams,
) -> Result<MonteCarloEstimate> {
    params.validate()?;
    let shifts = uniform_shifts(params.n_points);
    let norm = params.log_t.ln();
    let maxima: Vec<Result<f64>> = map_replicas(params.n_replicas, |replica| {
        let sample = sample_field(
            table,
            params.log_t,
            params.alpha,
            StreamKey::new(params.seed, replica, StreamDomain::FieldAngles),
            &shifts,
        )?;
        let values = sample.perturbed(params.u)?;
        Ok(values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / norm)
    });
    let maxima = maxima.into_iter().collect::<Result<Vec<_>>>()?;
    let (mean, std_error) = mean_and_se(&maxima);
    Ok(MonteCarloEstimate {
        mean,
        std_error,
        n_replicas: params.n_replicas,
    })
}

/// Empirical log-measure exponent of level-gamma high points: the median
/// over replicas of the fraction of grid shifts where the tilted field
/// reaches gamma * loglog T, log-normalized. `None` when the median
/// fraction is zero, so the exponent is out of reach for this grid.
pub fn high_points_measure_estimate(
    table: &PrimeTable,
    params: &EnsembleParams,
    gamma: f64,
) -> Result<Option<f64>> {
    Ok(high_points_measure_sweep(table, params, &[gamma])?.remove(0))
}

/// [`high_points_measure_estimate`] for several levels at once. Every
/// level is counted against the same field draws, so comparisons across
/// levels carry no sampling noise of their own, and the field is sampled
/// once per replica instead of once per level.
pub fn high_points_measure_sweep(
    table: &PrimeTable,
    params: &EnsembleParams,
    gammas: &[f64],
) -> Result<Vec<Option<f64>>> {
    params.validate()?;
    if gammas.is_empty() {
        return Err(Error::invalid("at least one level is required"));
    }
    for &gamma in gammas {
        check_gamma(gamma)?;
    }
    let shifts = uniform_shifts(params.n_points);
    let norm = params.log_t.ln();
    let rows: Vec<Result<Vec<f64>>> = map_replicas(params.n_replicas, |replica| {
        let sample = sample_field(
            table,
            params.log_t,
            params.alpha,
            StreamKey::new(params.seed, replica, StreamDomain::FieldAngles),
            &shifts,
        )?;
        let values = sample.perturbed(params.u)?;
        Ok(gammas
            .iter()
            .map(|&gamma| {
                let level = gamma * norm;
                let hits = values.iter().filter(|&&v| v >= level).count();
                hits as f64 / params.n_points as f64
            })
            .collect())
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((0..gammas.len())
        .map(|k| {
            let fractions: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            let mid = median(&fractions);
            if mid > 0.0 { Some(mid.ln() / norm) } else { None }
        })
        .collect())
}
