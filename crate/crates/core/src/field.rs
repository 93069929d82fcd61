//! Sampling of the prime-indexed random field and its correlation kernels.
//!
//! Every prime p in a scale window carries an independent uniform angle
//! theta_p, and the field evaluated at a shift h in [0, 1] is
//!
//! ```text
//! X(h) = sum_p cos(theta_p - h log p) / sqrt(p).
//! ```
//!
//! Angles are drawn from a counter-based stream addressed by the global
//! prime index (2 is index 0, 3 is index 1, ...), so sub-windows of the
//! same replica see the same angles and field splitting is exact by
//! construction.
//!
//! Two evaluation routes are provided. The direct route sums per prime and
//! serves as the reference. The production route groups primes into fixed
//! bins in log p, accumulates complex moments per bin once, then evaluates
//! any shift from the moments alone; it must agree with the direct route
//! to [`crate::calibration::FAST_FIELD_REL_TOL`] relative accuracy.

use rand_core::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::primes::{
    cosine_prime_sum, cosine_prime_sums_batch, prime_reciprocal_sum, scale_cutoff, LogBins,
    PrimeTable, ScaleRange, MOMENT_ORDER,
};
use crate::rng::{angle_from_bits, StreamKey};

/// Evaluation grid for Gibbs measures: n equally spaced shifts i/n covering
/// [0, 1). Overlap kernels assume this spacing, which makes the shift-pair
/// correlation a function of the index lag alone.
pub fn uniform_shifts(n_points: usize) -> Vec<f64> {
    let n = n_points as f64;
    (0..n_points).map(|i| i as f64 / n).collect()
}

/// One replica of the field over a scale window, split at an intermediate
/// scale so tilted combinations can be formed without resampling.
#[derive(Clone, Debug)]
pub struct FieldSample {
    shifts: Vec<f64>,
    low: Vec<f64>,
    high: Vec<f64>,
}

impl FieldSample {
    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// Contribution of primes with log p at or below the split scale.
    pub fn low(&self) -> &[f64] {
        &self.low
    }

    /// Contribution of primes with log p above the split scale.
    pub fn high(&self) -> &[f64] {
        &self.high
    }

    /// Untilted field, low plus high contribution per shift.
    pub fn total(&self) -> Vec<f64> {
        self.perturbed(0.0).expect("u = 0 is always admissible")
    }

    /// Tilted field (1+u) * low + high per shift, for u in (-1, 1).
    pub fn perturbed(&self, u: f64) -> Result<Vec<f64>> {
        if !(u > -1.0 && u < 1.0) {
            return Err(Error::invalid(format!("u must lie in (-1, 1), got {u}")));
        }
        let scale = 1.0 + u;
        Ok(self
            .low
            .iter()
            .zip(&self.high)
            .map(|(lo, hi)| scale * lo + hi)
            .collect())
    }
}

/// Samples one replica over the full window of `log_t`, split at
/// `split_alpha`, evaluated at `shifts` (each in [0, 1]) via the binned
/// moment route.
///
/// The angle of the prime with global index i is read from stream position
/// i of `key`, independent of the window or split, so calls that share
/// (seed, replica) agree on every common prime.
pub fn sample_field(
    table: &PrimeTable,
    log_t: f64,
    split_alpha: f64,
    key: StreamKey,
    shifts: &[f64],
) -> Result<FieldSample> {
    if !(split_alpha > 0.0 && split_alpha < 1.0) {
        return Err(Error::invalid(format!(
            "split_alpha must lie in (0, 1), got {split_alpha}"
        )));
    }
    for &h in shifts {
        if !(0.0..=1.0).contains(&h) {
            return Err(Error::invalid(format!(
                "shifts must lie in [0, 1], got {h}"
            )));
        }
    }
    let full = ScaleRange::full(log_t)?;
    let window = table.window(&full)?;
    let split_index = table
        .index_above(scale_cutoff(log_t, split_alpha)?)
        .clamp(window.lo, window.hi);

    let bins = LogBins::for_log_t(log_t);
    let mut low = MomentBank::new(&bins);
    let mut high = MomentBank::new(&bins);

    let log_p = table.log_p();
    let inv_sqrt_p = table.inv_sqrt_p();
    let mut rng = key.stream_at(window.lo as u64);
    for i in window.lo..window.hi {
        let theta = angle_from_bits(rng.next_u64());
        let (sin, cos) = theta.sin_cos();
        let w = inv_sqrt_p[i];
        let bank = if i < split_index { &mut low } else { &mut high };
        bank.accumulate(log_p[i], w * cos, w * sin);
    }

    let low = low.finish();
    let high = high.finish();
    Ok(FieldSample {
        shifts: shifts.to_vec(),
        low: shifts.iter().map(|&h| low.evaluate(h)).collect(),
        high: shifts.iter().map(|&h| high.evaluate(h)).collect(),
    })
}

/// Direct per-prime reference evaluation of the field over an arbitrary
/// scale window. Quadratic in (primes x shifts); meant for validation and
/// small windows, not production sampling.
pub fn sample_window_direct(
    table: &PrimeTable,
    range: &ScaleRange,
    key: StreamKey,
    shifts: &[f64],
) -> Result<Vec<f64>> {
    for &h in shifts {
        if !h.is_finite() {
            return Err(Error::invalid(format!("shift must be finite, got {h}")));
        }
    }
    let window = table.window(range)?;
    let log_p = table.log_p();
    let inv_sqrt_p = table.inv_sqrt_p();
    let mut sums = vec![CompensatedSum::new(); shifts.len()];
    let mut rng = key.stream_at(window.lo as u64);
    for i in window.lo..window.hi {
        let theta = angle_from_bits(rng.next_u64());
        for (sum, &h) in sums.iter_mut().zip(shifts) {
            sum.add((theta - h * log_p[i]).cos() * inv_sqrt_p[i]);
        }
    }
    Ok(sums.into_iter().map(|s| s.value()).collect())
}

/// Exact covariance of the field at two shifts separated by `delta`:
/// (1/2) sum_p cos(delta log p) / p over the window.
pub fn covariance_exact(table: &PrimeTable, range: &ScaleRange, delta: f64) -> Result<f64> {
    Ok(0.5 * cosine_prime_sum(table, range, delta)?)
}

/// Exact variance of the field at any single shift: (1/2) sum_p 1/p.
pub fn field_variance(table: &PrimeTable, range: &ScaleRange) -> Result<f64> {
    Ok(0.5 * prime_reciprocal_sum(table, range)?)
}

/// Correlation coefficient of the field at shift separation `delta`,
/// covariance normalized by the common variance. Equals 1 at delta = 0.
pub fn overlap_rho(table: &PrimeTable, range: &ScaleRange, delta: f64) -> Result<f64> {
    let variance = field_variance(table, range)?;
    if variance <= 0.0 {
        return Err(Error::invalid(
            "overlap is undefined on an empty scale window",
        ));
    }
    Ok(covariance_exact(table, range, delta)? / variance)
}

/// Precomputed correlation table for the uniform shift grid: entry k holds
/// the correlation at shift separation k/n, so the correlation of grid
/// points (i, j) is a lookup at lag |i - j|.
#[derive(Clone, Debug)]
pub struct OverlapKernel {
    rho_by_lag: Vec<f64>,
}

impl OverlapKernel {
    pub fn new(table: &PrimeTable, range: &ScaleRange, n_points: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::invalid("n_points must be positive"));
        }
        let variance = field_variance(table, range)?;
        if variance <= 0.0 {
            return Err(Error::invalid(
                "overlap is undefined on an empty scale window",
            ));
        }
        let deltas: Vec<f64> = uniform_shifts(n_points);
        let sums = cosine_prime_sums_batch(table, range, &deltas)?;
        // The true correlation lies in [-1, 1]; clamp the last-ulp noise of
        // the binned evaluation so downstream range checks stay exact.
        Ok(Self {
            rho_by_lag: sums
                .into_iter()
                .map(|s| (0.5 * s / variance).clamp(-1.0, 1.0))
                .collect(),
        })
    }

    /// Number of grid points the kernel was built for.
    pub fn len(&self) -> usize {
        self.rho_by_lag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho_by_lag.is_empty()
    }

    /// Correlation at index lag `lag`; panics if `lag >= len()`.
    pub fn rho_at_lag(&self, lag: usize) -> f64 {
        self.rho_by_lag[lag]
    }

    /// Correlation of grid points i and j; panics if either is out of range.
    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho_by_lag[i.abs_diff(j)]
    }
}

/// Runs `replica` over 0..n_replicas in parallel and collects results in
/// replica order, so the output is independent of the worker count.
pub fn map_replicas<T, F>(n_replicas: u64, replica: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n_replicas).into_par_iter().map(replica).collect()
}

/// Complex bin moments of one field contribution. Entry (j, k) accumulates
/// sum over primes in bin j of e^{i theta_p} (log p - c_j)^k / sqrt(p);
/// after [`MomentBank::finish`] folds in 1/k!, a shift h is evaluated as
/// Re sum_j e^{-i h c_j} sum_k (-i h)^k M_{j,k} / k! by a Horner recurrence
/// in the complex factor (-i h).
struct MomentBank {
    bins: LogBins,
    re: Vec<CompensatedSum>,
    im: Vec<CompensatedSum>,
}

struct FinishedBank {
    bins: LogBins,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl MomentBank {
    fn new(bins: &LogBins) -> Self {
        let slots = bins.count * MOMENT_ORDER;
        Self {
            bins: *bins,
            re: vec![CompensatedSum::new(); slots],
            im: vec![CompensatedSum::new(); slots],
        }
    }

    #[inline]
    fn accumulate(&mut self, log_p: f64, er: f64, ei: f64) {
        let (j, d) = self.bins.locate(log_p);
        let base = j * MOMENT_ORDER;
        let mut dk = 1.0;
        for k in 0..MOMENT_ORDER {
            self.re[base + k].add(er * dk);
            self.im[base + k].add(ei * dk);
            dk *= d;
        }
    }

    fn finish(self) -> FinishedBank {
        let mut factorial = 1.0;
        let mut inv_factorial = vec![0.0; MOMENT_ORDER];
        for (k, slot) in inv_factorial.iter_mut().enumerate() {
            if k > 0 {
                factorial *= k as f64;
            }
            *slot = 1.0 / factorial;
        }
        let fold = |sums: Vec<CompensatedSum>| -> Vec<f64> {
            sums.iter()
                .enumerate()
                .map(|(slot, s)| s.value() * inv_factorial[slot % MOMENT_ORDER])
                .collect()
        };
        FinishedBank {
            bins: self.bins,
            re: fold(self.re),
            im: fold(self.im),
        }
    }
}

impl FinishedBank {
    fn evaluate(&self, h: f64) -> f64 {
        let mut total = CompensatedSum::new();
        for j in 0..self.bins.count {
            let base = j * MOMENT_ORDER;
            // Horner in the factor (-i h): p <- M[k] + (-i h) * p.
            let mut pr = 0.0;
            let mut pi = 0.0;
            for k in (0..MOMENT_ORDER).rev() {
                let next_r = self.re[base + k] + h * pi;
                let next_i = self.im[base + k] - h * pr;
                pr = next_r;
                pi = next_i;
            }
            if pr == 0.0 && pi == 0.0 {
                continue;
            }
            // Re[e^{-i h c} (pr + i pi)] = cos(h c) pr + sin(h c) pi.
            let (sin, cos) = (h * self.bins.center(j)).sin_cos();
            total.add(cos * pr + sin * pi);
        }
        total.value()
    }
}
