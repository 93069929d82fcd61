//! Prime tables, scale windows, and weighted prime sums.
//!
//! Scales are parametrized by `alpha`: the window at `(alpha_lo, alpha_hi]`
//! contains the primes p with (log T)^alpha_lo < log p <= (log T)^alpha_hi,
//! resolved to integer cutoffs floor(exp((log T)^alpha)) so that window
//! membership never depends on floating-point comparisons of log p.
//! `alpha = 0` denotes the bottom of the range (every prime qualifies above
//! it), `alpha = 1` the full range p <= T.
//!
//! All sums run ascending in p with compensated accumulation, so identical
//! windows always produce identical bits and split windows recombine to
//! within a few ulps of the unsplit sum.

mod cache;
mod sieve;

pub use cache::{read_cache, write_cache};
pub use sieve::MAX_SIEVE_LIMIT;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Ascending primes up to a limit with per-prime log p and 1/sqrt(p).
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    log_p: Vec<f64>,
    inv_sqrt_p: Vec<f64>,
}

impl PrimeTable {
    /// Sieve all primes `<= limit`.
    ///
    /// `limit < 2` is rejected; limits above [`MAX_SIEVE_LIMIT`] are refused
    /// as a resource guard (the table alone would exceed the memory budget).
    pub fn sieve(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::invalid(format!(
                "sieve limit must be >= 2, got {limit}"
            )));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "sieve limit {limit} exceeds cap {MAX_SIEVE_LIMIT}"
            )));
        }
        Ok(Self::from_primes(limit, sieve::sieve(limit)))
    }

    pub(crate) fn from_primes(limit: u64, primes: Vec<u64>) -> Self {
        let log_p = primes.iter().map(|&p| (p as f64).ln()).collect();
        let inv_sqrt_p = primes.iter().map(|&p| 1.0 / (p as f64).sqrt()).collect();
        Self { limit, primes, log_p, inv_sqrt_p }
    }

    /// Largest integer the sieve covered (not necessarily prime).
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn log_p(&self) -> &[f64] {
        &self.log_p
    }

    pub fn inv_sqrt_p(&self) -> &[f64] {
        &self.inv_sqrt_p
    }

    /// Index of the first prime strictly greater than `bound`.
    pub fn index_above(&self, bound: u64) -> usize {
        self.primes.partition_point(|&p| p <= bound)
    }

    /// Index range of the primes inside `range`'s window.
    ///
    /// Fails with [`Error::Coverage`] if the window's upper cutoff exceeds
    /// the sieved limit, since primes could then be silently missing.
    pub fn window(&self, range: &ScaleRange) -> Result<PrimeWindow> {
        let lo_cut = range.cutoff_lo()?;
        let hi_cut = range.cutoff_hi()?;
        if hi_cut > self.limit {
            return Err(Error::Coverage(format!(
                "window needs primes up to {hi_cut}, table covers {}",
                self.limit
            )));
        }
        Ok(PrimeWindow {
            lo: self.index_above(lo_cut),
            hi: self.index_above(hi_cut),
        })
    }
}

/// Half-open index range [lo, hi) into a [`PrimeTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeWindow {
    pub lo: usize,
    pub hi: usize,
}

impl PrimeWindow {
    pub fn len(&self) -> usize {
        self.hi.saturating_sub(self.lo)
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }
}

/// A scale window `(alpha_lo, alpha_hi]` at a given log T.
///
/// Requires `log_T > e` (so (log T)^alpha is increasing in alpha and
/// loglog T > 0) and `0 <= alpha_lo <= alpha_hi <= 1`. Equal bounds give an
/// empty window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleRange {
    alpha_lo: f64,
    alpha_hi: f64,
    log_t: f64,
}

impl ScaleRange {
    pub fn new(alpha_lo: f64, alpha_hi: f64, log_t: f64) -> Result<Self> {
        if !log_t.is_finite() || log_t <= std::f64::consts::E {
            return Err(Error::invalid(format!(
                "log_T must be finite and > e, got {log_t}"
            )));
        }
        if !(0.0..=1.0).contains(&alpha_lo) || !(0.0..=1.0).contains(&alpha_hi) {
            return Err(Error::invalid(format!(
                "alpha bounds must lie in [0, 1], got ({alpha_lo}, {alpha_hi})"
            )));
        }
        if alpha_lo > alpha_hi {
            return Err(Error::invalid(format!(
                "alpha_lo {alpha_lo} exceeds alpha_hi {alpha_hi}"
            )));
        }
        Ok(Self { alpha_lo, alpha_hi, log_t })
    }

    /// The full window (0, 1]: all primes p <= T.
    pub fn full(log_t: f64) -> Result<Self> {
        Self::new(0.0, 1.0, log_t)
    }

    pub fn alpha_lo(&self) -> f64 {
        self.alpha_lo
    }

    pub fn alpha_hi(&self) -> f64 {
        self.alpha_hi
    }

    pub fn log_t(&self) -> f64 {
        self.log_t
    }

    pub fn loglog_t(&self) -> f64 {
        self.log_t.ln()
    }

    /// Integer cutoff below the window: primes p with p > cutoff_lo qualify.
    pub fn cutoff_lo(&self) -> Result<u64> {
        if self.alpha_lo == 0.0 {
            Ok(1)
        } else {
            scale_cutoff(self.log_t, self.alpha_lo)
        }
    }

    /// Integer cutoff of the window top: primes p with p <= cutoff_hi qualify.
    pub fn cutoff_hi(&self) -> Result<u64> {
        if self.alpha_hi == 0.0 {
            Ok(1)
        } else {
            scale_cutoff(self.log_t, self.alpha_hi)
        }
    }
}

/// Largest prime candidate at scale alpha: floor(exp((log T)^alpha)).
///
/// Requires `0 < alpha <= 1` and `log_T > 1`. Results above
/// [`MAX_SIEVE_LIMIT`] are refused: no table could cover them. Values
/// within a few ulps of an integer snap to it before the floor, so that
/// alpha = 1 with log_T = log(n) recovers n exactly despite the
/// exp-of-log round trip.
pub fn scale_cutoff(log_t: f64, alpha: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if !log_t.is_finite() || log_t <= 1.0 {
        return Err(Error::invalid(format!(
            "log_T must be finite and > 1, got {log_t}"
        )));
    }
    let raw = log_t.powf(alpha).exp();
    let snapped = raw.round();
    let cut = if (raw - snapped).abs() <= 1e-12 * raw {
        snapped
    } else {
        raw.floor()
    };
    if cut > MAX_SIEVE_LIMIT as f64 {
        return Err(Error::ResourceLimit(format!(
            "scale cutoff exp({log_t}^{alpha}) ~ {cut:.3e} exceeds cap {MAX_SIEVE_LIMIT}"
        )));
    }
    Ok(cut as u64)
}

/// Sum of 1/p over the primes in `range`'s window, ascending, compensated.
pub fn prime_reciprocal_sum(table: &PrimeTable, range: &ScaleRange) -> Result<f64> {
    let w = table.window(range)?;
    let mut acc = CompensatedSum::new();
    for &p in &table.primes()[w.lo..w.hi] {
        acc.add(1.0 / p as f64);
    }
    Ok(acc.value())
}

/// Sum of cos(delta * log p) / p over the window, ascending, compensated.
///
/// `delta = 0` reproduces [`prime_reciprocal_sum`] bit for bit.
pub fn cosine_prime_sum(table: &PrimeTable, range: &ScaleRange, delta: f64) -> Result<f64> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::invalid(format!(
            "delta must be finite and >= 0, got {delta}"
        )));
    }
    let w = table.window(range)?;
    let mut acc = CompensatedSum::new();
    for i in w.lo..w.hi {
        let p = table.primes[i] as f64;
        acc.add((delta * table.log_p[i]).cos() / p);
    }
    Ok(acc.value())
}

/// Batched cosine sums over a window for many deltas.
///
/// Algorithm: primes are grouped into fixed bins of width [`BIN_WIDTH`] in
/// log p; per bin the real moments sum_p (log p - center)^k / p are
/// accumulated once, after which each delta costs O(bins * order) via
/// cos(delta*log p) = Re(e^{i delta c} e^{i delta d}) and a Taylor
/// expansion of the second factor. Agrees with [`cosine_prime_sum`] to
/// ~1e-13 absolute; the direct routine remains the reference.
pub fn cosine_prime_sums_batch(
    table: &PrimeTable,
    range: &ScaleRange,
    deltas: &[f64],
) -> Result<Vec<f64>> {
    for &d in deltas {
        if !d.is_finite() || d < 0.0 || d > 1.0 {
            return Err(Error::invalid(format!(
                "batched deltas must lie in [0, 1], got {d}"
            )));
        }
    }
    let w = table.window(range)?;
    let bins = LogBins::for_log_t(range.log_t);
    let mut moments = vec![0.0f64; bins.count * MOMENT_ORDER];
    for i in w.lo..w.hi {
        let lp = table.log_p[i];
        let inv_p = 1.0 / table.primes[i] as f64;
        let (j, d) = bins.locate(lp);
        let base = j * MOMENT_ORDER;
        let mut t = inv_p;
        for k in 0..MOMENT_ORDER {
            moments[base + k] += t;
            t *= d;
        }
    }
    // Fold 1/k! into the moments once.
    let mut fact = 1.0;
    for k in 0..MOMENT_ORDER {
        if k > 0 {
            fact *= k as f64;
        }
        for j in 0..bins.count {
            moments[j * MOMENT_ORDER + k] /= fact;
        }
    }
    let out = deltas
        .iter()
        .map(|&delta| {
            let mut sum = CompensatedSum::new();
            for j in 0..bins.count {
                let base = j * MOMENT_ORDER;
                // P = sum_k (i*delta)^k * m_k via Horner in (i*delta).
                let mut pr = moments[base + MOMENT_ORDER - 1];
                let mut pi = 0.0f64;
                for k in (0..MOMENT_ORDER - 1).rev() {
                    let (nr, ni) = (moments[base + k] - delta * pi, delta * pr);
                    pr = nr;
                    pi = ni;
                }
                let (s, c) = (delta * bins.center(j)).sin_cos();
                sum.add(c * pr - s * pi);
            }
            sum.value()
        })
        .collect();
    Ok(out)
}

/// Width of the log p bins used by banked evaluations.
pub(crate) const BIN_WIDTH: f64 = 0.5;

/// Taylor order: remainder per term is (BIN_WIDTH/2)^K / K! ~ 1.2e-16.
pub(crate) const MOMENT_ORDER: usize = 12;

/// Fixed global binning of log p anchored at log 2, shared by every window
/// so that window splits never move a prime to a different bin.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LogBins {
    pub count: usize,
}

impl LogBins {
    pub fn for_log_t(log_t: f64) -> Self {
        let span = (log_t - std::f64::consts::LN_2).max(0.0);
        Self { count: (span / BIN_WIDTH) as usize + 1 }
    }

    #[inline]
    pub fn locate(&self, log_p: f64) -> (usize, f64) {
        let j = (((log_p - std::f64::consts::LN_2) / BIN_WIDTH) as usize).min(self.count - 1);
        (j, log_p - self.center(j))
    }

    #[inline]
    pub fn center(&self, j: usize) -> f64 {
        std::f64::consts::LN_2 + (j as f64 + 0.5) * BIN_WIDTH
    }
}
