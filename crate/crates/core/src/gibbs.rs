//! Gibbs measures on the shift grid and their Monte Carlo observables:
//! normalized free energies, tilt derivatives, and two-overlap histograms.
//!
//! The Gibbs measure at inverse temperature beta puts weight proportional
//! to exp(beta * X(h_i)) on each grid shift h_i. The normalized free energy
//! of one replica is log((1/n) sum_i exp(beta * X(h_i))) divided by
//! log log T, and ensemble estimators average that over independent
//! replicas. The overlap of two independent draws from the same measure is
//! the correlation of the field at the drawn shift pair.

use crate::error::{Error, Result};
use crate::field::{map_replicas, sample_field, uniform_shifts, OverlapKernel};
use crate::numeric::{mean_and_se, CompensatedSum};
use crate::primes::{PrimeTable, ScaleRange};
use crate::rng::{unit_from_bits, StreamDomain, StreamKey};

use rand_core::RngCore;

/// Normalized weights and log-partition value of one replica.
#[derive(Clone, Debug)]
pub struct GibbsMeasure {
    weights: Vec<f64>,
    log_partition: f64,
}

impl GibbsMeasure {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// log((1/n) sum_i exp(beta * v_i)), the grid version of the
    /// log-integral over [0, 1).
    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }
}

/// Builds the Gibbs measure over `values` at inverse temperature `beta`,
/// max-shifted so arbitrarily large beta * value products stay finite.
pub fn gibbs_weights(values: &[f64], beta: f64) -> Result<GibbsMeasure> {
    if values.is_empty() {
        return Err(Error::invalid("Gibbs measure needs at least one value"));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::invalid(format!("beta must be >= 0, got {beta}")));
    }
    let mut top = f64::NEG_INFINITY;
    for &v in values {
        if !v.is_finite() {
            return Err(Error::invalid(format!("values must be finite, got {v}")));
        }
        top = top.max(beta * v);
    }
    let mut weights: Vec<f64> = values.iter().map(|&v| (beta * v - top).exp()).collect();
    let mut norm = CompensatedSum::new();
    for &w in &weights {
        norm.add(w);
    }
    let norm = norm.value();
    for w in &mut weights {
        *w /= norm;
    }
    Ok(GibbsMeasure {
        weights,
        log_partition: top + (norm / values.len() as f64).ln(),
    })
}

/// Replica-ensemble description shared by the Monte Carlo estimators:
/// which window to sample (`log_t`), where to split it (`alpha`), the tilt
/// (`u`), the grid resolution, and the ensemble size and seed.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleParams {
    pub log_t: f64,
    pub alpha: f64,
    pub u: f64,
    pub n_points: usize,
    pub n_replicas: u64,
    pub seed: u64,
}

impl EnsembleParams {
    pub fn validate(&self) -> Result<()> {
        ScaleRange::full(self.log_t)?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.u > -1.0 && self.u < 1.0) {
            return Err(Error::invalid(format!(
                "u must lie in (-1, 1), got {}",
                self.u
            )));
        }
        if self.n_points < 2 {
            return Err(Error::invalid(format!(
                "n_points must be >= 2, got {}",
                self.n_points
            )));
        }
        if self.n_replicas < 2 {
            return Err(Error::invalid(format!(
                "n_replicas must be >= 2, got {}",
                self.n_replicas
            )));
        }
        Ok(())
    }

    fn field_key(&self, replica: u64) -> StreamKey {
        StreamKey::new(self.seed, replica, StreamDomain::FieldAngles)
    }

    fn pair_key(&self, replica: u64) -> StreamKey {
        StreamKey::new(self.seed, replica, StreamDomain::OverlapPairs)
    }
}

/// Replica mean and its standard error.
#[derive(Clone, Copy, Debug)]
pub struct FreeEnergyEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_replicas: u64,
}

/// Estimates the normalized free energy at each beta in `betas`, reusing
/// one field sample per replica for every beta, so estimates across betas
/// share their randomness.
pub fn free_energy_sweep(
    table: &PrimeTable,
    params: &EnsembleParams,
    betas: &[f64],
) -> Result<Vec<FreeEnergyEstimate>> {
    params.validate()?;
    if betas.is_empty() {
        return Err(Error::invalid("at least one beta is required"));
    }
    let shifts = uniform_shifts(params.n_points);
    let norm = params.log_t.ln();
    let per_replica: Vec<Result<Vec<f64>>> = map_replicas(params.n_replicas, |replica| {
        let sample = sample_field(
            table,
            params.log_t,
            params.alpha,
            params.field_key(replica),
            &shifts,
        )?;
        let values = sample.perturbed(params.u)?;
        betas
            .iter()
            .map(|&beta| Ok(gibbs_weights(&values, beta)?.log_partition() / norm))
            .collect()
    });
    let per_replica = per_replica.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((0..betas.len())
        .map(|b| {
            let series: Vec<f64> = per_replica.iter().map(|row| row[b]).collect();
            let (mean, std_error) = mean_and_se(&series);
            FreeEnergyEstimate {
                mean,
                std_error,
                n_replicas: params.n_replicas,
            }
        })
        .collect())
}

/// Estimates the normalized free energy at a single beta.
pub fn free_energy_estimate(
    table: &PrimeTable,
    params: &EnsembleParams,
    beta: f64,
) -> Result<FreeEnergyEstimate> {
    Ok(free_energy_sweep(table, params, &[beta])?.remove(0))
}

/// Estimates the tilt derivative of the normalized free energy by a
/// central difference of width `step`, using the same field sample on both
/// sides of the difference so the noise cancels replica by replica.
pub fn du_free_energy(
    table: &PrimeTable,
    params: &EnsembleParams,
    beta: f64,
    step: f64,
) -> Result<FreeEnergyEstimate> {
    params.validate()?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("step must be > 0, got {step}")));
    }
    if params.u - step <= -1.0 || params.u + step >= 1.0 {
        return Err(Error::invalid(format!(
            "u +/- step must stay inside (-1, 1), got u = {} step = {step}",
            params.u
        )));
    }
    let shifts = uniform_shifts(params.n_points);
    let norm = params.log_t.ln();
    let diffs: Vec<Result<f64>> = map_replicas(params.n_replicas, |replica| {
        let sample = sample_field(
            table,
            params.log_t,
            params.alpha,
            params.field_key(replica),
            &shifts,
        )?;
        let upper = gibbs_weights(&sample.perturbed(params.u + step)?, beta)?.log_partition();
        let lower = gibbs_weights(&sample.perturbed(params.u - step)?, beta)?.log_partition();
        Ok((upper - lower) / (2.0 * step * norm))
    });
    let diffs = diffs.into_iter().collect::<Result<Vec<_>>>()?;
    let (mean, std_error) = mean_and_se(&diffs);
    Ok(FreeEnergyEstimate {
        mean,
        std_error,
        n_replicas: params.n_replicas,
    })
}

/// Fixed-edge histogram with exact integer counts, so merges are
/// associative and independent of accumulation order.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapHistogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
}

impl OverlapHistogram {
    pub fn new(edges: &[f64]) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::invalid("histogram needs at least two edges"));
        }
        for pair in edges.windows(2) {
            if !(pair[0].is_finite() && pair[1].is_finite() && pair[0] < pair[1]) {
                return Err(Error::invalid(format!(
                    "histogram edges must be finite and strictly increasing, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self {
            edges: edges.to_vec(),
            counts: vec![0; edges.len() - 1],
        })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Fraction of recorded mass in bin `k`.
    pub fn mass(&self, k: usize) -> f64 {
        self.counts[k] as f64 / self.total() as f64
    }

    /// Records one value. Bins are half-open [lo, hi) except the last,
    /// which includes its upper edge; values outside the edge span are an
    /// internal error because overlap values are bounded by construction.
    pub fn record(&mut self, value: f64) -> Result<()> {
        let last = self.edges.len() - 1;
        if !value.is_finite() || value < self.edges[0] || value > self.edges[last] {
            return Err(Error::Internal(format!(
                "value {value} outside histogram range [{}, {}]",
                self.edges[0], self.edges[last]
            )));
        }
        let bin = self.edges.partition_point(|&e| e <= value);
        self.counts[bin.min(last) - 1] += 1;
        Ok(())
    }

    /// Adds another histogram with bitwise-identical edges.
    pub fn merge(&mut self, other: &OverlapHistogram) -> Result<()> {
        let same = self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .zip(&other.edges)
                .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            return Err(Error::invalid("cannot merge histograms with different edges"));
        }
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            *mine += theirs;
        }
        Ok(())
    }

    /// Fraction of mass strictly below `edge`, which must be one of the
    /// histogram edges so the answer is exact.
    pub fn fraction_below(&self, edge: f64) -> Result<f64> {
        let Some(k) = self.edges.iter().position(|&e| e == edge) else {
            return Err(Error::invalid(format!(
                "{edge} is not a histogram edge"
            )));
        };
        let below: u64 = self.counts[..k].iter().sum();
        Ok(below as f64 / self.total() as f64)
    }
}

/// Default overlap binning: coarse bins on [-1, 0) where only weak
/// anti-correlation mass appears, and 36 uniform bins on [0, 1] so that
/// 1/4, 1/2 and 3/4 are exact edges.
pub fn default_overlap_edges() -> Vec<f64> {
    let mut edges: Vec<f64> = (0..5).map(|i| -1.0 + 0.2 * i as f64).collect();
    edges.extend((0..=36).map(|k| k as f64 / 36.0));
    edges
}

/// Draws `n_pairs` independent shift pairs from the discrete measure
/// `weights`, looks their correlation up in `kernel`, and bins it. Each
/// pair consumes exactly two stream values of `key`, so the output is a
/// pure function of (weights, kernel, key).
pub fn sample_overlap_pairs(
    weights: &[f64],
    kernel: &OverlapKernel,
    n_pairs: u64,
    key: StreamKey,
    edges: &[f64],
) -> Result<OverlapHistogram> {
    if weights.len() != kernel.len() {
        return Err(Error::invalid(format!(
            "weights ({}) and kernel ({}) sizes differ",
            weights.len(),
            kernel.len()
        )));
    }
    let mut cdf = Vec::with_capacity(weights.len());
    let mut running = CompensatedSum::new();
    for &w in weights {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::invalid(format!("weights must be >= 0, got {w}")));
        }
        running.add(w);
        cdf.push(running.value());
    }
    let total = running.value();
    if !(total > 0.0) {
        return Err(Error::invalid("weights must not all be zero"));
    }

    let mut histogram = OverlapHistogram::new(edges)?;
    let top = weights.len() - 1;
    let mut rng = key.stream_at(0);
    let draw = |rng: &mut rand_chacha::ChaCha12Rng| -> usize {
        let u = unit_from_bits(rng.next_u64()) * total;
        cdf.partition_point(|&c| c <= u).min(top)
    };
    for _ in 0..n_pairs {
        let i = draw(&mut rng);
        let j = draw(&mut rng);
        histogram.record(kernel.rho(i, j))?;
    }
    Ok(histogram)
}

/// Samples two-overlap histograms of the tilted Gibbs measure for every
/// beta in `betas`: one field sample and one pair stream per replica are
/// shared by all betas, so the histograms differ only through the Gibbs
/// weights and comparisons across betas see identical randomness.
pub fn overlap_sweep(
    table: &PrimeTable,
    params: &EnsembleParams,
    betas: &[f64],
    pairs_per_replica: u64,
    edges: &[f64],
) -> Result<Vec<OverlapHistogram>> {
    params.validate()?;
    if betas.is_empty() {
        return Err(Error::invalid("at least one beta is required"));
    }
    if pairs_per_replica == 0 {
        return Err(Error::invalid("pairs_per_replica must be positive"));
    }
    let shifts = uniform_shifts(params.n_points);
    let range = ScaleRange::full(params.log_t)?;
    let kernel = OverlapKernel::new(table, &range, params.n_points)?;
    let per_replica: Vec<Result<Vec<OverlapHistogram>>> =
        map_replicas(params.n_replicas, |replica| {
            let sample = sample_field(
                table,
                params.log_t,
                params.alpha,
                params.field_key(replica),
                &shifts,
            )?;
            let values = sample.perturbed(params.u)?;
            betas
                .iter()
                .map(|&beta| {
                    let measure = gibbs_weights(&values, beta)?;
                    sample_overlap_pairs(
                        measure.weights(),
                        &kernel,
                        pairs_per_replica,
                        params.pair_key(replica),
                        edges,
                    )
                })
                .collect()
        });
    let mut merged = betas
        .iter()
        .map(|_| OverlapHistogram::new(edges))
        .collect::<Result<Vec<_>>>()?;
    for row in per_replica {
        for (acc, part) in merged.iter_mut().zip(row?.iter()) {
            acc.merge(part)?;
        }
    }
    Ok(merged)
}

/// Samples the two-overlap histogram of the tilted Gibbs measure at a
/// single beta, merged in replica order.
pub fn overlap_ensemble(
    table: &PrimeTable,
    params: &EnsembleParams,
    beta: f64,
    pairs_per_replica: u64,
    edges: &[f64],
) -> Result<OverlapHistogram> {
    Ok(overlap_sweep(table, params, &[beta], pairs_per_replica, edges)?.remove(0))
}

/// The overlap-distribution functional int_0^alpha P(overlap <= s) ds
/// computed from a histogram by two routes that use different bin
/// representatives, plus an a-priori bound on how far apart binning can
/// put them.
#[derive(Clone, Copy, Debug)]
pub struct CdfIntegral {
    /// Step integral of the empirical CDF, mass placed at right bin edges.
    pub via_cdf: f64,
    /// Expectation of the equivalent integrand clamp(alpha - overlap,
    /// 0, alpha), mass placed at bin midpoints.
    pub via_identity: f64,
    /// Worst-case route disagreement from bin placement alone.
    pub binning_tolerance: f64,
}

/// Computes the CDF integral of `histogram` up to `alpha` by both routes
/// and cross-checks them; a disagreement beyond the binning tolerance is
/// an internal error because the routes integrate the same counts.
pub fn overlap_cdf_integral(histogram: &OverlapHistogram, alpha: f64) -> Result<CdfIntegral> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let total = histogram.total();
    if total == 0 {
        return Err(Error::invalid("cannot integrate an empty histogram"));
    }
    let total = total as f64;
    let edges = histogram.edges();
    let counts = histogram.counts();

    // Route one: integrate the step CDF that jumps by each bin's mass at
    // the bin's right edge. Between consecutive right edges the CDF is
    // constant, so the integral over [0, alpha] is a sum of clipped
    // segments; below the first right edge the CDF is zero.
    let mut via_cdf = 0.0;
    let mut cum = 0.0;
    for (k, &count) in counts.iter().enumerate() {
        cum += count as f64 / total;
        let lo = edges[k + 1].clamp(0.0, alpha);
        let hi = edges.get(k + 2).copied().unwrap_or(alpha).clamp(0.0, alpha);
        via_cdf += cum * (hi - lo);
    }

    // Route two: expectation of clamp(alpha - value, 0, alpha) with each
    // bin's mass at its midpoint.
    let mut via_identity = 0.0;
    let mut binning_tolerance = 0.0;
    for (k, &count) in counts.iter().enumerate() {
        let mass = count as f64 / total;
        let mid = 0.5 * (edges[k] + edges[k + 1]);
        via_identity += mass * (alpha - mid).clamp(0.0, alpha);
        if edges[k + 1] > 0.0 && edges[k] < alpha {
            binning_tolerance += mass * 0.5 * (edges[k + 1] - edges[k]);
        }
    }

    let result = CdfIntegral {
        via_cdf,
        via_identity,
        binning_tolerance,
    };
    if (via_cdf - via_identity).abs() > binning_tolerance + 1e-12 {
        return Err(Error::Internal(format!(
            "CDF integral routes disagree beyond binning tolerance: {} vs {} (tolerance {})",
            via_cdf, via_identity, binning_tolerance
        )));
    }
    Ok(result)
}
