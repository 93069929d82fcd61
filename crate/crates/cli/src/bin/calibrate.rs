//! Pilot runs behind the committed tolerance constants and the default
//! overlap histogram layout. Each pilot prints a table to stdout; numbers
//! quoted in docs and acceptance thresholds come from these runs.

use std::time::Instant;

use anyhow::Result;
use eulerlab::field::{map_replicas, sample_field, uniform_shifts, OverlapKernel};
use eulerlab::gibbs::{free_energy_sweep, overlap_sweep, EnsembleParams, OverlapHistogram};
use eulerlab::oracle::high_points_measure_estimate;
use eulerlab::primes::{PrimeTable, ScaleRange};
use eulerlab::rng::{StreamDomain, StreamKey};
use eulerlab::theory::{
    gamma_c, gamma_star, high_points_exponent, limiting_free_energy, TheoryPoint,
};

fn main() -> Result<()> {
    let which = std::env::args().nth(1).unwrap_or_default();
    match which.as_str() {
        "kernel" => kernel_profile(),
        "overlap" => overlap_pilot(),
        "free-energy" => free_energy_pilot(),
        "high-points" => high_points_pilot(),
        "runtime" => runtime_pilot(),
        other => {
            eprintln!("unknown pilot `{other}`");
            eprintln!("usage: calibrate <kernel|overlap|free-energy|high-points|runtime>");
            std::process::exit(2);
        }
    }
}

fn sieve_for(log_t: f64) -> Result<PrimeTable> {
    let limit = ScaleRange::full(log_t)?.cutoff_hi()?;
    Ok(PrimeTable::sieve(limit)?)
}

/// Deterministic correlation profile of the shift grid: where overlap
/// values can sit at all, and what a uniformly drawn pair would see.
fn kernel_profile() -> Result<()> {
    for log_t in [(1e6f64).ln(), (1e8f64).ln()] {
        let table = sieve_for(log_t)?;
        let range = ScaleRange::full(log_t)?;
        let n = 2048usize;
        let kernel = OverlapKernel::new(&table, &range, n)?;
        println!("log T = {log_t:.4}, loglog T = {:.4}", log_t.ln());
        println!("  rho at distance:");
        for &distance in &[
            0.0005, 0.001, 0.005, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0,
        ] {
            let lag = (distance * n as f64).round() as usize;
            println!(
                "    |h - h'| = {distance:<7} rho = {:+.4}",
                kernel.rho_at_lag(lag.min(n - 1))
            );
        }
        // Distribution of rho under uniformly random pairs: lag l has
        // weight 2(n - l) off the diagonal, n on it.
        let mut quantile_data: Vec<(f64, f64)> = Vec::new();
        for lag in 0..n {
            let weight = if lag == 0 { n } else { 2 * (n - lag) } as f64;
            quantile_data.push((kernel.rho_at_lag(lag), weight));
        }
        quantile_data.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = quantile_data.iter().map(|(_, w)| w).sum();
        let mut running = 0.0;
        let mut idx = 0;
        println!("  uniform-pair rho quantiles:");
        for (rho, weight) in quantile_data {
            running += weight;
            let targets = [0.05, 0.25, 0.5, 0.75, 0.95];
            while idx < targets.len() && running >= targets[idx] * total {
                println!("    q{:<4} = {rho:+.4}", targets[idx]);
                idx += 1;
            }
        }
    }
    Ok(())
}

/// Overlap histograms at the top rung under candidate bin layouts.
fn overlap_pilot() -> Result<()> {
    let log_t = (1e8f64).ln();
    let table = sieve_for(log_t)?;
    let params = EnsembleParams {
        log_t,
        alpha: 0.5,
        u: 0.0,
        n_points: 2048,
        n_replicas: 2000,
        seed: 1,
    };
    let betas = [0.5, 4.0];
    let fine: Vec<f64> = (0..5)
        .map(|i| -1.0 + 0.2 * i as f64)
        .chain((0..=36).map(|k| k as f64 / 36.0))
        .collect();
    let clock = Instant::now();
    let sweep = overlap_sweep(&table, &params, &betas, 50, &fine)?;
    println!(
        "sampled {} replicas x {} pairs x {} betas in {:.1} s",
        params.n_replicas,
        50,
        betas.len(),
        clock.elapsed().as_secs_f64()
    );
    for (beta, histogram) in betas.iter().zip(&sweep) {
        println!("beta = {beta}");
        report_layout(histogram, &fine, "fine (36 bins on [0,1])")?;
        let coarse: Vec<f64> = vec![-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0];
        let merged = rebin(histogram, &fine, &coarse)?;
        report_layout(&merged, &coarse, "coarse (quartiles)")?;
    }
    Ok(())
}

fn rebin(histogram: &OverlapHistogram, fine: &[f64], coarse: &[f64]) -> Result<OverlapHistogram> {
    let mut merged = OverlapHistogram::new(coarse)?;
    for k in 0..histogram.counts().len() {
        let midpoint = 0.5 * (fine[k] + fine[k + 1]);
        for _ in 0..histogram.counts()[k] {
            merged.record(midpoint)?;
        }
    }
    Ok(merged)
}

fn report_layout(histogram: &OverlapHistogram, edges: &[f64], label: &str) -> Result<()> {
    println!("  layout: {label}");
    let mut ranked: Vec<(usize, u64)> = histogram
        .counts()
        .iter()
        .copied()
        .enumerate()
        .collect();
    ranked.sort_by_key(|&(_, c)| std::cmp::Reverse(c));
    for &(k, count) in ranked.iter().take(4) {
        println!(
            "    top bin [{:+.4}, {:+.4}) mass {:.4} ({count})",
            edges[k],
            edges[k + 1],
            histogram.mass(k)
        );
    }
    let below_half = histogram.fraction_below(0.5)?;
    let below_quarter = histogram.fraction_below(0.25)?;
    let below_top = histogram.fraction_below(0.75)?;
    println!(
        "    P(rho < 1/2) = {below_half:.4}, middle band (0.25, 0.75) = {:.4}",
        below_top - below_quarter
    );
    Ok(())
}

/// Free energy gaps along the ladder; the committed top-rung tolerance
/// must dominate the observed gap with real margin.
fn free_energy_pilot() -> Result<()> {
    for log_t in [(1e4f64).ln(), (1e6f64).ln(), (1e8f64).ln()] {
        let table = sieve_for(log_t)?;
        let params = EnsembleParams {
            log_t,
            alpha: 0.5,
            u: 0.0,
            n_points: 512,
            n_replicas: 200,
            seed: 1,
        };
        let betas = [1.0, 4.0];
        let clock = Instant::now();
        let sweep = free_energy_sweep(&table, &params, &betas)?;
        for (beta, estimate) in betas.iter().zip(&sweep) {
            let limit = limiting_free_energy(&TheoryPoint::new(*beta, 0.5, 0.0)?);
            println!(
                "log T = {log_t:7.4}  beta = {beta}  F = {:.4} +- {:.4}  limit = {limit}  gap = {:.4}  ({:.1} s)",
                estimate.mean,
                estimate.std_error,
                (estimate.mean - limit).abs(),
                clock.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}

/// High-point exponent trajectories toward their limits, plus the branch
/// comparison on either side of gamma_c for a positive tilt.
fn high_points_pilot() -> Result<()> {
    for log_t in [(1e4f64).ln(), (1e6f64).ln(), (1e8f64).ln()] {
        let table = sieve_for(log_t)?;
        let params = EnsembleParams {
            log_t,
            alpha: 0.5,
            u: 0.0,
            n_points: 2048,
            n_replicas: 100,
            seed: 1,
        };
        for gamma in [0.3, 0.5, 0.7] {
            let point = TheoryPoint::new(1.0, 0.5, 0.0)?;
            let limit = high_points_exponent(gamma, &point)?;
            let estimate = high_points_measure_estimate(&table, &params, gamma)?;
            println!(
                "log T = {log_t:7.4}  gamma = {gamma}  estimate = {:?}  limit = {limit}  gap = {:?}",
                estimate,
                estimate.map(|e| (e - limit).abs())
            );
        }
    }

    // Branch geometry at u = 0.5, alpha = 0.5: gamma_c splits the two
    // closed forms; the estimate should sit nearer the active branch.
    let log_t = (1e6f64).ln();
    let table = sieve_for(log_t)?;
    let params = EnsembleParams {
        log_t,
        alpha: 0.5,
        u: 0.5,
        n_points: 2048,
        n_replicas: 400,
        seed: 1,
    };
    let point = TheoryPoint::new(1.0, 0.5, 0.5)?;
    let v = point.v();
    let crossover = gamma_c(0.5, 0.5)?;
    println!(
        "u = 0.5: gamma_c = {crossover}, gamma_star = {}",
        gamma_star(0.5, 0.5)?
    );
    for gamma in [0.8, 1.15] {
        let one_scale = -gamma * gamma / v;
        let shift = gamma - 1.5 * 0.5;
        let two_scale = -0.5 - shift * shift / 0.5;
        let estimate = high_points_measure_estimate(&table, &params, gamma)?;
        println!(
            "  gamma = {gamma}: estimate = {estimate:?}, one-scale branch {one_scale:.4}, two-scale branch {two_scale:.4}, active {:.4}",
            high_points_exponent(gamma, &point)?
        );
    }
    Ok(())
}

/// Wall-clock scale of the dominant kernels, for sizing ensembles.
fn runtime_pilot() -> Result<()> {
    for log_t in [(1e6f64).ln(), (1e8f64).ln()] {
        let clock = Instant::now();
        let table = sieve_for(log_t)?;
        println!(
            "sieve to exp({log_t:.2}) = {} primes in {:.2} s",
            table.len(),
            clock.elapsed().as_secs_f64()
        );
        let shifts = uniform_shifts(2048);
        let clock = Instant::now();
        let reps = 5u64;
        let sums: Vec<eulerlab::Result<f64>> = map_replicas(reps, |replica| {
            let key = StreamKey::new(1, replica, StreamDomain::FieldAngles);
            let sample = sample_field(&table, log_t, 0.5, key, &shifts)?;
            Ok(sample.total().iter().sum())
        });
        sums.into_iter().collect::<eulerlab::Result<Vec<_>>>()?;
        println!(
            "  field sample at 2048 shifts: {:.3} s per replica",
            clock.elapsed().as_secs_f64() / reps as f64
        );
    }
    Ok(())
}
