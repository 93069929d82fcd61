//! Experiment orchestration: prime tables per ladder rung, replica
//! scheduling on a bounded worker pool, tidy CSV emission, and the JSON
//! envelope that records how a run was produced.
//!
//! All randomness is keyed by (seed, replica, domain) counters and all
//! merging is ordered by replica index, so the same config and seed give
//! the same output bytes at any worker count. If a run fails midway, the
//! envelope is still written with `incomplete: true` and lists exactly
//! the files that were flushed.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use eulerlab::gibbs::{default_overlap_edges, free_energy_sweep, overlap_sweep, EnsembleParams};
use eulerlab::oracle::high_points_measure_sweep;
use eulerlab::primes::{PrimeTable, ScaleRange};
use eulerlab::theory::{
    gamma_c, gamma_star, high_points_exponent, limiting_free_energy, limiting_overlap_law,
    rem_free_energy, TheoryPoint,
};

use crate::config::{Experiment, ExperimentConfig};
use crate::output::{cell, verify_outputs, write_csv, write_envelope, Envelope};
use crate::validate::{run_validation, write_validation_report, ValidationReport};

/// What a finished run left on disk.
pub struct ExperimentResult {
    /// Data files, in the order they were written.
    pub outputs: Vec<PathBuf>,
    pub envelope: PathBuf,
    /// Present for the validate experiment: the in-memory report.
    pub validation: Option<ValidationReport>,
}

/// Runs the configured experiment and writes its artifacts. The envelope
/// is written even when the experiment fails, marked incomplete.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let started_at = chrono::Utc::now().to_rfc3339();
    let clock = Instant::now();
    fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating {}", config.output_dir.display()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .context("building the worker pool")?;

    let mut outputs = Vec::new();
    let mut validation = None;
    let outcome = pool.install(|| dispatch(config, &mut outputs, &mut validation));

    let envelope = Envelope {
        config,
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION"),
        started_at,
        runtime_seconds: clock.elapsed().as_secs_f64(),
        outputs: outputs
            .iter()
            .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
            .collect(),
        incomplete: outcome.is_err(),
        error: outcome.as_ref().err().map(|e| format!("{e:#}")),
    };
    let envelope_path = write_envelope(&config.output_dir, &envelope)?;
    outcome?;
    verify_outputs(&outputs)?;
    Ok(ExperimentResult {
        outputs,
        envelope: envelope_path,
        validation,
    })
}

fn dispatch(
    config: &ExperimentConfig,
    outputs: &mut Vec<PathBuf>,
    validation: &mut Option<ValidationReport>,
) -> Result<()> {
    match config.experiment {
        Experiment::Theory => theory_csv(config, outputs),
        Experiment::FreeEnergy => free_energy_csv(config, outputs),
        Experiment::Overlap => overlap_csv(config, outputs),
        Experiment::HighPoints => high_points_csv(config, outputs),
        Experiment::Validate => {
            let report = run_validation(config.seed)?;
            outputs.push(write_validation_report(&config.output_dir, &report)?);
            *validation = Some(report);
            Ok(())
        }
    }
}

fn push_csv(
    config: &ExperimentConfig,
    outputs: &mut Vec<PathBuf>,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let path = config.output_dir.join(name);
    write_csv(&path, header, rows)?;
    outputs.push(path);
    Ok(())
}

fn ensemble_params(config: &ExperimentConfig, log_t: f64, u: f64) -> EnsembleParams {
    EnsembleParams {
        log_t,
        alpha: config.alpha,
        u,
        n_points: config.grid_points(),
        n_replicas: config.replicas,
        seed: config.seed,
    }
}

fn sieve_for(log_t: f64) -> Result<PrimeTable> {
    let limit = ScaleRange::full(log_t)?.cutoff_hi()?;
    Ok(PrimeTable::sieve(limit)?)
}

/// Closed-form limit quantities on the (beta, u) grid; no randomness.
/// Empty cells mean the quantity is not defined there (`gamma_c` needs
/// u >= 0, the two-atom overlap law needs beta > 2).
fn theory_csv(config: &ExperimentConfig, outputs: &mut Vec<PathBuf>) -> Result<()> {
    const HEADER: [&str; 10] = [
        "beta",
        "alpha",
        "u",
        "variance",
        "free_energy",
        "gamma_star",
        "gamma_c",
        "rem_free_energy",
        "overlap_mass_at_zero",
        "overlap_mass_at_one",
    ];
    let mut rows = Vec::new();
    for &u in &config.u {
        for &beta in &config.beta {
            let point = TheoryPoint::new(beta, config.alpha, u)?;
            rows.push(vec![
                cell(Some(beta)),
                cell(Some(config.alpha)),
                cell(Some(u)),
                cell(Some(point.v())),
                cell(Some(limiting_free_energy(&point))),
                cell(gamma_star(config.alpha, u).ok()),
                cell(gamma_c(config.alpha, u).ok()),
                cell(rem_free_energy(beta).ok()),
                cell(limiting_overlap_law(beta, 0.0, 0.0).ok()),
                cell(limiting_overlap_law(beta, 1.0, 1.0).ok()),
            ]);
        }
    }
    push_csv(config, outputs, "theory.csv", &HEADER, &rows)
}

/// Quenched free energy estimates along the ladder, one row per
/// (log_t, beta, u), with the limit value and the absolute gap.
fn free_energy_csv(config: &ExperimentConfig, outputs: &mut Vec<PathBuf>) -> Result<()> {
    const HEADER: [&str; 11] = [
        "log_t",
        "loglog_t",
        "beta",
        "alpha",
        "u",
        "grid_points",
        "replicas",
        "free_energy",
        "std_error",
        "limit",
        "abs_gap",
    ];
    let mut rows = Vec::new();
    for &log_t in &config.log_t {
        let table = sieve_for(log_t)?;
        for &u in &config.u {
            let params = ensemble_params(config, log_t, u);
            let sweep = free_energy_sweep(&table, &params, &config.beta)?;
            for (&beta, estimate) in config.beta.iter().zip(&sweep) {
                let limit = limiting_free_energy(&TheoryPoint::new(beta, config.alpha, u)?);
                rows.push(vec![
                    cell(Some(log_t)),
                    cell(Some(log_t.ln())),
                    cell(Some(beta)),
                    cell(Some(config.alpha)),
                    cell(Some(u)),
                    params.n_points.to_string(),
                    params.n_replicas.to_string(),
                    cell(Some(estimate.mean)),
                    cell(Some(estimate.std_error)),
                    cell(Some(limit)),
                    cell(Some((estimate.mean - limit).abs())),
                ]);
            }
        }
    }
    push_csv(config, outputs, "free_energy.csv", &HEADER, &rows)
}

/// Two-overlap histograms, one row per bin per (log_t, beta, u). Betas at
/// the same (log_t, u) share field samples and pair draws, so comparing
/// them isolates the effect of the Gibbs weights. The theory columns give
/// the limiting two-atom masses where defined (beta > 2).
fn overlap_csv(config: &ExperimentConfig, outputs: &mut Vec<PathBuf>) -> Result<()> {
    const HEADER: [&str; 10] = [
        "log_t",
        "beta",
        "alpha",
        "u",
        "bin_lo",
        "bin_hi",
        "count",
        "fraction",
        "theory_mass_at_zero",
        "theory_mass_at_one",
    ];
    let edges = default_overlap_edges();
    let mut rows = Vec::new();
    for &log_t in &config.log_t {
        let table = sieve_for(log_t)?;
        for &u in &config.u {
            let params = ensemble_params(config, log_t, u);
            let sweep = overlap_sweep(
                &table,
                &params,
                &config.beta,
                config.pairs_per_replica,
                &edges,
            )?;
            for (&beta, histogram) in config.beta.iter().zip(&sweep) {
                let mass_zero = limiting_overlap_law(beta, 0.0, 0.0).ok();
                let mass_one = limiting_overlap_law(beta, 1.0, 1.0).ok();
                for k in 0..histogram.counts().len() {
                    rows.push(vec![
                        cell(Some(log_t)),
                        cell(Some(beta)),
                        cell(Some(config.alpha)),
                        cell(Some(u)),
                        cell(Some(edges[k])),
                        cell(Some(edges[k + 1])),
                        histogram.counts()[k].to_string(),
                        cell(Some(histogram.mass(k))),
                        cell(mass_zero),
                        cell(mass_one),
                    ]);
                }
            }
        }
    }
    push_csv(config, outputs, "overlap.csv", &HEADER, &rows)
}

/// Normalized log-measure of high level sets at nine levels between 0 and
/// the top growth level, next to the limiting exponent. An empty estimate
/// means no replica's grid reached the level at this resolution.
fn high_points_csv(config: &ExperimentConfig, outputs: &mut Vec<PathBuf>) -> Result<()> {
    const HEADER: [&str; 9] = [
        "log_t",
        "loglog_t",
        "alpha",
        "u",
        "gamma",
        "exponent_estimate",
        "exponent_limit",
        "gamma_star",
        "gamma_c",
    ];
    let mut rows = Vec::new();
    for &log_t in &config.log_t {
        let table = sieve_for(log_t)?;
        for &u in &config.u {
            let params = ensemble_params(config, log_t, u);
            let top = gamma_star(config.alpha, u)?;
            // The exponent does not involve beta; any valid value works.
            let point = TheoryPoint::new(config.beta[0], config.alpha, u)?;
            let gammas: Vec<f64> = (1..=9u32).map(|k| top * f64::from(k) / 10.0).collect();
            let estimates = high_points_measure_sweep(&table, &params, &gammas)?;
            for (&gamma, estimate) in gammas.iter().zip(estimates) {
                rows.push(vec![
                    cell(Some(log_t)),
                    cell(Some(log_t.ln())),
                    cell(Some(config.alpha)),
                    cell(Some(u)),
                    cell(Some(gamma)),
                    cell(estimate),
                    cell(Some(high_points_exponent(gamma, &point)?)),
                    cell(Some(top)),
                    cell(gamma_c(config.alpha, u).ok()),
                ]);
            }
        }
    }
    push_csv(config, outputs, "high_points.csv", &HEADER, &rows)
}
