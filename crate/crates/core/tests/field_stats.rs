//! Statistical validation of the field sampler against its exact first and
//! second moments, plus the log-correlation shape of the overlap kernel.

use eulerlab::calibration::{FAST_FIELD_REL_TOL, RHO_BAND_SLACK};
use eulerlab::field::{
    covariance_exact, field_variance, map_replicas, overlap_rho, sample_field,
    sample_window_direct, uniform_shifts,
};
use eulerlab::numeric::mean_and_se;
use eulerlab::primes::{PrimeTable, ScaleRange};
use eulerlab::rng::{angle_from_bits, StreamDomain, StreamKey};

fn key(seed: u64, replica: u64) -> StreamKey {
    StreamKey::new(seed, replica, StreamDomain::FieldAngles)
}

#[test]
fn sampler_matches_exact_first_and_second_moments() {
    let table = PrimeTable::sieve(100_000).unwrap();
    let log_t = (100_000f64).ln();
    let range = ScaleRange::full(log_t).unwrap();
    let delta = 0.37;
    let shifts = [0.0, delta];
    let n_replicas = 4_000u64;

    let rows: Vec<(f64, f64)> = map_replicas(n_replicas, |r| {
        let sample = sample_field(&table, log_t, 0.5, key(42, r), &shifts).unwrap();
        let v = sample.total();
        (v[0], v[1])
    });
    let first: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let second: Vec<f64> = rows.iter().map(|r| r.1).collect();

    let (mean0, se0) = mean_and_se(&first);
    let (mean1, se1) = mean_and_se(&second);
    assert!(mean0.abs() <= 3.0 * se0, "mean {mean0} vs se {se0}");
    assert!(mean1.abs() <= 3.0 * se1, "mean {mean1} vs se {se1}");

    // Sample covariance and variance against the exact prime sums, with
    // the standard error taken from the product series itself.
    let products: Vec<f64> = rows.iter().map(|r| (r.0 - mean0) * (r.1 - mean1)).collect();
    let (cov, cov_se) = mean_and_se(&products);
    let exact_cov = covariance_exact(&table, &range, delta).unwrap();
    assert!(
        (cov - exact_cov).abs() <= 3.0 * cov_se,
        "covariance {cov} vs exact {exact_cov} (se {cov_se})"
    );

    let squares: Vec<f64> = first.iter().map(|x| (x - mean0) * (x - mean0)).collect();
    let (var, var_se) = mean_and_se(&squares);
    let exact_var = field_variance(&table, &range).unwrap();
    assert!(
        (var - exact_var).abs() <= 3.0 * var_se,
        "variance {var} vs exact {exact_var} (se {var_se})"
    );
}

#[test]
fn low_and_high_scales_are_uncorrelated() {
    // The split parts run over disjoint primes, so their exact covariance
    // vanishes at every shift.
    let table = PrimeTable::sieve(100_000).unwrap();
    let log_t = (100_000f64).ln();
    let products: Vec<f64> = map_replicas(3_000, |r| {
        let sample = sample_field(&table, log_t, 0.5, key(7, r), &[0.25]).unwrap();
        sample.low()[0] * sample.high()[0]
    });
    let (mean, se) = mean_and_se(&products);
    assert!(mean.abs() <= 3.0 * se, "cross moment {mean} vs se {se}");
}

#[test]
fn single_prime_window_is_one_explicit_cosine() {
    // A window containing only the prime 2: the field must equal
    // cos(theta_0 - h log 2) / sqrt(2) with theta_0 read off the stream.
    let table = PrimeTable::sieve(10).unwrap();
    let log_t = (100_000f64).ln();
    let range = ScaleRange::new(0.0, 0.01, log_t).unwrap();
    let window = table.window(&range).unwrap();
    assert_eq!((window.lo, window.hi), (0, 1));

    let k = key(13, 2);
    let shifts = [0.0, 0.4, 1.0];
    let field = sample_window_direct(&table, &range, k, &shifts).unwrap();
    let theta = angle_from_bits(k.value_at(0));
    for (i, &h) in shifts.iter().enumerate() {
        let want = (theta - h * 2f64.ln()).cos() / 2f64.sqrt();
        assert!((field[i] - want).abs() < 1e-15, "shift {h}");
    }
}

#[test]
fn binned_route_matches_direct_route_at_scale() {
    let table = PrimeTable::sieve(1_000_000).unwrap();
    let log_t = (1_000_000f64).ln();
    let shifts = uniform_shifts(256);
    let sample = sample_field(&table, log_t, 0.5, key(99, 0), &shifts).unwrap();
    let direct =
        sample_window_direct(&table, &ScaleRange::full(log_t).unwrap(), key(99, 0), &shifts)
            .unwrap();
    for (i, (fast, slow)) in sample.total().iter().zip(&direct).enumerate() {
        let scale = slow.abs().max(1.0);
        assert!(
            (fast - slow).abs() <= FAST_FIELD_REL_TOL * scale,
            "shift index {i}: {fast} vs {slow}"
        );
    }
}

#[test]
fn overlap_follows_the_log_distance_profile() {
    // For separations between 1/log T and 1 the overlap of the full-window
    // field tracks log(1/delta) / loglog T within the committed band.
    let table = PrimeTable::sieve(100_000_000).unwrap();
    let log_t = (100_000_000f64).ln();
    let range = ScaleRange::full(log_t).unwrap();
    let big_l = log_t.ln();
    let band = RHO_BAND_SLACK / big_l;
    for delta in [1.0 / log_t, 0.1, 0.25, 0.5, 1.0] {
        let rho = overlap_rho(&table, &range, delta).unwrap();
        let profile = (1.0 / delta).ln() / big_l;
        assert!(
            (rho - profile).abs() <= band,
            "delta {delta}: rho {rho} vs profile {profile} (band {band})"
        );
    }
}
