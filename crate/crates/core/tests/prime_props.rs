//! Property and reference tests for the prime layer: sieve correctness
//! against an independent oracle, analytic bands for reciprocal and cosine
//! sums, exact splitting behavior, and cache round trips.

use eulerlab::calibration::{FIRST_REGIME_SLACK, SECOND_REGIME_C, SECOND_REGIME_DECAY};
use eulerlab::numeric::CompensatedSum;
use eulerlab::primes::{
    cosine_prime_sum, prime_reciprocal_sum, read_cache, write_cache, PrimeTable, ScaleRange,
};
use proptest::prelude::*;

/// Plain dense sieve of Eratosthenes, written independently of the
/// segmented production sieve.
fn naive_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

#[test]
fn prime_count_at_one_million_matches_the_reference_oracle() {
    let table = PrimeTable::sieve(1_000_000).unwrap();
    assert_eq!(table.len(), 78_498);
    assert_eq!(table.primes(), naive_primes(1_000_000).as_slice());
}

#[test]
fn reciprocal_sum_tracks_the_mertens_constant() {
    // sum_{p <= x} 1/p = loglog x + 0.26149... + O(1/log x); at x = 1e6
    // the remainder is far below the asserted band.
    let table = PrimeTable::sieve(1_000_000).unwrap();
    let range = ScaleRange::full((1_000_000f64).ln()).unwrap();
    let sum = prime_reciprocal_sum(&table, &range).unwrap();
    let mertens = (1_000_000f64).ln().ln() + 0.261_497_212_847_642_8;
    assert!(
        (sum - mertens).abs() <= 0.05,
        "sum {sum} vs mertens prediction {mertens}"
    );
}

#[test]
fn slow_phase_cosine_sums_track_the_window_length() {
    // While delta * log Q <= 1 every phase is below one radian, so the
    // cosine sum stays within an O(1) band of loglog Q - loglog P, which
    // for the window (alpha_1, alpha_2] is (alpha_2 - alpha_1) loglog T.
    let table = PrimeTable::sieve(1_000_000).unwrap();
    let log_t = (1_000_000f64).ln();
    for &(a_lo, a_hi) in &[(0.3, 0.8), (0.5, 1.0), (0.2, 1.0)] {
        let range = ScaleRange::new(a_lo, a_hi, log_t).unwrap();
        let log_q = log_t.powf(a_hi);
        for phase in [0.2, 0.5, 1.0] {
            let delta = phase / log_q;
            let sum = cosine_prime_sum(&table, &range, delta).unwrap();
            let window_length = (a_hi - a_lo) * log_t.ln();
            assert!(
                (sum - window_length).abs() <= FIRST_REGIME_SLACK,
                "window ({a_lo}, {a_hi}] phase {phase}: {sum} vs {window_length}"
            );
        }
    }
}

#[test]
fn fast_phase_cosine_sums_decay() {
    // Once delta * log P >= 1 the phases wrap and the sum must fall below
    // the committed decay envelope.
    let table = PrimeTable::sieve(100_000_000).unwrap();
    let log_t = (100_000_000f64).ln();
    for &a_lo in &[0.5, 0.7] {
        let range = ScaleRange::new(a_lo, 1.0, log_t).unwrap();
        let log_p = log_t.powf(a_lo);
        for phase in [1.0, 2.0, 5.0] {
            let delta = phase / log_p;
            let sum = cosine_prime_sum(&table, &range, delta).unwrap().abs();
            let envelope = SECOND_REGIME_C / (delta * log_p)
                + SECOND_REGIME_C * (-SECOND_REGIME_DECAY * log_p.sqrt()).exp();
            assert!(
                sum <= envelope,
                "window ({a_lo}, 1] phase {phase}: {sum} vs envelope {envelope}"
            );
        }
    }
}

#[test]
fn window_split_resumes_bitwise() {
    // Summing the low window and then continuing with the same accumulator
    // over the high window is the identical operation sequence as one pass
    // over the full window, so the results agree bit for bit.
    let table = PrimeTable::sieve(100_000).unwrap();
    let log_t = (100_000f64).ln();
    let full = table.window(&ScaleRange::full(log_t).unwrap()).unwrap();
    let low = table
        .window(&ScaleRange::new(0.0, 0.6, log_t).unwrap())
        .unwrap();
    let high = table
        .window(&ScaleRange::new(0.6, 1.0, log_t).unwrap())
        .unwrap();
    assert_eq!(low.hi, high.lo);
    assert_eq!((low.lo, high.hi), (full.lo, full.hi));

    let one_pass: f64 = {
        let mut acc = CompensatedSum::new();
        for i in full.lo..full.hi {
            acc.add(1.0 / table.primes()[i] as f64);
        }
        acc.value()
    };
    let resumed: f64 = {
        let mut acc = CompensatedSum::new();
        for i in low.lo..low.hi {
            acc.add(1.0 / table.primes()[i] as f64);
        }
        for i in high.lo..high.hi {
            acc.add(1.0 / table.primes()[i] as f64);
        }
        acc.value()
    };
    assert_eq!(one_pass.to_bits(), resumed.to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sieve_matches_naive_oracle(limit in 2u64..20_000) {
        let table = PrimeTable::sieve(limit).unwrap();
        let reference = naive_primes(limit);
        prop_assert_eq!(table.primes(), reference.as_slice());
    }

    #[test]
    fn cosine_sum_is_termwise_dominated(
        delta in 0.0f64..4.0,
        a_lo in 0.0f64..1.0,
        width in 0.0f64..1.0,
    ) {
        let table = PrimeTable::sieve(50_000).unwrap();
        let log_t = (50_000f64).ln();
        let a_hi = (a_lo + width).min(1.0);
        let range = ScaleRange::new(a_lo, a_hi, log_t).unwrap();
        let cos_sum = cosine_prime_sum(&table, &range, delta).unwrap();
        let recip = prime_reciprocal_sum(&table, &range).unwrap();
        prop_assert!(cos_sum.abs() <= recip * (1.0 + 1e-15) + 1e-15);
    }

    #[test]
    fn reciprocal_sum_splits_additively(split in 0.0f64..1.0) {
        let table = PrimeTable::sieve(100_000).unwrap();
        let log_t = (100_000f64).ln();
        let whole =
            prime_reciprocal_sum(&table, &ScaleRange::full(log_t).unwrap()).unwrap();
        let low = prime_reciprocal_sum(
            &table,
            &ScaleRange::new(0.0, split, log_t).unwrap(),
        )
        .unwrap();
        let high = prime_reciprocal_sum(
            &table,
            &ScaleRange::new(split, 1.0, log_t).unwrap(),
        )
        .unwrap();
        // Each route is a compensated (near correctly rounded) sum, so the
        // two-part total may differ from the one-pass total only by final
        // rounding, a few ulps.
        let tol = 4.0 * f64::EPSILON * whole.abs();
        prop_assert!(
            (low + high - whole).abs() <= tol,
            "{} + {} vs {}", low, high, whole
        );
    }

    #[test]
    fn cache_round_trip_is_bit_exact(limit in 2u64..200_000) {
        let table = PrimeTable::sieve(limit).unwrap();
        let mut buffer = Vec::new();
        write_cache(&table, &mut buffer).unwrap();
        // Delta coding keeps the file near two bytes per prime.
        prop_assert!(buffer.len() <= 2 * table.len() + 64);
        let restored = read_cache(buffer.as_slice()).unwrap();
        prop_assert!(restored == table);
    }
}
