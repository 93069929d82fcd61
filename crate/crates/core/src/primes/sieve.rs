//! Segmented sieve of Eratosthenes.
//!
//! Odd numbers only, one bit each, processed in cache-sized segments so the
//! working set stays in L2 regardless of the limit. Base primes up to
//! sqrt(limit) come from a small dense sieve. Supported limits are bounded
//! by [`MAX_SIEVE_LIMIT`]; at that cap the output table (primes plus two
//! precomputed f64 columns per prime) is the dominant allocation.

/// Hard cap on sieve limits. Chosen so a full prime table (u64 prime plus
/// two f64 columns per prime) fits comfortably in a few GB of memory:
/// pi(2e9) ~ 9.8e7 primes ~ 2.4 GB.
pub const MAX_SIEVE_LIMIT: u64 = 2_000_000_000;

/// Odd numbers covered per segment: 2^18 bits = 32 KiB, spanning 2^19
/// integers per segment.
const SEGMENT_BITS: usize = 1 << 18;

/// All primes `<= limit`, ascending. Caller guarantees `2 <= limit <= cap`.
pub(crate) fn sieve(limit: u64) -> Vec<u64> {
    debug_assert!((2..=MAX_SIEVE_LIMIT).contains(&limit));
    let mut primes = Vec::with_capacity(estimate_count(limit));
    primes.push(2);
    if limit < 3 {
        return primes;
    }

    let base = small_odd_primes(isqrt(limit));
    let mut bits = vec![0u64; SEGMENT_BITS / 64];

    // Segment s covers odd values seg_lo + 2*i for i in [0, SEGMENT_BITS).
    let mut seg_lo: u64 = 3;
    while seg_lo <= limit {
        let seg_end = seg_lo.saturating_add(2 * SEGMENT_BITS as u64); // exclusive
        bits.iter_mut().for_each(|w| *w = 0);

        for &q in &base {
            let q2 = q * q;
            if q2 >= seg_end {
                break;
            }
            // First odd multiple of q in [seg_lo, seg_end), at least q^2.
            let mut m = if q2 >= seg_lo {
                q2
            } else {
                let mut first = seg_lo.div_ceil(q) * q;
                if first % 2 == 0 {
                    first += q;
                }
                first
            };
            while m < seg_end {
                let idx = ((m - seg_lo) / 2) as usize;
                bits[idx / 64] |= 1 << (idx % 64);
                m += 2 * q;
            }
        }

        let last = limit.min(seg_end - 1);
        let count = ((last - seg_lo) / 2 + 1) as usize;
        for idx in 0..count {
            if bits[idx / 64] & (1 << (idx % 64)) == 0 {
                primes.push(seg_lo + 2 * idx as u64);
            }
        }
        seg_lo = seg_end;
    }
    primes
}

/// Odd primes `<= bound` via a dense sieve; used for base primes only.
fn small_odd_primes(bound: u64) -> Vec<u64> {
    if bound < 3 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut q = 3usize;
    while q <= n {
        if !composite[q] {
            out.push(q as u64);
            let mut m = q * q;
            while m <= n {
                composite[m] = true;
                m += 2 * q;
            }
        }
        q += 2;
    }
    out
}

/// Floor of sqrt for u64 without trusting f64 rounding at the boundary.
fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// Overallocation-free capacity estimate: pi(x) < x/(ln x - 1.1) for x >= 60.
fn estimate_count(limit: u64) -> usize {
    if limit < 60 {
        return 20;
    }
    let x = limit as f64;
    (x / (x.ln() - 1.1)) as usize + 16
}
