//! Small numeric utilities: compensated summation and moment statistics.

/// Compensated accumulator (Kahan with Neumaier's correction).
///
/// Running error stays O(eps) relative to the sum of absolute terms,
/// independent of length, which the prime-sum tolerances rely on.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator in its iteration order.
pub fn sum_compensated<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Sample mean and standard error (unbiased variance, n-1 denominator).
///
/// Panics if `xs` has fewer than two elements.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 2, "standard error needs at least two samples");
    let mean = sum_compensated(xs.iter().copied()) / n as f64;
    let ss = sum_compensated(xs.iter().map(|x| (x - mean) * (x - mean)));
    let var = ss / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Median of a sample (average of the middle pair for even lengths).
///
/// Panics if `xs` is empty.
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of empty sample");
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample in median"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
