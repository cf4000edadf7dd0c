//! Small numeric helpers: compensated summation and exact combinatorics.

use core::iter::Sum;
use core::ops::AddAssign;

/// Neumaier's variant of Kahan summation.
///
/// The variation sums have `2^n` terms of mixed sign and magnitudes that
/// cancel heavily, so every accumulation in this crate goes through here.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for CompensatedSum {
    #[inline]
    fn add_assign(&mut self, x: f64) {
        self.add(x);
    }
}

impl Sum<f64> for CompensatedSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().sum::<CompensatedSum>().value()
}

/// `n!` as an exact integer. Panics on overflow (`n > 34`).
pub fn factorial_exact(n: u32) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| {
        acc.checked_mul(k).expect("factorial overflows u128")
    })
}

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient as an exact integer.
pub fn binomial_exact(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Exact at every step: acc * (n - i) is divisible by (i + 1).
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Binomial coefficient as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    binomial_exact(n, k) as f64
}

/// `(n-1)!!` for even `n`, i.e. the `n`-th standard Gaussian moment; zero for odd `n`.
pub fn gaussian_moment_exact(n: u32) -> u128 {
    if n % 2 == 1 {
        return 0;
    }
    (1..n).step_by(2).fold(1u128, |acc, k| acc * k as u128)
}

/// `2^e` for a real exponent.
#[inline]
pub fn exp2(e: f64) -> f64 {
    libm::exp2(e)
}
