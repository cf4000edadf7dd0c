//! Summary statistics, Kolmogorov–Smirnov tests and least squares.
//!
//! KS p-values use the asymptotic Kolmogorov distribution
//! `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}` evaluated at
//! `λ = (√n_e + 0.12 + 0.11/√n_e) D` (Stephens' small-sample correction),
//! with `n_e = n` for one sample and `n_e = n₁n₂/(n₁+n₂)` for two.

use alloc::vec::Vec;

use crate::numeric::CompensatedSum;

/// Mean and variance of a sample with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub mean_se: f64,
    /// Delta-method standard error `sqrt((m4 - s⁴)/n)`.
    pub variance_se: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Summary {
                count: 0,
                mean: f64::NAN,
                variance: f64::NAN,
                mean_se: f64::NAN,
                variance_se: f64::NAN,
            };
        }
        let nf = n as f64;
        let mean = xs.iter().copied().sum::<CompensatedSum>().value() / nf;
        let mut m2 = CompensatedSum::new();
        let mut m4 = CompensatedSum::new();
        for &x in xs {
            let d = (x - mean) * (x - mean);
            m2.add(d);
            m4.add(d * d);
        }
        let variance = if n > 1 { m2.value() / (nf - 1.0) } else { 0.0 };
        let m2n = m2.value() / nf;
        let m4n = m4.value() / nf;
        Summary {
            count: n,
            mean,
            variance,
            mean_se: libm::sqrt(variance / nf),
            variance_se: libm::sqrt(((m4n - m2n * m2n) / nf).max(0.0)),
        }
    }

    /// `E[X²]` estimate and its standard error.
    pub fn second_moment(xs: &[f64]) -> (f64, f64) {
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let s = Summary::of(&sq);
        (s.mean, s.mean_se)
    }
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Sample median and a standard error read off the distribution-free 95%
/// order-statistic interval `x_(n/2 ± 0.98√n)`.
pub fn median_with_se(xs: &[f64]) -> (f64, f64) {
    let v = sorted(xs);
    let n = v.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    let half = 0.98 * libm::sqrt(n as f64);
    let lo = libm::floor(n as f64 / 2.0 - half).max(0.0) as usize;
    let hi = (libm::ceil(n as f64 / 2.0 + half) as usize).min(n - 1);
    (median, (v[hi] - v[lo]) / (2.0 * 1.96))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Kolmogorov survival function `Q(λ) = P(sup|B°| > λ)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = libm::exp(-2.0 * kf * kf * lambda * lambda);
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

fn ks_p_value(d: f64, ne: f64) -> f64 {
    let sn = libm::sqrt(ne);
    kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)
}

/// One-sample KS test of `xs` against the continuous CDF `cdf`.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let v = sorted(xs);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    KsResult {
        statistic: d,
        p_value: ks_p_value(d, n),
    }
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    KsResult {
        statistic: d,
        p_value: ks_p_value(d, na * nb / (na + nb)),
    }
}

/// Ordinary least squares `y ≈ a + b x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().copied().sum::<CompensatedSum>().value() / n;
    let my = y.iter().copied().sum::<CompensatedSum>().value() / n;
    let mut sxx = CompensatedSum::new();
    let mut sxy = CompensatedSum::new();
    for (&a, &b) in x.iter().zip(y) {
        sxx.add((a - mx) * (a - mx));
        sxy.add((a - mx) * (b - my));
    }
    let slope = sxy.value() / sxx.value();
    let intercept = my - slope * mx;
    let mut rss = CompensatedSum::new();
    for (&a, &b) in x.iter().zip(y) {
        let r = b - intercept - slope * a;
        rss.add(r * r);
    }
    let slope_se = if x.len() > 2 {
        libm::sqrt(rss.value() / (n - 2.0) / sxx.value())
    } else {
        f64::NAN
    };
    LinearFit {
        slope,
        intercept,
        slope_se,
    }
}

/// Least squares through the origin, `y ≈ b x`, with a heteroscedasticity-robust
/// (sandwich) standard error.
pub fn slope_through_origin(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let sxx = x.iter().map(|a| a * a).sum::<CompensatedSum>().value();
    let sxy = x.iter().zip(y).map(|(a, b)| a * b).sum::<CompensatedSum>().value();
    let b = sxy / sxx;
    let meat = x
        .iter()
        .zip(y)
        .map(|(a, c)| {
            let r = c - b * a;
            a * a * r * r
        })
        .sum::<CompensatedSum>()
        .value();
    (b, libm::sqrt(meat) / sxx)
}

/// Pearson correlation and its standard error under independence, `1/√n`.
pub fn correlation(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().copied().sum::<CompensatedSum>().value() / n;
    let my = y.iter().copied().sum::<CompensatedSum>().value() / n;
    let mut sxx = CompensatedSum::new();
    let mut syy = CompensatedSum::new();
    let mut sxy = CompensatedSum::new();
    for (&a, &b) in x.iter().zip(y) {
        sxx.add((a - mx) * (a - mx));
        syy.add((b - my) * (b - my));
        sxy.add((a - mx) * (b - my));
    }
    (sxy.value() / libm::sqrt(sxx.value() * syy.value()), 1.0 / libm::sqrt(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{path_rng, standard_normal};

    #[test]
    fn summary_basics() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        let (m, _) = median_with_se(&[3.0, 1.0, 2.0]);
        assert_eq!(m, 2.0);
    }

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(1.96) - 0.975_002_104_851_780).abs() < 1e-12);
        assert!((normal_cdf(-1.0) - 0.158_655_253_931_457).abs() < 1e-12);
    }

    #[test]
    fn kolmogorov_quantiles() {
        // Classical critical values: Q(1.36) ≈ 0.05, Q(1.63) ≈ 0.01.
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn ks_accepts_normals_and_rejects_shift() {
        let mut rng = path_rng(17);
        let xs: Vec<f64> = (0..4000).map(|_| standard_normal(&mut rng)).collect();
        assert!(ks_one_sample(&xs, normal_cdf).p_value > 0.01);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.2).collect();
        assert!(ks_one_sample(&shifted, normal_cdf).p_value < 1e-6);
        let ys: Vec<f64> = (0..3000).map(|_| standard_normal(&mut rng)).collect();
        assert!(ks_two_sample(&xs, &ys).p_value > 0.01);
        assert!(ks_two_sample(&shifted, &ys).p_value < 1e-4);
    }

    #[test]
    fn regressions() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.1, 3.9, 6.2, 7.8, 10.1];
        let fit = ols(&x, &y);
        assert!((fit.slope - 1.99).abs() < 1e-12);
        let (b, _) = slope_through_origin(&x, &[2.0, 4.0, 6.0, 8.0, 10.0]);
        assert!((b - 2.0).abs() < 1e-15);
        let (r, _) = correlation(&x, &y);
        assert!(r > 0.99);
    }
}
