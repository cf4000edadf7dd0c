//! Weighted Hermite and power variations and the deterministic sums that
//! control their second moments.
//!
//! With `N = 2^n` and the weight evaluated at the left endpoint,
//!
//! ```text
//! V_n^{(q)}(f) = Σ_{k=1}^{N} f(B_{(k-1)/N}) H_q(2^{nH} ΔB_{k/N}).
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::constants::{classify_regime, ScalingRegime};
use crate::error::{Error, Result};
use crate::fbm::{rho, FbmPath, Hurst};
use crate::hermite::{gaussian_moment, hermite_all, hermite_eval};
use crate::numeric::{factorial, CompensatedSum};
use crate::weight::WeightFunction;

/// Largest level for the `O(4^n)` loops behind `α_n` and `γ_n`.
pub const MAX_DOUBLE_SUM_LEVEL: u32 = 14;

/// Largest level for the stationary `O(2^n)` reduction behind `β_{r,n}`.
pub const MAX_BETA_LEVEL: u32 = 24;

#[inline]
fn scale(path: &FbmPath) -> f64 {
    libm::exp2(path.hurst().get() * path.level() as f64)
}

/// `V_n^{(q)}(f)` on the grid of `path`.
pub fn weighted_hermite_variation(path: &FbmPath, f: &WeightFunction, q: u32) -> f64 {
    let c = scale(path);
    let mut acc = CompensatedSum::new();
    for (left, inc) in path.left_and_increment() {
        acc.add(f.value(left) * hermite_eval(q, c * inc));
    }
    acc.value()
}

/// `V_n^{(p)}(f)` for every `p = 0..=max_order` in one pass.
pub fn weighted_hermite_variations_all(path: &FbmPath, f: &WeightFunction, max_order: u32) -> Vec<f64> {
    let c = scale(path);
    let mut acc = vec![CompensatedSum::new(); max_order as usize + 1];
    let mut h = vec![0.0; max_order as usize + 1];
    for (left, inc) in path.left_and_increment() {
        let w = f.value(left);
        hermite_all(c * inc, &mut h);
        for (a, hp) in acc.iter_mut().zip(&h) {
            a.add(w * hp);
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}

/// `Σ_k f(B_{(k-1)/N}) [(2^{nH} ΔB_{k/N})^q - μ_q]`, without `μ_q` unless `centered`.
pub fn weighted_power_variation(path: &FbmPath, f: &WeightFunction, q: u32, centered: bool) -> f64 {
    let c = scale(path);
    let shift = if centered { gaussian_moment(q) } else { 0.0 };
    let mut acc = CompensatedSum::new();
    for (left, inc) in path.left_and_increment() {
        acc.add(f.value(left) * (libm::pow(c * inc, q as f64) - shift));
    }
    acc.value()
}

/// A raw variation with its regime prefactor applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationStatistic {
    pub order: u32,
    pub level: u32,
    pub raw_value: f64,
    pub renormalized_value: f64,
    pub regime: ScalingRegime,
}

/// Multiply `raw` by the prefactor of the regime of `(h, q)` at level `n`.
pub fn renormalize(raw: f64, h: f64, q: u32, n: u32) -> Result<VariationStatistic> {
    let regime = classify_regime(h, q)?;
    Ok(VariationStatistic {
        order: q,
        level: n,
        raw_value: raw,
        renormalized_value: regime.prefactor(n) * raw,
        regime,
    })
}

/// `Σ_{|d|<N} (N - |d|) g(d)` for an even function `g` of the lag.
fn stationary_double_sum(level: u32, g: impl Fn(i64) -> f64) -> f64 {
    let n = 1i64 << level;
    let mut acc = CompensatedSum::new();
    acc.add(n as f64 * g(0));
    for d in 1..n {
        acc.add(2.0 * (n - d) as f64 * g(d));
    }
    acc.value()
}

/// `E[V_n^{(q)}(1)²] = (1/q!) Σ_{k,l} (ρ_H(k-l)/2)^q`.
pub fn exact_unweighted_second_moment(h: f64, q: u32, level: u32) -> Result<f64> {
    let hurst = Hurst::new(h)?;
    check_level(level, MAX_BETA_LEVEL)?;
    let s = stationary_double_sum(level, |d| libm::pow(0.5 * rho(d, hurst), q as f64));
    Ok(s / factorial(q))
}

/// `E[V_n^{(p)}(1) V_n^{(q)}(1)]` vanishes unless `p = q`, so the exact
/// second moment of the centered unweighted power variation is
/// `Σ_p (p! C(q,p) μ_{q-p})² E[V_n^{(p)}(1)²]`.
pub fn exact_unweighted_power_second_moment(h: f64, q: u32, level: u32) -> Result<f64> {
    let expansion = crate::hermite::monomial_in_hermite(q).centered();
    let mut acc = CompensatedSum::new();
    for (p, c) in expansion.terms() {
        if p == 0 || c == 0.0 {
            continue;
        }
        acc.add(c * c * exact_unweighted_second_moment(h, p, level)?);
    }
    Ok(acc.value())
}

fn check_level(level: u32, max: u32) -> Result<()> {
    if level == 0 || level > max {
        return Err(Error::Size {
            what: "level",
            value: level as usize,
            max: max as usize,
        });
    }
    Ok(())
}

/// `β_{r,n} = Σ_{k,l} |⟨δ_k, δ_l⟩|^r = 2^{-2nrH-r} Σ_{k,l} |ρ_H(k-l)|^r`.
pub fn beta_sum(h: f64, level: u32, r: u32) -> Result<f64> {
    let hurst = Hurst::new(h)?;
    check_level(level, MAX_BETA_LEVEL)?;
    let s = stationary_double_sum(level, |d| libm::pow(rho(d, hurst).abs(), r as f64));
    let e = -(2.0 * level as f64 * r as f64 * h) - r as f64;
    Ok(libm::exp2(e) * s)
}

/// The sums `α_n`, `β_{r,n}` (`r = 1..=q`) and `γ_n` bounding the second
/// moment of weighted variations.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSums {
    pub level: u32,
    /// `sup_{k,l} |⟨ε_{(k-1)/N}, δ_{l/N}⟩|`.
    pub alpha: f64,
    /// `(r, β_{r,n})` for `r = 1..=q`.
    pub beta: Vec<(u32, f64)>,
    /// `Σ_{k,l} |⟨ε_{(k-1)/N}, δ_{l/N}⟩|`.
    pub gamma: f64,
}

impl DiagnosticSums {
    pub fn beta(&self, r: u32) -> Option<f64> {
        self.beta.iter().find(|(s, _)| *s == r).map(|&(_, b)| b)
    }
}

/// Compute [`DiagnosticSums`] at level `n ≤ 14`. Here `ε_t = 1_{[0,t]}` and
/// `δ_{l/N} = 1_{[(l-1)/N, l/N]}` in the reproducing space of `B`, so
///
/// ```text
/// ⟨ε_{(k-1)/N}, δ_{l/N}⟩ = 2^{-2Hn-1} (P(l) - P(l-1) + P(|l-k|) - P(|l-k+1|)),  P(j) = j^{2H}.
/// ```
pub fn diagnostic_sums(h: f64, level: u32, q: u32) -> Result<DiagnosticSums> {
    Hurst::new(h)?;
    check_level(level, MAX_DOUBLE_SUM_LEVEL)?;
    let n = 1usize << level;
    let two_h = 2.0 * h;
    let powers: Vec<f64> = (0..=n).map(|j| libm::pow(j as f64, two_h)).collect();
    let p = |j: i64| powers[j.unsigned_abs() as usize];
    let factor = libm::exp2(-two_h * level as f64 - 1.0);
    let mut alpha: f64 = 0.0;
    let mut gamma = CompensatedSum::new();
    for k in 1..=n as i64 {
        let mut row = CompensatedSum::new();
        for l in 1..=n as i64 {
            let v = (p(l) - p(l - 1) + p(l - k) - p(l - k + 1)).abs();
            alpha = alpha.max(v);
            row.add(v);
        }
        gamma.add(row.value());
    }
    let beta = (1..=q)
        .map(|r| Ok((r, beta_sum(h, level, r)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticSums {
        level,
        alpha: factor * alpha,
        beta,
        gamma: factor * gamma.value(),
    })
}

/// `2^{-n} Σ_k f^{(order)}(B_{(k-1)/N})`, the left Riemann sum of `∫_0^1 f^{(order)}(B_s) ds`.
pub fn riemann_mean(path: &FbmPath, f: &WeightFunction, order: u32) -> f64 {
    let vals = path.values();
    let n = path.steps();
    let s: CompensatedSum = vals[..n].iter().map(|&b| f.derivative(order, b)).sum();
    s.value() / n as f64
}

/// `½ Σ_k (g(B_{k/N}) + g(B_{(k-1)/N})) ΔB_{k/N}` with `g = f'`: the
/// trapezoidal sum whose limit, when it exists, is `f(B_1) - f(0)`.
pub fn trapezoid_sum(path: &FbmPath, f: &WeightFunction) -> f64 {
    let mut acc = CompensatedSum::new();
    for w in path.values().windows(2) {
        acc.add(0.5 * (f.derivative(1, w[1]) + f.derivative(1, w[0])) * (w[1] - w[0]));
    }
    acc.value()
}
