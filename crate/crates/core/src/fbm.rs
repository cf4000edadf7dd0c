//! Fractional Brownian motion on the dyadic grid `t_k = k 2^-n`, `k = 0..=2^n`.
//!
//! Covariance `R_H(t, s) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2`. The unit-lag
//! increments `ΔB_k = B_{k 2^-n} - B_{(k-1) 2^-n}` form a stationary sequence
//! with autocovariance `2^{-2Hn} ρ_H(r) / 2`, where
//! `ρ_H(r) = |r+1|^{2H} + |r-1|^{2H} - 2|r|^{2H}`.
//!
//! Two exact samplers are provided:
//!
//! * [`CirculantSampler`] embeds the increment autocovariance in a circulant
//!   matrix of size `2^{n+1}` and samples through one forward DFT. One
//!   transform of complex white noise yields two independent paths (real and
//!   imaginary parts); [`CirculantSampler::sample`] keeps the real part.
//! * [`CholeskySampler`] factors the dense covariance matrix of
//!   `(B_{t_1}, .., B_{t_N})` built from `R_H` directly. It is `O(8^n)` and
//!   exists as an independent oracle for the circulant route.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::fft::{Complex64, Dft, Radix2};
use crate::numeric::CompensatedSum;
use crate::rng::{path_rng, standard_normal, ChaCha8Rng};

/// Largest level accepted by the circulant sampler.
pub const MAX_CIRCULANT_LEVEL: u32 = 22;

/// Largest level accepted by the dense Cholesky sampler.
pub const MAX_CHOLESKY_LEVEL: u32 = 12;

/// Relative tolerance for negative circulant eigenvalues: values in
/// `[-EIGEN_TOLERANCE * max, 0)` are clamped to zero, anything below is an error.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

/// A Hurst index, validated to lie in the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Hurst(f64);

impl Hurst {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h < 1.0 {
            Ok(Self(h))
        } else {
            Err(Error::Domain {
                what: "Hurst index",
                value: h,
            })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn two_h(self) -> f64 {
        2.0 * self.0
    }
}

impl fmt::Display for Hurst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[inline]
fn abs_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        libm::pow(x.abs(), e)
    }
}

/// `R_H(t, s) = E[B_t B_s]` for `t, s` in `[0, 1]`.
pub fn fbm_covariance(t: f64, s: f64, hurst: Hurst) -> Result<f64> {
    for v in [t, s] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain {
                what: "time",
                value: v,
            });
        }
    }
    let e = hurst.two_h();
    Ok(0.5 * (abs_pow(s, e) + abs_pow(t, e) - abs_pow(t - s, e)))
}

/// `E[(B_t - B_s)(B_v - B_u)]` for arbitrary times.
pub fn increment_covariance(s: f64, t: f64, u: f64, v: f64, hurst: Hurst) -> f64 {
    let e = hurst.two_h();
    0.5 * (abs_pow(t - u, e) + abs_pow(s - v, e) - abs_pow(t - v, e) - abs_pow(s - u, e))
}

/// Lags at or beyond this use the binomial series for `ρ_H`; the direct
/// second difference loses about `2 log10(r)` digits to cancellation.
const RHO_SERIES_LAG: u64 = 16;

/// `ρ_H(r) = |r+1|^{2H} + |r-1|^{2H} - 2|r|^{2H}`.
#[inline]
pub fn rho(r: i64, hurst: Hurst) -> f64 {
    let e = hurst.two_h();
    let lag = r.unsigned_abs();
    if lag >= RHO_SERIES_LAG {
        return rho_series(lag as f64, e);
    }
    let r = lag as f64;
    abs_pow(r + 1.0, e) + abs_pow(r - 1.0, e) - 2.0 * abs_pow(r, e)
}

/// `ρ_H(r) = 2 r^{2H} Σ_{j≥1} C(2H, 2j) r^{-2j}` for `r > 1`.
fn rho_series(r: f64, two_h: f64) -> f64 {
    let x = 1.0 / (r * r);
    // C(2H, 2j) by the recurrence C(a, k+1) = C(a, k) (a - k) / (k + 1).
    let mut binom = two_h * (two_h - 1.0) / 2.0;
    let mut power = x;
    let mut sum = 0.0;
    for j in 1..64u32 {
        let term = binom * power;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        let k = (2 * j) as f64;
        binom *= (two_h - k) * (two_h - k - 1.0) / ((k + 1.0) * (k + 2.0));
        power *= x;
    }
    2.0 * libm::pow(r, two_h) * sum
}

/// Autocovariance of the unit-lag increments at a given level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementAutocovariance {
    pub hurst: Hurst,
    pub level: u32,
}

impl IncrementAutocovariance {
    pub fn new(hurst: Hurst, level: u32) -> Self {
        Self { hurst, level }
    }

    /// `E[ΔB_k ΔB_{k+lag}] = 2^{-2Hn} ρ_H(lag) / 2`.
    pub fn value(&self, lag: i64) -> f64 {
        libm::exp2(-self.hurst.two_h() * self.level as f64) * 0.5 * rho(lag, self.hurst)
    }
}

/// One sample of `(B_{k 2^-n})_{k = 0..=2^n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmPath {
    hurst: Hurst,
    level: u32,
    values: Vec<f64>,
    seed: u64,
}

impl FbmPath {
    /// Wrap externally produced values, checking the length and `B_0 = 0`.
    pub fn from_values(hurst: Hurst, level: u32, values: Vec<f64>, seed: u64) -> Result<Self> {
        if level == 0 || level > 30 {
            return Err(Error::InvalidPath(format!("level {level} is not in 1..=30")));
        }
        let expected = (1usize << level) + 1;
        if values.len() != expected {
            return Err(Error::InvalidPath(format!(
                "expected {expected} values at level {level}, found {}",
                values.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidPath(format!("B_0 = {} is not zero", values[0])));
        }
        Ok(Self {
            hurst,
            level,
            values,
            seed,
        })
    }

    pub fn hurst(&self) -> Hurst {
        self.hurst
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of increments, `2^n`.
    pub fn steps(&self) -> usize {
        1 << self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `B_1`.
    pub fn terminal(&self) -> f64 {
        self.values[self.steps()]
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.steps() as f64
    }

    /// `ΔB_{k 2^-n}` for `k = 1..=2^n`, in order.
    pub fn increments(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// Pairs `(B_{(k-1) 2^-n}, ΔB_{k 2^-n})` for `k = 1..=2^n`.
    pub fn left_and_increment(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.values.windows(2).map(|w| (w[0], w[1] - w[0]))
    }

    /// The same realization read on the coarser grid of `level`.
    pub fn subsample(&self, level: u32) -> Result<FbmPath> {
        if level == 0 || level > self.level {
            return Err(Error::GridMismatch {
                expected: self.level,
                found: level,
            });
        }
        let step = 1usize << (self.level - level);
        Ok(FbmPath {
            hurst: self.hurst,
            level,
            values: self.values.iter().step_by(step).copied().collect(),
            seed: self.seed,
        })
    }
}

fn cumulative(increments: impl Iterator<Item = f64>, len: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(len + 1);
    values.push(0.0);
    let mut acc = CompensatedSum::new();
    for d in increments {
        acc.add(d);
        values.push(acc.value());
    }
    values
}

/// Exact sampler by circulant embedding of the increment autocovariance.
///
/// The eigenvalues are computed once in [`CirculantSampler::new`]; drawing a
/// path costs one complex DFT of length `2^{n+1}` and `2^{n+2}` Gaussian draws.
pub struct CirculantSampler {
    hurst: Hurst,
    level: u32,
    /// `sqrt(λ_k / 2^{n+1}) * 2^{-Hn}`.
    weights: Vec<f64>,
    clamped: usize,
    dft: Box<dyn Dft>,
}

impl fmt::Debug for CirculantSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CirculantSampler")
            .field("hurst", &self.hurst)
            .field("level", &self.level)
            .field("clamped", &self.clamped)
            .finish()
    }
}

impl CirculantSampler {
    /// Plan a sampler using the built-in radix-2 transform.
    pub fn new(hurst: Hurst, level: u32) -> Result<Self> {
        Self::check_level(level)?;
        Self::with_dft(hurst, level, Box::new(Radix2::new(1 << (level + 1))))
    }

    /// Plan a sampler using a caller-supplied transform of length `2^{level+1}`.
    pub fn with_dft(hurst: Hurst, level: u32, dft: Box<dyn Dft>) -> Result<Self> {
        Self::check_level(level)?;
        let n = 1usize << level;
        let m = 2 * n;
        assert_eq!(dft.len(), m, "DFT length must be 2^(level + 1)");

        // First row of the circulant: c_0..c_n, then c_{n-1}..c_1 (unit scale ρ/2).
        let mut row: Vec<Complex64> = Vec::with_capacity(m);
        row.extend((0..=n as i64).map(|k| Complex64::new(0.5 * rho(k, hurst), 0.0)));
        row.extend((1..n as i64).rev().map(|k| Complex64::new(0.5 * rho(k, hurst), 0.0)));
        dft.forward(&mut row);

        let max = row.iter().map(|z| z.re).fold(f64::MIN, f64::max);
        let tolerance = EIGEN_TOLERANCE * max;
        let mut clamped = 0;
        let scale = libm::exp2(-hurst.get() * level as f64) / libm::sqrt(m as f64);
        let mut weights = Vec::with_capacity(m);
        for (index, z) in row.iter().enumerate() {
            let mut lambda = z.re;
            if lambda < 0.0 {
                if lambda < -tolerance {
                    return Err(Error::NegativeEigenvalue {
                        index,
                        value: lambda,
                        tolerance,
                    });
                }
                clamped += 1;
                lambda = 0.0;
            }
            weights.push(libm::sqrt(lambda) * scale);
        }
        if clamped > 0 {
            log::warn!(
                "circulant embedding H={} n={}: clamped {} eigenvalues in [-{:e}, 0) to zero",
                hurst,
                level,
                clamped,
                tolerance
            );
        }
        Ok(Self {
            hurst,
            level,
            weights,
            clamped,
            dft,
        })
    }

    fn check_level(level: u32) -> Result<()> {
        if level == 0 || level > MAX_CIRCULANT_LEVEL {
            return Err(Error::Size {
                what: "circulant level",
                value: level as usize,
                max: MAX_CIRCULANT_LEVEL as usize,
            });
        }
        Ok(())
    }

    pub fn hurst(&self) -> Hurst {
        self.hurst
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of eigenvalues that were clamped from tiny negatives to zero.
    pub fn clamped_eigenvalues(&self) -> usize {
        self.clamped
    }

    /// One path; the real part of the transform.
    pub fn sample(&self, seed: u64) -> FbmPath {
        let [re, _] = self.sample_pair(seed);
        re
    }

    /// Two independent paths from one transform: the real part, then the
    /// imaginary part. Both carry `seed`.
    pub fn sample_pair(&self, seed: u64) -> [FbmPath; 2] {
        let mut rng = path_rng(seed);
        self.sample_pair_with(&mut rng, seed)
    }

    fn sample_pair_with(&self, rng: &mut ChaCha8Rng, seed: u64) -> [FbmPath; 2] {
        let n = 1usize << self.level;
        let mut buf: Vec<Complex64> = self
            .weights
            .iter()
            .map(|&w| {
                let re = standard_normal(rng);
                let im = standard_normal(rng);
                Complex64::new(w * re, w * im)
            })
            .collect();
        self.dft.forward(&mut buf);
        let re = cumulative(buf[..n].iter().map(|z| z.re), n);
        let im = cumulative(buf[..n].iter().map(|z| z.im), n);
        [
            FbmPath {
                hurst: self.hurst,
                level: self.level,
                values: re,
                seed,
            },
            FbmPath {
                hurst: self.hurst,
                level: self.level,
                values: im,
                seed,
            },
        ]
    }
}

/// One exact fBm sample by circulant embedding.
pub fn sample_fbm_circulant(hurst: f64, level: u32, seed: u64) -> Result<FbmPath> {
    Ok(CirculantSampler::new(Hurst::new(hurst)?, level)?.sample(seed))
}

/// Exact sampler from the dense Cholesky factor of the covariance of
/// `(B_{t_1}, .., B_{t_N})`.
#[derive(Clone)]
pub struct CholeskySampler {
    hurst: Hurst,
    level: u32,
    /// Row-packed lower-triangular factor; row `i` starts at `i (i + 1) / 2`.
    lower: Vec<f64>,
}

impl fmt::Debug for CholeskySampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CholeskySampler")
            .field("hurst", &self.hurst)
            .field("level", &self.level)
            .finish()
    }
}

impl CholeskySampler {
    pub fn new(hurst: Hurst, level: u32) -> Result<Self> {
        if level == 0 || level > MAX_CHOLESKY_LEVEL {
            return Err(Error::Size {
                what: "Cholesky level",
                value: level as usize,
                max: MAX_CHOLESKY_LEVEL as usize,
            });
        }
        let n = 1usize << level;
        let e = hurst.two_h();
        // t^{2H} for t = i / n.
        let pow: Vec<f64> = (0..=n).map(|i| abs_pow(i as f64 / n as f64, e)).collect();
        let mut lower = vec![0.0; n * (n + 1) / 2];
        for i in 0..n {
            let row_i = i * (i + 1) / 2;
            for j in 0..=i {
                let row_j = j * (j + 1) / 2;
                // Covariance of B_{(i+1)/n} and B_{(j+1)/n}.
                let cov = 0.5 * (pow[i + 1] + pow[j + 1] - pow[i - j]);
                let dot: f64 = lower[row_i..row_i + j]
                    .iter()
                    .zip(&lower[row_j..row_j + j])
                    .map(|(a, b)| a * b)
                    .sum();
                let s = cov - dot;
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { index: i });
                    }
                    lower[row_i + i] = libm::sqrt(s);
                } else {
                    lower[row_i + j] = s / lower[row_j + j];
                }
            }
        }
        Ok(Self {
            hurst,
            level,
            lower,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn sample(&self, seed: u64) -> FbmPath {
        let n = 1usize << self.level;
        let mut rng = path_rng(seed);
        let z: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        for i in 0..n {
            let row = &self.lower[i * (i + 1) / 2..i * (i + 1) / 2 + i + 1];
            values.push(row.iter().zip(&z).map(|(l, z)| l * z).sum::<CompensatedSum>().value());
        }
        FbmPath {
            hurst: self.hurst,
            level: self.level,
            values,
            seed,
        }
    }
}

/// One exact fBm sample from the dense Cholesky factor (`level <= 12`).
pub fn sample_fbm_cholesky(hurst: f64, level: u32, seed: u64) -> Result<FbmPath> {
    Ok(CholeskySampler::new(Hurst::new(hurst)?, level)?.sample(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(x: f64) -> Hurst {
        Hurst::new(x).unwrap()
    }

    #[test]
    fn hurst_domain() {
        assert!(Hurst::new(0.0).is_err());
        assert!(Hurst::new(1.0).is_err());
        assert!(Hurst::new(f64::NAN).is_err());
        assert!(Hurst::new(0.5).is_ok());
    }

    #[test]
    fn covariance_examples() {
        assert_eq!(fbm_covariance(1.0, 1.0, h(0.3)).unwrap(), 1.0);
        assert!((fbm_covariance(0.5, 0.5, h(0.5)).unwrap() - 0.5).abs() < 1e-15);
        // 0.5 * (0.5^1.5 + 1 - 0.5^1.5) = 0.5
        assert!((fbm_covariance(1.0, 0.5, h(0.75)).unwrap() - 0.5).abs() < 1e-15);
        assert!(fbm_covariance(1.1, 0.5, h(0.75)).is_err());
        assert!(fbm_covariance(0.2, -0.1, h(0.75)).is_err());
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(0, h(0.37)), 2.0);
        assert_eq!(rho(5, h(0.5)), 0.0);
        assert!((rho(1, h(0.75)) - (libm::pow(2.0, 1.5) - 2.0)).abs() < 1e-15);
        assert!((rho(1, h(0.75)) - 0.828427).abs() < 1e-6);
        assert_eq!(rho(-3, h(0.2)), rho(3, h(0.2)));
    }

    #[test]
    fn rho_series_matches_direct_difference_at_moderate_lags() {
        for &hh in &[0.1, 0.3, 0.6, 0.75, 0.9] {
            let e = 2.0 * hh;
            for r in [16u32, 20, 40] {
                let rf = r as f64;
                let direct =
                    libm::pow(rf + 1.0, e) + libm::pow(rf - 1.0, e) - 2.0 * libm::pow(rf, e);
                let series = rho(r as i64, h(hh));
                assert!((direct - series).abs() <= 1e-10 * direct.abs(), "H={hh} r={r}");
            }
            // Asymptotics: ρ(r) ~ 2H(2H-1) r^{2H-2}.
            let r = 1.0e6;
            let lead = e * (e - 1.0) * libm::pow(r, e - 2.0);
            assert!((rho(1_000_000, h(hh)) / lead - 1.0).abs() < 1e-9);
        }
        assert_eq!(rho(1000, h(0.5)), 0.0);
    }

    #[test]
    fn increment_covariance_matches_rho() {
        let hh = h(0.3);
        let n = 4;
        let dt = 1.0 / 16.0;
        for lag in 0..5i64 {
            let k = 3.0;
            let l = k + lag as f64;
            let direct = increment_covariance((k - 1.0) * dt, k * dt, (l - 1.0) * dt, l * dt, hh);
            let via_rho = IncrementAutocovariance::new(hh, n).value(lag);
            assert!((direct - via_rho).abs() < 1e-14, "lag {lag}: {direct} vs {via_rho}");
        }
    }

    #[test]
    fn path_invariants() {
        let p = sample_fbm_circulant(0.7, 6, 11).unwrap();
        assert_eq!(p.values().len(), 65);
        assert_eq!(p.values()[0], 0.0);
        assert_eq!(p.increments().len(), 64);
        let q = sample_fbm_circulant(0.7, 6, 11).unwrap();
        assert!(p.values().iter().zip(q.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn from_values_validates() {
        assert!(FbmPath::from_values(h(0.5), 2, vec![0.0; 5], 0).is_ok());
        assert!(FbmPath::from_values(h(0.5), 2, vec![0.0; 4], 0).is_err());
        assert!(FbmPath::from_values(h(0.5), 2, vec![1.0, 0.0, 0.0, 0.0, 0.0], 0).is_err());
    }

    #[test]
    fn subsample_reads_coarse_grid() {
        let p = sample_fbm_circulant(0.4, 5, 3).unwrap();
        let c = p.subsample(3).unwrap();
        assert_eq!(c.level(), 3);
        assert_eq!(c.values()[8], p.values()[32]);
        assert_eq!(c.values()[1], p.values()[4]);
        assert!(p.subsample(6).is_err());
    }

    #[test]
    fn level_bounds() {
        assert!(CirculantSampler::new(h(0.5), 0).is_err());
        assert!(CirculantSampler::new(h(0.5), MAX_CIRCULANT_LEVEL + 1).is_err());
        assert!(sample_fbm_cholesky(0.2, 13, 0).is_err());
    }

    #[test]
    fn circulant_eigenvalues_nonnegative_across_hurst() {
        for &hh in &[0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            for level in 1..=10 {
                let s = CirculantSampler::new(h(hh), level).unwrap();
                assert!(s.weights.iter().all(|w| *w >= 0.0));
            }
        }
    }
}
