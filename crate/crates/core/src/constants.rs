//! Limit constants and the `(H, q)` regime classifier.
//!
//! The central series is `S_p(H) = Σ_{r ∈ Z} ρ_H(r)^p`, which converges iff
//! `(2 - 2H) p > 1`. Plain truncation at `|r| ≤ R` leaves a tail of order
//! `R^{1 - (2-2H)p}`, which for `(H, p) = (0.6, 2)` is still `~1e-4` at
//! `R = 10^5`. So the tail is not dropped but evaluated: for `r > 1`,
//!
//! ```text
//! ρ_H(r) = 2 Σ_{j≥1} C(2H, 2j) r^{2H-2j} = r^{2H-2} Σ_{j≥0} a_j r^{-2j},
//! ρ_H(r)^p = r^{-s} Σ_{i≥0} e_i r^{-2i},      s = (2 - 2H) p,
//! Σ_{r>R} ρ_H(r)^p = Σ_i e_i ζ(s + 2i, R + 1),
//! ```
//!
//! with the Hurwitz zeta function from Euler–Maclaurin. The reported
//! `tail_bound` is the size of the first neglected expansion term plus a
//! rounding allowance. Independently, `omitted_mass_bound` carries the crude
//! but certified bound obtained from `|ρ_H(r)| ≤ 2H|2H-1| (|r|-1)^{2H-2}`:
//!
//! ```text
//! Σ_{|r|>R} |ρ_H(r)|^p ≤ 2 (2H|2H-1|)^p (R-1)^{1-s} / (s - 1).
//! ```

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::fbm::{rho, Hurst};
use crate::numeric::{binomial, factorial, gaussian_moment_exact, CompensatedSum};

/// Default relative tolerance for the adaptive series.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// First truncation radius tried by the adaptive series.
pub const INITIAL_RADIUS: u64 = 1 << 10;

/// Radius at which the adaptive doubling gives up.
pub const MAX_RADIUS: u64 = 1 << 24;

/// Terms kept in the large-`r` expansion of `ρ_H(r)^p`.
const TAIL_TERMS: usize = 6;

/// Which of the five limit theorems applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeCase {
    /// `H < 1/(2q)`: convergence in L² to a multiple of `∫ f^{(q)}(B_s) ds`.
    SmallH,
    /// `H = 1/(2q)`: only conjectured.
    CriticalLow,
    /// `1/(2q) < H < 1 - 1/(2q)`: stable convergence to a Gaussian mixture.
    Clt,
    /// `H = 1 - 1/(2q)`: as the CLT case with an extra `n^{-1/2}`.
    CriticalHigh,
    /// `H > 1 - 1/(2q)`: convergence in L² to `∫ f(B) dZ^{(q)}`.
    Noncentral,
}

impl RegimeCase {
    pub fn id(self) -> &'static str {
        match self {
            RegimeCase::SmallH => "SMALL_H",
            RegimeCase::CriticalLow => "CRITICAL_LOW",
            RegimeCase::Clt => "CLT",
            RegimeCase::CriticalHigh => "CRITICAL_HIGH",
            RegimeCase::Noncentral => "NONCENTRAL",
        }
    }
}

impl fmt::Display for RegimeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Nature of the limiting object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitKind {
    L2DerivativeIntegral,
    StableMixedGaussian,
    L2HermiteIntegral,
}

impl LimitKind {
    pub fn id(self) -> &'static str {
        match self {
            LimitKind::L2DerivativeIntegral => "L2_DERIVATIVE_INTEGRAL",
            LimitKind::StableMixedGaussian => "STABLE_MIXED_GAUSSIAN",
            LimitKind::L2HermiteIntegral => "L2_HERMITE_INTEGRAL",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRegime {
    pub hurst: f64,
    pub order: u32,
    pub case: RegimeCase,
    pub limit_kind: LimitKind,
}

impl ScalingRegime {
    /// The critical low case is a conjecture, not a theorem.
    pub fn conjectural(&self) -> bool {
        self.case == RegimeCase::CriticalLow
    }

    /// Human-readable form of the renormalizing prefactor.
    pub fn renorm_exponent(&self) -> &'static str {
        match self.case {
            RegimeCase::SmallH => "2^{n(qH-1)}",
            RegimeCase::CriticalLow | RegimeCase::Clt => "2^{-n/2}",
            RegimeCase::CriticalHigh => "n^{-1/2} 2^{-n/2}",
            RegimeCase::Noncentral => "2^{n(q(1-H)-1)}",
        }
    }

    /// The prefactor that multiplies `V_n^{(q)}(f)` at `level = n`.
    pub fn prefactor(&self, level: u32) -> f64 {
        let n = level as f64;
        let q = self.order as f64;
        let h = self.hurst;
        match self.case {
            RegimeCase::SmallH => libm::exp2(n * (q * h - 1.0)),
            RegimeCase::CriticalLow | RegimeCase::Clt => libm::exp2(-n / 2.0),
            RegimeCase::CriticalHigh => libm::exp2(-n / 2.0) / libm::sqrt(n),
            RegimeCase::Noncentral => libm::exp2(n * (q * (1.0 - h) - 1.0)),
        }
    }
}

/// `1/(2q)`, the lower critical Hurst index.
pub fn lower_critical(q: u32) -> f64 {
    1.0 / (2.0 * q as f64)
}

/// `1 - 1/(2q)`, the upper critical Hurst index.
pub fn upper_critical(q: u32) -> f64 {
    1.0 - 1.0 / (2.0 * q as f64)
}

fn check_order(q: u32) -> Result<()> {
    if q < 2 {
        return Err(Error::Domain {
            what: "Hermite order",
            value: q as f64,
        });
    }
    Ok(())
}

/// Classify `(H, q)`. The critical cases fire on exact equality with the
/// floating-point values of `1/(2q)` and `1 - 1/(2q)`.
pub fn classify_regime(h: f64, q: u32) -> Result<ScalingRegime> {
    Hurst::new(h)?;
    check_order(q)?;
    let low = lower_critical(q);
    let high = upper_critical(q);
    let case = if h < low {
        RegimeCase::SmallH
    } else if h == low {
        RegimeCase::CriticalLow
    } else if h < high {
        RegimeCase::Clt
    } else if h == high {
        RegimeCase::CriticalHigh
    } else {
        RegimeCase::Noncentral
    };
    let limit_kind = match case {
        RegimeCase::SmallH => LimitKind::L2DerivativeIntegral,
        RegimeCase::CriticalLow | RegimeCase::Clt | RegimeCase::CriticalHigh => {
            LimitKind::StableMixedGaussian
        }
        RegimeCase::Noncentral => LimitKind::L2HermiteIntegral,
    };
    Ok(ScalingRegime {
        hurst: h,
        order: q,
        case,
        limit_kind,
    })
}

/// `(-1)^q / (2^q q!)`, the factor in front of `∫ f^{(q)}(B_s) ds`.
pub fn small_h_coefficient(q: u32) -> f64 {
    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
    sign / (libm::exp2(q as f64) * factorial(q))
}

/// A series value together with what is known about its truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSeries {
    pub value: f64,
    /// Terms with `|r| ≤ radius` are summed directly.
    pub radius: u64,
    /// Estimated error of `value`, including the tail correction.
    pub tail_bound: f64,
    /// Certified upper bound on the mass beyond `radius` (before correction).
    pub omitted_mass_bound: f64,
    pub converged: bool,
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 0.0 && rel_tol <= 1e-3 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "relative tolerance",
            value: rel_tol,
        })
    }
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a + k)^{-s}` for `s > 1` and large `a`.
fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    // Euler–Maclaurin at the lower end; the Bernoulli terms shrink like (s/a)^{2j}.
    const B2J_OVER_FACT: [f64; 5] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
    ];
    let a_s = libm::pow(a, -s);
    let mut total = a * a_s / (s - 1.0) + 0.5 * a_s;
    // rising = s (s+1) .. (s+2j-2), power = a^{-s-2j+1}
    let mut rising = s;
    let mut power = a_s / a;
    for (j, c) in B2J_OVER_FACT.iter().enumerate() {
        total += c * rising * power;
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        power /= a * a;
    }
    total
}

/// Coefficients of `(Σ_j a_j x^j)^p` up to `x^{TAIL_TERMS-1}`, where
/// `ρ_H(r) = r^{2H-2} Σ_j a_j r^{-2j}`.
fn rho_power_expansion(two_h: f64, p: u32) -> [f64; TAIL_TERMS] {
    let mut a = [0.0; TAIL_TERMS];
    let mut binom = two_h * (two_h - 1.0) / 2.0;
    for (j, slot) in a.iter_mut().enumerate() {
        *slot = 2.0 * binom;
        let k = (2 * j + 2) as f64;
        binom *= (two_h - k) * (two_h - k - 1.0) / ((k + 1.0) * (k + 2.0));
    }
    let mut out = [0.0; TAIL_TERMS];
    out[0] = 1.0;
    for _ in 0..p {
        let mut next = [0.0; TAIL_TERMS];
        for i in 0..TAIL_TERMS {
            for j in 0..TAIL_TERMS - i {
                next[i + j] += out[i] * a[j];
            }
        }
        out = next;
    }
    out
}

/// `Σ_{|r|≤R} ρ_H(r)^p` plus the corrected tail, at a fixed radius `R ≥ 2`.
pub fn rho_power_sum_at(h: f64, p: u32, radius: u64) -> Result<TruncatedSeries> {
    let hurst = Hurst::new(h)?;
    if p == 0 {
        return Err(Error::Domain {
            what: "series power",
            value: 0.0,
        });
    }
    let s = (2.0 - 2.0 * h) * p as f64;
    if s <= 1.0 {
        return Err(Error::Divergent { hurst: h, order: p });
    }
    if radius < 2 {
        return Err(Error::Size {
            what: "truncation radius",
            value: radius as usize,
            max: usize::MAX,
        });
    }
    let mut head = CompensatedSum::new();
    let mut magnitude = 0.0;
    // ρ is even, so r and -r contribute the same.
    for r in (1..=radius).rev() {
        let t = libm::pow(rho(r as i64, hurst), p as f64);
        head.add(2.0 * t);
        magnitude += 2.0 * t.abs();
    }
    let r0 = libm::pow(rho(0, hurst), p as f64);
    head.add(r0);
    magnitude += r0.abs();

    let e = rho_power_expansion(2.0 * h, p);
    let a = (radius + 1) as f64;
    let mut tail = CompensatedSum::new();
    let mut last = 0.0;
    for (i, &ei) in e.iter().enumerate() {
        last = 2.0 * ei * hurwitz_zeta(s + 2.0 * i as f64, a);
        tail.add(last);
    }
    let tail = tail.value();
    // The expansion coefficients grow at most geometrically, so the first
    // neglected term is below the last kept one times a / (a^2): use the last
    // kept term itself as a generous estimate.
    let truncation = last.abs();
    let rounding = 16.0 * f64::EPSILON * (magnitude + tail.abs());
    let certified = 2.0 * libm::pow(2.0 * h * (2.0 * h - 1.0).abs(), p as f64)
        * libm::pow(a - 2.0, 1.0 - s)
        / (s - 1.0);
    Ok(TruncatedSeries {
        value: head.value() + tail,
        radius,
        tail_bound: truncation + rounding,
        omitted_mass_bound: certified,
        converged: true,
    })
}

/// `Σ_{r∈Z} ρ_H(r)^p`, doubling the radius from `2^10` until the error
/// estimate drops below `rel_tol · |value|`.
pub fn rho_power_sum(h: f64, p: u32, rel_tol: f64) -> Result<TruncatedSeries> {
    check_rel_tol(rel_tol)?;
    let mut radius = INITIAL_RADIUS;
    loop {
        let mut series = rho_power_sum_at(h, p, radius)?;
        series.converged = series.tail_bound <= rel_tol * series.value.abs();
        if series.converged || radius >= MAX_RADIUS {
            return Ok(series);
        }
        radius *= 2;
    }
}

/// Turn a series for `σ²` into one for `σ = sqrt(scale · S)`.
fn sqrt_series(scale: f64, s: TruncatedSeries, rel_tol: f64) -> TruncatedSeries {
    let var = scale * s.value;
    let value = libm::sqrt(var.max(0.0));
    // |sqrt(v + d) - sqrt(v)| ≤ |d| / sqrt(v)
    let tail_bound = if value > 0.0 {
        scale * s.tail_bound / value
    } else {
        f64::INFINITY
    };
    TruncatedSeries {
        value,
        radius: s.radius,
        tail_bound,
        omitted_mass_bound: scale * s.omitted_mass_bound,
        converged: tail_bound <= rel_tol * value,
    }
}

/// `σ_{H,q} = sqrt(S_q(H) / (2^q q!))`.
///
/// Computed whenever the series converges, i.e. `(2 - 2H) q > 1`; this
/// includes `H ≤ 1/(2q)`. Use [`sigma_clt_strict`] to also reject those.
pub fn sigma_clt(h: f64, q: u32, rel_tol: f64) -> Result<TruncatedSeries> {
    check_order(q)?;
    Hurst::new(h)?;
    if h >= upper_critical(q) {
        return Err(Error::Divergent { hurst: h, order: q });
    }
    let s = rho_power_sum(h, q, rel_tol)?;
    Ok(sqrt_series(clt_scale(q), s, rel_tol))
}

/// [`sigma_clt`] restricted to the open CLT interval.
pub fn sigma_clt_strict(h: f64, q: u32, rel_tol: f64) -> Result<TruncatedSeries> {
    check_order(q)?;
    if h <= lower_critical(q) {
        return Err(Error::Regime {
            expected: "CLT",
            hurst: h,
            order: q,
        });
    }
    sigma_clt(h, q, rel_tol)
}

/// [`sigma_clt`] at a fixed truncation radius.
pub fn sigma_clt_at_radius(h: f64, q: u32, radius: u64) -> Result<TruncatedSeries> {
    check_order(q)?;
    Hurst::new(h)?;
    if h >= upper_critical(q) {
        return Err(Error::Divergent { hurst: h, order: q });
    }
    let s = rho_power_sum_at(h, q, radius)?;
    Ok(sqrt_series(clt_scale(q), s, f64::INFINITY))
}

fn clt_scale(q: u32) -> f64 {
    1.0 / (libm::exp2(q as f64) * factorial(q))
}

/// The critical constant exactly as printed:
/// `(2 log 2 / q!) (1 - 1/(2q))^q (1 - 1/q)^q`.
///
/// It is written like a standard deviation but, compared with the series
/// formula, has the dimension of a variance. See [`CriticalVariant`].
pub fn sigma_critical_high(q: u32) -> f64 {
    let qf = q as f64;
    2.0 * core::f64::consts::LN_2 / factorial(q)
        * libm::pow(1.0 - 1.0 / (2.0 * qf), qf)
        * libm::pow(1.0 - 1.0 / qf, qf)
}

/// The square-root-inserted reading: `sqrt(sigma_critical_high(q))`.
pub fn sigma_critical_high_corrected(q: u32) -> f64 {
    libm::sqrt(sigma_critical_high(q))
}

/// The two readings of the critical constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriticalVariant {
    /// The printed expressions are the standard deviations.
    Printed,
    /// The printed expressions are variances (the square root is missing)
    /// and the mixed-order sum keeps only its critical `p = 2` term.
    Corrected,
}

impl CriticalVariant {
    pub const ALL: [CriticalVariant; 2] = [CriticalVariant::Printed, CriticalVariant::Corrected];

    pub fn id(self) -> &'static str {
        match self {
            CriticalVariant::Printed => "printed",
            CriticalVariant::Corrected => "corrected",
        }
    }

    /// Limiting variance of `n^{-1/2} 2^{-n/2} V_n^{(q)}(1)` at `H = 1 - 1/(2q)`.
    pub fn hermite_limit_variance(self, q: u32) -> f64 {
        match self {
            CriticalVariant::Printed => libm::pow(sigma_critical_high(q), 2.0),
            CriticalVariant::Corrected => sigma_critical_high(q),
        }
    }

    /// Limiting variance of the rescaled centered power variation at `H = 3/4`.
    pub fn power_limit_variance(self, q: u32) -> Result<f64> {
        Ok(match self {
            CriticalVariant::Printed => libm::pow(sigma_tilde_critical(q)?, 2.0),
            CriticalVariant::Corrected => libm::pow(sigma_tilde_critical_corrected(q)?, 2.0),
        })
    }
}

fn check_even(q: u32) -> Result<()> {
    check_order(q)?;
    if q % 2 == 1 {
        return Err(Error::Domain {
            what: "even order",
            value: q as f64,
        });
    }
    Ok(())
}

/// `p! C(q, p) μ_{q-p}`, the coefficient of `H_p` in `x^q`.
fn power_coefficient(q: u32, p: u32) -> f64 {
    factorial(p) * binomial(q, p) * gaussian_moment_exact(q - p) as f64
}

/// `σ̃_{H,q} = sqrt(Σ_{p=2}^q p! C(q,p)² μ_{q-p}² 2^{-p} S_p(H))` for even `q`
/// and `1/4 < H < 3/4`.
pub fn sigma_tilde(h: f64, q: u32, rel_tol: f64) -> Result<TruncatedSeries> {
    check_even(q)?;
    Hurst::new(h)?;
    if !(h > 0.25 && h < 0.75) {
        return Err(Error::Divergent { hurst: h, order: q });
    }
    check_rel_tol(rel_tol)?;
    // Split the budget so the weighted sum meets rel_tol overall.
    let parts = (2..=q)
        .step_by(2)
        .map(|p| Ok((p, rho_power_sum(h, p, rel_tol)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(sigma_tilde_from(q, &parts, rel_tol))
}

/// [`sigma_tilde`] with every `S_p` truncated at the same fixed radius.
pub fn sigma_tilde_at_radius(h: f64, q: u32, radius: u64) -> Result<TruncatedSeries> {
    check_even(q)?;
    Hurst::new(h)?;
    if !(h > 0.25 && h < 0.75) {
        return Err(Error::Divergent { hurst: h, order: q });
    }
    let parts = (2..=q)
        .step_by(2)
        .map(|p| Ok((p, rho_power_sum_at(h, p, radius)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(sigma_tilde_from(q, &parts, f64::INFINITY))
}

fn sigma_tilde_from(q: u32, parts: &[(u32, TruncatedSeries)], rel_tol: f64) -> TruncatedSeries {
    let mut var = CompensatedSum::new();
    let mut err = 0.0;
    let mut omitted = 0.0;
    let mut radius = 0;
    for &(p, s) in parts {
        let w = factorial(p)
            * libm::pow(binomial(q, p), 2.0)
            * libm::pow(gaussian_moment_exact(q - p) as f64, 2.0)
            / libm::exp2(p as f64);
        var.add(w * s.value);
        err += w * s.tail_bound;
        omitted += w * s.omitted_mass_bound;
        radius = radius.max(s.radius);
    }
    let combined = TruncatedSeries {
        value: var.value(),
        radius,
        tail_bound: err,
        omitted_mass_bound: omitted,
        converged: true,
    };
    sqrt_series(1.0, combined, rel_tol)
}

/// `σ̃_{H,q}` through `σ̃² = Σ_p (p! C(q,p) μ_{q-p})² σ²_{H,p}`, with each
/// `σ_{H,p}` from [`sigma_clt_at_radius`]. Used as a cross-check.
pub fn sigma_tilde_via_clt(h: f64, q: u32, radius: u64) -> Result<f64> {
    check_even(q)?;
    let mut var = CompensatedSum::new();
    for p in (2..=q).step_by(2) {
        let sigma = sigma_clt_at_radius(h, p, radius)?.value;
        var.add(libm::pow(power_coefficient(q, p), 2.0) * sigma * sigma);
    }
    Ok(libm::sqrt(var.value()))
}

/// The `H = 3/4` constant for the power variation, exactly as printed:
/// `sqrt(Σ_{p=2}^q 2 log 2 · p! C(q,p)² μ_{q-p}² (1 - 1/(2q))^q (1 - 1/q)^q)`.
pub fn sigma_tilde_critical(q: u32) -> Result<f64> {
    check_even(q)?;
    let qf = q as f64;
    let tail = libm::pow(1.0 - 1.0 / (2.0 * qf), qf) * libm::pow(1.0 - 1.0 / qf, qf);
    let sum = compensated_terms((2..=q).step_by(2).map(|p| {
        2.0 * core::f64::consts::LN_2
            * factorial(p)
            * libm::pow(binomial(q, p), 2.0)
            * libm::pow(gaussian_moment_exact(q - p) as f64, 2.0)
            * tail
    }));
    Ok(libm::sqrt(sum))
}

/// The pattern-consistent `H = 3/4` constant. At `H = 3/4` only the `p = 2`
/// chaos sits on its critical line, so
/// `σ̃ = 2 C(q,2) μ_{q-2} · sqrt(sigma_critical_high(2))`.
pub fn sigma_tilde_critical_corrected(q: u32) -> Result<f64> {
    check_even(q)?;
    Ok(power_coefficient(q, 2) * sigma_critical_high_corrected(2))
}

fn compensated_terms(it: impl Iterator<Item = f64>) -> f64 {
    it.sum::<CompensatedSum>().value()
}

/// `c_{q,H} = H^q (2H-1)^q / (q!² (Hq - q + 1)(2Hq - 2q + 1))`, so that
/// `Var(Z_t^{(q)}) = q! c_{q,H} t^{(2H-2)q+2}`.
pub fn hermite_process_variance_const(q: u32, h: f64) -> Result<f64> {
    check_order(q)?;
    Hurst::new(h)?;
    if h <= upper_critical(q) {
        return Err(Error::Regime {
            expected: "NONCENTRAL",
            hurst: h,
            order: q,
        });
    }
    let qf = q as f64;
    let f = factorial(q);
    Ok(libm::pow(h, qf) * libm::pow(2.0 * h - 1.0, qf)
        / (f * f * (h * qf - qf + 1.0) * (2.0 * h * qf - 2.0 * qf + 1.0)))
}

/// Values of `ρ_H(r)^p` for `r = 0..=radius`, handy for brute-force checks.
pub fn rho_powers(h: f64, p: u32, radius: u64) -> Result<Vec<f64>> {
    let hurst = Hurst::new(h)?;
    let mut out = vec![0.0; radius as usize + 1];
    for (r, slot) in out.iter_mut().enumerate() {
        *slot = libm::pow(rho(r as i64, hurst), p as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn regime_examples() {
        assert_eq!(classify_regime(0.1, 3).unwrap().case, RegimeCase::SmallH);
        assert_eq!(classify_regime(0.5, 2).unwrap().case, RegimeCase::Clt);
        assert_eq!(classify_regime(0.75, 2).unwrap().case, RegimeCase::CriticalHigh);
        assert_eq!(classify_regime(0.25, 2).unwrap().case, RegimeCase::CriticalLow);
        assert!(classify_regime(0.25, 2).unwrap().conjectural());
        assert_eq!(classify_regime(1.0 / 6.0, 3).unwrap().case, RegimeCase::CriticalLow);
        assert_eq!(classify_regime(1.0 - 1.0 / 6.0, 3).unwrap().case, RegimeCase::CriticalHigh);
        assert_eq!(classify_regime(0.9, 2).unwrap().case, RegimeCase::Noncentral);
        assert!(classify_regime(1.0, 2).is_err());
        assert!(classify_regime(0.0, 2).is_err());
        assert!(classify_regime(0.5, 1).is_err());
    }

    #[test]
    fn prefactors() {
        let r = classify_regime(0.75, 2).unwrap();
        assert!(rel(r.prefactor(4), 0.25 / 2.0) < 1e-15);
        let r = classify_regime(0.9, 2).unwrap();
        assert!(rel(r.prefactor(10), libm::exp2(10.0 * (2.0 * 0.1 - 1.0))) < 1e-15);
    }

    #[test]
    fn half_collapse() {
        for q in 2..=4u32 {
            let s = sigma_clt(0.5, q, DEFAULT_REL_TOL).unwrap();
            assert!(rel(s.value * s.value, 1.0 / factorial(q)) < 1e-12);
            assert!(s.converged);
        }
        assert!(rel(sigma_clt(0.5, 3, 1e-8).unwrap().value, 0.408_248_290_463_863) < 1e-12);
        assert!(rel(sigma_tilde(0.5, 2, 1e-8).unwrap().value, libm::sqrt(2.0)) < 1e-12);
        assert!(rel(sigma_tilde(0.5, 4, 1e-8).unwrap().value, libm::sqrt(96.0)) < 1e-12);
        // μ_12 - μ_6² = 10395 - 225
        assert!(rel(sigma_tilde(0.5, 6, 1e-8).unwrap().value * sigma_tilde(0.5, 6, 1e-8).unwrap().value, 10170.0) < 1e-12);
    }

    #[test]
    fn two_radius_agreement() {
        for &(h, q) in &[(0.6, 2u32), (0.65, 3), (0.3, 2), (0.7, 2)] {
            let a = sigma_clt_at_radius(h, q, 1_000).unwrap();
            let b = sigma_clt_at_radius(h, q, 100_000).unwrap();
            assert!(rel(a.value, b.value) < 1e-6, "H={h} q={q}");
            assert!((a.value - b.value).abs() <= a.tail_bound, "H={h} q={q}");
        }
    }

    #[test]
    fn tail_correction_matches_longer_direct_sum() {
        // Σ_{r=R+1}^{R'} ρ^p computed directly vs the difference of two corrected tails.
        let (h, p) = (0.6, 2u32);
        let r1 = 1_000u64;
        let r2 = 200_000u64;
        let direct: f64 = rho_powers(h, p, r2).unwrap()[(r1 as usize + 1)..]
            .iter()
            .map(|x| 2.0 * x)
            .sum::<CompensatedSum>()
            .value();
        let a = rho_power_sum_at(h, p, r1).unwrap().value;
        let b = rho_power_sum_at(h, p, r2).unwrap().value;
        let head_diff = b - a;
        assert!(head_diff.abs() < 1e-12 * a, "corrected sums disagree by {head_diff}");
        assert!(direct > 1e-4 * a, "the omitted mass is not negligible");
    }

    #[test]
    fn omitted_mass_bound_is_an_upper_bound() {
        let (h, p) = (0.7, 2u32);
        let radius = 100u64;
        let far = rho_powers(h, p, 2_000_000).unwrap();
        let beyond: f64 = 2.0 * far[radius as usize + 1..].iter().sum::<f64>();
        let s = rho_power_sum_at(h, p, radius).unwrap();
        assert!(s.omitted_mass_bound >= beyond);
    }

    #[test]
    fn adaptive_series_converges() {
        let s = sigma_clt(0.6, 2, 1e-8).unwrap();
        assert!(s.converged);
        assert!(s.tail_bound <= 1e-8 * s.value);
        assert!(rho_power_sum(0.6, 2, 0.0).is_err());
        assert!(rho_power_sum(0.6, 2, 1e-2).is_err());
    }

    #[test]
    fn divergence_and_strictness() {
        assert!(matches!(sigma_clt(0.75, 2, 1e-8), Err(Error::Divergent { .. })));
        assert!(sigma_clt(0.2, 2, 1e-8).is_ok());
        assert!(matches!(sigma_clt_strict(0.2, 2, 1e-8), Err(Error::Regime { .. })));
        assert!(sigma_tilde(0.8, 2, 1e-8).is_err());
        assert!(sigma_tilde(0.5, 3, 1e-8).is_err());
    }

    #[test]
    fn tilde_identity() {
        for &(h, q) in &[(0.6, 2u32), (0.4, 4), (0.3, 2), (0.7, 6)] {
            let direct = sigma_tilde_at_radius(h, q, 4096).unwrap().value;
            let via = sigma_tilde_via_clt(h, q, 4096).unwrap();
            assert!(rel(direct, via) < 1e-10, "H={h} q={q}");
        }
        let t = sigma_tilde(0.6, 2, 1e-8).unwrap().value;
        let s = sigma_clt(0.6, 2, 1e-8).unwrap().value;
        assert!(rel(t, 2.0 * s) < 1e-10);
    }

    #[test]
    fn critical_constants() {
        let ln2 = core::f64::consts::LN_2;
        assert!(rel(sigma_critical_high(2), ln2 * 9.0 / 64.0) < 1e-15);
        let q3 = (2.0 * ln2 / 6.0) * libm::pow(5.0 / 6.0, 3.0) * libm::pow(2.0 / 3.0, 3.0);
        assert!(rel(sigma_critical_high(3), q3) < 1e-15);
        let t2 = libm::sqrt(2.0 * ln2 * 2.0 * (9.0 / 16.0) * 0.25);
        assert!(rel(sigma_tilde_critical(2).unwrap(), t2) < 1e-15);
        // p ∈ {2, 4}: 2·C(4,2)²·1² + 24·1·1 = 72 + 24, times 2 log2 (7/8)^4 (3/4)^4
        let t4 = libm::sqrt(96.0 * 2.0 * ln2 * libm::pow(7.0 / 8.0, 4.0) * libm::pow(0.75, 4.0));
        assert!(rel(sigma_tilde_critical(4).unwrap(), t4) < 1e-14);
        assert!(sigma_tilde_critical(3).is_err());
        // At q = 2 the printed σ̃² is 4 × the printed σ, matching the corrected pattern.
        assert!(rel(
            libm::pow(sigma_tilde_critical(2).unwrap(), 2.0),
            4.0 * sigma_critical_high(2)
        ) < 1e-14);
        assert!(rel(
            sigma_tilde_critical_corrected(2).unwrap(),
            sigma_tilde_critical(2).unwrap()
        ) < 1e-14);
    }

    #[test]
    fn hermite_process_constant() {
        let c = hermite_process_variance_const(2, 0.9).unwrap();
        assert!(rel(c, 0.81 * 0.64 / (4.0 * 0.8 * 0.6)) < 1e-14);
        assert!(hermite_process_variance_const(2, 0.75).is_err());
        let (q, h) = (3.0, 0.95);
        let num = h * h * h * 0.9 * 0.9 * 0.9;
        let den = 36.0 * (h * q - q + 1.0) * (2.0 * h * q - 2.0 * q + 1.0);
        assert!(rel(hermite_process_variance_const(3, 0.95).unwrap(), num / den) < 1e-14);
        assert!(hermite_process_variance_const(2, 0.76).unwrap() > 1.0);
    }

    #[test]
    fn small_h_sign() {
        assert_eq!(small_h_coefficient(2), 1.0 / 8.0);
        assert_eq!(small_h_coefficient(3), -1.0 / 48.0);
    }
}
