//! Hermite polynomials in the normalization
//! `H_q(x) = (-1)^q / q! · e^{x²/2} d^q/dx^q e^{-x²/2}`,
//! i.e. the probabilists' `He_q` divided by `q!`.
//!
//! With this normalization `H_0 = 1`, `H_1(x) = x`, `H_2(x) = (x² - 1)/2`,
//! `H_3(x) = (x³ - 3x)/6`, and for jointly standard Gaussian `X, Y` with
//! correlation `c`, `E[H_p(X) H_q(Y)] = 1{p = q} c^q / q!`.
//!
//! Everything is evaluated by the three-term recurrence
//! `(q+1) H_{q+1}(x) = x H_q(x) - H_{q-1}(x)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::numeric::{binomial_exact, factorial, factorial_exact, gaussian_moment_exact};

/// `H_q(x)`.
pub fn hermite_eval(q: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if q == 0 {
        return prev;
    }
    let mut cur = x;
    for k in 1..q {
        let next = (x * cur - prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fill `out[p] = H_p(x)` for `p = 0..out.len()`.
pub fn hermite_all(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for k in 1..out.len().saturating_sub(1) {
        out[k + 1] = (x * out[k] - out[k - 1]) / (k + 1) as f64;
    }
}

/// `μ_q = E[G^q]` for `G ~ N(0, 1)`: zero for odd `q`, `(q-1)!!` for even `q`.
pub fn gaussian_moment(q: u32) -> f64 {
    if q % 2 == 1 {
        return 0.0;
    }
    (1..q).step_by(2).fold(1.0, |acc, k| acc * k as f64)
}

/// Largest degree for which [`HermiteCoefficients`] keeps exact integers.
pub const MAX_EXACT_DEGREE: u32 = 30;

/// Coefficients `c_p` with `x^m = Σ_p c_p H_p(x)`.
///
/// `c_p = p! · C(m, p) · μ_{m-p}`. All coefficients are integers; they are
/// stored exactly for `m <= 30` and as floats beyond (where `m!` no longer
/// has an exact `f64` representation anyway).
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteCoefficients {
    degree: u32,
    exact: Option<Vec<u128>>,
    coeffs: Vec<f64>,
}

/// Expand the monomial `x^m` in the basis `{H_0, .., H_m}`.
pub fn monomial_in_hermite(m: u32) -> HermiteCoefficients {
    if m <= MAX_EXACT_DEGREE {
        let exact: Vec<u128> = (0..=m)
            .map(|p| factorial_exact(p) * binomial_exact(m, p) * gaussian_moment_exact(m - p))
            .collect();
        let coeffs = exact.iter().map(|&c| c as f64).collect();
        HermiteCoefficients {
            degree: m,
            exact: Some(exact),
            coeffs,
        }
    } else {
        // p! C(m, p) = m! / (m - p)!, accumulated as a falling factorial.
        let mut coeffs = vec![0.0; m as usize + 1];
        let mut falling = 1.0;
        for p in 0..=m {
            if p > 0 {
                falling *= (m - p + 1) as f64;
            }
            coeffs[p as usize] = falling * gaussian_moment(m - p);
        }
        HermiteCoefficients {
            degree: m,
            exact: None,
            coeffs,
        }
    }
}

impl HermiteCoefficients {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `c_p` as a float (zero for `p > degree`).
    pub fn coefficient(&self, p: u32) -> f64 {
        self.coeffs.get(p as usize).copied().unwrap_or(0.0)
    }

    /// `c_p` as an exact integer, when available.
    pub fn exact_coefficient(&self, p: u32) -> Option<u128> {
        self.exact
            .as_ref()
            .map(|e| e.get(p as usize).copied().unwrap_or(0))
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients of `x^m - μ_m`: the `H_0` coefficient is dropped.
    pub fn centered(&self) -> HermiteCoefficients {
        let mut out = self.clone();
        out.coeffs[0] = 0.0;
        if let Some(e) = out.exact.as_mut() {
            e[0] = 0;
        }
        out
    }

    /// `Σ_p c_p H_p(x)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let mut h = vec![0.0; self.coeffs.len()];
        hermite_all(x, &mut h);
        self.coeffs.iter().zip(&h).map(|(c, h)| c * h).sum()
    }

    /// Nonzero terms as `(p, c_p)`, highest degree first.
    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| **c != 0.0)
            .map(|(p, c)| (p as u32, *c))
    }
}

/// Gauss–Hermite quadrature against the standard Gaussian density.
///
/// An `n`-point rule integrates `E[g(G)]` exactly for polynomials `g` of
/// degree `< 2n`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Nodes by Newton iteration on the orthonormal physicists' polynomials,
    /// then rescaled to the `N(0, 1)` weight.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        const PI_M4: f64 = 0.751_125_544_464_942_5;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let half = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0;
        for i in 0..half {
            z = match i {
                0 => libm::sqrt(2.0 * nf + 1.0) - 1.855_75 * libm::pow(2.0 * nf + 1.0, -0.166_67),
                1 => z - 1.14 * libm::pow(nf, 0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = PI_M4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * libm::sqrt(2.0 / (jf + 1.0)) * p2 - libm::sqrt(jf / (jf + 1.0)) * p3;
                }
                pp = libm::sqrt(2.0 * nf) * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * (1.0 + z.abs()) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        let sqrt_pi = libm::sqrt(core::f64::consts::PI);
        Self {
            nodes: x.iter().map(|v| v * core::f64::consts::SQRT_2).collect(),
            weights: w.iter().map(|v| v / sqrt_pi).collect(),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E[g(G)]`, `G ~ N(0, 1)`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// `E[H_p(X) H_q(Y)]` for standard Gaussians with correlation `c`.
pub fn hermite_inner_product(p: u32, q: u32, c: f64) -> f64 {
    if p != q {
        0.0
    } else {
        libm::pow(c, q as f64) / factorial(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: coefficients of He_q by the recurrence on integer polynomials,
    /// divided by q!.
    fn hermite_by_polynomial(q: u32, x: f64) -> f64 {
        let mut prev: Vec<i128> = vec![1];
        let mut cur: Vec<i128> = vec![0, 1];
        if q == 0 {
            return 1.0;
        }
        for k in 1..q {
            let mut next = vec![0i128; cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= k as i128 * c;
            }
            prev = cur;
            cur = next;
        }
        let he: f64 = cur.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64);
        he / factorial(q)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(hermite_eval(0, 3.7), 1.0);
        assert_eq!(hermite_eval(1, 3.7), 3.7);
        assert_eq!(hermite_eval(2, 1.0), 0.0);
        assert!((hermite_eval(3, 2.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn eval_matches_polynomial_oracle() {
        for q in 0..=10 {
            for &x in &[-3.0, -1.3, 0.0, 0.4, 2.2, 5.0] {
                let a = hermite_eval(q, x);
                let b = hermite_by_polynomial(q, x);
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "q={q} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn hermite_all_matches_eval() {
        let mut out = [0.0; 8];
        hermite_all(1.7, &mut out);
        for (q, v) in out.iter().enumerate() {
            assert!((v - hermite_eval(q as u32, 1.7)).abs() < 1e-14);
        }
    }

    #[test]
    fn moments() {
        assert_eq!(gaussian_moment(1), 0.0);
        assert_eq!(gaussian_moment(2), 1.0);
        assert_eq!(gaussian_moment(6), 15.0);
        let gh = GaussHermite::new(30);
        for q in 0..12 {
            let quad = gh.expectation(|x| libm::pow(x, q as f64));
            assert!((quad - gaussian_moment(q)).abs() < 1e-9 * (1.0 + gaussian_moment(q)));
        }
    }

    #[test]
    fn monomial_table() {
        let c2 = monomial_in_hermite(2);
        assert_eq!(c2.exact_coefficient(2), Some(2));
        assert_eq!(c2.exact_coefficient(1), Some(0));
        assert_eq!(c2.exact_coefficient(0), Some(1));
        let c3 = monomial_in_hermite(3);
        assert_eq!(
            (0..=3).map(|p| c3.exact_coefficient(p).unwrap()).collect::<Vec<_>>(),
            vec![0, 3, 0, 6]
        );
        let c4 = monomial_in_hermite(4);
        assert_eq!(
            (0..=4).map(|p| c4.exact_coefficient(p).unwrap()).collect::<Vec<_>>(),
            vec![3, 0, 12, 0, 24]
        );
        let c5 = monomial_in_hermite(5);
        assert_eq!(
            (0..=5).map(|p| c5.exact_coefficient(p).unwrap()).collect::<Vec<_>>(),
            vec![0, 15, 0, 60, 0, 120]
        );
    }

    #[test]
    fn monomial_parity_leading_and_centering() {
        for m in 1..=12u32 {
            let c = monomial_in_hermite(m);
            assert_eq!(c.exact_coefficient(m), Some(factorial_exact(m)));
            for p in 0..=m {
                if (m - p) % 2 == 1 {
                    assert_eq!(c.exact_coefficient(p), Some(0));
                }
            }
            assert_eq!(c.coefficient(0), gaussian_moment(m));
            assert_eq!(c.centered().coefficient(0), 0.0);
        }
    }

    #[test]
    fn float_fallback_agrees_with_exact_route() {
        let big = monomial_in_hermite(31);
        assert!(big.exact_coefficient(3).is_none());
        assert!((big.coefficient(31) / factorial(31) - 1.0).abs() < 1e-14);
        // c_1 = 31 * 30!! computed two ways.
        let expected = 31.0 * gaussian_moment(30);
        assert!((big.coefficient(1) - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn quadrature_orthogonality_at_unit_correlation() {
        let gh = GaussHermite::new(40);
        for p in 0..=8u32 {
            for q in 0..=8u32 {
                let v = gh.expectation(|x| hermite_eval(p, x) * hermite_eval(q, x));
                assert!((v - hermite_inner_product(p, q, 1.0)).abs() < 1e-10, "p={p} q={q}");
            }
        }
    }
}
