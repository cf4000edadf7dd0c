//! Discrete approximation of the Hermite process and left-point Young sums.
//!
//! From an fBm path at a fine level `m`,
//!
//! ```text
//! Z_m(t) = 2^{m(q(1-H)-1)} Σ_{j=1}^{[2^m t]} H_q(2^{mH} ΔB_{j/2^m}),
//! ```
//!
//! which converges in L² to the Hermite process `Z^{(q)}_t` when
//! `H > 1 - 1/(2q)`. Building `Z` from a concrete path keeps it coupled with
//! `B`, so pathwise integrals `∫ f(B) dZ` can be compared in L² with the
//! renormalized variations of the same path.

use alloc::vec::Vec;

use crate::constants::{classify_regime, RegimeCase};
use crate::error::{Error, Result};
use crate::fbm::{FbmPath, Hurst};
use crate::hermite::hermite_eval;
use crate::numeric::CompensatedSum;
use crate::weight::WeightFunction;

/// `Z_m` read on the grid `t_j = j 2^{-n_out}`, `j = 0..=2^{n_out}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteApprox {
    pub order: u32,
    pub hurst: Hurst,
    pub fine_level: u32,
    pub coarse_level: u32,
    pub values: Vec<f64>,
    /// Seed of the source path.
    pub seed: u64,
}

impl HermiteApprox {
    pub fn time(&self, j: usize) -> f64 {
        j as f64 / (1usize << self.coarse_level) as f64
    }

    /// `Z_m(1)`.
    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("grid is never empty")
    }
}

/// Build `Z_m` of order `q` from `path` (at level `m`) and sample it at level `n_out ≤ m`.
pub fn simulate_hermite(path: &FbmPath, q: u32, n_out: u32) -> Result<HermiteApprox> {
    let h = path.hurst().get();
    let regime = classify_regime(h, q)?;
    if regime.case != RegimeCase::Noncentral {
        return Err(Error::Regime {
            expected: "NONCENTRAL",
            hurst: h,
            order: q,
        });
    }
    let m = path.level();
    if n_out == 0 || n_out > m {
        return Err(Error::GridMismatch {
            expected: m,
            found: n_out,
        });
    }
    let scale = libm::exp2(h * m as f64);
    let prefactor = regime.prefactor(m);
    let stride = 1usize << (m - n_out);
    let mut values = Vec::with_capacity((1usize << n_out) + 1);
    values.push(0.0);
    let mut acc = CompensatedSum::new();
    for (i, inc) in path.increments().enumerate() {
        acc.add(hermite_eval(q, scale * inc));
        if (i + 1) % stride == 0 {
            values.push(prefactor * acc.value());
        }
    }
    Ok(HermiteApprox {
        order: q,
        hurst: path.hurst(),
        fine_level: m,
        coarse_level: n_out,
        values,
        seed: path.seed(),
    })
}

/// `Σ_j f(B_{(j-1)/2^n}) (Z_{j/2^n} - Z_{(j-1)/2^n})` with both grids at level `n`.
pub fn young_integral(f: &WeightFunction, b_coarse: &FbmPath, z: &HermiteApprox) -> Result<f64> {
    if b_coarse.level() != z.coarse_level || b_coarse.values().len() != z.values.len() {
        return Err(Error::GridMismatch {
            expected: z.coarse_level,
            found: b_coarse.level(),
        });
    }
    let mut acc = CompensatedSum::new();
    for (b, dz) in b_coarse.values().iter().zip(z.values.windows(2)) {
        acc.add(f.value(*b) * (dz[1] - dz[0]));
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::sample_fbm_circulant;
    use crate::variations::{renormalize, weighted_hermite_variation};
    use alloc::vec;

    #[test]
    fn unweighted_identity_at_every_grid_point() {
        let path = sample_fbm_circulant(0.9, 10, 4).unwrap();
        let z = simulate_hermite(&path, 2, 10).unwrap();
        assert_eq!(z.values[0], 0.0);
        for j in [1usize, 17, 512, 1024] {
            let vals = path.values()[..=j].to_vec();
            let mut padded = vals.clone();
            // Extend the prefix by constant values so that V over the full grid
            // equals the partial sum up to j (H_2(0) = -1/2 must be removed).
            padded.resize(path.values().len(), vals[j]);
            let partial = FbmPath::from_values(path.hurst(), 10, padded, 0).unwrap();
            let v = weighted_hermite_variation(&partial, &WeightFunction::One, 2)
                + 0.5 * ((1 << 10) - j) as f64;
            let r = renormalize(v, 0.9, 2, 10).unwrap().renormalized_value;
            assert!((r - z.values[j]).abs() < 1e-12 * r.abs().max(1.0), "j={j}");
        }
    }

    #[test]
    fn young_sum_of_constants_telescopes() {
        let path = sample_fbm_circulant(0.9, 10, 9).unwrap();
        let z = simulate_hermite(&path, 2, 6).unwrap();
        let coarse = path.subsample(6).unwrap();
        let one = young_integral(&WeightFunction::One, &coarse, &z).unwrap();
        assert!((one - z.terminal()).abs() < 1e-13);
        let c = young_integral(&WeightFunction::Polynomial(vec![2.5]), &coarse, &z).unwrap();
        assert!((c - 2.5 * z.terminal()).abs() < 1e-12);
        let wrong = path.subsample(5).unwrap();
        assert!(matches!(
            young_integral(&WeightFunction::One, &wrong, &z),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn regime_is_enforced() {
        let path = sample_fbm_circulant(0.75, 6, 1).unwrap();
        assert!(matches!(simulate_hermite(&path, 2, 4), Err(Error::Regime { .. })));
        let path = sample_fbm_circulant(0.76, 6, 1).unwrap();
        assert!(simulate_hermite(&path, 2, 4).is_ok());
        assert!(simulate_hermite(&path, 2, 7).is_err());
    }
}
