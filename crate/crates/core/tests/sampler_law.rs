//! Moderate-size Monte Carlo checks of the two samplers.

use fbmvar_core::fbm::{fbm_covariance, CholeskySampler, CirculantSampler};
use fbmvar_core::rng::replicate_seed;
use fbmvar_core::stats::{ks_two_sample, Summary};
use fbmvar_core::Hurst;

fn z_of(xs: &[f64], exact: f64) -> f64 {
    let s = Summary::of(xs);
    (s.mean - exact) / s.mean_se
}

#[test]
fn circulant_pairs_have_the_fbm_covariance() {
    for h in [0.2, 0.5, 0.85] {
        let hurst = Hurst::new(h).unwrap();
        let sampler = CirculantSampler::new(hurst, 3).unwrap();
        let mut paths = Vec::new();
        for j in 0..4000 {
            let [a, b] = sampler.sample_pair(replicate_seed(11, j));
            paths.push(a.into_values());
            paths.push(b.into_values());
        }
        for (i, k) in [(8usize, 8usize), (4, 8), (1, 2), (3, 7)] {
            let prods: Vec<f64> = paths.iter().map(|p| p[i] * p[k]).collect();
            let exact = fbm_covariance(i as f64 / 8.0, k as f64 / 8.0, hurst).unwrap();
            let z = z_of(&prods, exact);
            assert!(z.abs() < 4.5, "H={h} ({i},{k}) z={z}");
        }
        // Real and imaginary parts are uncorrelated.
        let cross: Vec<f64> = paths.chunks(2).map(|p| p[0][8] * p[1][8]).collect();
        assert!(z_of(&cross, 0.0).abs() < 4.5);
    }
}

#[test]
fn cholesky_and_circulant_agree_in_law() {
    let hurst = Hurst::new(0.35).unwrap();
    let circ = CirculantSampler::new(hurst, 4).unwrap();
    let chol = CholeskySampler::new(hurst, 4).unwrap();
    let a: Vec<f64> = (0..3000).map(|j| circ.sample(replicate_seed(1, j)).values()[5]).collect();
    let b: Vec<f64> = (0..3000).map(|j| chol.sample(replicate_seed(2, j)).values()[5]).collect();
    assert!(ks_two_sample(&a, &b).p_value > 1e-3);
}

#[test]
fn sampling_is_a_pure_function_of_the_seed() {
    let sampler = CirculantSampler::new(Hurst::new(0.7).unwrap(), 9).unwrap();
    assert_eq!(sampler.sample(5).values(), sampler.sample(5).values());
    assert_ne!(sampler.sample(5).values(), sampler.sample(6).values());
}
