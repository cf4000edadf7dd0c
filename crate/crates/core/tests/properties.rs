use fbmvar_core::constants::{classify_regime, lower_critical, upper_critical, RegimeCase};
use fbmvar_core::fbm::{fbm_covariance, rho};
use fbmvar_core::fft::{Complex64, Dft, Radix2};
use fbmvar_core::hermite::{hermite_eval, monomial_in_hermite};
use fbmvar_core::variations::weighted_hermite_variations_all;
use fbmvar_core::fbm::sample_fbm_circulant;
use fbmvar_core::{weighted_power_variation, Hurst, WeightFunction};
use proptest::prelude::*;

fn weights() -> impl Strategy<Value = WeightFunction> {
    prop_oneof![
        Just(WeightFunction::One),
        (-2.0f64..2.0).prop_map(WeightFunction::Cosine),
        (-2.0f64..2.0).prop_map(WeightFunction::Sine),
        (-1.0f64..1.0).prop_map(WeightFunction::Exp),
        prop::collection::vec(-2.0f64..2.0, 1..5).prop_map(WeightFunction::Polynomial),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regimes_partition_the_unit_interval(h in 0.001f64..0.999, q in 2u32..9) {
        let r = classify_regime(h, q).unwrap();
        let (lo, hi) = (lower_critical(q), upper_critical(q));
        let expected = if h < lo {
            RegimeCase::SmallH
        } else if h == lo {
            RegimeCase::CriticalLow
        } else if h < hi {
            RegimeCase::Clt
        } else if h == hi {
            RegimeCase::CriticalHigh
        } else {
            RegimeCase::Noncentral
        };
        prop_assert_eq!(r.case, expected);
        prop_assert!(r.prefactor(10) > 0.0);
    }

    #[test]
    fn covariance_is_symmetric_and_cauchy_schwarz(h in 0.01f64..0.99, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let hu = Hurst::new(h).unwrap();
        let c = fbm_covariance(s, t, hu).unwrap();
        prop_assert_eq!(c, fbm_covariance(t, s, hu).unwrap());
        let (vs, vt) = (fbm_covariance(s, s, hu).unwrap(), fbm_covariance(t, t, hu).unwrap());
        prop_assert!(c * c <= vs * vt * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn rho_is_even_and_bounded(h in 0.01f64..0.99, r in -200i64..200) {
        let hu = Hurst::new(h).unwrap();
        prop_assert_eq!(rho(r, hu), rho(-r, hu));
        prop_assert!(rho(r, hu).abs() <= rho(0, hu) + 1e-12);
    }

    #[test]
    fn monomial_expansion_reproduces_power(m in 0u32..12, x in -3.0f64..3.0) {
        let e = monomial_in_hermite(m);
        let direct = x.powi(m as i32);
        prop_assert!((e.evaluate(x) - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn hermite_three_term_recurrence(q in 1u32..20, x in -4.0f64..4.0) {
        // (q+1) H_{q+1} = x H_q - H_{q-1}
        let lhs = (q + 1) as f64 * hermite_eval(q + 1, x);
        let rhs = x * hermite_eval(q, x) - hermite_eval(q - 1, x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn power_variation_is_the_hermite_combination(
        h in 0.05f64..0.95, q in 1u32..7, seed in any::<u64>(), f in weights()
    ) {
        let path = sample_fbm_circulant(h, 6, seed).unwrap();
        let v = weighted_hermite_variations_all(&path, &f, q);
        let e = monomial_in_hermite(q).centered();
        let combo: f64 = e.terms().map(|(p, c)| c * v[p as usize]).sum();
        let direct = weighted_power_variation(&path, &f, q, true);
        let scale: f64 = v.iter().map(|x| x.abs()).sum::<f64>().max(1.0) * e.coefficients().iter().map(|c| c.abs()).sum::<f64>();
        prop_assert!((combo - direct).abs() <= 1e-11 * scale);
    }

    #[test]
    fn subsampling_commutes(h in 0.05f64..0.95, seed in any::<u64>(), a in 1u32..4, b in 1u32..4) {
        let path = sample_fbm_circulant(h, 8, seed).unwrap();
        let direct = path.subsample(8 - a - b).unwrap();
        let stepwise = path.subsample(8 - a).unwrap().subsample(8 - a - b).unwrap();
        prop_assert_eq!(direct.values(), stepwise.values());
    }

    #[test]
    fn weight_text_round_trips(f in weights()) {
        let back = WeightFunction::parse(&f.to_string()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn radix2_matches_rustfft(bits in 0u32..11, seed in any::<u64>()) {
        let n = 1usize << bits;
        let mut state = seed;
        let mut next = || {
            state = fbmvar_core::rng::mix64(state);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let x: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
        let mut a = x.clone();
        Radix2::new(n).forward(&mut a);
        let mut b: Vec<rustfft::num_complex::Complex<f64>> =
            x.iter().map(|z| rustfft::num_complex::Complex::new(z.re, z.im)).collect();
        rustfft::FftPlanner::new().plan_fft_forward(n).process(&mut b);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u.re - v.re).abs() < 1e-11 && (u.im - v.im).abs() < 1e-11);
        }
    }
}
