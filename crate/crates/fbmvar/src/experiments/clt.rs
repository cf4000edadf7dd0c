//! The central regime: `2^{-n/2} V_n^{(q)}(f)` is asymptotically
//! `σ_{H,q} ∫ f(B) dW` with `W` independent of `B`, so its variance is
//! `σ² E∫f(B)²` and, conditionally on `B`, its square has mean `σ² ∫f(B)²`.

use fbmvar_core::constants::{sigma_clt, RegimeCase, DEFAULT_REL_TOL};
use fbmvar_core::stats::{correlation, ks_one_sample, normal_cdf, slope_through_origin};
use fbmvar_core::{weighted_hermite_variation, WeightFunction};

use super::{columns, coupled, mean_estimate, ratio, require_regime, show, square_riemann, variance_estimate, Defaults, Setup};
use crate::config::ExperimentConfig;
use crate::dft::circulant_sampler;
use crate::error::Result;
use crate::parallel::map_paths;
use crate::report::{Estimate, Report};

const SLOPE_TOLERANCE: f64 = 0.10;

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let s = Setup::resolve(
        cfg,
        Defaults {
            hurst: 0.6,
            order: 2,
            weight: WeightFunction::One,
            levels: vec![14],
            replicates: 10_000,
            tolerance: 0.05,
            offset: 0,
        },
    )?;
    let (h, q) = (s.hurst, s.order);
    let regime = require_regime(h, q, RegimeCase::Clt)?;
    let sigma = sigma_clt(h, q, DEFAULT_REL_TOL)?;
    let sigma2 = sigma.value * sigma.value;
    let mut report = Report::new("clt");
    s.echo(&mut report, &["H", "q", "weight"]);
    report.put("sigma", Estimate::exact(sigma.value));
    report.put("sigma_squared", Estimate::exact(sigma2));

    let sampler = circulant_sampler(h, s.max_level())?;
    let width = s.levels.len();
    let rows = map_paths(&sampler, s.seed, s.replicates, |path| {
        let mut row = Vec::with_capacity(2 * width);
        for p in coupled(path, &s.levels) {
            row.push(regime.prefactor(p.level()) * weighted_hermite_variation(&p, &s.weight, q));
            row.push(square_riemann(&p, &s.weight));
        }
        row
    });
    let cols = columns(&rows, 2 * width);
    for (i, &n) in s.levels.iter().enumerate() {
        let stats = report.level(n);
        stats.insert("mean".into(), mean_estimate(&cols[2 * i]));
        stats.insert("variance".into(), variance_estimate(&cols[2 * i]));
        stats.insert("mean_int_f2".into(), mean_estimate(&cols[2 * i + 1]));
    }

    let y = &cols[2 * width - 2];
    let i2 = &cols[2 * width - 1];
    let target = Estimate {
        value: sigma2 * mean_estimate(i2).value,
        std_error: mean_estimate(i2).std_error.map(|e| e * sigma2),
    };
    let r = ratio(variance_estimate(y), target);
    report.put("variance_ratio", r);
    report.check(
        "variance",
        format!("Var(Y) / (sigma^2 E[int f(B)^2]) within {} of 1 at the largest level", s.tolerance),
        format!("ratio = {}", show(r)),
        (r.value - 1.0).abs() <= s.tolerance,
    );

    if s.weight == WeightFunction::One {
        let z: Vec<f64> = y.iter().map(|v| v / sigma.value).collect();
        let ks = ks_one_sample(&z, normal_cdf);
        report.put("ks_statistic", Estimate::exact(ks.statistic));
        report.put("ks_p_value", Estimate::exact(ks.p_value));
        report.check(
            "normality",
            "one-sample KS of Y/sigma against N(0,1), p > 0.01",
            format!("D = {:.5}, p = {:.4}", ks.statistic, ks.p_value),
            ks.p_value > 0.01,
        );
    } else {
        // E[Y² | B] ≈ σ² ∫f(B)², so regressing Y² on the Riemann sum recovers σ².
        let y2: Vec<f64> = y.iter().map(|v| v * v).collect();
        let (b, se) = slope_through_origin(i2, &y2);
        let slope = Estimate::mc(b, se);
        report.put("conditional_variance_slope", slope);
        report.check(
            "conditional variance slope",
            format!("slope of Y^2 on int f(B)^2 within {SLOPE_TOLERANCE} of sigma^2 = {sigma2}"),
            format!("slope = {}, relative error {:.4}", show(slope), b / sigma2 - 1.0),
            (b / sigma2 - 1.0).abs() <= SLOPE_TOLERANCE,
        );
        report.note("the conditional-variance probe tests the mixed-Gaussian structure only through second moments");
    }
    Ok(report)
}

/// Normalized variations of orders `q` and `q + 1` on the same paths are
/// asymptotically uncorrelated.
pub(crate) fn run_joint(cfg: &ExperimentConfig) -> Result<Report> {
    let s = Setup::resolve(
        cfg,
        Defaults {
            hurst: 0.5,
            order: 2,
            weight: WeightFunction::Cosine(1.0),
            levels: vec![12],
            replicates: 10_000,
            tolerance: 0.05,
            offset: 0,
        },
    )?;
    let (h, q) = (s.hurst, s.order);
    let lo = require_regime(h, q, RegimeCase::Clt)?;
    let hi = require_regime(h, q + 1, RegimeCase::Clt)?;
    let mut report = Report::new("joint");
    s.echo(&mut report, &["H", "q", "weight"]);
    let sampler = circulant_sampler(h, s.max_level())?;
    let width = s.levels.len();
    let rows = map_paths(&sampler, s.seed, s.replicates, |path| {
        let mut row = Vec::with_capacity(2 * width);
        for p in coupled(path, &s.levels) {
            row.push(lo.prefactor(p.level()) * weighted_hermite_variation(&p, &s.weight, q));
            row.push(hi.prefactor(p.level()) * weighted_hermite_variation(&p, &s.weight, q + 1));
        }
        row
    });
    let cols = columns(&rows, 2 * width);
    let mut last = Estimate::exact(f64::NAN);
    for (i, &n) in s.levels.iter().enumerate() {
        let (r, se) = correlation(&cols[2 * i], &cols[2 * i + 1]);
        last = Estimate::mc(r, se);
        let stats = report.level(n);
        stats.insert("correlation".into(), last);
        stats.insert(format!("variance_q{q}"), variance_estimate(&cols[2 * i]));
        stats.insert(format!("variance_q{}", q + 1), variance_estimate(&cols[2 * i + 1]));
    }
    report.put("correlation", last);
    let se = last.std_error.unwrap_or(f64::NAN);
    report.check(
        "cross-order correlation",
        format!("correlation of orders {q} and {} within 3 SE of 0 at the largest level", q + 1),
        format!("r = {}", show(last)),
        last.value.abs() <= 3.0 * se,
    );
    Ok(report)
}
