//! The upper critical line `H = 1 - 1/(2q)`. There `Var(2^{-n/2} V_n)` grows
//! like `n` times the limiting variance, and the finite-`n` constant term
//! makes `Var/n` approach its limit only like `1/n`. The limiting variance is
//! therefore estimated as the OLS slope of `Var(2^{-n/2} V_n)` against `n`
//! over coupled levels, and compared with each reading of the constants.

use fbmvar_core::constants::{CriticalVariant, RegimeCase};
use fbmvar_core::stats::{ks_one_sample, normal_cdf, ols, Summary};
use fbmvar_core::variations::exact_unweighted_second_moment;
use fbmvar_core::{weighted_hermite_variation, FbmPath, WeightFunction};

use super::{columns, coupled, mean_estimate, require_regime, show, square_riemann, variance_estimate, Defaults, Setup};
use crate::config::ExperimentConfig;
use crate::dft::circulant_sampler;
use crate::error::Result;
use crate::parallel::map_paths;
use crate::report::{Estimate, Report};

pub(crate) fn critical_defaults(q: u32) -> Defaults {
    Defaults {
        hurst: 1.0 - 1.0 / (2.0 * q as f64),
        order: q,
        weight: WeightFunction::One,
        levels: (8..=16).collect(),
        replicates: 10_000,
        tolerance: 0.10,
        offset: 0,
    }
}

/// Shared by the Hermite and power variation arbitrations. `raw` is the
/// unnormalized statistic; `exact_moment(n)` is its exact second moment when
/// `f ≡ 1`, used to standardize the KS check.
pub(crate) fn arbitrate<R, E>(
    s: &Setup,
    report: &mut Report,
    variants: &[(CriticalVariant, f64)],
    raw: R,
    exact_moment: E,
) -> Result<()>
where
    R: Fn(&FbmPath) -> f64 + Sync,
    E: Fn(u32) -> Option<f64>,
{
    let sampler = circulant_sampler(s.hurst, s.max_level())?;
    let width = s.levels.len();
    let rows = map_paths(&sampler, s.seed, s.replicates, |path| {
        let mut row = Vec::with_capacity(2 * width);
        for p in coupled(path, &s.levels) {
            row.push((-(p.level() as f64) / 2.0).exp2() * raw(&p));
            row.push(square_riemann(&p, &s.weight));
        }
        row
    });
    let cols = columns(&rows, 2 * width);
    let mut vars = Vec::with_capacity(width);
    for (i, &n) in s.levels.iter().enumerate() {
        let v = variance_estimate(&cols[2 * i]);
        vars.push(v.value);
        let stats = report.level(n);
        stats.insert("variance".into(), v);
        stats.insert(
            "variance_over_n".into(),
            Estimate::mc(v.value / n as f64, v.std_error.unwrap_or(f64::NAN) / n as f64),
        );
    }

    let xs: Vec<f64> = s.levels.iter().map(|&n| n as f64).collect();
    let fit = ols(&xs, &vars);
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let means: Vec<f64> = (0..width).map(|i| Summary::of(&cols[2 * i]).mean).collect();
    let infl: Vec<f64> = (0..s.replicates)
        .map(|r| {
            (0..width)
                .map(|i| {
                    let d = cols[2 * i][r] - means[i];
                    (xs[i] - xbar) / sxx * (d * d - vars[i])
                })
                .sum()
        })
        .collect();
    let slope = Estimate::mc(fit.slope, Summary::of(&infl).mean_se);
    report.put("variance_slope", slope);
    let weight_mass = mean_estimate(&cols[2 * width - 1]);
    report.put("mean_int_f2", weight_mass);

    let mut matched = Vec::new();
    let mut observed = Vec::new();
    for &(variant, limit) in variants {
        let target = limit * weight_mass.value;
        let rel = slope.value / target - 1.0;
        report.put(&format!("target_{}", variant.id()), Estimate::exact(target));
        report.put(
            &format!("relative_error_{}", variant.id()),
            Estimate::mc(rel, slope.std_error.unwrap_or(f64::NAN) / target),
        );
        observed.push(format!("{}: target {target:.6}, relative error {rel:+.4}", variant.id()));
        if rel.abs() <= s.tolerance {
            matched.push(variant.id());
        }
    }
    let passed = matched.len() == 1;
    if passed {
        report.note(format!("matching constant variant: {}", matched[0]));
    } else {
        report.note(format!("variants within tolerance: {matched:?}"));
    }
    report.check(
        "variant arbitration",
        format!(
            "exactly one constant variant within {} of the slope of Var(2^(-n/2) V_n) against n",
            s.tolerance
        ),
        format!("slope = {}; {}", show(slope), observed.join("; ")),
        passed,
    );

    let top = s.max_level();
    if s.weight == WeightFunction::One {
        if let Some(m2) = exact_moment(top) {
            let sd = (m2 * (-(top as f64)).exp2()).sqrt();
            let z: Vec<f64> = cols[2 * width - 2].iter().map(|v| v / sd).collect();
            let ks = ks_one_sample(&z, normal_cdf);
            report.put("ks_p_value", Estimate::exact(ks.p_value));
            report.check(
                "normality",
                "one-sample KS against N(0,1) after standardizing by the exact finite-n variance, p > 0.01",
                format!("D = {:.5}, p = {:.4}", ks.statistic, ks.p_value),
                ks.p_value > 0.01,
            );
        }
    }
    Ok(())
}

pub(crate) fn run_critical_high(cfg: &ExperimentConfig) -> Result<Report> {
    let q = cfg.order.unwrap_or(2);
    let s = Setup::resolve(cfg, critical_defaults(q))?;
    let (h, q) = (s.hurst, s.order);
    require_regime(h, q, RegimeCase::CriticalHigh)?;
    let mut report = Report::new("critical-high");
    s.echo(&mut report, &["H", "q", "weight"]);
    let variants: Vec<(CriticalVariant, f64)> =
        CriticalVariant::ALL.iter().map(|&v| (v, v.hermite_limit_variance(q))).collect();
    arbitrate(
        &s,
        &mut report,
        &variants,
        |p| weighted_hermite_variation(p, &s.weight, q),
        |n| exact_unweighted_second_moment(h, q, n).ok(),
    )?;
    Ok(report)
}
