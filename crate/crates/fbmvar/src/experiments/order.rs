//! Growth of `E[V_n^{(q)}(f)²]` with `n`. It behaves like `2^{n(2-2Hq)}`
//! below `1/(2q)`, like `2^n` in the central range, like `n 2^n` on the upper
//! critical line and like `2^{n(2-2q(1-H))}` above it. The exponent is read
//! off an OLS fit of `log2 E[V_n²]` against `n`; on the critical line the fit
//! is of `2^{-n} E[V_n²]` against `n`, whose slope must be positive.

use fbmvar_core::constants::{classify_regime, RegimeCase};
use fbmvar_core::stats::{ols, Summary};
use fbmvar_core::variations::exact_unweighted_second_moment;
use fbmvar_core::{weighted_hermite_variation, WeightFunction};

use super::{columns, coupled, show, Defaults, Setup};
use crate::config::ExperimentConfig;
use crate::dft::circulant_sampler;
use crate::error::Result;
use crate::parallel::map_paths;
use crate::report::{Estimate, Report};

const SLOPE_BAND: f64 = 0.2;
const CURVATURE_T: f64 = 3.0;

/// OLS slope of `g(M_n)` on `n`, where `M_n` is the mean of column `n`, with a
/// standard error from each replicate's influence on the slope.
fn slope_with_influence(
    levels: &[u32],
    cols: &[Vec<f64>],
    g: impl Fn(u32, f64) -> f64,
    dg: impl Fn(u32, f64) -> f64,
) -> (Estimate, f64) {
    let xs: Vec<f64> = levels.iter().map(|&n| n as f64).collect();
    let means: Vec<f64> = cols.iter().map(|c| Summary::of(c).mean).collect();
    let ys: Vec<f64> = levels.iter().zip(&means).map(|(&n, &m)| g(n, m)).collect();
    let fit = ols(&xs, &ys);
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let reps = cols[0].len();
    let infl: Vec<f64> = (0..reps)
        .map(|i| {
            levels
                .iter()
                .enumerate()
                .map(|(j, &n)| (xs[j] - xbar) / sxx * dg(n, means[j]) * (cols[j][i] - means[j]))
                .sum()
        })
        .collect();
    (Estimate::mc(fit.slope, Summary::of(&infl).mean_se), fit.intercept)
}

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let s = Setup::resolve(
        cfg,
        Defaults {
            hurst: 0.1,
            order: 3,
            weight: WeightFunction::Cosine(3.0),
            levels: (8..=16).collect(),
            replicates: 2000,
            tolerance: 0.05,
            offset: 0,
        },
    )?;
    let (h, q) = (s.hurst, s.order);
    let regime = classify_regime(h, q)?;
    if s.levels.len() < 3 {
        return Err(crate::error::Error::Config("variance-order needs at least three levels".into()));
    }
    let mut report = Report::new("variance-order");
    s.echo(&mut report, &["H", "q", "weight"]);
    report.echo("regime", regime.case.id());

    let sampler = circulant_sampler(h, s.max_level())?;
    let width = s.levels.len();
    let rows = map_paths(&sampler, s.seed, s.replicates, |path| {
        coupled(path, &s.levels)
            .iter()
            .map(|p| {
                let v = weighted_hermite_variation(p, &s.weight, q);
                v * v
            })
            .collect()
    });
    let cols = columns(&rows, width);
    for (i, &n) in s.levels.iter().enumerate() {
        let m = Summary::of(&cols[i]);
        let stats = report.level(n);
        stats.insert("second_moment".into(), Estimate::mc(m.mean, m.mean_se));
        if s.weight == WeightFunction::One {
            if let Ok(e) = exact_unweighted_second_moment(h, q, n) {
                stats.insert("second_moment_exact".into(), Estimate::exact(e));
            }
        }
    }

    let ln2 = std::f64::consts::LN_2;
    if regime.case == RegimeCase::CriticalHigh {
        let (beta, alpha) = slope_with_influence(
            &s.levels,
            &cols,
            |n, m| m * (-(n as f64)).exp2(),
            |n, _| (-(n as f64)).exp2(),
        );
        let t = beta.value / beta.std_error.unwrap_or(f64::NAN);
        report.put("normalized_slope", beta);
        report.put("normalized_intercept", Estimate::exact(alpha));
        report.check(
            "growth beyond 2^n",
            format!("2^-n E[V_n^2] = a + b n with b > 0 at t > {CURVATURE_T}"),
            format!("b = {}, t = {t:.2}", show(beta)),
            beta.value > 0.0 && t > CURVATURE_T,
        );
    } else {
        let expected = match regime.case {
            RegimeCase::SmallH => 2.0 - 2.0 * h * q as f64,
            RegimeCase::Noncentral => 2.0 - 2.0 * q as f64 * (1.0 - h),
            _ => 1.0,
        };
        let (slope, _) = slope_with_influence(&s.levels, &cols, |_, m| m.log2(), |_, m| 1.0 / (m * ln2));
        report.put("log2_slope", slope);
        report.put("expected_slope", Estimate::exact(expected));
        report.check(
            "growth exponent",
            format!("slope of log2 E[V_n^2] against n within {SLOPE_BAND} of {expected}"),
            format!("slope = {}", show(slope)),
            (slope.value - expected).abs() <= SLOPE_BAND,
        );
    }
    Ok(report)
}
