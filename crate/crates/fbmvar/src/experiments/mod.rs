//! Seeded Monte Carlo experiments, one per limit theorem plus a few audits.
//!
//! Every experiment resolves its configuration against its own defaults,
//! echoes the resolved values, and reports per-level estimates with
//! standard errors together with named checks. Checks follow a fixed
//! policy: variances match within a relative tolerance; L² convergence
//! means a decreasing sequence (one inversion allowed) whose last value is
//! below a stated fraction of the first.

mod algebra;
mod clt;
mod conjecture;
mod corollary;
mod critical;
mod noncentral;
mod order;
mod sampler;
mod small_h;
mod trapezoid;

use fbmvar_core::constants::{classify_regime, RegimeCase, ScalingRegime};
use fbmvar_core::stats::Summary;
use fbmvar_core::{FbmPath, WeightFunction};

use crate::config::{ExperimentConfig, ExperimentId, MIN_REPLICATES};
use crate::error::{Error, Result};
use crate::report::{Estimate, Report};

/// Run the experiment named by `cfg.id`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let report = match cfg.id {
        ExperimentId::SmallH => small_h::run(cfg)?,
        ExperimentId::Clt => clt::run(cfg)?,
        ExperimentId::CriticalHigh => critical::run_critical_high(cfg)?,
        ExperimentId::Noncentral => noncentral::run(cfg)?,
        ExperimentId::Corollary => corollary::run(cfg)?,
        ExperimentId::Trapezoid => trapezoid::run(cfg)?,
        ExperimentId::ConjectureQuarter => conjecture::run(cfg)?,
        ExperimentId::Sampler => sampler::run(cfg)?,
        ExperimentId::HermiteAlgebra => algebra::run(cfg)?,
        ExperimentId::HermiteLaw => noncentral::run_law(cfg)?,
        ExperimentId::VarianceOrder => order::run(cfg)?,
        ExperimentId::Joint => clt::run_joint(cfg)?,
    };
    Ok(report.finish())
}

/// Per-experiment defaults for unset configuration fields.
#[derive(Debug, Clone)]
pub(crate) struct Defaults {
    pub hurst: f64,
    pub order: u32,
    pub weight: WeightFunction,
    pub levels: Vec<u32>,
    pub replicates: usize,
    pub tolerance: f64,
    pub offset: u32,
}

/// A configuration with every field filled in.
#[derive(Debug, Clone)]
pub(crate) struct Setup {
    pub hurst: f64,
    pub order: u32,
    pub weight: WeightFunction,
    pub levels: Vec<u32>,
    pub replicates: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub offset: u32,
}

impl Setup {
    pub fn resolve(cfg: &ExperimentConfig, d: Defaults) -> Result<Self> {
        let s = Setup {
            hurst: cfg.hurst.unwrap_or(d.hurst),
            order: cfg.order.unwrap_or(d.order),
            weight: cfg.weight.clone().unwrap_or(d.weight),
            levels: cfg.levels.clone().unwrap_or(d.levels),
            replicates: cfg.replicates.unwrap_or(d.replicates),
            seed: cfg.seed,
            tolerance: cfg.tolerance.unwrap_or(d.tolerance),
            offset: cfg.offset.unwrap_or(d.offset),
        };
        if s.replicates < MIN_REPLICATES {
            return Err(Error::Config(format!(
                "replicates = {} is below the minimum {MIN_REPLICATES}",
                s.replicates
            )));
        }
        if s.levels.is_empty() || s.levels.windows(2).any(|w| w[0] >= w[1]) || s.levels[0] == 0 {
            return Err(Error::Config("levels must be positive and strictly increasing".into()));
        }
        if !(s.tolerance > 0.0 && s.tolerance < 1.0) {
            return Err(Error::Config(format!("tolerance {} is not in (0, 1)", s.tolerance)));
        }
        Ok(s)
    }

    pub fn max_level(&self) -> u32 {
        *self.levels.last().expect("levels are never empty")
    }

    /// Echo the resolved configuration. `fields` selects which optional
    /// fields are meaningful for the experiment.
    pub fn echo(&self, report: &mut Report, fields: &[&str]) {
        report.echo("seed", self.seed);
        report.echo("replicates", self.replicates as u64);
        report.echo("levels", self.levels.clone());
        report.echo("tolerance", self.tolerance);
        for f in fields {
            match *f {
                "H" => report.echo("H", self.hurst),
                "q" => report.echo("q", self.order),
                "weight" => report.echo("weight", self.weight.to_string()),
                "offset" => report.echo("offset", self.offset),
                _ => unreachable!("unknown echo field {f}"),
            }
        }
    }
}

/// The regime of `(h, q)`, or a regime error unless it is `case`.
pub(crate) fn require_regime(h: f64, q: u32, case: RegimeCase) -> Result<ScalingRegime> {
    let regime = classify_regime(h, q)?;
    if regime.case != case {
        return Err(fbmvar_core::Error::Regime {
            expected: case.id(),
            hurst: h,
            order: q,
        }
        .into());
    }
    Ok(regime)
}

pub(crate) fn mc(xs: &[f64]) -> Summary {
    Summary::of(xs)
}

/// Mean of `xs` as an estimate with its standard error.
pub(crate) fn mean_estimate(xs: &[f64]) -> Estimate {
    let s = mc(xs);
    Estimate::mc(s.mean, s.mean_se)
}

/// Sample variance of `xs` with its standard error.
pub(crate) fn variance_estimate(xs: &[f64]) -> Estimate {
    let s = mc(xs);
    Estimate::mc(s.variance, s.variance_se)
}

/// `a / b` with a first-order standard error that ignores the covariance.
pub(crate) fn ratio(a: Estimate, b: Estimate) -> Estimate {
    let r = a.value / b.value;
    let ra = a.std_error.unwrap_or(0.0) / a.value;
    let rb = b.std_error.unwrap_or(0.0) / b.value;
    Estimate::mc(r, r.abs() * (ra * ra + rb * rb).sqrt())
}

pub(crate) fn show(e: Estimate) -> String {
    match e.std_error {
        Some(se) => format!("{} ± {}", e.value, se),
        None => format!("{}", e.value),
    }
}

/// Count of places where the sequence fails to decrease.
pub(crate) fn inversions(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] >= w[0]).count()
}

/// The L²-decrease policy: at most one inversion and `last < fraction * first`.
pub(crate) fn decrease_checks(report: &mut Report, name: &str, series: &[Estimate], fraction: f64) {
    let values: Vec<f64> = series.iter().map(|e| e.value).collect();
    let inv = inversions(&values);
    report.check(
        &format!("{name} decreasing"),
        "decreasing across levels, at most one inversion",
        format!("{inv} inversion(s) over {} levels", values.len()),
        inv <= 1,
    );
    let r = ratio(*series.last().expect("non-empty"), series[0]);
    report.check(
        &format!("{name} final/initial"),
        format!("final < {fraction} × initial"),
        format!("final/initial = {}", show(r)),
        r.value < fraction,
    );
    report.put(&format!("{name}_final_over_initial"), r);
}

/// `2^{-n} Σ_k f(B_{(k-1)/N})²`, the Riemann sum of `∫_0^1 f(B_s)² ds`.
pub(crate) fn square_riemann(path: &FbmPath, f: &WeightFunction) -> f64 {
    let n = path.steps();
    let s: fbmvar_core::numeric::CompensatedSum = path.values()[..n]
        .iter()
        .map(|&b| {
            let v = f.value(b);
            v * v
        })
        .sum();
    s.value() / n as f64
}

/// `path` read at each of `levels` (all at most `path.level()`).
pub(crate) fn coupled(path: &FbmPath, levels: &[u32]) -> Vec<FbmPath> {
    levels
        .iter()
        .map(|&n| {
            if n == path.level() {
                path.clone()
            } else {
                path.subsample(n).expect("levels are below the sampled level")
            }
        })
        .collect()
}

/// Transpose per-replicate rows (one value per level) into per-level columns.
pub(crate) fn columns(rows: &[Vec<f64>], width: usize) -> Vec<Vec<f64>> {
    (0..width).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}
