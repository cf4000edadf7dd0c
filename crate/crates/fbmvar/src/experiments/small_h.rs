//! Below the lower critical index, `2^{n(qH-1)} V_n^{(q)}(f)` converges in L²
//! to `(-1)^q / (2^q q!) ∫ f^{(q)}(B_s) ds`. Both sides are read on the same
//! path; the integral is its left Riemann sum at the same level.

use fbmvar_core::constants::{small_h_coefficient, RegimeCase};
use fbmvar_core::variations::riemann_mean;
use fbmvar_core::{weighted_hermite_variation, WeightFunction};

use super::{columns, coupled, decrease_checks, mean_estimate, require_regime, Defaults, Setup};
use crate::config::ExperimentConfig;
use crate::dft::circulant_sampler;
use crate::error::Result;
use crate::parallel::map_paths;
use crate::report::{Estimate, Report};

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let s = Setup::resolve(
        cfg,
        Defaults {
            hurst: 0.2,
            order: 2,
            weight: WeightFunction::Cosine(1.0),
            levels: (6..=12).collect(),
            replicates: 2000,
            tolerance: 0.05,
            offset: 0,
        },
    )?;
    let (h, q) = (s.hurst, s.order);
    let regime = require_regime(h, q, RegimeCase::SmallH)?;
    let coef = small_h_coefficient(q);
    let mut report = Report::new("small-h");
    s.echo(&mut report, &["H", "q", "weight"]);
    report.put("limit_coefficient", Estimate::exact(coef));

    let sampler = circulant_sampler(h, s.max_level())?;
    let width = s.levels.len();
    let rows = map_paths(&sampler, s.seed, s.replicates, |path| {
        coupled(path, &s.levels)
            .iter()
            .map(|p| {
                let stat = regime.prefactor(p.level()) * weighted_hermite_variation(p, &s.weight, q);
                let d = stat - coef * riemann_mean(p, &s.weight, q);
                d * d
            })
            .collect()
    });
    let cols = columns(&rows, width);
    let series: Vec<Estimate> = cols.iter().map(|c| mean_estimate(c)).collect();
    for (&n, e) in s.levels.iter().zip(&series) {
        report.level(n).insert("l2_distance_squared".into(), *e);
    }
    decrease_checks(&mut report, "l2_distance_squared", &series, 0.25);
    Ok(report)
}
