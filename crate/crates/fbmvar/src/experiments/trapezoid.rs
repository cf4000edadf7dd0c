//! Symmetric Riemann sums `½ Σ (f'(B_k) + f'(B_{k-1})) ΔB_k`. For `H > 1/6`
//! they converge to `f(B_1) - f(0)`; at `H = 1/6` with `f(x) = x³` they do not.

use fbmvar_core::stats::median_with_se;
use fbmvar_core::variations::trapezoid_sum;
use fbmvar_core::WeightFunction;

use super::{columns, coupled, decrease_checks, ratio, show, Defaults, Setup};
use crate::config::ExperimentConfig;
use crate::dft::circulant_sampler;
use crate::error::Result;
use crate::parallel::map_paths;
use crate::report::{Estimate, Report};

const CONVERGENCE_FRACTION: f64 = 0.1;
const STALL_FRACTION: f64 = 0.5;

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let s = Setup::resolve(
        cfg,
        Defaults {
            hurst: 0.3,
            order: 1,
            weight: WeightFunction::Sine(1.0),
            levels: (6..=14).collect(),
            replicates: 1000,
            tolerance: 0.05,
            offset: 0,
        },
    )?;
    let h = s.hurst;
    fbmvar_core::Hurst::new(h)?;
    let converging = h > 1.0 / 6.0;
    let mut report = Report::new("trapezoid");
    s.echo(&mut report, &["H", "weight"]);
    report.echo("arm", if converging { "convergence" } else { "counterexample" });

    let sampler = circulant_sampler(h, s.max_level())?;
    let width = s.levels.len();
    let f = &s.weight;
    let rows = map_paths(&sampler, s.seed, s.replicates, |path| {
        let target = f.value(path.terminal()) - f.value(0.0);
        coupled(path, &s.levels)
            .iter()
            .map(|p| (trapezoid_sum(p, f) - target).abs())
            .collect()
    });
    let cols = columns(&rows, width);
    let series: Vec<Estimate> = cols
        .iter()
        .map(|c| {
            let (m, se) = median_with_se(c);
            Estimate::mc(m, se)
        })
        .collect();
    for (&n, e) in s.levels.iter().zip(&series) {
        report.level(n).insert("median_abs_error".into(), *e);
    }
    if converging {
        decrease_checks(&mut report, "median_abs_error", &series, CONVERGENCE_FRACTION);
    } else {
        let r = ratio(*series.last().expect("non-empty"), series[0]);
        report.put("median_abs_error_final_over_initial", r);
        report.check(
            "no convergence",
            format!("final >= {STALL_FRACTION} x initial"),
            format!("final/initial = {}", show(r)),
            r.value >= STALL_FRACTION,
        );
    }
    Ok(report)
}
