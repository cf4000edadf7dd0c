//! The non-central regime. `V` is renormalized at a fine level `m = n + offset`
//! and compared in L² with the Young sum `Σ f(B) ΔZ` at level `n`, where `Z`
//! is the Hermite process approximation built from the same fine path.

use fbmvar_core::constants::{hermite_process_variance_const, RegimeCase};
use fbmvar_core::numeric::factorial;
use fbmvar_core::stats::ks_two_sample;
use fbmvar_core::{simulate_hermite, weighted_hermite_variation, young_integral, FbmPath, WeightFunction};

use super::{columns, mc, ratio, require_regime, show, variance_estimate, Defaults, Setup};
use crate::config::ExperimentConfig;
use crate::dft::circulant_sampler;
use crate::error::{Error, Result};
use crate::parallel::map_paths;
use crate::report::{Estimate, Report};

const IDENTITY_TOL: f64 = 1e-12;

/// Per level: relative L² distance `sqrt(E|stat - c Y|² / E|c Y|²)` between
/// `stat(fine path)` and `c` times the Young sum against `Z^{(z_order)}`.
/// Also returns the largest relative gap in the `f ≡ 1` identity
/// `Z_m(1) = 2^{m(q(1-H)-1)} V_m^{(q)}(1)` when `identity` is set.
pub(crate) fn coupled_young<S>(
    s: &Setup,
    report: &mut Report,
    z_order: u32,
    c: f64,
    identity: bool,
    stat: S,
) -> Result<(Vec<Estimate>, f64)>
where
    S: Fn(&FbmPath) -> f64 + Sync,
{
    if s.offset == 0 {
        return Err(Error::Config("offset must be at least 1".into()));
    }
    let top = s.max_level() + s.offset;
    let sampler = circulant_sampler(s.hurst, top)?;
    let z_regime = require_regime(s.hurst, z_order, RegimeCase::Noncentral)?;
    let width = s.levels.len();
    let rows = map_paths(&sampler, s.seed, s.replicates, |path| {
        let mut row = Vec::with_capacity(3 * width);
        for &n in &s.levels {
            let m = n + s.offset;
            let fine = if m == top { path.clone() } else { path.subsample(m).expect("m <= top") };
            let coarse = fine.subsample(n).expect("n < m");
            let z = simulate_hermite(&fine, z_order, n).expect("regime checked");
            let y = c * young_integral(&s.weight, &coarse, &z).expect("aligned grids");
            let d = stat(&fine) - y;
            let gap = if identity {
                let v = z_regime.prefactor(m) * weighted_hermite_variation(&fine, &WeightFunction::One, z_order);
                let t = young_integral(&WeightFunction::One, &coarse, &z).expect("aligned grids");
                (v - t).abs() / v.abs().max(1.0)
            } else {
                0.0
            };
            row.extend([d * d, y * y, gap]);
        }
        row
    });
    let cols = columns(&rows, 3 * width);
    let mut series = Vec::with_capacity(width);
    let mut worst: f64 = 0.0;
    for (i, &n) in s.levels.iter().enumerate() {
        let a = mc(&cols[3 * i]);
        let b = mc(&cols[3 * i + 1]);
        let r = (a.mean / b.mean).sqrt();
        let se = 0.5 * r * ((a.mean_se / a.mean).powi(2) + (b.mean_se / b.mean).powi(2)).sqrt();
        let e = Estimate::mc(r, se);
        let stats = report.level(n);
        stats.insert("relative_l2_distance".into(), e);
        stats.insert("l2_distance_squared".into(), Estimate::mc(a.mean, a.mean_se));
        stats.insert("young_second_moment".into(), Estimate::mc(b.mean, b.mean_se));
        series.push(e);
        worst = cols[3 * i + 2].iter().fold(worst, |w, g| w.max(*g));
    }
    Ok((series, worst))
}

/// The L² policy for relative distances: decreasing and a final value below `limit`.
pub(crate) fn relative_checks(report: &mut Report, series: &[Estimate], limit: f64) {
    let values: Vec<f64> = series.iter().map(|e| e.value).collect();
    let inv = super::inversions(&values);
    report.check(
        "relative_l2_distance decreasing",
        "decreasing across levels, at most one inversion",
        format!("{inv} inversion(s) over {} levels", values.len()),
        inv <= 1,
    );
    let last = *series.last().expect("non-empty");
    report.put("relative_l2_distance_final", last);
    report.check(
        "relative_l2_distance final",
        format!("final relative distance < {limit}"),
        format!("final = {}", show(last)),
        last.value < limit,
    );
}

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let s = Setup::resolve(
        cfg,
        Defaults {
            hurst: 0.9,
            order: 2,
            weight: WeightFunction::Cosine(1.0),
            levels: (6..=10).collect(),
            replicates: 500,
            tolerance: 0.15,
            offset: 6,
        },
    )?;
    let (h, q) = (s.hurst, s.order);
    let regime = require_regime(h, q, RegimeCase::Noncentral)?;
    let mut report = Report::new("noncentral");
    s.echo(&mut report, &["H", "q", "weight", "offset"]);
    let (series, worst) = coupled_young(&s, &mut report, q, 1.0, true, |fine| {
        regime.prefactor(fine.level()) * weighted_hermite_variation(fine, &s.weight, q)
    })?;
    relative_checks(&mut report, &series, s.tolerance);
    report.put("identity_max_relative_gap", Estimate::exact(worst));
    report.check(
        "f = 1 identity",
        format!("renormalized V_m(1) equals the Young sum of 1 against Z_m to {IDENTITY_TOL:e}"),
        format!("max relative gap {worst:e}"),
        worst <= IDENTITY_TOL,
    );
    Ok(report)
}

/// Law of the approximated Hermite process: variance at time 1,
/// self-similarity and stationarity of increments.
pub(crate) fn run_law(cfg: &ExperimentConfig) -> Result<Report> {
    let s = Setup::resolve(
        cfg,
        Defaults {
            hurst: 0.9,
            order: 2,
            weight: WeightFunction::One,
            levels: vec![14],
            replicates: 10_000,
            tolerance: 0.05,
            offset: 8,
        },
    )?;
    let (h, q) = (s.hurst, s.order);
    require_regime(h, q, RegimeCase::Noncentral)?;
    let m = s.max_level();
    if s.offset >= m {
        return Err(Error::Config(format!("offset {} leaves no coarse level below m = {m}", s.offset)));
    }
    let n_out = m - s.offset;
    let mut report = Report::new("hermite-law");
    report.echo("seed", s.seed);
    report.echo("replicates", s.replicates as u64);
    report.echo("H", h);
    report.echo("q", q);
    report.echo("m", m);
    report.echo("n_out", n_out);
    report.echo("tolerance", s.tolerance);

    let sampler = circulant_sampler(h, m)?;
    let half = 1usize << (n_out - 1);
    let rows = map_paths(&sampler, s.seed, s.replicates, |path| {
        let z = simulate_hermite(path, q, n_out).expect("regime checked");
        vec![z.values[half], z.terminal()]
    });
    let cols = columns(&rows, 2);
    let exact = factorial(q) * hermite_process_variance_const(q, h)?;
    let v1 = variance_estimate(&cols[1]);
    let vh = variance_estimate(&cols[0]);
    report.put("var_z1", v1);
    report.put("var_z_half", vh);
    report.put("var_z1_exact", Estimate::exact(exact));
    let rel = ratio(v1, Estimate::exact(exact));
    report.check(
        "variance at t = 1",
        format!("Var Z(1) within {} of q! c_(q,H) = {exact}", s.tolerance),
        format!("Var Z(1) = {}, ratio {}", show(v1), show(rel)),
        (rel.value - 1.0).abs() <= s.tolerance,
    );

    let exponent = q as f64 * (h - 1.0) + 1.0;
    let target = (-2.0 * exponent).exp2();
    let r = ratio(vh, v1);
    report.put("self_similarity_ratio", r);
    report.check(
        "self-similarity",
        format!("Var Z(1/2) / Var Z(1) within {} of 2^(-2(q(H-1)+1)) = {target}", s.tolerance),
        format!("ratio = {}", show(r)),
        (r.value / target - 1.0).abs() <= s.tolerance,
    );

    // Independent halves: Z(1/2) from even replicates, Z(1) - Z(1/2) from odd ones.
    let first: Vec<f64> = rows.iter().step_by(2).map(|r| r[0]).collect();
    let second: Vec<f64> = rows.iter().skip(1).step_by(2).map(|r| r[1] - r[0]).collect();
    let ks = ks_two_sample(&first, &second);
    report.put("ks_increments_p_value", Estimate::exact(ks.p_value));
    report.check(
        "stationary increments",
        "two-sample KS of Z(1/2) against Z(1) - Z(1/2), p > 0.01",
        format!("D = {:.5}, p = {:.4}", ks.statistic, ks.p_value),
        ks.p_value > 0.01,
    );
    Ok(report)
}
