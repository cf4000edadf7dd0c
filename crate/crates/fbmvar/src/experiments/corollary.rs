//! Power variations `Σ f(B_{k-1}) (2^{nH} ΔB_k)^q`, through their expansion in
//! Hermite variations. Items:
//!
//! 1. odd `q`, `H > 1/2`: `2^{-nH} W_n → q μ_{q-1} ∫ f(B) dB = q μ_{q-1} F(B_1)` in L²;
//! 2. even `q`, `H < 1/4`: `2^{n(2H-1)} W_n → ¼ C(q,2) μ_{q-2} ∫ f''(B) ds` in L²;
//! 3. even `q`, `H = 1/4`: drift as in 2 plus a mixed Gaussian with `σ̃_{1/4,q}`;
//! 4. even `q`, `1/4 < H < 3/4`: `Var(2^{-n/2} W_n) → σ̃²_{H,q} E∫f²`;
//! 5. even `q`, `H = 3/4`: arbitration of the critical constants;
//! 6. even `q`, `H > 3/4`: `2^{n(1-2H)} W_n → 2 μ_{q-2} C(q,2) ∫ f(B) dZ^{(2)}` in L².
//!
//! Here `W_n` is the centered power variation for even `q`.

use fbmvar_core::constants::{sigma_tilde, sigma_tilde_via_clt, CriticalVariant, DEFAULT_REL_TOL};
use fbmvar_core::numeric::binomial;
use fbmvar_core::variations::{exact_unweighted_power_second_moment, riemann_mean};
use fbmvar_core::{gaussian_moment, weighted_power_variation, FbmPath, WeightFunction};

use super::critical::{arbitrate, critical_defaults};
use super::noncentral::{coupled_young, relative_checks};
use super::{columns, coupled, decrease_checks, mean_estimate, ratio, show, square_riemann, variance_estimate, Defaults, Setup};
use crate::config::ExperimentConfig;
use crate::dft::circulant_sampler;
use crate::error::{Error, Result};
use crate::parallel::map_paths;
use crate::report::{Estimate, Report};

const DEFAULT_ITEM: u32 = 4;
/// Truncation radius for `σ̃` at `H = 1/4`, outside the range of the adaptive routine.
const QUARTER_RADIUS: u64 = 1 << 20;

fn mismatch(expected: &'static str, h: f64, q: u32) -> Error {
    fbmvar_core::Error::Regime {
        expected,
        hurst: h,
        order: q,
    }
    .into()
}

fn defaults(item: u32) -> Defaults {
    let base = |hurst, order, weight, levels: Vec<u32>, replicates, tolerance| Defaults {
        hurst,
        order,
        weight,
        levels,
        replicates,
        tolerance,
        offset: 0,
    };
    match item {
        1 => base(0.6, 3, WeightFunction::Cosine(1.0), (6..=16).collect(), 1000, 0.05),
        2 => base(0.2, 4, WeightFunction::Cosine(1.0), (6..=12).collect(), 2000, 0.05),
        3 => base(0.25, 2, WeightFunction::Cosine(1.0), vec![14], 10_000, 0.10),
        5 => critical_defaults(4),
        6 => Defaults {
            offset: 6,
            ..base(0.9, 2, WeightFunction::Cosine(1.0), (6..=10).collect(), 500, 0.15)
        },
        _ => base(0.5, 2, WeightFunction::One, vec![14], 10_000, 0.05),
    }
}

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let item = cfg.item.unwrap_or(DEFAULT_ITEM);
    if !(1..=6).contains(&item) {
        return Err(Error::Config(format!("corollary item {item} is not in 1..=6")));
    }
    let mut d = defaults(item);
    if item == 5 {
        d.hurst = 0.75;
    }
    let s = Setup::resolve(cfg, d)?;
    let (h, q) = (s.hurst, s.order);
    fbmvar_core::Hurst::new(h)?;
    let even = q >= 2 && q % 2 == 0;
    match item {
        1 if !(q >= 3 && q % 2 == 1 && h > 0.5) => return Err(mismatch("odd q >= 3 with H > 1/2", h, q)),
        2 if !(even && h < 0.25) => return Err(mismatch("even q with H < 1/4", h, q)),
        3 if !(even && h == 0.25) => return Err(mismatch("even q with H = 1/4", h, q)),
        4 if !(even && h > 0.25 && h < 0.75) => return Err(mismatch("even q with 1/4 < H < 3/4", h, q)),
        5 if !(even && h == 0.75) => return Err(mismatch("even q with H = 3/4", h, q)),
        6 if !(even && h > 0.75) => return Err(mismatch("even q with H > 3/4", h, q)),
        _ => {}
    }
    let mut report = Report::new("corollary");
    report.echo("item", item);
    let fields: &[&str] = if item == 6 { &["H", "q", "weight", "offset"] } else { &["H", "q", "weight"] };
    s.echo(&mut report, fields);
    match item {
        1 => item_stochastic_integral(&s, &mut report)?,
        2 => item_small_h(&s, &mut report)?,
        3 => item_quarter(&s, &mut report)?,
        4 => item_clt(&s, &mut report)?,
        5 => {
            let variants = CriticalVariant::ALL
                .iter()
                .map(|&v| Ok((v, v.power_limit_variance(q)?)))
                .collect::<Result<Vec<_>>>()?;
            arbitrate(
                &s,
                &mut report,
                &variants,
                |p| weighted_power_variation(p, &s.weight, q, true),
                |n| exact_unweighted_power_second_moment(h, q, n).ok(),
            )?;
        }
        _ => {
            let c = 2.0 * gaussian_moment(q - 2) * binomial(q, 2);
            report.put("limit_coefficient", Estimate::exact(c));
            let (series, _) = coupled_young(&s, &mut report, 2, c, false, |fine| {
                let scale = (fine.level() as f64 * (1.0 - 2.0 * h)).exp2();
                scale * weighted_power_variation(fine, &s.weight, q, true)
            })?;
            relative_checks(&mut report, &series, s.tolerance);
        }
    }
    Ok(report)
}

/// Squared L² distance between `stat` and `target` on coupled levels.
fn coupled_l2<S, T>(s: &Setup, report: &mut Report, stat: S, target: T) -> Result<()>
where
    S: Fn(&FbmPath) -> f64 + Sync,
    T: Fn(&FbmPath) -> f64 + Sync,
{
    let sampler = circulant_sampler(s.hurst, s.max_level())?;
    let rows = map_paths(&sampler, s.seed, s.replicates, |path| {
        coupled(path, &s.levels)
            .iter()
            .map(|p| {
                let d = stat(p) - target(p);
                d * d
            })
            .collect()
    });
    let cols = columns(&rows, s.levels.len());
    let series: Vec<Estimate> = cols.iter().map(|c| mean_estimate(c)).collect();
    for (&n, e) in s.levels.iter().zip(&series) {
        report.level(n).insert("l2_distance_squared".into(), *e);
    }
    decrease_checks(report, "l2_distance_squared", &series, 0.25);
    Ok(())
}

fn item_stochastic_integral(s: &Setup, report: &mut Report) -> Result<()> {
    let (h, q) = (s.hurst, s.order);
    let c = q as f64 * gaussian_moment(q - 1);
    report.put("limit_coefficient", Estimate::exact(c));
    coupled_l2(
        s,
        report,
        |p| (-(p.level() as f64) * h).exp2() * weighted_power_variation(p, &s.weight, q, false),
        |p| c * s.weight.antiderivative(p.terminal()),
    )
}

fn drift_coefficient(q: u32) -> f64 {
    0.25 * binomial(q, 2) * gaussian_moment(q - 2)
}

fn item_small_h(s: &Setup, report: &mut Report) -> Result<()> {
    let (h, q) = (s.hurst, s.order);
    let c = drift_coefficient(q);
    report.put("limit_coefficient", Estimate::exact(c));
    coupled_l2(
        s,
        report,
        |p| (p.level() as f64 * (2.0 * h - 1.0)).exp2() * weighted_power_variation(p, &s.weight, q, true),
        |p| c * riemann_mean(p, &s.weight, 2),
    )
}

/// Rows of `(2^{-n/2} W_n, drift, ∫f²)` per coupled level.
fn central_rows(s: &Setup, drift: f64) -> Result<Vec<Vec<f64>>> {
    let sampler = circulant_sampler(s.hurst, s.max_level())?;
    let q = s.order;
    let rows = map_paths(&sampler, s.seed, s.replicates, |path| {
        let mut row = Vec::new();
        for p in coupled(path, &s.levels) {
            let y = (-(p.level() as f64) / 2.0).exp2() * weighted_power_variation(&p, &s.weight, q, true);
            let d = if drift == 0.0 { 0.0 } else { drift * riemann_mean(&p, &s.weight, 2) };
            row.extend([y - d, square_riemann(&p, &s.weight)]);
        }
        row
    });
    Ok(columns(&rows, 2 * s.levels.len()))
}

/// `Var(resid) / (σ̃² E∫f²)` at each level; checks the largest one.
fn variance_check(s: &Setup, report: &mut Report, cols: &[Vec<f64>], sigma_tilde: f64) {
    let s2 = sigma_tilde * sigma_tilde;
    report.put("sigma_tilde", Estimate::exact(sigma_tilde));
    let mut last = Estimate::exact(f64::NAN);
    for (i, &n) in s.levels.iter().enumerate() {
        let mass = mean_estimate(&cols[2 * i + 1]);
        let target = Estimate {
            value: s2 * mass.value,
            std_error: mass.std_error.map(|e| e * s2),
        };
        last = ratio(variance_estimate(&cols[2 * i]), target);
        let stats = report.level(n);
        stats.insert("mean".into(), mean_estimate(&cols[2 * i]));
        stats.insert("variance".into(), variance_estimate(&cols[2 * i]));
        stats.insert("variance_ratio".into(), last);
    }
    report.put("variance_ratio", last);
    report.check(
        "variance",
        format!("variance / (sigma_tilde^2 E[int f^2]) within {} of 1 at the largest level", s.tolerance),
        format!("ratio = {}", show(last)),
        (last.value - 1.0).abs() <= s.tolerance,
    );
}

fn item_quarter(s: &Setup, report: &mut Report) -> Result<()> {
    let q = s.order;
    let c = drift_coefficient(q);
    report.put("drift_coefficient", Estimate::exact(c));
    let st = sigma_tilde_via_clt(s.hurst, q, QUARTER_RADIUS)?;
    let cols = central_rows(s, c)?;
    let m = mean_estimate(&cols[cols.len() - 2]);
    report.put("mean_residual", m);
    report.check(
        "drift",
        "mean of the statistic minus the drift within 3 SE of 0",
        format!("mean = {}", show(m)),
        m.value.abs() <= 3.0 * m.std_error.unwrap_or(f64::NAN),
    );
    variance_check(s, report, &cols, st);
    Ok(())
}

fn item_clt(s: &Setup, report: &mut Report) -> Result<()> {
    let st = sigma_tilde(s.hurst, s.order, DEFAULT_REL_TOL)?.value;
    let cols = central_rows(s, 0.0)?;
    variance_check(s, report, &cols, st);
    Ok(())
}
