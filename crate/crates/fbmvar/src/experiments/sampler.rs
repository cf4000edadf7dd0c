//! Exactness of the circulant sampler: entrywise covariance, agreement of
//! the law of `B_1` with the Cholesky sampler, and self-similarity.

use fbmvar_core::fbm::{fbm_covariance, CholeskySampler, MAX_CHOLESKY_LEVEL};
use fbmvar_core::rng::replicate_seed;
use fbmvar_core::stats::{ks_two_sample, ols, Summary};
use fbmvar_core::{Hurst, WeightFunction};
use rayon::prelude::*;

use super::{show, Defaults, Setup};
use crate::config::ExperimentConfig;
use crate::dft::circulant_sampler;
use crate::error::{Error, Result};
use crate::parallel::{map_paths, substream};
use crate::report::{Estimate, Report};

const CHOLESKY_DRAWS: usize = 10_000;
const SLOPE_BAND: f64 = 0.05;
const Z_LIMIT: f64 = 3.0;

pub(crate) fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let s = Setup::resolve(
        cfg,
        Defaults {
            hurst: 0.5,
            order: 2,
            weight: WeightFunction::One,
            levels: vec![5],
            replicates: 100_000,
            tolerance: 0.05,
            offset: 0,
        },
    )?;
    let level = s.max_level();
    if level > MAX_CHOLESKY_LEVEL {
        return Err(Error::Config(format!(
            "sampler audit compares with Cholesky, so the level must be at most {MAX_CHOLESKY_LEVEL}"
        )));
    }
    let hurst = Hurst::new(s.hurst)?;
    let mut report = Report::new("sampler");
    s.echo(&mut report, &["H"]);

    let sampler = circulant_sampler(s.hurst, level)?;
    let paths: Vec<Vec<f64>> = map_paths(&sampler, s.seed, s.replicates, |p| p.values().to_vec());
    let npts = paths[0].len();
    let times: Vec<f64> = (0..npts).map(|k| k as f64 / (npts - 1) as f64).collect();

    // Entrywise z-scores of the empirical covariance; B_0 = 0 is skipped.
    let entries: Vec<(usize, usize)> =
        (1..npts).flat_map(|i| (i..npts).map(move |j| (i, j))).collect();
    let z: Vec<f64> = entries
        .par_iter()
        .map(|&(i, j)| {
            let prods: Vec<f64> = paths.iter().map(|p| p[i] * p[j]).collect();
            let m = Summary::of(&prods);
            let exact = fbm_covariance(times[i], times[j], hurst).expect("times lie in [0, 1]");
            (m.mean - exact) / m.mean_se
        })
        .collect();
    let max_z = z.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let over = z.iter().filter(|v| v.abs() > Z_LIMIT).count();
    let mean_z2 = z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64;
    report.put("covariance_max_abs_z", Estimate::exact(max_z));
    // Near 1 when the standard errors are right; entries are strongly
    // correlated, so max |z| is far smaller than for independent z-scores.
    report.put("covariance_mean_z_squared", Estimate::exact(mean_z2));
    report.put("covariance_entries_over_3se", Estimate::exact(over as f64));
    report.put("covariance_entries", Estimate::exact(z.len() as f64));
    report.check(
        "covariance entrywise",
        format!("every empirical covariance entry within {Z_LIMIT} standard errors of the exact value"),
        format!("max |z| = {max_z:.3}; {over} of {} entries beyond {Z_LIMIT}", z.len()),
        over == 0,
    );
    if over > 0 {
        report.note(format!(
            "with {} entries and a two-sided 3-SE band about {:.1} exceedances are expected by chance",
            z.len(),
            z.len() as f64 * 0.0027
        ));
    }

    // Law of B_1 against the Cholesky sampler on an independent stream.
    let chol = CholeskySampler::new(hurst, level)?;
    let draws = s.replicates.min(CHOLESKY_DRAWS);
    let chol_seed = substream(s.seed, 1);
    let b1_chol: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|i| chol.sample(replicate_seed(chol_seed, i as u64)).terminal())
        .collect();
    let b1_circ: Vec<f64> = paths.iter().map(|p| p[npts - 1]).collect();
    let ks = ks_two_sample(&b1_circ, &b1_chol);
    report.put("ks_b1_statistic", Estimate::exact(ks.statistic));
    report.put("ks_b1_p_value", Estimate::exact(ks.p_value));
    report.check(
        "B_1 circulant vs Cholesky",
        "two-sample KS p-value > 0.01",
        format!("D = {:.5}, p = {:.4} ({} vs {draws} draws)", ks.statistic, ks.p_value, s.replicates),
        ks.p_value > 0.01,
    );

    // Var(B_{2^{-j}}) = 2^{-2Hj}: slope of log2 Var against j.
    let js: Vec<u32> = (0..=level.min(5)).collect();
    let mut logs = Vec::new();
    let mut grads = Vec::new();
    for &j in &js {
        let k = (npts - 1) >> j;
        let sq: Vec<f64> = paths.iter().map(|p| p[k] * p[k]).collect();
        let m = Summary::of(&sq);
        report.level(j).insert("var_B".into(), Estimate::mc(m.mean, m.mean_se));
        logs.push(m.mean.log2());
        grads.push((k, m.mean));
    }
    let xs: Vec<f64> = js.iter().map(|&j| j as f64).collect();
    let fit = ols(&xs, &logs);
    // Standard error from the per-path influence of the fitted slope.
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let infl: Vec<f64> = paths
        .iter()
        .map(|p| {
            xs.iter()
                .zip(&grads)
                .map(|(x, &(k, v))| (x - xbar) / sxx * (p[k] * p[k] - v) / (v * std::f64::consts::LN_2))
                .sum()
        })
        .collect();
    let slope = Estimate::mc(fit.slope, Summary::of(&infl).mean_se);
    report.put("self_similarity_slope", slope);
    report.check(
        "self-similarity",
        format!("slope of log2 Var(B_(2^-j)) against j within {SLOPE_BAND} of -2H = {}", -2.0 * s.hurst),
        format!("slope = {}", show(slope)),
        (fit.slope + 2.0 * s.hurst).abs() <= SLOPE_BAND,
    );
    report.put("clamped_eigenvalues", Estimate::exact(sampler.clamped_eigenvalues() as f64));
    Ok(report)
}
