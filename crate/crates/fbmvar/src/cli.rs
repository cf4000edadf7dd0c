//! The `fbmvar` command line.
//!
//! Exit status is 0 on success, 1 for usage, domain, regime and
//! configuration errors, and 2 for I/O and file-format errors. An experiment
//! whose checks fail still exits 0; its verdict is in the report.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fbmvar_core::constants::{
    classify_regime, hermite_process_variance_const, sigma_clt, sigma_critical_high,
    sigma_critical_high_corrected, sigma_tilde, sigma_tilde_critical, sigma_tilde_critical_corrected,
    small_h_coefficient, RegimeCase, TruncatedSeries, DEFAULT_REL_TOL,
};
use fbmvar_core::fbm::sample_fbm_cholesky;
use fbmvar_core::{renormalize, simulate_hermite, weighted_hermite_variation, weighted_power_variation, WeightFunction};

use crate::config::{parse_levels, parse_real, ExperimentConfig, ExperimentId, DEFAULT_SEED};
use crate::dft::circulant_sampler;
use crate::error::{Error, Result};
use crate::report::{merge_table, render_json, Report};

#[derive(Debug, Parser)]
#[command(name = "fbmvar", version, about = "Weighted Hermite variations of fractional Brownian motion")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "FBMVAR_THREADS")]
    pub threads: Option<usize>,

    /// Significant digits in numeric output (default: shortest exact form).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..=17))]
    pub precision: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one fBm path on the dyadic grid of level n.
    Sample(SampleArgs),
    /// Weighted Hermite or power variation of a sampled path.
    Variation(VariationArgs),
    /// Asymptotic constants and regime for (H, q).
    Constants(ConstantsArgs),
    /// Approximate the Hermite process from a fine fBm path.
    HermiteProcess(HermiteArgs),
    /// Run a Monte Carlo experiment and write its report.
    Experiment(ExperimentArgs),
    /// Summarize several JSON reports in one table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathFormat {
    Csv,
    Bin,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Circulant,
    Cholesky,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Export {
    Csv,
    Json,
}

fn real(s: &str) -> std::result::Result<f64, String> {
    parse_real(s).ok_or_else(|| format!("`{s}` is not a number or ratio a/b"))
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Hurst index in (0, 1); a ratio such as 1/6 is accepted.
    #[arg(long = "H", value_parser = real)]
    pub hurst: f64,
    /// Level: the path has 2^n steps.
    #[arg(long = "n")]
    pub level: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PathFormat::Json)]
    pub format: PathFormat,
    #[arg(long, value_enum, default_value_t = Method::Circulant)]
    pub method: Method,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VariationArgs {
    #[arg(long = "H", value_parser = real)]
    pub hurst: f64,
    #[arg(long = "n")]
    pub level: u32,
    #[arg(long = "q")]
    pub order: u32,
    /// one | poly:c0,c1,.. | cos[:a] | sin[:a] | exp[:a]
    #[arg(long, default_value = "one")]
    pub weight: WeightFunction,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Power variation (x^q) instead of Hermite variation (H_q).
    #[arg(long)]
    pub power: bool,
    /// Subtract the Gaussian moment mu_q (power variation only).
    #[arg(long)]
    pub centered: bool,
    /// Apply the regime prefactor (Hermite variation only).
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long = "H", value_parser = real)]
    pub hurst: f64,
    #[arg(long = "q")]
    pub order: u32,
    /// Relative tolerance of the series truncation, in (0, 1e-3].
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
    /// Echoed only; the constants are deterministic.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct HermiteArgs {
    #[arg(long = "q")]
    pub order: u32,
    #[arg(long = "H", value_parser = real)]
    pub hurst: f64,
    /// Fine level of the source path.
    #[arg(long = "m")]
    pub fine_level: u32,
    /// Output grid level, at most m.
    #[arg(long = "n-out")]
    pub coarse_level: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Export::Json)]
    pub export: Export,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment name; may instead come from the config file.
    #[arg(long)]
    pub id: Option<ExperimentId>,
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "H", value_parser = real)]
    pub hurst: Option<f64>,
    #[arg(long = "q")]
    pub order: Option<u32>,
    #[arg(long)]
    pub weight: Option<WeightFunction>,
    /// `a..b` (inclusive) or a comma list.
    #[arg(long)]
    pub levels: Option<String>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fine-minus-coarse level gap for Hermite-process couplings.
    #[arg(long)]
    pub offset: Option<u32>,
    /// Corollary item, 1 to 6.
    #[arg(long)]
    pub item: Option<u32>,
    #[arg(long, value_parser = real)]
    pub tolerance: Option<f64>,
    /// JSON report path (stdout if absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write per-level statistics as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write plot data as TSV.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
    /// Record elapsed time in the report (breaks byte-reproducibility).
    #[arg(long)]
    pub wall_clock: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON reports to summarize.
    #[arg(long, num_args = 1.., required = true)]
    pub merge: Vec<PathBuf>,
    /// Echoed in the table header.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parse `args`, run the command and return the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let digits = cli.precision;
    let outcome = crate::parallel::with_threads(cli.threads, move || dispatch(cli.command, digits));
    match outcome.and_then(|r| r) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, digits: Option<u32>) -> Result<()> {
    match command {
        Command::Sample(a) => sample(a, digits),
        Command::Variation(a) => variation(a, digits),
        Command::Constants(a) => constants(a, digits),
        Command::HermiteProcess(a) => hermite(a, digits),
        Command::Experiment(a) => experiment(a, digits),
        Command::Report(a) => report(a),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    let mut w = open_output(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn sample(a: SampleArgs, digits: Option<u32>) -> Result<()> {
    let path = match a.method {
        Method::Circulant => circulant_sampler(a.hurst, a.level)?.sample(a.seed),
        Method::Cholesky => sample_fbm_cholesky(a.hurst, a.level, a.seed)?,
    };
    let method = match a.method {
        Method::Circulant => "circulant",
        Method::Cholesky => "cholesky",
    };
    let out = a.output.as_deref();
    match a.format {
        PathFormat::Json => {
            let v = json!({
                "H": a.hurst,
                "n": a.level,
                "seed": a.seed,
                "method": method,
                "values": path.values(),
            });
            emit(out, &render_json(v, digits)?)
        }
        PathFormat::Csv | PathFormat::Bin => {
            // These formats have no room for metadata on stdout.
            eprintln!("seed = {}", a.seed);
            let mut w = open_output(out)?;
            if a.format == PathFormat::Csv {
                crate::io::write_path_csv(&mut w, &path, digits)?;
            } else {
                crate::io::write_path_bin(&mut w, &path)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn variation(a: VariationArgs, digits: Option<u32>) -> Result<()> {
    if a.centered && !a.power {
        return Err(Error::Config("--centered applies to power variations (--power)".into()));
    }
    if a.renormalize && a.power {
        return Err(Error::Config("--renormalize applies to Hermite variations, not --power".into()));
    }
    let path = circulant_sampler(a.hurst, a.level)?.sample(a.seed);
    let raw = if a.power {
        weighted_power_variation(&path, &a.weight, a.order, a.centered)
    } else {
        weighted_hermite_variation(&path, &a.weight, a.order)
    };
    let mut v = json!({
        "H": a.hurst,
        "n": a.level,
        "q": a.order,
        "weight": a.weight.to_string(),
        "seed": a.seed,
        "statistic": if a.power { "power" } else { "hermite" },
        "centered": a.centered,
        "raw": raw,
    });
    if a.renormalize {
        let r = renormalize(raw, a.hurst, a.order, a.level)?;
        v["renormalized"] = json!(r.renormalized_value);
        v["regime"] = json!(r.regime.case.id());
        v["prefactor"] = json!(r.regime.renorm_exponent());
    }
    emit(None, &render_json(v, digits)?)
}

fn series_json(s: &TruncatedSeries) -> Value {
    json!({
        "value": s.value,
        "truncation_radius": s.radius,
        "tail_bound": s.tail_bound,
        "omitted_mass_bound": s.omitted_mass_bound,
        "converged": s.converged,
    })
}

fn constants(a: ConstantsArgs, digits: Option<u32>) -> Result<()> {
    if !(a.rel_tol > 0.0 && a.rel_tol <= 1e-3) {
        return Err(Error::Config(format!("--rel-tol {} is not in (0, 1e-3]", a.rel_tol)));
    }
    let (h, q) = (a.hurst, a.order);
    let regime = classify_regime(h, q)?;
    let mut v = json!({
        "H": h,
        "q": q,
        "seed": a.seed,
        "rel_tol": a.rel_tol,
        "regime": regime.case.id(),
        "limit_kind": regime.limit_kind.id(),
        "conjectural": regime.conjectural(),
        "prefactor": regime.renorm_exponent(),
        "sigma": Value::Null,
        "sigma_tilde": Value::Null,
        "c_qH": Value::Null,
        "truncation_radius": Value::Null,
        "tail_bound": Value::Null,
    });
    match regime.case {
        RegimeCase::SmallH => {
            v["small_h_coefficient"] = json!(small_h_coefficient(q));
        }
        RegimeCase::CriticalHigh => {
            v["sigma"] = json!(sigma_critical_high(q));
            v["sigma_corrected"] = json!(sigma_critical_high_corrected(q));
        }
        RegimeCase::Noncentral => {
            v["c_qH"] = json!(hermite_process_variance_const(q, h)?);
        }
        _ => {}
    }
    if regime.case == RegimeCase::CriticalLow {
        v["small_h_coefficient"] = json!(small_h_coefficient(q));
    }
    if matches!(regime.case, RegimeCase::SmallH | RegimeCase::CriticalLow | RegimeCase::Clt) {
        let s = sigma_clt(h, q, a.rel_tol)?;
        v["sigma"] = json!(s.value);
        v["truncation_radius"] = json!(s.radius);
        v["tail_bound"] = json!(s.tail_bound);
        v["sigma_series"] = series_json(&s);
    }
    if q % 2 == 0 {
        if h > 0.25 && h < 0.75 {
            let s = sigma_tilde(h, q, a.rel_tol)?;
            v["sigma_tilde"] = json!(s.value);
            v["sigma_tilde_series"] = series_json(&s);
        } else if h == 0.75 {
            v["sigma_tilde"] = json!(sigma_tilde_critical(q)?);
            v["sigma_tilde_corrected"] = json!(sigma_tilde_critical_corrected(q)?);
        }
    }
    emit(None, &render_json(v, digits)?)
}

fn hermite(a: HermiteArgs, digits: Option<u32>) -> Result<()> {
    // Check the regime before sampling a possibly large path.
    let regime = classify_regime(a.hurst, a.order)?;
    if regime.case != RegimeCase::Noncentral {
        return Err(fbmvar_core::Error::Regime {
            expected: RegimeCase::Noncentral.id(),
            hurst: a.hurst,
            order: a.order,
        }
        .into());
    }
    let path = circulant_sampler(a.hurst, a.fine_level)?.sample(a.seed);
    let z = simulate_hermite(&path, a.order, a.coarse_level)?;
    let out = a.output.as_deref();
    match a.export {
        Export::Csv => {
            eprintln!("seed = {}", a.seed);
            let mut w = open_output(out)?;
            crate::io::write_hermite_csv(&mut w, &z, digits)?;
            w.flush()?;
            Ok(())
        }
        Export::Json => {
            let t: Vec<f64> = (0..z.values.len()).map(|j| z.time(j)).collect();
            let v = json!({
                "q": a.order,
                "H": a.hurst,
                "m": a.fine_level,
                "n_out": a.coarse_level,
                "seed": a.seed,
                "t": t,
                "Z": z.values,
            });
            emit(out, &render_json(v, digits)?)
        }
    }
}

/// Resolve the experiment configuration: file first, then flags.
pub fn experiment_config(a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::parse(&std::fs::read_to_string(p)?, a.id)?,
        None => ExperimentConfig::new(
            a.id.ok_or_else(|| Error::Config("--id or a config file with `id` is required".into()))?,
        ),
    };
    if let Some(id) = a.id {
        cfg.id = id;
    }
    if let Some(h) = a.hurst {
        cfg.hurst = Some(h);
    }
    if let Some(q) = a.order {
        cfg.order = Some(q);
    }
    if let Some(w) = &a.weight {
        cfg.weight = Some(w.clone());
    }
    if let Some(l) = &a.levels {
        cfg.levels = Some(parse_levels(l)?);
    }
    if let Some(r) = a.replicates {
        cfg.replicates = Some(r);
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(o) = a.offset {
        cfg.offset = Some(o);
    }
    if let Some(i) = a.item {
        cfg.item = Some(i);
    }
    if let Some(t) = a.tolerance {
        cfg.tolerance = Some(t);
    }
    Ok(cfg)
}

fn experiment(a: ExperimentArgs, digits: Option<u32>) -> Result<()> {
    let cfg = experiment_config(&a)?;
    let start = Instant::now();
    let mut report = crate::experiments::run(&cfg)?;
    if a.wall_clock {
        report.wall_clock_seconds = Some(start.elapsed().as_secs_f64());
    }
    log::info!("{}: {:?}", report.experiment, report.verdict);
    if let Some(p) = &a.csv {
        emit(Some(p), &report.to_csv(digits))?;
    }
    if let Some(p) = &a.tsv {
        emit(Some(p), &report.to_tsv(digits))?;
    }
    emit(a.output.as_deref(), &report.to_json(digits)?)
}

fn report(a: ReportArgs) -> Result<()> {
    let mut reports = Vec::with_capacity(a.merge.len());
    for p in &a.merge {
        let text = std::fs::read_to_string(p)?;
        let r: Report = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", p.display())))?;
        reports.push((p.display().to_string(), r));
    }
    let mut out = String::new();
    if let Some(seed) = a.seed {
        out.push_str(&format!("# seed = {seed}\n"));
    }
    out.push_str(&merge_table(&reports));
    emit(a.output.as_deref(), &out)
}
