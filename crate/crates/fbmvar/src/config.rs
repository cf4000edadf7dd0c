//! Experiment configuration.
//!
//! Files are flat `key = value` lines; `#` starts a comment. Recognized keys:
//! `id`, `H`, `q`, `weight`, `levels`, `replicates`, `seed`, `offset`,
//! `item`, `tolerance`. `levels` is either a comma list (`6,8,10`) or an
//! inclusive range (`6..12`). Command-line flags override file values.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use fbmvar_core::WeightFunction;

use crate::error::{Error, Result};

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Smallest replicate count accepted for a Monte Carlo experiment.
pub const MIN_REPLICATES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentId {
    SmallH,
    Clt,
    CriticalHigh,
    Noncentral,
    Corollary,
    Trapezoid,
    ConjectureQuarter,
    Sampler,
    HermiteAlgebra,
    HermiteLaw,
    VarianceOrder,
    Joint,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 12] = [
        ExperimentId::SmallH,
        ExperimentId::Clt,
        ExperimentId::CriticalHigh,
        ExperimentId::Noncentral,
        ExperimentId::Corollary,
        ExperimentId::Trapezoid,
        ExperimentId::ConjectureQuarter,
        ExperimentId::Sampler,
        ExperimentId::HermiteAlgebra,
        ExperimentId::HermiteLaw,
        ExperimentId::VarianceOrder,
        ExperimentId::Joint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::SmallH => "small-h",
            ExperimentId::Clt => "clt",
            ExperimentId::CriticalHigh => "critical-high",
            ExperimentId::Noncentral => "noncentral",
            ExperimentId::Corollary => "corollary",
            ExperimentId::Trapezoid => "trapezoid",
            ExperimentId::ConjectureQuarter => "conjecture-quarter",
            ExperimentId::Sampler => "sampler",
            ExperimentId::HermiteAlgebra => "hermite-algebra",
            ExperimentId::HermiteLaw => "hermite-law",
            ExperimentId::VarianceOrder => "variance-order",
            ExperimentId::Joint => "joint",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = ExperimentId::ALL.iter().map(|id| id.name()).collect();
                Error::Config(format!("unknown experiment `{s}`; known: {}", known.join(", ")))
            })
    }
}

/// Everything that determines an experiment's output. Unset fields take
/// per-experiment defaults, which are echoed in the report.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub hurst: Option<f64>,
    pub order: Option<u32>,
    pub weight: Option<WeightFunction>,
    pub levels: Option<Vec<u32>>,
    pub replicates: Option<usize>,
    pub seed: u64,
    /// Fine-minus-coarse level gap for coupled Hermite-process checks.
    pub offset: Option<u32>,
    /// Corollary item, 1 to 6.
    pub item: Option<u32>,
    pub tolerance: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(id: ExperimentId) -> Self {
        Self {
            id,
            hurst: None,
            order: None,
            weight: None,
            levels: None,
            replicates: None,
            seed: DEFAULT_SEED,
            offset: None,
            item: None,
            tolerance: None,
        }
    }

    /// Parse a config file; `id` may be omitted when `fallback_id` is given.
    pub fn parse(text: &str, fallback_id: Option<ExperimentId>) -> Result<Self> {
        let map = parse_key_values(text)?;
        let id = match (map.get("id"), fallback_id) {
            (Some(s), _) => s.parse()?,
            (None, Some(id)) => id,
            (None, None) => return Err(Error::Config("missing `id`".into())),
        };
        let mut cfg = ExperimentConfig::new(id);
        for (key, value) in &map {
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    /// Set one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("invalid {what} `{value}`"));
        match key {
            "id" => self.id = value.parse()?,
            "H" | "hurst" => self.hurst = Some(parse_real(value).ok_or_else(|| bad("H"))?),
            "q" | "order" => self.order = Some(value.parse().map_err(|_| bad("q"))?),
            "weight" => self.weight = Some(WeightFunction::parse(value)?),
            "levels" => self.levels = Some(parse_levels(value)?),
            "replicates" => self.replicates = Some(value.parse().map_err(|_| bad("replicates"))?),
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "offset" => self.offset = Some(value.parse().map_err(|_| bad("offset"))?),
            "item" => self.item = Some(value.parse().map_err(|_| bad("item"))?),
            "tolerance" => self.tolerance = Some(parse_real(value).ok_or_else(|| bad("tolerance"))?),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn with_hurst(mut self, h: f64) -> Self {
        self.hurst = Some(h);
        self
    }

    pub fn with_order(mut self, q: u32) -> Self {
        self.order = Some(q);
        self
    }

    pub fn with_weight(mut self, w: WeightFunction) -> Self {
        self.weight = Some(w);
        self
    }

    pub fn with_levels(mut self, levels: Vec<u32>) -> Self {
        self.levels = Some(levels);
        self
    }

    pub fn with_replicates(mut self, r: usize) -> Self {
        self.replicates = Some(r);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_item(mut self, item: u32) -> Self {
        self.item = Some(item);
        self
    }

    pub fn with_offset(mut self, offset: u32) -> Self {
        self.offset = Some(offset);
        self
    }
}

/// A decimal number or a ratio `a/b`, so that critical indices such as
/// `1/6` can be written exactly as the nearest double to the ratio.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => s.parse().ok()?,
    };
    v.is_finite().then_some(v)
}

/// Parse `key = value` lines.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim().to_string();
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(map)
}

/// `6..12` (inclusive) or `6,8,10`.
pub fn parse_levels(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::Config(format!("invalid levels `{s}`"));
    let levels: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) || levels[0] == 0 {
        return Err(Error::Config(format!(
            "levels `{s}` must be positive and strictly increasing"
        )));
    }
    Ok(levels)
}
