//! Experiment reports: JSON (primary), CSV of per-level statistics and
//! plot-ready TSV.
//!
//! A report is a pure function of its configuration. Maps are ordered and
//! floats are printed in shortest round-trip form, so equal configurations
//! give byte-identical JSON. Wall-clock time is included only on request.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::numfmt::{format_float, round_sig};

pub const SCHEMA: &str = "fbmvar-report/1";

/// A point estimate with its Monte Carlo standard error (absent for
/// deterministic quantities).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std_error: Option<f64>,
}

impl Estimate {
    pub fn mc(value: f64, std_error: f64) -> Self {
        Self {
            value,
            std_error: Some(std_error),
        }
    }

    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: u32,
    pub stats: BTreeMap<String, Estimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The acceptance rule in words.
    pub rule: String,
    /// What was measured, with error bars.
    pub observed: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub experiment: String,
    /// Set when the statement under test is a conjecture.
    pub exploratory: bool,
    pub config: BTreeMap<String, Value>,
    pub levels: Vec<LevelRow>,
    pub summary: BTreeMap<String, Estimate>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_seconds: Option<f64>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            experiment: experiment.to_string(),
            exploratory: false,
            config: BTreeMap::new(),
            levels: Vec::new(),
            summary: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            verdict: Verdict::Pass,
            wall_clock_seconds: None,
        }
    }

    pub fn echo(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_string(), value.into());
    }

    pub fn level(&mut self, level: u32) -> &mut BTreeMap<String, Estimate> {
        if let Some(i) = self.levels.iter().position(|r| r.level == level) {
            return &mut self.levels[i].stats;
        }
        self.levels.push(LevelRow {
            level,
            stats: BTreeMap::new(),
        });
        &mut self.levels.last_mut().expect("just pushed").stats
    }

    pub fn put(&mut self, key: &str, e: Estimate) {
        self.summary.insert(key.to_string(), e);
    }

    pub fn check(&mut self, name: &str, rule: impl Into<String>, observed: impl Into<String>, passed: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            rule: rule.into(),
            observed: observed.into(),
            passed,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Set the verdict from the checks; a report without checks fails.
    pub fn finish(mut self) -> Self {
        self.verdict = if !self.checks.is_empty() && self.checks.iter().all(|c| c.passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pretty JSON with floats rounded to `digits` significant digits if given.
    pub fn to_json(&self, digits: Option<u32>) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        round_floats(&mut value, digits);
        let mut s = serde_json::to_string_pretty(&value)?;
        s.push('\n');
        Ok(s)
    }

    /// `level,statistic,value,std_error` rows.
    pub fn to_csv(&self, digits: Option<u32>) -> String {
        let mut out = String::from("level,statistic,value,std_error\n");
        for row in &self.levels {
            for (name, e) in &row.stats {
                let se = e.std_error.map(|s| format_float(s, digits)).unwrap_or_default();
                let _ = writeln!(out, "{},{},{},{}", row.level, name, format_float(e.value, digits), se);
            }
        }
        out
    }

    /// Plot data: one block per statistic with columns `x`, `y`, `yerr`.
    pub fn to_tsv(&self, digits: Option<u32>) -> String {
        let mut names: Vec<&String> = self.levels.iter().flat_map(|r| r.stats.keys()).collect();
        names.sort();
        names.dedup();
        let mut out = String::from("statistic\tx\ty\tyerr\n");
        for name in names {
            for row in &self.levels {
                if let Some(e) = row.stats.get(name) {
                    let se = e.std_error.map(|s| format_float(s, digits)).unwrap_or_default();
                    let _ = writeln!(out, "{name}\t{}\t{}\t{se}", row.level, format_float(e.value, digits));
                }
            }
        }
        out
    }
}

/// Pretty JSON for an arbitrary value, with the same float handling as reports.
pub fn render_json(mut value: Value, digits: Option<u32>) -> Result<String> {
    round_floats(&mut value, digits);
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

fn round_floats(v: &mut Value, digits: Option<u32>) {
    if digits.is_none() {
        return;
    }
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("checked f64"), digits);
            if let Some(m) = serde_json::Number::from_f64(x) {
                *n = m;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| round_floats(x, digits)),
        Value::Object(o) => o.values_mut().for_each(|x| round_floats(x, digits)),
        _ => {}
    }
}

/// A plain-text summary table of several reports.
pub fn merge_table(reports: &[(String, Report)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<28} {:<20} {:<8} {:>7}", "source", "experiment", "verdict", "checks");
    for (source, r) in reports {
        let passed = r.checks.iter().filter(|c| c.passed).count();
        let verdict = match r.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        let tag = if r.exploratory { " (exploratory)" } else { "" };
        let _ = writeln!(
            out,
            "{:<28} {:<20} {:<8} {:>3}/{:<3}{}",
            source,
            r.experiment,
            verdict,
            passed,
            r.checks.len(),
            tag
        );
        for c in &r.checks {
            let _ = writeln!(
                out,
                "    [{}] {}: {} ({})",
                if c.passed { "ok" } else { "no" },
                c.name,
                c.observed,
                c.rule
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo");
        r.echo("seed", 7u64);
        r.level(6).insert("l2".into(), Estimate::mc(0.123456789, 0.01));
        r.level(7).insert("l2".into(), Estimate::mc(0.1, 0.005));
        r.put("ratio", Estimate::exact(1.0 / 3.0));
        r.check("decreasing", "monotone", "yes", true);
        r.finish()
    }

    #[test]
    fn json_round_trips_and_rounds() {
        let r = sample();
        let full = r.to_json(None).unwrap();
        assert!(full.contains("\"schema\": \"fbmvar-report/1\""));
        assert!(full.contains("0.3333333333333333"));
        assert!(!full.contains("wall_clock"));
        let back: Report = serde_json::from_str(&full).unwrap();
        assert_eq!(back, r);
        let short = r.to_json(Some(3)).unwrap();
        assert!(short.contains("0.333") && !short.contains("0.3333"));
        assert!(short.contains("\"seed\": 7"));
    }

    #[test]
    fn verdict_requires_all_checks() {
        let mut r = Report::new("x");
        assert!(!r.clone().finish().passed());
        r.check("a", "", "", true);
        r.check("b", "", "", false);
        assert!(!r.finish().passed());
    }

    #[test]
    fn tabular_outputs() {
        let r = sample();
        let csv = r.to_csv(None);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("6,l2,0.123456789,0.01"));
        let tsv = r.to_tsv(Some(2));
        assert!(tsv.contains("l2\t6\t0.12\t0.01"));
        let table = merge_table(&[("a.json".into(), r)]);
        assert!(table.contains("PASS"));
    }
}
