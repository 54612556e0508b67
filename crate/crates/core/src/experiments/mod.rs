//! Named experiments: flat key/value configuration in, a JSON summary with
//! pass/fail checks plus two CSV artifacts out.
//!
//! Every run is a pure function of its configuration. Replicas draw from
//! `replica_seed(stream_seed(seed, tag), index)`, so the output does not
//! depend on thread scheduling, and the summary carries no timings.

mod lpp_runs;
mod png_runs;
mod tasep_runs;

use crate::error::{Error, Result};
use crate::stats::EmpiricalDistribution;
use serde::Serialize;
use serde_json::Value;
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Experiment name plus flat parameters. Keys are case-insensitive and `_`
/// and `-` are interchangeable. Getters record the effective value of every
/// parameter they read, defaults included.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: String,
    values: BTreeMap<String, String>,
    used: RefCell<BTreeMap<String, Value>>,
}

fn norm_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('_', "-")
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        ExperimentConfig { experiment: experiment.trim().to_string(), values: BTreeMap::new(), used: RefCell::default() }
    }

    /// `key = value` lines; `#` and `;` start comments. An `experiment` key
    /// names the experiment. Section headers are rejected: the format is flat.
    pub fn from_ini(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::new("");
        cfg.merge_ini(text)?;
        Ok(cfg)
    }

    pub fn merge_ini(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                return Err(Error::Config(format!("line {}: sections are not supported", no + 1)));
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value", no + 1)));
            };
            self.set(k, v.trim());
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        let key = norm_key(key);
        if key == "experiment" {
            self.experiment = value.trim().to_string();
        } else {
            self.values.insert(key, value.trim().to_string());
        }
    }

    fn record(&self, key: &str, v: Value) {
        self.used.borrow_mut().insert(key.to_string(), v);
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn bad(key: &str, v: &str, what: &str) -> Error {
        Error::Config(format!("parameter {key} = '{v}' is not {what}"))
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        let v = match self.raw(key) {
            None => default,
            Some(s) => s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| Self::bad(key, s, "a number"))?,
        };
        self.record(key, Value::from(v));
        Ok(v)
    }

    /// Accepts `1e5` style input as long as the value is a whole number.
    pub fn u64(&self, key: &str, default: u64) -> Result<u64> {
        let v = match self.raw(key) {
            None => default,
            Some(s) => parse_count(s).ok_or_else(|| Self::bad(key, s, "a nonnegative integer"))?,
        };
        self.record(key, Value::from(v));
        Ok(v)
    }

    pub fn i64(&self, key: &str, default: i64) -> Result<i64> {
        let v = match self.raw(key) {
            None => default,
            Some(s) => s.parse::<i64>().map_err(|_| Self::bad(key, s, "an integer"))?,
        };
        self.record(key, Value::from(v));
        Ok(v)
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or(default).to_string();
        self.record(key, Value::from(v.clone()));
        v
    }

    pub fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let v = match self.raw(key) {
            None => default.to_vec(),
            Some(s) => split_list(s)
                .map(|p| p.parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Self::bad(key, s, "a list of numbers"))?,
        };
        self.record(key, Value::from(v.clone()));
        Ok(v)
    }

    pub fn u64_list(&self, key: &str, default: &[u64]) -> Result<Vec<u64>> {
        let v = match self.raw(key) {
            None => default.to_vec(),
            Some(s) => split_list(s)
                .map(parse_count)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Self::bad(key, s, "a list of nonnegative integers"))?,
        };
        self.record(key, Value::from(v.clone()));
        Ok(v)
    }

    pub fn str_list(&self, key: &str, default: &[&str]) -> Vec<String> {
        let v: Vec<String> = match self.raw(key) {
            None => default.iter().map(|s| s.to_string()).collect(),
            Some(s) => split_list(s).map(str::to_string).collect(),
        };
        self.record(key, Value::from(v.clone()));
        v
    }

    /// Fails on any supplied key that no getter has read. Experiments call
    /// this after reading their parameters and before doing any work.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self.values.keys().filter(|k| !used.contains_key(*k)).map(String::as_str).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!("unknown parameter(s) for {}: {}", self.experiment, unknown.join(", "))))
        }
    }

    pub fn parameters(&self) -> BTreeMap<String, Value> {
        self.used.borrow().clone()
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split([',', ' ']).map(str::trim).filter(|p| !p.is_empty())
}

fn parse_count(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    let x = s.parse::<f64>().ok()?;
    (x >= 0.0 && x.fract() == 0.0 && x < 9.0e15).then_some(x as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    /// The property under test, in words.
    pub claim: String,
    pub parameters: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub verdict: String,
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// One named column of raw samples.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub summary: Summary,
    pub samples: Vec<Series>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary is plain data");
        s.push('\n');
        s
    }

    /// Long format: `series,index,value`.
    pub fn samples_csv(&self) -> String {
        let mut out = String::from("series,index,value\n");
        for s in &self.samples {
            for (i, v) in s.values.iter().enumerate() {
                let _ = writeln!(out, "{},{i},{v}", s.name);
            }
        }
        out
    }

    /// Long format: `table,row,column,value`.
    pub fn tables_csv(&self) -> String {
        let mut out = String::from("table,row,column,value\n");
        for t in &self.tables {
            for (r, row) in t.rows.iter().enumerate() {
                for (c, v) in t.columns.iter().zip(row) {
                    let _ = writeln!(out, "{},{r},{c},{v}", t.name);
                }
            }
        }
        out
    }
}

/// Accumulates the pieces of a [`Report`].
pub(crate) struct Builder {
    results: BTreeMap<String, Value>,
    checks: Vec<Check>,
    warnings: Vec<String>,
    samples: Vec<Series>,
    tables: Vec<Table>,
}

impl Builder {
    pub(crate) fn new() -> Self {
        Builder { results: BTreeMap::new(), checks: Vec::new(), warnings: Vec::new(), samples: Vec::new(), tables: Vec::new() }
    }

    pub(crate) fn result(&mut self, key: impl Into<String>, v: impl Serialize) {
        self.results.insert(key.into(), serde_json::to_value(v).expect("plain data"));
    }

    pub(crate) fn at_most(&mut self, name: impl Into<String>, statistic: f64, tolerance: f64) {
        let pass = statistic <= tolerance;
        self.checks.push(Check { name: name.into(), statistic, relation: Relation::AtMost, tolerance, pass });
    }

    pub(crate) fn at_least(&mut self, name: impl Into<String>, statistic: f64, tolerance: f64) {
        let pass = statistic >= tolerance;
        self.checks.push(Check { name: name.into(), statistic, relation: Relation::AtLeast, tolerance, pass });
    }

    pub(crate) fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    pub(crate) fn series(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.samples.push(Series { name: name.into(), values });
    }

    pub(crate) fn table(&mut self, name: impl Into<String>, columns: &[&str], rows: Vec<Vec<f64>>) {
        self.tables.push(Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows });
    }

    /// `x, empirical, reference` on a uniform grid.
    pub(crate) fn cdf_table(&mut self, name: impl Into<String>, d: &EmpiricalDistribution, f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) {
        let steps = 200;
        let rows = (0..=steps)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / steps as f64;
                vec![x, d.eval(x), f(x)]
            })
            .collect();
        self.table(name, &["x", "empirical", "reference"], rows);
    }

    pub(crate) fn finish(self, cfg: &ExperimentConfig, claim: &str) -> Report {
        let summary = Summary {
            experiment: cfg.experiment.clone(),
            claim: claim.to_string(),
            parameters: cfg.parameters(),
            results: self.results,
            verdict: if self.checks.iter().all(|c| c.pass) { "pass" } else { "fail" }.to_string(),
            checks: self.checks,
            warnings: self.warnings,
        };
        Report { summary, samples: self.samples, tables: self.tables }
    }
}

pub struct Entry {
    pub name: &'static str,
    pub claim: &'static str,
    run: fn(&ExperimentConfig) -> Result<Report>,
}

const CATALOG: &[Entry] = &[
    Entry { name: "lln", claim: lpp_runs::LLN, run: lpp_runs::lln },
    Entry { name: "gue-onepoint", claim: lpp_runs::GUE, run: lpp_runs::gue_onepoint },
    Entry { name: "flat-goe", claim: lpp_runs::FLAT, run: lpp_runs::flat_goe },
    Entry { name: "exact-vs-mc", claim: lpp_runs::EXACT_MC, run: lpp_runs::exact_vs_mc },
    Entry { name: "tail-exponents", claim: lpp_runs::TAILS, run: lpp_runs::tail_exponents },
    Entry { name: "variational-check", claim: lpp_runs::VARIATIONAL, run: lpp_runs::variational_check },
    Entry { name: "tasep-coupling", claim: tasep_runs::COUPLING, run: tasep_runs::tasep_coupling },
    Entry { name: "tasep-corollary", claim: tasep_runs::COROLLARY, run: tasep_runs::tasep_corollary },
    Entry { name: "inhomogeneous", claim: lpp_runs::INHOMOGENEOUS, run: lpp_runs::inhomogeneous },
    Entry { name: "png-gibbs", claim: png_runs::GIBBS, run: png_runs::png_gibbs },
    Entry { name: "png-vs-lpp", claim: png_runs::PNG_LPP, run: png_runs::png_vs_lpp },
    Entry { name: "monotone-coupling", claim: png_runs::MONOTONE, run: png_runs::monotone_coupling },
    Entry { name: "midpoint-lemma", claim: png_runs::MIDPOINT, run: png_runs::midpoint_lemma },
    Entry { name: "slow-decorr", claim: lpp_runs::SLOW, run: lpp_runs::slow_decorr },
    Entry { name: "hyp-validate", claim: lpp_runs::HYP, run: lpp_runs::hyp_validate },
];

pub fn catalog() -> &'static [Entry] {
    CATALOG
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let entry = CATALOG
        .iter()
        .find(|e| e.name == cfg.experiment)
        .ok_or_else(|| Error::UnknownExperiment(cfg.experiment.clone()))?;
    (entry.run)(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ini_and_getters() {
        let cfg = ExperimentConfig::from_ini("experiment = lln\n# comment\nN = 50 ; trailing\nreplicas=1e3\nsigma-list = 0, 1\n").unwrap();
        assert_eq!(cfg.experiment, "lln");
        assert_eq!(cfg.u64("n", 7).unwrap(), 50);
        assert_eq!(cfg.u64("replicas", 7).unwrap(), 1000);
        assert_eq!(cfg.f64_list("sigma-list", &[]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(cfg.f64("q", 0.25).unwrap(), 0.25);
        cfg.finish().unwrap();
        assert_eq!(cfg.parameters()["q"], Value::from(0.25));
        assert!(ExperimentConfig::from_ini("[lpp]\nq = 1").is_err());
        assert!(ExperimentConfig::from_ini("q 1").is_err());
    }

    #[test]
    fn bad_values_and_unknown_keys() {
        let mut cfg = ExperimentConfig::new("lln");
        cfg.set("N", "2.5");
        cfg.set("samplse", "3");
        assert!(cfg.u64("n", 1).is_err());
        assert!(cfg.finish().is_err());
        assert!(matches!(run(&ExperimentConfig::new("nope")), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn catalog_names_are_unique() {
        let mut names: Vec<_> = catalog().iter().map(|e| e.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), catalog().len());
    }
}
