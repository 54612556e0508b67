//! `kpz-lab <experiment> [--config FILE] [--out DIR] [--key value …]`
//!
//! Any `--key value` (or `--key=value`) after the experiment name overrides
//! the configuration file. Exit status: 0 when every check passes, 1 when
//! any fails, 2 on usage or parameter errors.

use clap::Parser;
use kpz_core::experiments::{catalog, run, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "kpz-lab", version, about = "Run a named experiment and write summary.json, samples.csv and tables.csv")]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default `kpz-out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Experiment name (or `list` for the catalog; optional when the config
    /// file names one) followed by overrides such as `--q 0.25 --N 500`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "EXPERIMENT [--KEY VALUE]...")]
    args: Vec<String>,
}

impl Cli {
    fn experiment(&self) -> Option<&str> {
        self.args.first().map(String::as_str).filter(|a| !a.starts_with("--"))
    }

    fn overrides(&self) -> &[String] {
        &self.args[self.experiment().is_some() as usize..]
    }
}

fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(key) = a.strip_prefix("--") else {
            return Err(format!("expected --key, found '{a}'"));
        };
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else {
            let v = it.next().ok_or_else(|| format!("--{key} needs a value"))?;
            out.push((key.to_string(), v.clone()));
        }
    }
    Ok(out)
}

/// `--config` and `--out` may also appear among the trailing overrides.
fn config(cli: &Cli) -> Result<(ExperimentConfig, PathBuf), String> {
    let mut overrides = parse_overrides(cli.overrides())?;
    let mut take = |name: &str| overrides.iter().position(|(k, _)| k == name).map(|i| PathBuf::from(overrides.remove(i).1));
    let config_path = take("config").or_else(|| cli.config.clone());
    let out = take("out").or_else(|| cli.out.clone()).unwrap_or_else(|| PathBuf::from("kpz-out"));
    let mut cfg = match &config_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            ExperimentConfig::from_ini(&text).map_err(|e| e.to_string())?
        }
        None => ExperimentConfig::new(""),
    };
    if let Some(name) = cli.experiment() {
        cfg.experiment = name.to_string();
    }
    for (k, v) in overrides {
        cfg.set(&k, &v);
    }
    if cfg.experiment.is_empty() {
        return Err("no experiment given (try `kpz-lab list`)".into());
    }
    Ok((cfg, out))
}

/// Fixed six decimals, switching to scientific notation for tiny or huge values.
fn num(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e6) {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if cli.experiment() == Some("list") {
        for e in catalog() {
            println!("{:<18} {}", e.name, e.claim);
        }
        return ExitCode::SUCCESS;
    }
    let (cfg, out) = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("kpz-lab: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("kpz-lab: {e}");
            return ExitCode::from(2);
        }
    };
    let write = || -> std::io::Result<()> {
        std::fs::create_dir_all(&out)?;
        std::fs::write(out.join("summary.json"), report.summary_json())?;
        std::fs::write(out.join("samples.csv"), report.samples_csv())?;
        std::fs::write(out.join("tables.csv"), report.tables_csv())
    };
    if let Err(e) = write() {
        eprintln!("kpz-lab: writing {}: {e}", out.display());
        return ExitCode::from(2);
    }
    let s = &report.summary;
    for c in &s.checks {
        let rel = match c.relation {
            kpz_core::experiments::Relation::AtMost => "<=",
            kpz_core::experiments::Relation::AtLeast => ">=",
        };
        println!("{} {}: {} {rel} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, num(c.statistic), num(c.tolerance));
    }
    for w in &s.warnings {
        println!("warning: {w}");
    }
    println!("{}: {}", s.experiment, s.verdict);
    if s.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
