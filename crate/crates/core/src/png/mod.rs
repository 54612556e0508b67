//! Multi-layer discrete PNG line ensembles.
//!
//! Line `i` is stored by its integer samples `h_i(k)`, `k ∈ [−2N, 2N]`; the
//! trajectory is constant on `[k, k + 1)`, so the left limit at `k` is
//! `h_i(k − 1)`. Up-jumps happen at even times, down-jumps at odd times.
//! Lines `i ≥ N` are frozen at `−i`.
//!
//! Two lines are ordered `h > g` when at every time `k` the larger of
//! `g(k − 1), g(k)` is below the smaller of `h(k − 1), h(k)`.

mod bridge;
mod enumerate;
mod sampler;

pub use bridge::{
    midpoint_probability, monotone_coupling_experiment, sample_free_bridge, solve_tilt, tilted_mean, BridgeSpec, CouplingResult,
    MidpointResult, TiltedStep,
};
pub use enumerate::{negative_binomial_tail, PngOracle};
pub use sampler::{
    default_cap, heat_bath_line_update, heat_bath_site_update, sample_ensemble, site_interval, top_line_vs_lpp,
    truncated_geometric, EnsembleOptions, PngChain, PngLppReport, SweepKind,
};

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PngConfig {
    n: usize,
    lines: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GibbsWeight {
    pub q: f64,
    pub per_line: Vec<f64>,
    pub total: f64,
}

/// `log p(k)` with `p(k) = √(1 − q) √q^k`.
pub fn log_p(q: f64, k: u64) -> f64 {
    0.5 * (1.0 - q).ln() + 0.5 * k as f64 * q.ln()
}

impl PngConfig {
    /// Every line constant at `−i`.
    pub fn ground(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("PNG ensemble needs N ≥ 1".into()));
        }
        let lines = (0..n).map(|i| vec![-(i as i64); 4 * n + 1]).collect();
        Ok(PngConfig { n, lines })
    }

    /// Build from explicit line samples; `lines[i][k + 2N]`.
    pub fn from_lines(n: usize, lines: Vec<Vec<i64>>) -> Result<Self> {
        if lines.len() != n || lines.iter().any(|l| l.len() != 4 * n + 1) {
            return Err(Error::Config(format!("need {n} lines of {} samples", 4 * n + 1)));
        }
        let c = PngConfig { n, lines };
        c.validate()?;
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_min(&self) -> i64 {
        -2 * self.n as i64
    }

    pub fn k_max(&self) -> i64 {
        2 * self.n as i64
    }

    pub fn lines(&self) -> &[Vec<i64>] {
        &self.lines
    }

    /// `h_i(k)`, with frozen lines `i ≥ N` and the constant extension outside
    /// `[−2N, 2N]`.
    pub fn at(&self, i: usize, k: i64) -> i64 {
        if i >= self.n || k < self.k_min() || k > self.k_max() {
            return -(i as i64);
        }
        self.lines[i][(k - self.k_min()) as usize]
    }

    pub(crate) fn set(&mut self, i: usize, k: i64, v: i64) {
        let lo = self.k_min();
        self.lines[i][(k - lo) as usize] = v;
    }

    /// Sites whose value is not fixed by the boundary condition.
    pub fn free_sites(&self) -> std::ops::RangeInclusive<i64> {
        self.k_min() + 2..=self.k_max() - 2
    }

    /// Times carrying a weight factor.
    fn weighted_times(&self) -> std::ops::RangeInclusive<i64> {
        self.k_min() + 2..=self.k_max() - 1
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = (self.k_min(), self.k_max());
        for i in 0..self.n {
            let base = -(i as i64);
            for k in [lo, lo + 1, hi - 1, hi] {
                if self.at(i, k) != base {
                    return Err(Error::Config(format!("line {i} must equal {base} at k = {k}")));
                }
            }
            for k in lo + 1..=hi {
                let (a, b) = (self.at(i, k - 1), self.at(i, k));
                if k % 2 == 0 && b < a {
                    return Err(Error::Config(format!("line {i} jumps down at even time {k}")));
                }
                if k % 2 != 0 && b > a {
                    return Err(Error::Config(format!("line {i} jumps up at odd time {k}")));
                }
                let below = self.at(i + 1, k - 1).max(self.at(i + 1, k));
                if below >= a.min(b) {
                    return Err(Error::Config(format!("lines {i} and {} touch at time {k}", i + 1)));
                }
            }
        }
        Ok(())
    }

    /// Per-line and total log-weights; errors on an invalid configuration.
    pub fn log_weight(&self, q: f64) -> Result<GibbsWeight> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Parameter(format!("q = {q} not in (0, 1)")));
        }
        self.validate()?;
        let per_line: Vec<f64> = (0..self.n)
            .map(|i| self.weighted_times().map(|k| log_p(q, self.at(i, k).abs_diff(self.at(i, k - 1)))).sum())
            .collect();
        let total = per_line.iter().sum();
        Ok(GibbsWeight { q, per_line, total })
    }

    /// CSV rows `line,k,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("line,k,value\n");
        for i in 0..self.n {
            for k in self.k_min()..=self.k_max() {
                s.push_str(&format!("{i},{k},{}\n", self.at(i, k)));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_weight() {
        let q = 0.3;
        for n in 1..4 {
            let g = PngConfig::ground(n).unwrap();
            let w = g.log_weight(q).unwrap();
            let transitions = (4 * n - 2) as f64;
            assert!((w.total - transitions * n as f64 * 0.5 * (1.0 - q).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_excursion_costs_q() {
        let q = 0.4;
        let mut c = PngConfig::ground(2).unwrap();
        let base = c.log_weight(q).unwrap().total;
        c.set(0, 0, 1);
        let w = c.log_weight(q).unwrap().total;
        assert!((w - base - q.ln()).abs() < 1e-12);
    }

    #[test]
    fn invariant_violations_rejected() {
        let mut c = PngConfig::ground(2).unwrap();
        c.set(0, -1, 1);
        assert!(c.validate().is_err(), "up-jump at odd time");
        let mut c = PngConfig::ground(2).unwrap();
        c.set(1, 0, 0);
        assert!(c.validate().is_err(), "touching lines");
        let mut c = PngConfig::ground(2).unwrap();
        c.set(0, 3, 1);
        assert!(c.validate().is_err(), "boundary");
        // Pointwise-ordered but not interlaced: line 1 rises at 0 while line 0
        // dropped to the same level at −1.
        let mut c = PngConfig::ground(2).unwrap();
        for k in -2..=2 {
            c.set(0, k, 2);
        }
        c.set(0, -1, 1);
        c.set(1, 0, 1);
        assert!(c.validate().is_err());
        assert!(c.log_weight(0.3).is_err());
    }

    #[test]
    fn csv_has_every_sample() {
        let c = PngConfig::ground(2).unwrap();
        assert_eq!(c.to_csv().lines().count(), 1 + 2 * 9);
    }
}
