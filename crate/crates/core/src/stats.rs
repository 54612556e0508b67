//! Empirical distributions, Kolmogorov–Smirnov distances and the Monte Carlo
//! estimators built on the LPP profiles.

use crate::error::{Error, Result};
use crate::lattice::ScalingParams;
use crate::lpp::{antidiagonal_profile, paired_h, rescale_h};
use crate::rng;
use crate::weights::WeightField;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

pub fn ecdf(samples: &[f64]) -> Result<EmpiricalDistribution> {
    if samples.is_empty() {
        return Err(Error::Domain("empirical distribution of no samples".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain("NaN sample".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(EmpiricalDistribution { samples: s })
}

impl EmpiricalDistribution {
    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `#{samples ≤ x}/n`.
    pub fn eval(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.n() as f64
    }

    /// Left limit `#{samples < x}/n`.
    fn eval_left(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s < x) as f64 / self.n() as f64
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.n() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let n = self.n() as f64;
        self.samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)
    }

    /// Smallest sample `x` with `eval(x) ≥ p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.n();
        let i = ((p * n as f64).ceil() as usize).clamp(1, n);
        self.samples[i - 1]
    }
}

/// `sup_x |F_n(x) − F(x)|` for a continuous reference CDF, checked on both
/// sides of every jump of `F_n`.
pub fn ks_distance(dist: &EmpiricalDistribution, cdf: &dyn Fn(f64) -> f64) -> f64 {
    let mut d = 0.0f64;
    for &x in dist.samples.iter() {
        let f = cdf(x);
        d = d.max((dist.eval(x) - f).abs()).max((dist.eval_left(x) - f).abs());
    }
    d
}

/// `(sup (F_n − F), sup (F − F_n))` at the midpoints between consecutive
/// distinct sample values and half a gap beyond the extremes. For data on a
/// lattice this is the continuity-corrected comparison: the lattice jumps
/// themselves are not counted as discrepancy.
pub fn lattice_deviations(dist: &EmpiricalDistribution, cdf: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let mut v = dist.samples.clone();
    v.dedup();
    let mut points = Vec::with_capacity(v.len() + 1);
    let gap = if v.len() > 1 { v[1] - v[0] } else { 1.0 };
    points.push(v[0] - 0.5 * gap);
    points.extend(v.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let gap = if v.len() > 1 { v[v.len() - 1] - v[v.len() - 2] } else { 1.0 };
    points.push(v[v.len() - 1] + 0.5 * gap);
    let (mut above, mut below) = (0.0f64, 0.0f64);
    for x in points {
        let d = dist.eval(x) - cdf(x);
        above = above.max(d);
        below = below.max(-d);
    }
    (above, below)
}

/// `sup_x |F(x) − G(x)|` over the union of both sample sets. Ties between the
/// sets are handled exactly, so discrete data are fine.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    a.samples
        .iter()
        .chain(b.samples.iter())
        .map(|&x| (a.eval(x) - b.eval(x)).abs())
        .fold(0.0, f64::max)
}

/// Dvoretzky–Kiefer–Wolfowitz radius: `P(sup |F_n − F| > ε) ≤ α` for
/// `ε = √(ln(2/α)/(2n))`.
pub fn dkw_bound(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Two-sample analogue: `ε √((n + m)/(n m))` scaling of the DKW radius.
pub fn dkw_bound_two_sample(n: usize, m: usize, alpha: f64) -> f64 {
    let eff = (n * m) as f64 / (n + m) as f64;
    ((2.0 / alpha).ln() / (2.0 * eff)).sqrt()
}

/// Total variation distance between two probability vectors on the same
/// support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Proportion {
    pub hits: u64,
    pub n: u64,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Wilson score interval at standard-normal quantile `z`.
pub fn wilson(hits: u64, n: u64, z: f64) -> Proportion {
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * nf)) / (1.0 + z2 / nf);
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / (1.0 + z2 / nf);
    Proportion { hits, n, estimate: p, lo: (centre - half).clamp(0.0, p), hi: (centre + half).clamp(p, 1.0) }
}

#[derive(Debug, Clone, Serialize)]
pub struct SlowDecorrReport {
    pub n: u64,
    pub alpha: f64,
    pub window: f64,
    pub delta: f64,
    pub exceedance: Proportion,
    /// Per-replica `max_{|s| ≤ M} |H_N(s) − H̃_N(s)|`.
    pub gaps: Vec<f64>,
}

/// Fraction of replicas with `max_{|s| ≤ M} |H_N(s) − H̃_N(s)| ≥ δ`, with a 95%
/// Wilson interval.
#[allow(clippy::too_many_arguments)]
pub fn slow_decorr_statistic(
    n: u64,
    alpha: f64,
    ell_n: &(dyn Fn(f64) -> f64 + Sync),
    window: f64,
    delta: f64,
    q: f64,
    replicas: u64,
    seed: u64,
) -> Result<SlowDecorrReport> {
    let params = ScalingParams::new(q)?;
    let u_unit = params.c0 * (n as f64).powf(2.0 / 3.0);
    let k = (window * u_unit).ceil() as i64 + 1;
    let gaps: Result<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let field = WeightField::new(rng::replica_seed(seed, r), q)?;
            let (h, ht) = paired_h(&field, n, alpha, ell_n, -k, k, &params)?;
            h.max_abs_diff(&ht, window)
        })
        .collect();
    let gaps = gaps?;
    let hits = gaps.iter().filter(|&&g| g >= delta).count() as u64;
    Ok(SlowDecorrReport { n, alpha, window, delta, exceedance: wilson(hits, replicas, 1.96), gaps })
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationalSamples {
    pub values: Vec<f64>,
    /// Per-replica maximizing `s`.
    pub argmax: Vec<f64>,
    /// Fraction of replicas whose maximizer sits at a window edge.
    pub edge_fraction: f64,
    pub warnings: Vec<String>,
}

/// Per replica, `max_s (H_N(s − σ) + ℓ(s))` over the saw-tooth breakpoints in
/// `|s| ≤ window`, leftmost maximizer. The shift by `σ` reindexes the same
/// profile, which equals in law moving the target by `σ𝐜₀N^{2/3}`.
/// `ℓ` may return `−∞` to exclude points.
#[allow(clippy::too_many_arguments)]
pub fn variational_rhs_sampler(
    ell: &(dyn Fn(f64) -> f64 + Sync),
    sigma: f64,
    n: u64,
    window: f64,
    q: f64,
    replicas: u64,
    seed: u64,
) -> Result<VariationalSamples> {
    let params = ScalingParams::new(q)?;
    let u_unit = params.c0 * (n as f64).powf(2.0 / 3.0);
    let k_win = (window * u_unit).floor() as i64;
    let d = (sigma * u_unit).round() as i64;
    if k_win + d.abs() >= n as i64 {
        return Err(Error::Window(format!("window {window} with shift {sigma} exceeds the level {n}")));
    }
    let grid: Vec<(f64, f64)> = (-2 * k_win..=2 * k_win)
        .map(|j| {
            let s = j as f64 / (2.0 * u_unit);
            (s, ell(s))
        })
        .collect();
    if grid.iter().any(|g| g.1.is_nan() || g.1 == f64::INFINITY) {
        return Err(Error::Domain("ℓ must be finite or −∞ on the window".into()));
    }
    if grid.iter().all(|g| g.1 == f64::NEG_INFINITY) {
        return Err(Error::Domain("ℓ excludes every point of the window".into()));
    }
    let (k_min, k_max) = (-k_win - d, k_win - d);
    let out: Result<Vec<(f64, f64)>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let field = WeightField::new(rng::replica_seed(seed, r), q)?;
            let p = antidiagonal_profile(&field, n, k_min, k_max)?;
            let h = rescale_h(&p, &params);
            let mut best = (f64::NEG_INFINITY, 0.0);
            for (i, &(s, l)) in grid.iter().enumerate() {
                if l == f64::NEG_INFINITY {
                    continue;
                }
                let v = h.values[i] + l;
                if v > best.0 {
                    best = (v, s);
                }
            }
            Ok(best)
        })
        .collect();
    let out = out?;
    let s_edge = grid.iter().filter(|g| g.1 > f64::NEG_INFINITY).map(|g| g.0.abs()).fold(0.0, f64::max);
    let edges = out.iter().filter(|o| (o.1.abs() - s_edge).abs() < 1e-12).count();
    let edge_fraction = edges as f64 / replicas.max(1) as f64;
    let mut warnings = Vec::new();
    if edge_fraction > 0.01 {
        warnings.push(format!("maximizer at the window edge in {:.1}% of replicas", 100.0 * edge_fraction));
    }
    Ok(VariationalSamples {
        values: out.iter().map(|o| o.0).collect(),
        argmax: out.iter().map(|o| o.1).collect(),
        edge_fraction,
        warnings,
    })
}
