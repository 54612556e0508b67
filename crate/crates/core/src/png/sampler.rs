//! Heat-bath samplers for the PNG Gibbs measure.
//!
//! A single site sees its two time neighbours and the adjacent lines, and its
//! conditional law is a truncated geometric. A whole line given its two
//! neighbours is a Markov chain in time, sampled exactly by forward filtering
//! and backward sampling; this moves a line in one step and is what makes
//! `N = 30` ensembles mix in a few hundred sweeps.

use super::PngConfig;
use crate::error::{Error, Result};
use crate::lattice::ScalingParams;
use crate::lpp::{antidiagonal_profile, point};
use crate::rng;
use crate::stats::{ecdf, ks_two_sample};
use crate::weights::WeightField;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// `j ∈ {0, …, width}` with `P(j) ∝ base^j`, by inverse transform of `u ∈ [0, 1)`.
pub fn truncated_geometric(base: f64, width: Option<u64>, u: f64) -> u64 {
    let mass = match width {
        Some(w) => 1.0 - base.powf(w as f64 + 1.0),
        None => 1.0,
    };
    let j = ((1.0 - u * mass).ln() / base.ln()).floor();
    let j = if j.is_finite() && j > 0.0 { j as u64 } else { 0 };
    width.map_or(j, |w| j.min(w))
}

/// Admissible values of `h_i(k)` given everything else, and the parity of `k`.
/// Even sites have weight `∝ q^v` on `[lo, hi]`, odd sites `∝ q^{−v}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteInterval {
    pub lo: i64,
    pub hi: Option<i64>,
    pub even: bool,
}

pub fn site_interval(cfg: &PngConfig, i: usize, k: i64) -> Result<SiteInterval> {
    if i >= cfg.n() || !cfg.free_sites().contains(&k) {
        return Err(Error::Domain(format!("site ({i}, {k}) is not free")));
    }
    let below = (k - 1..=k + 1).map(|t| cfg.at(i + 1, t)).max().unwrap();
    let above = (i > 0).then(|| (k - 1..=k + 1).map(|t| cfg.at(i - 1, t)).min().unwrap() - 1);
    let (prev, next) = (cfg.at(i, k - 1), cfg.at(i, k + 1));
    let iv = if k % 2 == 0 {
        SiteInterval { lo: prev.max(next).max(below + 1), hi: above, even: true }
    } else {
        let cap = prev.min(next);
        SiteInterval { lo: below + 1, hi: Some(above.map_or(cap, |a| a.min(cap))), even: false }
    };
    assert!(iv.hi.is_none_or(|h| h >= iv.lo), "empty admissible interval at ({i}, {k})");
    Ok(iv)
}

/// Resample `h_i(k)` from its exact conditional law.
pub fn heat_bath_site_update(cfg: &mut PngConfig, i: usize, k: i64, q: f64, rng: &mut impl Rng) -> Result<()> {
    let iv = site_interval(cfg, i, k)?;
    let u: f64 = rng.random();
    let v = if iv.even {
        let width = iv.hi.map(|h| (h - iv.lo) as u64);
        iv.lo + truncated_geometric(q, width, u) as i64
    } else {
        let hi = iv.hi.expect("odd sites are bounded above");
        hi - truncated_geometric(q, Some((hi - iv.lo) as u64), u) as i64
    };
    cfg.set(i, k, v);
    Ok(())
}

/// Resample line `i` from its exact conditional law given lines `i − 1` and
/// `i + 1`. The top line is capped at `cap`; the capped law differs from the
/// true one only on `{max h₀ > cap}`.
pub fn heat_bath_line_update(cfg: &mut PngConfig, i: usize, q: f64, cap: i64, rng: &mut impl Rng) -> Result<()> {
    let n = cfg.n();
    if i >= n {
        return Err(Error::Domain(format!("line {i} is frozen")));
    }
    let (k0, k1) = (cfg.k_min() + 1, cfg.k_max() - 1);
    if i == 0 && (k0..=k1).any(|k| cfg.at(0, k) > cap) {
        return Err(Error::Config(format!("top line exceeds the cap {cap}")));
    }
    let upper = |k: i64| if i == 0 { cap + 1 } else { cfg.at(i - 1, k) };
    let base = -(i as i64);
    let vlo = base;
    let vhi = (k0..=k1).map(|k| upper(k) - 1).max().unwrap();
    let r = (vhi - vlo + 1) as usize;
    let sq = q.sqrt();
    let steps = (k1 - k0) as usize;
    // Pair constraint at time k: lower(k) < min(x_{k−1}, x_k), max(...) < upper(k).
    let bounds: Vec<(i64, i64)> = (1..=steps as i64)
        .map(|s| {
            let k = k0 + s;
            (cfg.at(i + 1, k - 1).max(cfg.at(i + 1, k)), upper(k - 1).min(upper(k)))
        })
        .collect();
    let mut alpha = vec![vec![0.0f64; r]; steps + 1];
    alpha[0][(base - vlo) as usize] = 1.0;
    for s in 1..=steps {
        let k = k0 + s as i64;
        let (lk, uk) = bounds[s - 1];
        let (prev, cur) = alpha.split_at_mut(s);
        let (prev, cur) = (&prev[s - 1], &mut cur[0]);
        let mut c = 0.0;
        if k % 2 == 0 {
            for x in 0..r {
                let v = vlo + x as i64;
                c = c * sq + if v > lk { prev[x] } else { 0.0 };
                if v < uk {
                    cur[x] = c;
                }
            }
        } else {
            for x in (0..r).rev() {
                let v = vlo + x as i64;
                c = c * sq + if v < uk { prev[x] } else { 0.0 };
                if v > lk {
                    cur[x] = c;
                }
            }
        }
        let m = cur.iter().cloned().fold(0.0, f64::max);
        if m <= 0.0 {
            return Err(Error::Convergence(format!("line {i} has no admissible path past time {k}")));
        }
        cur.iter_mut().for_each(|a| *a /= m);
    }
    let mut x = base;
    let mut w = vec![0.0f64; r];
    for s in (2..=steps).rev() {
        let k = k0 + s as i64;
        let (lk, uk) = bounds[s - 1];
        let mut total = 0.0;
        for (y, wy) in w.iter_mut().enumerate() {
            let v = vlo + y as i64;
            let ok = if k % 2 == 0 { v <= x && v > lk && x < uk } else { v >= x && v < uk && x > lk };
            *wy = if ok { alpha[s - 1][y] * sq.powi((x - v).abs() as i32) } else { 0.0 };
            total += *wy;
        }
        if total <= 0.0 {
            return Err(Error::Convergence(format!("line {i}: dead end at time {k}")));
        }
        let mut u = rng.random::<f64>() * total;
        let mut pick = r - 1;
        for (y, &wy) in w.iter().enumerate() {
            if wy > 0.0 {
                pick = y;
                if u < wy {
                    break;
                }
                u -= wy;
            }
        }
        x = vlo + pick as i64;
        cfg.set(i, k - 1, x);
    }
    Ok(())
}

/// Generous cap for the top line: `⌈2𝐚₀N⌉ + 50`, about twice the typical
/// height plus a margin far beyond the fluctuation scale.
pub fn default_cap(n: usize, q: f64) -> Result<i64> {
    let p = ScalingParams::new(q)?;
    Ok((2.0 * p.a0 * n as f64).ceil() as i64 + 50)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepKind {
    /// Every free site once, line by line, left to right.
    Site,
    /// Every line once, top to bottom, each by exact line resampling.
    Line,
}

/// One systematic-scan heat-bath chain started from the ground state.
#[derive(Debug, Clone)]
pub struct PngChain {
    pub cfg: PngConfig,
    pub q: f64,
    pub kind: SweepKind,
    pub cap: i64,
    rng: ChaCha8Rng,
}

impl PngChain {
    pub fn new(n: usize, q: f64, kind: SweepKind, seed: u64) -> Result<Self> {
        Self::from_config(PngConfig::ground(n)?, q, kind, seed)
    }

    pub fn from_config(cfg: PngConfig, q: f64, kind: SweepKind, seed: u64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Parameter(format!("q = {q} not in (0, 1)")));
        }
        cfg.validate()?;
        let cap = default_cap(cfg.n(), q)?;
        Ok(PngChain { cfg, q, kind, cap, rng: rng::chacha(seed) })
    }

    pub fn sweep(&mut self) -> Result<()> {
        let n = self.cfg.n();
        match self.kind {
            SweepKind::Site => {
                for i in 0..n {
                    for k in self.cfg.free_sites() {
                        heat_bath_site_update(&mut self.cfg, i, k, self.q, &mut self.rng)?;
                    }
                }
            }
            SweepKind::Line => {
                for i in 0..n {
                    heat_bath_line_update(&mut self.cfg, i, self.q, self.cap, &mut self.rng)?;
                }
            }
        }
        debug_assert!(self.cfg.validate().is_ok());
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnsembleOptions {
    pub sweeps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub kind: SweepKind,
}

impl EnsembleOptions {
    /// Burn-in of 50 sweeps, i.e. `50·(4N − 3)·N` site updates.
    pub fn with_samples(samples: usize, thin: usize, kind: SweepKind) -> Self {
        let burn_in = 50;
        EnsembleOptions { sweeps: burn_in + samples * thin.max(1), burn_in, thin: thin.max(1), kind }
    }
}

/// Configurations after sweeps `burn_in + thin, burn_in + 2·thin, …`.
pub fn sample_ensemble(n: usize, q: f64, opts: &EnsembleOptions, seed: u64) -> Result<Vec<PngConfig>> {
    if opts.sweeps <= opts.burn_in || opts.thin == 0 {
        return Err(Error::Parameter(format!(
            "need sweeps > burn-in and thin ≥ 1 (sweeps {}, burn-in {}, thin {})",
            opts.sweeps, opts.burn_in, opts.thin
        )));
    }
    let mut chain = PngChain::new(n, q, opts.kind, seed)?;
    let mut out = Vec::new();
    for t in 1..=opts.sweeps {
        chain.sweep()?;
        if t > opts.burn_in && (t - opts.burn_in) % opts.thin == 0 {
            out.push(chain.cfg.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct PngLppReport {
    pub n: usize,
    pub q: f64,
    pub window: i64,
    pub mcmc_point: Vec<f64>,
    pub lpp_point: Vec<f64>,
    pub ks_point: f64,
    pub mcmc_max: Vec<f64>,
    pub lpp_max: Vec<f64>,
    pub ks_max: f64,
    /// KS distance of `h₀(0)` between the two halves of the chains.
    pub chain_ks: f64,
}

/// MCMC samples of `h₀(0)` and `max_{|k| ≤ window} h₀(2k)` against direct
/// LPP samples of the same laws: `h₀(2k)` is distributed as the last passage
/// time over an `(N + k) × (N − k)` block of sites.
///
/// `chains` independent line-resampling chains share the sample budget.
pub fn top_line_vs_lpp(
    n: usize,
    q: f64,
    samples: usize,
    window: i64,
    chains: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> Result<PngLppReport> {
    if window < 0 || window >= n as i64 || chains == 0 || samples < chains {
        return Err(Error::Parameter(format!("window {window}, {chains} chains, {samples} samples at N = {n}")));
    }
    let per_chain = samples.div_ceil(chains);
    let opts = EnsembleOptions { sweeps: burn_in + per_chain * thin, burn_in, thin, kind: SweepKind::Line };
    let mcmc_seed = rng::stream_seed(seed, "png-mcmc");
    let runs: Result<Vec<Vec<(f64, f64)>>> = (0..chains as u64)
        .into_par_iter()
        .map(|c| {
            let cfgs = sample_ensemble(n, q, &opts, rng::replica_seed(mcmc_seed, c))?;
            Ok(cfgs
                .iter()
                .map(|g| {
                    let m = (-window..=window).map(|k| g.at(0, 2 * k)).max().unwrap();
                    (g.at(0, 0) as f64, m as f64)
                })
                .collect())
        })
        .collect();
    let runs = runs?;
    let half = chains / 2;
    let chain_ks = if half > 0 {
        let a: Vec<f64> = runs[..half].iter().flatten().map(|p| p.0).collect();
        let b: Vec<f64> = runs[half..].iter().flatten().map(|p| p.0).collect();
        ks_two_sample(&ecdf(&a)?, &ecdf(&b)?)
    } else {
        0.0
    };
    let flat: Vec<(f64, f64)> = runs.into_iter().flatten().take(samples).collect();
    let lpp_seed = rng::stream_seed(seed, "png-lpp");
    let level = n as u64 - 1;
    let lpp: Result<Vec<(f64, f64)>> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let field = WeightField::new(rng::replica_seed(lpp_seed, r), q)?;
            let c = n as i64 - 1;
            let g = point(&field, (0, 0), (c, c)).as_f64();
            let prof = antidiagonal_profile(&field, level, -window, window)?;
            Ok((g, prof.max() as f64))
        })
        .collect();
    let lpp = lpp?;
    let (mcmc_point, mcmc_max): (Vec<f64>, Vec<f64>) = flat.into_iter().unzip();
    let (lpp_point, lpp_max): (Vec<f64>, Vec<f64>) = lpp.into_iter().unzip();
    Ok(PngLppReport {
        n,
        q,
        window,
        ks_point: ks_two_sample(&ecdf(&mcmc_point)?, &ecdf(&lpp_point)?),
        ks_max: ks_two_sample(&ecdf(&mcmc_max)?, &ecdf(&lpp_max)?),
        mcmc_point,
        lpp_point,
        mcmc_max,
        lpp_max,
        chain_ks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_geometric_inverse() {
        assert_eq!(truncated_geometric(0.5, None, 0.0), 0);
        assert_eq!(truncated_geometric(0.5, None, 0.5), 1);
        assert_eq!(truncated_geometric(0.5, Some(0), 0.99), 0);
        assert_eq!(truncated_geometric(0.5, Some(2), 0.999_999), 2);
        // P(0) = 4/7 on {0, 1, 2} with base ½.
        assert_eq!(truncated_geometric(0.5, Some(2), 0.57), 0);
        assert_eq!(truncated_geometric(0.5, Some(2), 0.58), 1);
    }

    #[test]
    fn ground_state_intervals() {
        let c = PngConfig::ground(2).unwrap();
        let top = site_interval(&c, 0, 0).unwrap();
        assert_eq!(top, SiteInterval { lo: 0, hi: None, even: true });
        let odd = site_interval(&c, 0, -1).unwrap();
        assert_eq!(odd, SiteInterval { lo: 0, hi: Some(0), even: false });
        let low = site_interval(&c, 1, 0).unwrap();
        assert_eq!(low, SiteInterval { lo: -1, hi: Some(-1), even: true });
        assert!(site_interval(&c, 0, 3).is_err());
    }

    #[test]
    fn sweeps_keep_invariants() {
        for kind in [SweepKind::Site, SweepKind::Line] {
            let mut ch = PngChain::new(4, 0.4, kind, 3).unwrap();
            for _ in 0..30 {
                ch.sweep().unwrap();
                ch.cfg.validate().unwrap();
            }
            assert!(ch.cfg.at(0, 0) > 0);
        }
    }

    #[test]
    fn ensemble_shape() {
        let opts = EnsembleOptions { sweeps: 12, burn_in: 2, thin: 5, kind: SweepKind::Site };
        assert_eq!(sample_ensemble(2, 0.3, &opts, 1).unwrap().len(), 2);
        let bad = EnsembleOptions { sweeps: 2, burn_in: 2, thin: 1, kind: SweepKind::Site };
        assert!(sample_ensemble(2, 0.3, &bad, 1).is_err());
    }
}
