use super::{Builder, ExperimentConfig, Report};
use crate::error::{Error, Result};
use crate::exact::tracy_widom::{Ensemble, TabulatedCdf};
use crate::lattice::ScalingParams;
use crate::rng::{replica_seed, stream_seed};
use crate::stats::{ecdf, lattice_deviations};
use crate::tasep::{coupling_check, evolve, make_initial, Dynamics, InitialCondition};
use rayon::prelude::*;

pub(super) const COUPLING: &str = "P(h(j; t) > k) for parallel TASEP equals P(G*(L) ≤ t) for the LPP from the initial path";
pub(super) const COROLLARY: &str =
    "(h(2σ𝐜₀N^{2/3}; 𝐚₀*N) − 2N)/(2𝐝₀*N^{1/3}) > −x has the law of a variational maximum over the initial profile";

/// `j:k` pairs with nondegenerate probabilities at `t = 6`, `q = ¼` for both
/// step and flat data.
const DEFAULT_PAIRS: &str = "0:2,0:4,1:3";

fn parse_pairs(s: &str) -> Result<Vec<(i64, i64)>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (j, k) = p.split_once(':').ok_or_else(|| Error::Config(format!("pair '{p}' is not j:k")))?;
            let j = j.trim().parse().map_err(|_| Error::Config(format!("bad site in '{p}'")))?;
            let k = k.trim().parse().map_err(|_| Error::Config(format!("bad level in '{p}'")))?;
            Ok((j, k))
        })
        .collect()
}

pub(super) fn tasep_coupling(cfg: &ExperimentConfig) -> Result<Report> {
    let q = cfg.f64("q", 0.25)?;
    let seed = cfg.u64("seed", 1)?;
    let kinds = cfg.str_list("kinds", &["step", "flat"]);
    let t = cfg.u64("t", 6)?;
    let replicas = cfg.u64("replicas", 100_000)?;
    let z_max = cfg.f64("z", 3.0)?;
    let pairs: Vec<Vec<(i64, i64)>> = kinds
        .iter()
        .map(|k| parse_pairs(&cfg.string(&format!("pairs-{k}"), DEFAULT_PAIRS)))
        .collect::<Result<_>>()?;
    cfg.finish()?;
    let margin = t as i64 + 10;
    let mut b = Builder::new();
    let mut rows = Vec::new();
    for (idx, (kind, pairs)) in kinds.iter().zip(&pairs).enumerate() {
        let init: InitialCondition = kind.parse()?;
        for &(j, k) in pairs {
            let s = stream_seed(seed, &format!("tasep-coupling-{kind}-{j}-{k}"));
            let r = coupling_check(&init, j - margin, j + margin, j, k, t, q, replicas, s)?;
            if r.p_tasep == 0.0 || r.p_tasep == 1.0 {
                b.warn(format!("{kind} (j, k) = ({j}, {k}): probability is degenerate"));
            }
            b.at_most(format!("abs_z_{kind}_j{j}_k{k}"), r.z.abs(), z_max);
            rows.push(vec![idx as f64, j as f64, k as f64, r.p_tasep, r.p_lpp, r.z]);
        }
    }
    b.table("coupling", &["kind_index", "j", "k", "p_tasep", "p_lpp", "z"], rows);
    b.result("kinds", &kinds);
    Ok(b.finish(cfg, COUPLING))
}

pub(super) fn tasep_corollary(cfg: &ExperimentConfig) -> Result<Report> {
    let q = cfg.f64("q", 0.25)?;
    let seed = cfg.u64("seed", 1)?;
    let kinds = cfg.str_list("kinds", &["flat", "bernoulli", "wedge-flat", "wedge-bernoulli", "flat-bernoulli"]);
    let n = cfg.u64("n", 300)?;
    let replicas = cfg.u64("replicas", 1000)?;
    let sigma = cfg.f64("sigma", 0.0)?;
    let tol = cfg.f64("tolerance", 0.1)?;
    cfg.finish()?;
    if n == 0 || replicas == 0 {
        return Err(Error::Parameter("N and replicas must be positive".into()));
    }
    let params = ScalingParams::new(q)?;
    let nf = n as f64;
    let j = (2.0 * sigma * params.c0 * nf.powf(2.0 / 3.0)).round() as i64;
    let t = (params.a0_star * nf).round() as u64;
    let scale = 2.0 * params.d0_star * nf.cbrt();
    let (lo, hi) = (j - t as i64 - 2, j + t as i64 + 2);
    let f1 = TabulatedCdf::new(Ensemble::Goe);
    let f2 = TabulatedCdf::new(Ensemble::Gue);
    let goe = |x: f64| f1.eval(2f64.powf(2.0 / 3.0) * x);
    // The point s = σ (s = 0 for the Brownian cases) bounds every maximum below.
    let point = |x: f64| f2.eval(x + sigma * sigma);
    let mut b = Builder::new();
    b.result("site_j", j);
    b.result("time_t", t);
    b.result("lattice_spacing", 2.0 / scale);
    let mut rows = Vec::new();
    for (idx, kind) in kinds.iter().enumerate() {
        let init: InitialCondition = kind.parse()?;
        if matches!(init, InitialCondition::Custom { .. }) {
            return Err(Error::Config("custom initial data are not part of this experiment".into()));
        }
        let s_init = stream_seed(seed, &format!("corollary-init-{kind}"));
        let s_coin = stream_seed(seed, &format!("corollary-coins-{kind}"));
        let x: Result<Vec<f64>> = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let h0 = make_initial(&init, lo, hi, replica_seed(s_init, r))?;
                let ht = evolve(&h0, t, &Dynamics::Coins { q, seed: replica_seed(s_coin, r) });
                Ok(-((ht.at(j).unwrap() - 2 * n as i64) as f64) / scale)
            })
            .collect();
        let x = x?;
        let d = ecdf(&x)?;
        let (above_pt, below_pt) = lattice_deviations(&d, &point);
        let (above_goe, below_goe) = lattice_deviations(&d, &goe);
        match init {
            InitialCondition::Flat => b.at_most("flat_ks_vs_F1(2^(2/3)x)", above_goe.max(below_goe), tol),
            InitialCondition::Step => b.at_most("step_ks_vs_F2(x+sigma^2)", above_pt.max(below_pt), tol),
            InitialCondition::WedgeFlat => {
                b.at_most("wedge-flat_excess_over_F2(x+sigma^2)", above_pt, tol);
                b.at_most("wedge-flat_deficit_below_F1(2^(2/3)x)", below_goe, tol);
            }
            _ => b.at_most(format!("{kind}_excess_over_F2(x+sigma^2)"), above_pt, tol),
        }
        let m = x.iter().sum::<f64>() / x.len() as f64;
        rows.push(vec![idx as f64, m, above_pt, below_pt, above_goe, below_goe]);
        b.cdf_table(format!("cdf_{kind}"), &d, &point, -5.0, 4.0);
        b.series(kind.clone(), x);
    }
    b.table(
        "deviations",
        &["kind_index", "mean", "above_F2", "below_F2", "above_F1", "below_F1"],
        rows,
    );
    b.result("kinds", &kinds);
    Ok(b.finish(cfg, COROLLARY))
}
