use super::{Builder, ExperimentConfig, Report};
use crate::error::{Error, Result};
use crate::png::{midpoint_probability, monotone_coupling_experiment, top_line_vs_lpp, BridgeSpec, PngChain, PngOracle, SweepKind};
use crate::rng::{chacha, stream_seed};
use crate::stats::total_variation;

pub(super) const GIBBS: &str =
    "PNG weights sum to one and the heat-bath sweep leaves the Gibbs measure invariant (checked against exact enumeration)";
pub(super) const PNG_LPP: &str =
    "the PNG top line h₀(2k) has the law of LPP over an (N + k) × (N − k) block, jointly in k";
pub(super) const MONOTONE: &str = "a bridge conditioned to stay above a floor dominates the free bridge";
pub(super) const MIDPOINT: &str = "a free bridge sits at or above its chord at the midpoint with probability close to ½";

fn kind(name: &str) -> Result<SweepKind> {
    match name {
        "site" => Ok(SweepKind::Site),
        "line" => Ok(SweepKind::Line),
        other => Err(Error::Config(format!("unknown sweep kind '{other}' (site, line)"))),
    }
}

/// Law of the state tuple at `k` as a vector over the oracle's support,
/// next to the empirical frequencies of `draws`.
fn tv_against(exact: &[(Vec<i64>, f64)], draws: &[Vec<i64>]) -> f64 {
    let mut p = Vec::with_capacity(exact.len() + 1);
    let mut e = Vec::with_capacity(exact.len() + 1);
    let mut seen = 0usize;
    for (s, w) in exact {
        let c = draws.iter().filter(|d| *d == s).count();
        seen += c;
        p.push(*w);
        e.push(c as f64 / draws.len() as f64);
    }
    p.push(0.0);
    e.push((draws.len() - seen) as f64 / draws.len() as f64);
    total_variation(&p, &e)
}

pub(super) fn png_gibbs(cfg: &ExperimentConfig) -> Result<Report> {
    let q = cfg.f64("q", 0.25)?;
    let seed = cfg.u64("seed", 1)?;
    let n = cfg.u64("n", 1)? as usize;
    let cap = cfg.i64("cap", 40)?;
    let draws = cfg.u64("draws", 100_000)? as usize;
    let sweep = kind(&cfg.string("kind", "site"))?;
    let tol = cfg.f64("tolerance", 0.01)?;
    let norm_tol = cfg.f64("normalization-tolerance", 1e-10)?;
    cfg.finish()?;
    if draws == 0 {
        return Err(Error::Parameter("draws must be positive".into()));
    }
    let oracle = PngOracle::new(n, q, cap)?;
    let z = oracle.total_weight();
    let tail = oracle.tail_bound();
    let law = oracle.state_marginal(0)?;
    let state = |c: &crate::png::PngConfig| -> Vec<i64> { (0..n).map(|i| c.at(i, 0)).collect() };

    // One sweep from exact samples must return the same law.
    let mut rng = chacha(stream_seed(seed, "png-gibbs-exact"));
    let chain_seed = stream_seed(seed, "png-gibbs-sweep");
    let mut after = Vec::with_capacity(draws);
    for d in 0..draws {
        let mut ch = PngChain::from_config(oracle.sample(&mut rng), q, sweep, chain_seed ^ d as u64)?;
        ch.cap = cap;
        ch.sweep()?;
        after.push(state(&ch.cfg));
    }
    // One long chain from the ground state.
    let mut ch = PngChain::new(n, q, sweep, stream_seed(seed, "png-gibbs-chain"))?;
    ch.cap = cap;
    for _ in 0..50 {
        ch.sweep()?;
    }
    let mut run = Vec::with_capacity(draws);
    for _ in 0..draws {
        ch.sweep()?;
        run.push(state(&ch.cfg));
    }

    let mut b = Builder::new();
    b.result("total_weight", z);
    b.result("certified_tail", tail);
    b.at_most("normalization_defect", (z - 1.0).max(1.0 - tail - z), norm_tol);
    b.at_most("tv_after_one_sweep", tv_against(&law, &after), tol);
    b.at_most("tv_long_chain", tv_against(&law, &run), tol);
    if n == 1 {
        let m = oracle.marginal(0, 0)?;
        let emp = |v: &[Vec<i64>], x: usize| v.iter().filter(|s| s[0] == x as i64).count() as f64 / v.len() as f64;
        let rows = (0..m.len()).map(|x| vec![x as f64, m[x], emp(&after, x), emp(&run, x)]).collect();
        b.table("top_line_at_0", &["value", "exact", "one_sweep", "chain"], rows);
    }
    b.series("h0_at_0_chain", run.iter().map(|s| s[0] as f64).collect());
    Ok(b.finish(cfg, GIBBS))
}

pub(super) fn png_vs_lpp(cfg: &ExperimentConfig) -> Result<Report> {
    let q = cfg.f64("q", 0.25)?;
    let seed = cfg.u64("seed", 1)?;
    let n = cfg.u64("n", 30)? as usize;
    let samples = cfg.u64("samples", 2000)? as usize;
    let window = cfg.i64("window", 3)?;
    let chains = cfg.u64("chains", 20)? as usize;
    let burn_in = cfg.u64("burn-in", 1000)? as usize;
    let thin = cfg.u64("thin", 5)? as usize;
    let tol = cfg.f64("tolerance", 0.05)?;
    cfg.finish()?;
    let r = top_line_vs_lpp(n, q, samples, window, chains, burn_in, thin, seed)?;
    let mut b = Builder::new();
    b.result("between_chain_halves_ks", r.chain_ks);
    b.at_most("ks_h0(0)", r.ks_point, tol);
    b.at_most("ks_windowed_max", r.ks_max, tol);
    b.series("mcmc_point", r.mcmc_point);
    b.series("lpp_point", r.lpp_point);
    b.series("mcmc_max", r.mcmc_max);
    b.series("lpp_max", r.lpp_max);
    Ok(b.finish(cfg, PNG_LPP))
}

pub(super) fn monotone_coupling(cfg: &ExperimentConfig) -> Result<Report> {
    let q = cfg.f64("q", 0.25)?;
    let seed = cfg.u64("seed", 1)?;
    let length = cfg.i64("length", 40)?;
    let rise = cfg.i64("rise", 12)?;
    let t2 = cfg.i64("t2", 20)?;
    let a2 = cfg.i64("a2", 6)?;
    let floor_height = cfg.i64("floor-height", 5)?;
    let floor_from = cfg.i64("floor-from", 8)?;
    let floor_to = cfg.i64("floor-to", 32)?;
    let samples = cfg.u64("samples", 10_000)?;
    let sweeps = cfg.u64("sweeps", 100)? as usize;
    let z = cfg.f64("z", 3.0)?;
    cfg.finish()?;
    let spec = BridgeSpec::new(0, length, 0, rise)?;
    let floor: Vec<i64> =
        (0..=length).map(|t| if (floor_from..=floor_to).contains(&t) { floor_height } else { i64::MIN / 4 }).collect();
    let r = monotone_coupling_experiment(spec, t2, a2, Some(&floor), q, samples, sweeps, seed)?;
    let mut b = Builder::new();
    b.result("floored", &r.floored);
    b.result("free", &r.free);
    b.result("standard_error_of_difference", r.se_diff);
    b.at_least("floored_minus_free", r.diff, z * r.se_diff);
    b.at_most("coupling_violations", r.coupling_violations as f64, 0.0);
    b.table(
        "probabilities",
        &["floored", "floored_lo", "floored_hi", "free", "free_lo", "free_hi"],
        vec![vec![r.floored.estimate, r.floored.lo, r.floored.hi, r.free.estimate, r.free.lo, r.free.hi]],
    );
    Ok(b.finish(cfg, MONOTONE))
}

pub(super) fn midpoint_lemma(cfg: &ExperimentConfig) -> Result<Report> {
    let q = cfg.f64("q", 0.25)?;
    let seed = cfg.u64("seed", 1)?;
    let sym_length = cfg.i64("symmetric-length", 100)?;
    let length = cfg.i64("tilted-length", 200)?;
    let slope = cfg.f64("slope", 0.3)?;
    let samples = cfg.u64("samples", 10_000)?;
    let floor = cfg.f64("tilted-min", 0.40)?;
    cfg.finish()?;
    let sym = midpoint_probability(BridgeSpec::new(0, sym_length, 0, 0)?, sym_length / 2, q, samples, stream_seed(seed, "midpoint-symmetric"))?;
    let rise = (slope * length as f64).round() as i64;
    let tilted = midpoint_probability(BridgeSpec::new(0, length, 0, rise)?, length / 2, q, samples, stream_seed(seed, "midpoint-tilted"))?;
    let mut b = Builder::new();
    b.result("symmetric", &sym.estimate);
    b.result("tilted", &tilted.estimate);
    b.result("tilted_chord_level", tilted.a2);
    b.result("tilt", tilted.tilt);
    b.at_least("symmetric_upper_confidence_limit", sym.estimate.hi, 0.5);
    b.at_least("tilted_estimate", tilted.estimate.estimate, floor);
    b.table(
        "midpoint",
        &["length", "rise", "estimate", "lo", "hi"],
        vec![
            vec![sym_length as f64, 0.0, sym.estimate.estimate, sym.estimate.lo, sym.estimate.hi],
            vec![length as f64, rise as f64, tilted.estimate.estimate, tilted.estimate.lo, tilted.estimate.hi],
        ],
    );
    Ok(b.finish(cfg, MIDPOINT))
}
