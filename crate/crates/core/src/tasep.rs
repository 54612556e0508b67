//! Discrete-time parallel-update TASEP through its height function.
//!
//! `h(k + 1) − h(k) = +1` if site `k` is empty and `−1` if occupied. A local
//! minimum (`∨`) at `k` is a particle at `k − 1` with an empty site `k`; the
//! jump raises `h(k)` by 2. A `∨` at `(k, h)` has its bottom at the lattice
//! point `((k + h)/2, (h − k)/2)`, and `h(j; t) > m` exactly when the last
//! passage time with weights `w*` to `((m + j)/2, (m − j)/2)` from the initial
//! chain is at most `t`.
//!
//! The window is finite and its two edge sites never move. Disturbances from
//! the edges travel at most one site per step, so sites farther than `t`
//! from both edges agree with the infinite system up to time `t`.

use crate::error::{Error, Result};
use crate::lattice::path_from_heights;
use crate::lpp::{to_curve, Passage};
use crate::rng;
use crate::weights::{Variant, WeightField};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryMode {
    /// Edge heights are held fixed.
    Frozen,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeightFunction {
    pub k_lo: i64,
    pub heights: Vec<i64>,
    pub t: u64,
    pub boundary: BoundaryMode,
}

impl HeightFunction {
    pub fn new(k_lo: i64, heights: Vec<i64>) -> Result<Self> {
        if heights.len() < 2 {
            return Err(Error::Window("height window needs at least two sites".into()));
        }
        let h = HeightFunction { k_lo, heights, t: 0, boundary: BoundaryMode::Frozen };
        h.check()?;
        Ok(h)
    }

    pub fn k_hi(&self) -> i64 {
        self.k_lo + self.heights.len() as i64 - 1
    }

    pub fn at(&self, k: i64) -> Option<i64> {
        if k < self.k_lo || k > self.k_hi() {
            return None;
        }
        Some(self.heights[(k - self.k_lo) as usize])
    }

    /// ±1 increments and `h(k) ≡ k (mod 2)`.
    pub fn check(&self) -> Result<()> {
        for (i, w) in self.heights.windows(2).enumerate() {
            if (w[1] - w[0]).abs() != 1 {
                return Err(Error::Path(format!("increment at site {} is not ±1", self.k_lo + i as i64)));
            }
        }
        for (i, &v) in self.heights.iter().enumerate() {
            if (v - self.k_lo - i as i64).rem_euclid(2) != 0 {
                return Err(Error::Path(format!("parity violated at site {}", self.k_lo + i as i64)));
            }
        }
        Ok(())
    }

    /// Interior local minima, as window indices.
    pub fn valleys(&self) -> Vec<usize> {
        let h = &self.heights;
        (1..h.len() - 1).filter(|&i| h[i - 1] > h[i] && h[i + 1] > h[i]).collect()
    }

    /// Occupied sites among `k_lo..k_hi`.
    pub fn particles(&self) -> usize {
        self.heights.windows(2).filter(|w| w[1] < w[0]).count()
    }

    pub fn to_csv_rows(&self, out: &mut String) {
        for (i, h) in self.heights.iter().enumerate() {
            out.push_str(&format!("{},{},{h}\n", self.t, self.k_lo + i as i64));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum InitialCondition {
    Step,
    Flat,
    Bernoulli,
    WedgeFlat,
    WedgeBernoulli,
    FlatBernoulli,
    Custom { k_lo: i64, heights: Vec<i64> },
}

impl FromStr for InitialCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "step" => InitialCondition::Step,
            "flat" => InitialCondition::Flat,
            "bernoulli" => InitialCondition::Bernoulli,
            "wedge-flat" => InitialCondition::WedgeFlat,
            "wedge-bernoulli" => InitialCondition::WedgeBernoulli,
            "flat-bernoulli" => InitialCondition::FlatBernoulli,
            other => return Err(Error::Config(format!("unknown initial condition '{other}'"))),
        })
    }
}

fn flat(s: i64) -> i64 {
    -(s.rem_euclid(2))
}

/// Two-sided ±1 random walk pinned at `h(0) = 0`, with increments `w_i` for
/// sites `i` drawn left to right over the window extended to contain 0.
fn bernoulli_walk(k_lo: i64, k_hi: i64, seed: u64) -> Vec<i64> {
    let mut r = rng::chacha(seed);
    let (lo, hi) = (k_lo.min(0), k_hi.max(0));
    let mut h = vec![0i64; (hi - lo + 1) as usize];
    let steps: Vec<i64> = (lo..hi).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
    let zero = (-lo) as usize;
    for i in zero..steps.len() {
        h[i + 1] = h[i] + steps[i];
    }
    for i in (0..zero).rev() {
        h[i] = h[i + 1] - steps[i];
    }
    h[(k_lo - lo) as usize..=(k_hi - lo) as usize].to_vec()
}

/// Initial height on `[k_lo, k_hi]`; Bernoulli parts use fair ±1 increments
/// drawn from `seed`.
pub fn make_initial(kind: &InitialCondition, k_lo: i64, k_hi: i64, seed: u64) -> Result<HeightFunction> {
    if k_hi <= k_lo {
        return Err(Error::Window(format!("empty window [{k_lo}, {k_hi}]")));
    }
    let sites = k_lo..=k_hi;
    let heights: Vec<i64> = match kind {
        InitialCondition::Step => sites.map(|s| s.abs()).collect(),
        InitialCondition::Flat => sites.map(flat).collect(),
        InitialCondition::Bernoulli => bernoulli_walk(k_lo, k_hi, seed),
        InitialCondition::WedgeFlat => sites.map(|s| if s >= 0 { flat(s) } else { s.abs() }).collect(),
        InitialCondition::WedgeBernoulli | InitialCondition::FlatBernoulli => {
            let b = bernoulli_walk(k_lo, k_hi, seed);
            sites
                .zip(b)
                .map(|(s, v)| match (s >= 0, kind) {
                    (true, _) => v,
                    (false, InitialCondition::WedgeBernoulli) => s.abs(),
                    (false, _) => flat(s),
                })
                .collect()
        }
        InitialCondition::Custom { k_lo: lo, heights } => {
            if *lo != k_lo || heights.len() as i64 != k_hi - k_lo + 1 {
                return Err(Error::Window("custom heights do not cover the requested window".into()));
            }
            heights.clone()
        }
    };
    HeightFunction::new(k_lo, heights)
}

/// One parallel update with fresh coins: every interior `∨` flips with
/// probability `1 − q`, decided from the time-`t` configuration.
pub fn step_dynamics(state: &mut HeightFunction, q: f64, rng: &mut ChaCha8Rng) {
    let valleys = state.valleys();
    for i in valleys {
        if rng.random::<f64>() < 1.0 - q {
            state.heights[i] += 2;
        }
    }
    state.t += 1;
    debug_assert!(state.check().is_ok());
}

/// Parallel update driven by the waiting times `w*` of a weight field: a `∨`
/// formed at time `τ` with bottom `v` flips at time `τ + w*(v)`.
pub struct WaitingTimeDynamics {
    field: WeightField,
    formed: Vec<u64>,
}

impl WaitingTimeDynamics {
    /// `field` is used through its one-based variant whatever its own variant.
    pub fn new(field: &WeightField, state: &HeightFunction) -> Self {
        WaitingTimeDynamics {
            field: field.with_variant(Variant::OneBased),
            formed: vec![state.t; state.heights.len()],
        }
    }

    pub fn step(&mut self, state: &mut HeightFunction) {
        let next = state.t + 1;
        let before = state.valleys();
        let mut flipped = Vec::new();
        for &i in &before {
            let k = state.k_lo + i as i64;
            let h = state.heights[i];
            let w = self.field.weight_at((k + h) / 2, (h - k) / 2) as u64;
            if next >= self.formed[i] + w {
                flipped.push(i);
            }
        }
        for &i in &flipped {
            state.heights[i] += 2;
        }
        state.t = next;
        // New valleys can only appear next to a flip.
        for &i in &flipped {
            for j in [i.wrapping_sub(1), i + 1] {
                if j >= 1 && j + 1 < state.heights.len() {
                    let h = &state.heights;
                    if h[j - 1] > h[j] && h[j + 1] > h[j] {
                        self.formed[j] = next;
                    }
                }
            }
        }
        debug_assert!(state.check().is_ok());
    }
}

#[derive(Debug, Clone)]
pub enum Dynamics<'a> {
    Coins { q: f64, seed: u64 },
    WaitingTimes(&'a WeightField),
}

pub fn evolve(state: &HeightFunction, steps: u64, dynamics: &Dynamics) -> HeightFunction {
    let mut s = state.clone();
    match dynamics {
        Dynamics::Coins { q, seed } => {
            let mut r = rng::chacha(*seed);
            for _ in 0..steps {
                step_dynamics(&mut s, *q, &mut r);
            }
        }
        Dynamics::WaitingTimes(field) => {
            let mut d = WaitingTimeDynamics::new(field, &s);
            for _ in 0..steps {
                d.step(&mut s);
            }
        }
    }
    s
}

/// `(t, k, h)` rows for every time `0..=steps`.
pub fn trajectory_csv(state: &HeightFunction, steps: u64, dynamics: &Dynamics) -> String {
    let mut out = String::from("t,k,h\n");
    let mut s = state.clone();
    s.to_csv_rows(&mut out);
    match dynamics {
        Dynamics::Coins { q, seed } => {
            let mut r = rng::chacha(*seed);
            for _ in 0..steps {
                step_dynamics(&mut s, *q, &mut r);
                s.to_csv_rows(&mut out);
            }
        }
        Dynamics::WaitingTimes(field) => {
            let mut d = WaitingTimeDynamics::new(field, &s);
            for _ in 0..steps {
                d.step(&mut s);
                s.to_csv_rows(&mut out);
            }
        }
    }
    out
}

/// `G*` from the chain of `init` to the lattice point of `(j, m)`.
pub fn lpp_passage(init: &HeightFunction, field: &WeightField, j: i64, m: i64) -> Result<Passage> {
    if (j - m).rem_euclid(2) != 0 {
        return Err(Error::Parameter(format!("j = {j} and k = {m} differ in parity")));
    }
    let (path, _) = path_from_heights(init.k_lo, &init.heights)?;
    let star = field.with_variant(Variant::OneBased);
    Ok(to_curve(&star, ((m + j) / 2, (m - j) / 2), &path).value)
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub j: i64,
    pub k: i64,
    pub t: u64,
    pub replicas: u64,
    pub p_tasep: f64,
    pub p_lpp: f64,
    pub z: f64,
}

/// Two independent estimates of `P(h(j; t) > k)`: coin-driven TASEP runs, and
/// `P(G* ≤ t)` from fresh weight fields. Random initial data are redrawn per
/// replica on both sides.
#[allow(clippy::too_many_arguments)]
pub fn coupling_check(
    init: &InitialCondition,
    k_lo: i64,
    k_hi: i64,
    j: i64,
    k: i64,
    t: u64,
    q: f64,
    replicas: u64,
    seed: u64,
) -> Result<CouplingReport> {
    if (j - k).rem_euclid(2) != 0 {
        return Err(Error::Parameter(format!("j = {j} and k = {k} differ in parity")));
    }
    if j - k_lo <= t as i64 || k_hi - j <= t as i64 {
        return Err(Error::Window(format!(
            "site {j} is within {t} of the window [{k_lo}, {k_hi}] edges; the frozen boundary would bias the result"
        )));
    }
    if replicas == 0 {
        return Err(Error::Parameter("replicas must be positive".into()));
    }
    let init_seed = rng::stream_seed(seed, "init");
    let coin_seed = rng::stream_seed(seed, "coins");
    let field_seed = rng::stream_seed(seed, "field");
    let lpp_init_seed = rng::stream_seed(seed, "lpp-init");
    let hits: Result<Vec<(u64, u64)>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let h0 = make_initial(init, k_lo, k_hi, rng::replica_seed(init_seed, r))?;
            let ht = evolve(&h0, t, &Dynamics::Coins { q, seed: rng::replica_seed(coin_seed, r) });
            let a = (ht.at(j).unwrap() > k) as u64;
            let l0 = make_initial(init, k_lo, k_hi, rng::replica_seed(lpp_init_seed, r))?;
            let field = WeightField::one_based(rng::replica_seed(field_seed, r), q)?;
            let g = lpp_passage(&l0, &field, j, k)?;
            let b = matches!(g, Passage::Finite(v) if v <= t as i64) as u64;
            Ok((a, b))
        })
        .collect();
    let hits = hits?;
    let n = replicas as f64;
    let pa = hits.iter().map(|h| h.0).sum::<u64>() as f64 / n;
    let pb = hits.iter().map(|h| h.1).sum::<u64>() as f64 / n;
    let pooled = 0.5 * (pa + pb);
    let se = (2.0 * pooled * (1.0 - pooled) / n).sqrt();
    let z = if se > 0.0 { (pa - pb) / se } else { 0.0 };
    Ok(CouplingReport { j, k, t, replicas, p_tasep: pa, p_lpp: pb, z })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_conditions() {
        let s = make_initial(&InitialCondition::Step, -4, 4, 0).unwrap();
        assert_eq!(s.heights, vec![4, 3, 2, 1, 0, 1, 2, 3, 4]);
        let f = make_initial(&InitialCondition::Flat, -2, 2, 0).unwrap();
        assert_eq!(f.heights, vec![0, -1, 0, -1, 0]);
        let wf = make_initial(&InitialCondition::WedgeFlat, -2, 3, 0).unwrap();
        assert_eq!(wf.heights, vec![2, 1, 0, -1, 0, -1]);
        for kind in ["bernoulli", "wedge-bernoulli", "flat_bernoulli"] {
            let ic: InitialCondition = kind.parse().unwrap();
            let h = make_initial(&ic, -50, 60, 3).unwrap();
            assert_eq!(h.at(0), Some(0));
        }
        let fb = make_initial(&InitialCondition::FlatBernoulli, -3, 3, 1).unwrap();
        assert_eq!(&fb.heights[..3], &[-1, 0, -1]);
        assert!("zigzag".parse::<InitialCondition>().is_err());
        assert!(HeightFunction::new(0, vec![0, 2]).is_err());
        assert!(HeightFunction::new(0, vec![1, 0]).is_err());
    }

    #[test]
    fn bernoulli_window_off_origin() {
        let h = make_initial(&InitialCondition::Bernoulli, 5, 20, 9).unwrap();
        assert!(h.check().is_ok());
        let h = make_initial(&InitialCondition::Bernoulli, -20, -5, 9).unwrap();
        assert!(h.check().is_ok());
    }

    #[test]
    fn no_valley_no_motion() {
        let mut h = HeightFunction::new(0, vec![0, 1, 2, 3, 4]).unwrap();
        let mut r = rng::chacha(1);
        for _ in 0..10 {
            step_dynamics(&mut h, 0.5, &mut r);
        }
        assert_eq!(h.heights, vec![0, 1, 2, 3, 4]);
        assert_eq!(h.t, 10);
    }

    #[test]
    fn waiting_times_match_lpp_recursion() {
        // In waiting-time mode h(j; t) > m iff G* ≤ t, pathwise.
        for (seed, kind) in [(1, InitialCondition::Step), (2, InitialCondition::Flat), (3, InitialCondition::Bernoulli)] {
            let field = WeightField::one_based(seed, 0.4).unwrap();
            let h0 = make_initial(&kind, -40, 40, seed).unwrap();
            let mut h = h0.clone();
            let mut d = WaitingTimeDynamics::new(&field, &h);
            for t in 1..=12u64 {
                d.step(&mut h);
                for j in -5..=5i64 {
                    let hj = h.at(j).unwrap();
                    for m in (h0.at(j).unwrap()..hj + 6).filter(|m| (m - j) % 2 == 0) {
                        let g = lpp_passage(&h0, &field, j, m).unwrap();
                        let le = matches!(g, Passage::Finite(v) if v <= t as i64);
                        assert_eq!(hj > m, le, "seed {seed} t {t} j {j} m {m}");
                    }
                }
            }
        }
    }
}
