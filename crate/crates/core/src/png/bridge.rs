//! Single-line PNG bridges: the coupled propose-and-stay chains behind the
//! floor comparison, and exact free bridges via a tilted two-sided walk.
//!
//! A bridge on `[t₁, t₃]` with `t₁, t₃` even fixes `h(t₁) = a₁`, `h(t₃) = a₃`.
//! Over each pair of times `(2m + 1, 2m + 2)` the free line moves by `U − D`
//! with `U, D` independent and `P(· = k) ∝ √q^k`, so free bridges are random
//! walk bridges with two-sided geometric steps.

use crate::error::{Error, Result};
use crate::rng;
use crate::stats::{wilson, Proportion};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BridgeSpec {
    pub t1: i64,
    pub t3: i64,
    pub a1: i64,
    pub a3: i64,
}

impl BridgeSpec {
    pub fn new(t1: i64, t3: i64, a1: i64, a3: i64) -> Result<Self> {
        if t1.rem_euclid(2) != 0 || t3.rem_euclid(2) != 0 || t3 <= t1 {
            return Err(Error::Parameter(format!("bridge needs even t₁ < t₃, got [{t1}, {t3}]")));
        }
        Ok(BridgeSpec { t1, t3, a1, a3 })
    }

    /// Two-time steps `(t₃ − t₁)/2`.
    pub fn steps(&self) -> usize {
        ((self.t3 - self.t1) / 2) as usize
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingResult {
    pub floored: Proportion,
    pub free: Proportion,
    pub diff: f64,
    /// Standard error of the paired difference.
    pub se_diff: f64,
    /// Replicas where the floored line ended below the free one anywhere.
    pub coupling_violations: u64,
}

/// `max(f(t − 1), f(t)) < min(h(t − 1), h(t))` at every time touching `t`.
fn floor_ok(h: &[i64], floor: &[i64], t: usize) -> bool {
    (t.max(1)..=(t + 1).min(h.len() - 1)).all(|s| floor[s - 1].max(floor[s]) < h[s - 1].min(h[s]))
}

/// Estimates `P(h(t₂) ≥ a₂)` for the bridge conditioned to stay above `floor`
/// and `P(g(t₂) ≥ a₂)` for the free bridge. The free chain starts from an
/// exact free bridge `g₀`, the floored one from `max(g₀, lowest line above the
/// floor)`, and the two share every clock ring and geometric draw; at an even site
/// the line moves to `max(neighbours) + r`, at an odd site to
/// `min(neighbours) − r`, and the floored chain stays put when that would
/// touch the floor. Since `h ≥ g` at the start, the coupling keeps it so.
///
/// `floor[t − t₁]` for `t ∈ [t₁, t₃]`; `None` means no floor.
#[allow(clippy::too_many_arguments)]
pub fn monotone_coupling_experiment(
    spec: BridgeSpec,
    t2: i64,
    a2: i64,
    floor: Option<&[i64]>,
    q: f64,
    samples: u64,
    sweeps: usize,
    seed: u64,
) -> Result<CouplingResult> {
    if !(q > 0.0 && q < 1.0) || samples == 0 {
        return Err(Error::Parameter(format!("q = {q}, {samples} samples")));
    }
    let len = (spec.t3 - spec.t1) as usize + 1;
    if t2 <= spec.t1 || t2 >= spec.t3 {
        return Err(Error::Parameter(format!("t₂ = {t2} not inside ({}, {})", spec.t1, spec.t3)));
    }
    let floor: Vec<i64> = match floor {
        Some(f) if f.len() != len => return Err(Error::Config(format!("floor needs {len} samples"))),
        Some(f) => f.to_vec(),
        None => vec![i64::MIN / 4; len],
    };
    let fmax = floor[1..len - 1].iter().copied().max().unwrap_or(i64::MIN / 4);
    let top = spec.a1.max(spec.a3).max(fmax + 1);
    let mut init = vec![top; len];
    init[0] = spec.a1;
    init[len - 1] = spec.a3;
    init[1] = init[1].min(spec.a1);
    init[len - 2] = init[len - 2].min(spec.a3);
    if !(1..len).all(|t| floor_ok(&init, &floor, t)) {
        return Err(Error::Config(format!(
            "infeasible endpoint data: bridge {}→{} cannot clear the floor",
            spec.a1, spec.a3
        )));
    }
    let lowest = floor.iter().any(|&f| f > i64::MIN / 4).then(|| lowest_above_floor(&init, &floor));
    let updates = sweeps * (len - 2).max(1);
    let j2 = (t2 - spec.t1) as usize;
    let sd = rng::stream_seed(seed, "bridge-coupling");
    let outcomes: Result<Vec<(bool, bool, bool)>> = (0..samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::chacha(rng::replica_seed(sd, r));
            let mut g = sample_free_bridge(spec, q, &mut rng)?;
            let mut h = match &lowest {
                Some(low) => g.iter().zip(low).map(|(a, b)| *a.max(b)).collect(),
                None => g.clone(),
            };
            debug_assert!((1..len).all(|t| floor_ok(&h, &floor, t)));
            for _ in 0..updates {
                if len < 3 {
                    break;
                }
                let j = rng.random_range(1..len - 1);
                let u: f64 = 1.0 - rng.random::<f64>();
                let step = (u.ln() / q.ln()).floor() as i64;
                let even = (spec.t1 + j as i64) % 2 == 0;
                let propose =
                    |l: &[i64]| if even { l[j - 1].max(l[j + 1]) + step } else { l[j - 1].min(l[j + 1]) - step };
                g[j] = propose(&g);
                let old = h[j];
                h[j] = propose(&h);
                if !floor_ok(&h, &floor, j) {
                    h[j] = old;
                }
            }
            Ok((h[j2] >= a2, g[j2] >= a2, h.iter().zip(&g).any(|(a, b)| a < b)))
        })
        .collect();
    let outcomes = outcomes?;
    let hits_h = outcomes.iter().filter(|o| o.0).count() as u64;
    let hits_g = outcomes.iter().filter(|o| o.1).count() as u64;
    let n = samples as f64;
    let d: Vec<f64> = outcomes.iter().map(|o| o.0 as i32 as f64 - o.1 as i32 as f64).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(CouplingResult {
        floored: wilson(hits_h, samples, 1.96),
        free: wilson(hits_g, samples, 1.96),
        diff: mean,
        se_diff: (var / n).sqrt(),
        coupling_violations: outcomes.iter().filter(|o| o.2).count() as u64,
    })
}

/// The lowest line above the floor with the same endpoints: odd sites drop to
/// just above the floor, even sites to the larger neighbour, until nothing
/// moves. Admissible lines are closed under pointwise minimum, so this is the
/// minimum of the set.
fn lowest_above_floor(start: &[i64], floor: &[i64]) -> Vec<i64> {
    let len = start.len();
    let mut h = start.to_vec();
    loop {
        let mut moved = false;
        for j in 1..len - 1 {
            let fb = floor[j - 1].max(floor[j]).max(floor[j + 1]);
            let v = if j % 2 == 1 { (fb + 1).min(h[j - 1].min(h[j + 1])) } else { h[j - 1].max(h[j + 1]).max(fb + 1) };
            if v < h[j] {
                h[j] = v;
                moved = true;
            }
        }
        if !moved {
            return h;
        }
    }
}

/// Exact free bridge line on `[t₁, t₃]`, indexed `t − t₁`. The net moves
/// `X = U − D` of each time pair come from the tilted walk conditioned on its
/// endpoint; given `X`, `U = max(0, X) + Geom(q)` and `D = U − X`.
pub fn sample_free_bridge(spec: BridgeSpec, q: f64, rng: &mut impl Rng) -> Result<Vec<i64>> {
    let n = spec.steps();
    let rise = spec.a3 - spec.a1;
    let step = TiltedStep { q, p: solve_tilt(q, rise as f64 / n as f64)? };
    let xs = conditioned_walk(&step, n, rise, rng).0;
    let mut line = Vec::with_capacity(2 * n + 1);
    let mut h = spec.a1;
    line.push(h);
    for x in xs {
        let u: f64 = 1.0 - rng.random::<f64>();
        let up = x.max(0) + (u.ln() / q.ln()).floor() as i64;
        h -= up - x;
        line.push(h);
        h += up;
        line.push(h);
    }
    Ok(line)
}

/// Tilted-step walk of `n` steps conditioned to end at `rise`, by rejection;
/// also returns the number of proposals.
fn conditioned_walk(step: &TiltedStep, n: usize, rise: i64, rng: &mut impl Rng) -> (Vec<i64>, u64) {
    let mut xs = vec![0i64; n];
    let mut tries = 0u64;
    loop {
        tries += 1;
        for x in xs.iter_mut() {
            *x = step.sample(rng);
        }
        if xs.iter().sum::<i64>() == rise {
            return (xs, tries);
        }
    }
}

/// Mean of the two-sided step tilted by `p^k`:
/// `(p² − 1)√q / ((1 − p√q)(p − √q))`.
pub fn tilted_mean(q: f64, p: f64) -> f64 {
    let r = q.sqrt();
    (p * p - 1.0) * r / ((1.0 - p * r) * (p - r))
}

/// `p ∈ (√q, 1/√q)` whose tilted step has mean `slope`, by bisection; the mean
/// increases from `−∞` to `∞` across the interval.
pub fn solve_tilt(q: f64, slope: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) || !slope.is_finite() {
        return Err(Error::Parameter(format!("q = {q}, slope = {slope}")));
    }
    let r = q.sqrt();
    let (mut lo, mut hi) = (r, 1.0 / r);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tilted_mean(q, mid) < slope {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Two-sided geometric step `P(k) ∝ √q^{|k|} p^k`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TiltedStep {
    pub q: f64,
    pub p: f64,
}

impl TiltedStep {
    pub fn sample(&self, rng: &mut impl Rng) -> i64 {
        let r = self.q.sqrt();
        let (a, b) = (self.p * r, r / self.p);
        let right = 1.0 / (1.0 - a);
        let left = b / (1.0 - b);
        let u: f64 = rng.random();
        let v: f64 = 1.0 - rng.random::<f64>();
        if u * (right + left) < right {
            (v.ln() / a.ln()).floor() as i64
        } else {
            -1 - (v.ln() / b.ln()).floor() as i64
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MidpointResult {
    /// Collinear level at `t₂`.
    pub a2: f64,
    pub tilt: f64,
    pub estimate: Proportion,
    /// Fraction of proposed walks that hit the endpoint.
    pub acceptance: f64,
}

/// `P(g(t₂) ≥ a₂)` for the free bridge, `a₂` on the chord. Walks of tilted
/// steps are proposed until one ends at `a₃`; the tilt leaves the bridge law
/// unchanged and makes the endpoint typical.
pub fn midpoint_probability(spec: BridgeSpec, t2: i64, q: f64, samples: u64, seed: u64) -> Result<MidpointResult> {
    if t2 <= spec.t1 || t2 >= spec.t3 || (t2 - spec.t1) % 2 != 0 {
        return Err(Error::Parameter(format!("t₂ = {t2} must be even and inside ({}, {})", spec.t1, spec.t3)));
    }
    if samples == 0 {
        return Err(Error::Parameter("no samples".into()));
    }
    let n = spec.steps();
    let m = ((t2 - spec.t1) / 2) as usize;
    let rise = spec.a3 - spec.a1;
    let a2 = spec.a1 as f64 + rise as f64 * m as f64 / n as f64;
    let p = solve_tilt(q, rise as f64 / n as f64)?;
    let step = TiltedStep { q, p };
    let sd = rng::stream_seed(seed, "bridge-midpoint");
    let out: Vec<(bool, u64)> = (0..samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::chacha(rng::replica_seed(sd, r));
            let (xs, tries) = conditioned_walk(&step, n, rise, &mut rng);
            let at_m: i64 = xs[..m].iter().sum();
            ((spec.a1 + at_m) as f64 >= a2, tries)
        })
        .collect();
    let hits = out.iter().filter(|o| o.0).count() as u64;
    let tries: u64 = out.iter().map(|o| o.1).sum();
    Ok(MidpointResult {
        a2,
        tilt: p,
        estimate: wilson(hits, samples, 1.96),
        acceptance: samples as f64 / tries as f64,
    })
}
