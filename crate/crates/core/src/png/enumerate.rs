//! Exact transfer-matrix enumeration of small PNG ensembles.
//!
//! The state at time `k` is the tuple `(h_0(k), …, h_{N−1}(k))`; the weight
//! and the ordering constraints only couple consecutive times, so the measure
//! is a Markov chain in `k`. Values are truncated to `h_0 ≤ cap`.

use super::PngConfig;
use crate::error::{Error, Result};
use rand::Rng;

/// `P(S ≥ c)` where `S` is a sum of `sites` i.i.d. weights with
/// `P(w = k) = (1 − q)q^k`.
pub fn negative_binomial_tail(sites: u64, q: f64, c: u64) -> f64 {
    if c == 0 {
        return 1.0;
    }
    if sites == 0 {
        return 0.0;
    }
    let n = sites as f64;
    let mut term = (1.0 - q).powf(n);
    for s in 1..=c {
        term *= q * (s as f64 + n - 1.0) / s as f64;
    }
    let mut sum = 0.0;
    let mut s = c;
    loop {
        sum += term;
        s += 1;
        let ratio = q * (s as f64 + n - 1.0) / s as f64;
        term *= ratio;
        if ratio < 1.0 && term <= 1e-18 * sum {
            break;
        }
    }
    sum
}

#[derive(Debug, Clone)]
pub struct PngOracle {
    n: usize,
    q: f64,
    cap: i64,
    states: Vec<Vec<i64>>,
    ground: usize,
    /// `(from, to, weight)` for even and odd times.
    moves: [Vec<(usize, usize, f64)>; 2],
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
}

fn decreasing_tuples(n: usize, cap: i64) -> Vec<Vec<i64>> {
    fn rec(i: usize, n: usize, above: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for v in -(i as i64)..above {
            cur.push(v);
            rec(i + 1, n, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, cap + 1, &mut Vec::new(), &mut out);
    out
}

impl PngOracle {
    pub fn new(n: usize, q: f64, cap: i64) -> Result<Self> {
        if n == 0 || cap < 0 || !(q > 0.0 && q < 1.0) {
            return Err(Error::Parameter(format!("oracle needs N ≥ 1, cap ≥ 0, q ∈ (0, 1): {n}, {cap}, {q}")));
        }
        let states = decreasing_tuples(n, cap);
        if states.len() > 5000 {
            return Err(Error::Parameter(format!("{} states is too many to enumerate", states.len())));
        }
        let ground = states.iter().position(|s| s.iter().enumerate().all(|(i, &v)| v == -(i as i64))).unwrap();
        let sq = q.sqrt();
        let norm = (1.0 - q).powf(0.5 * n as f64);
        let frozen = -(n as i64);
        let mut moves: [Vec<(usize, usize, f64)>; 2] = [Vec::new(), Vec::new()];
        for (a, y) in states.iter().enumerate() {
            for (b, x) in states.iter().enumerate() {
                let ordered = (0..n).all(|i| {
                    let (lx, ly) = if i + 1 < n { (x[i + 1], y[i + 1]) } else { (frozen, frozen) };
                    lx.max(ly) < x[i].min(y[i])
                });
                if !ordered {
                    continue;
                }
                let w = norm * sq.powi(x.iter().zip(y).map(|(u, v)| (u - v).abs() as i32).sum());
                if (0..n).all(|i| x[i] >= y[i]) {
                    moves[0].push((a, b, w));
                }
                if (0..n).all(|i| x[i] <= y[i]) {
                    moves[1].push((a, b, w));
                }
            }
        }
        let steps = 4 * n - 2;
        let k0 = 1 - 2 * n as i64;
        let parity = |s: usize| ((k0 + s as i64).rem_euclid(2)) as usize;
        let m = states.len();
        let mut alpha = vec![vec![0.0; m]; steps + 1];
        alpha[0][ground] = 1.0;
        for s in 1..=steps {
            let (prev, cur) = alpha.split_at_mut(s);
            for &(a, b, w) in &moves[parity(s)] {
                cur[0][b] += prev[s - 1][a] * w;
            }
        }
        let mut beta = vec![vec![0.0; m]; steps + 1];
        beta[steps][ground] = 1.0;
        for s in (0..steps).rev() {
            let (cur, next) = beta.split_at_mut(s + 1);
            for &(a, b, w) in &moves[parity(s + 1)] {
                cur[s][a] += next[0][b] * w;
            }
        }
        Ok(PngOracle { n, q, cap, states, ground, moves, alpha, beta })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Total weight of the truncated state space.
    pub fn total_weight(&self) -> f64 {
        self.alpha[self.alpha.len() - 1][self.ground]
    }

    /// Certified bound on the weight lost to truncation: the union bound
    /// `Σ_k P(h₀(2k) > cap)`, each term bounded by the total weight of the
    /// `(N + k)(N − k)` sites whose last passage time `h₀(2k)` is.
    pub fn tail_bound(&self) -> f64 {
        let n = self.n as i64;
        (1 - n..n).map(|k| negative_binomial_tail(((n + k) * (n - k)) as u64, self.q, self.cap as u64 + 1)).sum()
    }

    fn index(&self, k: i64) -> Result<usize> {
        let k0 = 1 - 2 * self.n as i64;
        if k < k0 || k > -k0 {
            return Err(Error::Domain(format!("time {k} outside [{k0}, {}]", -k0)));
        }
        Ok((k - k0) as usize)
    }

    /// Law of the state tuple at time `k`, normalized over the truncated space.
    pub fn state_marginal(&self, k: i64) -> Result<Vec<(Vec<i64>, f64)>> {
        let s = self.index(k)?;
        let z = self.total_weight();
        Ok(self
            .states
            .iter()
            .enumerate()
            .map(|(j, st)| (st.clone(), self.alpha[s][j] * self.beta[s][j] / z))
            .filter(|p| p.1 > 0.0)
            .collect())
    }

    /// `P(h_i(k) = v)` for `v = −i, …, cap`, indexed by `v + i`.
    pub fn marginal(&self, i: usize, k: i64) -> Result<Vec<f64>> {
        if i >= self.n {
            return Err(Error::Domain(format!("line {i} is frozen")));
        }
        let mut out = vec![0.0; (self.cap + i as i64 + 1) as usize];
        for (st, p) in self.state_marginal(k)? {
            out[(st[i] + i as i64) as usize] += p;
        }
        Ok(out)
    }

    /// Exact sample from the truncated law.
    pub fn sample(&self, rng: &mut impl Rng) -> PngConfig {
        let n = self.n;
        let steps = 4 * n - 2;
        let k0 = 1 - 2 * n as i64;
        let mut cfg = PngConfig::ground(n).expect("n ≥ 1");
        let mut x = self.ground;
        let mut w = vec![0.0; self.states.len()];
        for s in (2..=steps).rev() {
            w.iter_mut().for_each(|v| *v = 0.0);
            let parity = ((k0 + s as i64).rem_euclid(2)) as usize;
            for &(a, b, wt) in &self.moves[parity] {
                if b == x {
                    w[a] += self.alpha[s - 1][a] * wt;
                }
            }
            let total: f64 = w.iter().sum();
            let mut u = rng.random::<f64>() * total;
            let mut pick = 0;
            for (j, &v) in w.iter().enumerate() {
                if v > 0.0 {
                    pick = j;
                    if u < v {
                        break;
                    }
                    u -= v;
                }
            }
            x = pick;
            for (i, &v) in self.states[x].iter().enumerate() {
                cfg.set(i, k0 + s as i64 - 1, v);
            }
        }
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::chacha;

    #[test]
    fn nb_tail_single_site_is_geometric() {
        assert!((negative_binomial_tail(1, 0.3, 4) - 0.3f64.powi(4)).abs() < 1e-15);
        assert_eq!(negative_binomial_tail(5, 0.3, 0), 1.0);
        let exact: f64 = 1.0 - (0..3).map(|s| (s + 1) as f64 * 0.49 * 0.3f64.powi(s)).sum::<f64>();
        assert!((negative_binomial_tail(2, 0.3, 3) - exact).abs() < 1e-14);
    }

    #[test]
    fn n1_top_line_is_one_weight() {
        let o = PngOracle::new(1, 0.25, 5).unwrap();
        let m = o.marginal(0, 0).unwrap();
        let z = o.total_weight();
        for (v, p) in m.iter().enumerate() {
            assert!((p * z - 0.75 * 0.25f64.powi(v as i32)).abs() < 1e-15);
        }
        assert!((z + o.tail_bound() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn samples_are_valid() {
        let o = PngOracle::new(2, 0.3, 8).unwrap();
        let mut r = chacha(5);
        for _ in 0..200 {
            o.sample(&mut r).validate().unwrap();
        }
    }
}
