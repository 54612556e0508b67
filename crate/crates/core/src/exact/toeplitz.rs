//! Exact CDF of point-to-point LPP with i.i.d. geometric weights on an
//! `M × N` block of sites: `P(G ≤ n) = (1 − q)^{MN} D_n(φ)` where `D_n` is the
//! `n × n` Toeplitz determinant of `φ(z) = (1 + √q z)^M (1 + √q/z)^N`.
//!
//! The leading minors of one Toeplitz matrix are the running products of the
//! pivots of unpivoted elimination, so a single `O(n³)` pass yields the whole
//! CDF up to `n`. Every minor is a probability times `(1 − q)^{−MN}`, hence
//! positive, and no pivoting is needed in exact arithmetic. The entries and
//! minors span many orders of magnitude, so the elimination runs in binary
//! floating point with enough bits to absorb the cancellation.

use crate::error::{Error, Result};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::UBig;

type F = FBig<HalfEven, 2>;

/// Coefficients of `φ(z) = (1 + √q z)^M (1 + √q/z)^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToeplitzSymbol {
    pub m: u32,
    pub n: u32,
    pub q: f64,
}

impl ToeplitzSymbol {
    pub fn new(m: u32, n: u32, q: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Parameter(format!("block {m}×{n} must be nonempty")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Parameter(format!("q = {q} not in (0, 1)")));
        }
        Ok(ToeplitzSymbol { m, n, q })
    }

    /// Working precision in bits. The largest coefficient is at most
    /// `(1 + √q)^{M+N}` and the smallest minor ratio at least `(1 − √q)^{M+N}`,
    /// so this many bits beyond a 96-bit guard keep the pivots accurate.
    pub fn precision(&self) -> usize {
        let r = self.q.sqrt();
        let span = (self.m + self.n) as f64 * ((1.0 + r) / (1.0 - r)).log2();
        (span.ceil() as usize + 96).max(128)
    }

    /// `c_k = Σ_l C(M, k + l) C(N, l) √q^{k + 2l}` for `k ∈ [−N, M]`, at the given
    /// precision.
    fn coefficients(&self, prec: usize) -> Vec<F> {
        let (m, n) = (self.m as i64, self.n as i64);
        let bm = binomial_row(self.m);
        let bn = binomial_row(self.n);
        let r = to_big(self.q, prec).sqrt();
        let max_pow = (m + n) as usize;
        let mut pows = Vec::with_capacity(max_pow + 1);
        pows.push(to_big(1.0, prec));
        for p in 1..=max_pow {
            let next = &pows[p - 1] * &r;
            pows.push(next);
        }
        (-n..=m)
            .map(|k| {
                let mut acc = to_big(0.0, prec);
                for l in 0..=n {
                    let a = k + l;
                    if a < 0 || a > m {
                        continue;
                    }
                    let b = F::from(&bm[a as usize] * &bn[l as usize]).with_precision(prec).value();
                    acc += b * &pows[(k + 2 * l) as usize];
                }
                acc
            })
            .collect()
    }

    /// Coefficient `c_k` in double precision (zero outside `[−N, M]`).
    pub fn coefficient(&self, k: i64) -> f64 {
        if k < -(self.n as i64) || k > self.m as i64 {
            return 0.0;
        }
        let c = self.coefficients(self.precision());
        c[(k + self.n as i64) as usize].to_f64().value()
    }
}

fn to_big(x: f64, prec: usize) -> F {
    F::try_from(x).expect("finite").with_precision(prec).value()
}

fn binomial_row(n: u32) -> Vec<UBig> {
    let mut row = vec![UBig::ONE];
    for k in 1..=n as u64 {
        let prev = row[(k - 1) as usize].clone();
        row.push(prev * UBig::from(n as u64 - k + 1) / UBig::from(k));
    }
    row
}

/// `P(G ≤ k)` for `k = 0, …, n_max`, where `G` is the last passage time over an
/// `m × n` block of sites.
pub fn toeplitz_cdf_table(m: u32, n: u32, q: f64, n_max: usize) -> Result<Vec<f64>> {
    let sym = ToeplitzSymbol::new(m, n, q)?;
    let prec = sym.precision();
    let coeffs = sym.coefficients(prec);
    let zero = to_big(0.0, prec);
    let entry = |d: i64| -> F {
        if d < -(n as i64) || d > m as i64 {
            zero.clone()
        } else {
            coeffs[(d + n as i64) as usize].clone()
        }
    };
    let size = n_max;
    let mut a: Vec<Vec<F>> = (0..size).map(|j| (0..size).map(|k| entry(j as i64 - k as i64)).collect()).collect();
    let prefactor = (to_big(1.0, prec) - to_big(q, prec)).powi((m as u64 * n as u64).into());
    let mut out = Vec::with_capacity(n_max + 1);
    let mut minor = prefactor;
    out.push(minor.to_f64().value());
    for p in 0..size {
        let pivot = a[p][p].clone();
        if pivot <= zero {
            return Err(Error::Convergence(format!(
                "nonpositive pivot at step {p}; precision {prec} bits too low"
            )));
        }
        minor *= &pivot;
        out.push(minor.to_f64().value().clamp(0.0, 1.0));
        let (head, tail) = a.split_at_mut(p + 1);
        let row_p = &head[p];
        for row in tail.iter_mut() {
            if row[p] == zero {
                continue;
            }
            let factor = &row[p] / &pivot;
            for j in p + 1..size {
                if row_p[j] != zero {
                    let t = &factor * &row_p[j];
                    row[j] -= t;
                }
            }
        }
    }
    Ok(out)
}

/// `P(G ≤ n)` over an `m × n_sites` block; `D_0 = 1`.
pub fn toeplitz_cdf(m: u32, n_sites: u32, q: f64, n: usize) -> Result<f64> {
    Ok(toeplitz_cdf_table(m, n_sites, q, n)?[n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site() {
        let t = toeplitz_cdf_table(1, 1, 0.25, 3).unwrap();
        assert!((t[0] - 0.75).abs() < 1e-15);
        assert!((t[1] - 0.9375).abs() < 1e-15);
        // Geometric: P(w ≤ k) = 1 − q^{k+1}.
        assert!((t[3] - (1.0 - 0.25f64.powi(4))).abs() < 1e-15);
    }

    #[test]
    fn coefficients_sum_to_symbol_at_one() {
        let s = ToeplitzSymbol::new(3, 5, 0.3).unwrap();
        let total: f64 = (-5..=3).map(|k| s.coefficient(k)).sum();
        assert!((total - (1.0 + 0.3f64.sqrt()).powi(8)).abs() < 1e-12);
        assert_eq!(s.coefficient(4), 0.0);
    }

    #[test]
    fn small_blocks_at_q_03() {
        let t = toeplitz_cdf_table(2, 2, 0.3, 5).unwrap();
        let masses = [0.2401, 0.309729, 0.222357, 0.123735, 0.059756];
        for (k, &p) in masses.iter().enumerate() {
            let got = t[k] - if k > 0 { t[k - 1] } else { 0.0 };
            assert!((got - p).abs() < 1e-6, "k = {k}: {got}");
        }
    }

    #[test]
    fn transposition_symmetry() {
        let a = toeplitz_cdf_table(3, 7, 0.4, 30).unwrap();
        let b = toeplitz_cdf_table(7, 3, 0.4, 30).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
