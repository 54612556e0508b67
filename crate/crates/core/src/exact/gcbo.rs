//! Fredholm-determinant form of the same finite-size CDF, used only as an
//! independent cross-check of the Toeplitz route at small sizes:
//! `P(G ≤ n) = det(1 − K_n)` on `ℓ²{n, n + 1, …}` with `K_n = U·V`,
//!
//! - `U(i, k) = Σ_a C(N, a)(−√q)^a C(M + a + i + k − 1, a + i + k) √q^{a + i + k}`,
//! - `V(k, j) = Σ_b C(M, b)(−√q)^b C(N + b + j + k − 1, b + j + k) √q^{b + j + k}`,
//!
//! with `k ≥ 1`. Both index sets are truncated where `√q^L L^{M+N}` is
//! negligible.

use super::fredholm::det_identity_minus;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

fn binom(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn series(outer: u32, inner: u32, r: f64, i: i64, k: i64) -> f64 {
    (0..=outer as i64)
        .map(|a| {
            let e = a + i + k;
            binom(outer as i64, a) * (-r).powi(a as i32) * binom(inner as i64 + e - 1, e) * r.powi(e as i32)
        })
        .sum()
}

/// Truncation length so that `√q^L · L^{M+N} < 10⁻¹⁸`.
pub fn default_cut(m: u32, n: u32, q: f64) -> usize {
    let lr = -q.sqrt().ln();
    let mut l = 16.0f64;
    for _ in 0..50 {
        l = (41.5 + (m + n) as f64 * l.ln()) / lr;
    }
    l.ceil() as usize
}

/// `P(G ≤ n)` over an `m × n_sites` block via the truncated Fredholm form.
pub fn gcbo_cdf(m: u32, n_sites: u32, q: f64, n: usize, cut: usize) -> Result<f64> {
    if m == 0 || n_sites == 0 || !(q > 0.0 && q < 1.0) {
        return Err(Error::Parameter(format!("block {m}×{n_sites}, q = {q}")));
    }
    if m + n_sites > 40 {
        return Err(Error::Domain("cross-check limited to M + N ≤ 40".into()));
    }
    let r = q.sqrt();
    let u = DMatrix::from_fn(cut, cut, |i, k| series(n_sites, m, r, (n + i) as i64, k as i64 + 1));
    let v = DMatrix::from_fn(cut, cut, |k, j| series(m, n_sites, r, (n + j) as i64, k as i64 + 1));
    Ok(det_identity_minus(u * v).clamp(0.0, 1.0))
}
