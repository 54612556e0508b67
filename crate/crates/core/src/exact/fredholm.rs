//! Fredholm determinants by Nyström discretization: `det(I − K)` on an
//! interval is approximated by `det(δ_ij − √w_i K(x_i, x_j) √w_j)` on
//! Gauss–Legendre nodes, which converges exponentially for analytic kernels.

use crate::error::{Error, Result};
use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss–Legendre nodes and weights on `[−1, 1]`, memoized per order.
fn reference_rule(m: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache").get(&m) {
        return r.clone();
    }
    let gl = GaussLegendre::new(NonZeroUsize::new(m).expect("positive order"));
    let mut rule: Vec<(f64, f64)> = gl.iter().map(|&(x, w)| (x, w)).collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rule = Arc::new(rule);
    cache.lock().expect("rule cache").insert(m, rule.clone());
    rule
}

/// `m`-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre(m: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    reference_rule(m).iter().map(|&(x, w)| (mid + half * x, half * w)).collect()
}

/// Composite rule: `panels` equal panels of `m` nodes each on `[a, b]`.
pub fn composite_gauss_legendre(m: usize, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    (0..panels).flat_map(|p| gauss_legendre(m, a + p as f64 * h, a + (p + 1) as f64 * h)).collect()
}

/// `det(I − A)` for a dense matrix via LU.
pub fn det_identity_minus(a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let m = DMatrix::<f64>::identity(n, n) - a;
    m.lu().determinant()
}

/// `det(I − K)` on `L²(a, b)` with an `m`-node rule.
pub fn fredholm_det(kernel: impl Fn(f64, f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let rule = gauss_legendre(m, a, b);
    let sw: Vec<f64> = rule.iter().map(|r| r.1.sqrt()).collect();
    let mat = DMatrix::from_fn(m, m, |i, j| sw[i] * kernel(rule[i].0, rule[j].0) * sw[j]);
    det_identity_minus(mat)
}

/// Evaluate at `m` and `2m` nodes, doubling until consecutive values agree
/// within `tol` or `max_nodes` is exceeded.
pub fn converged(eval: impl Fn(usize) -> f64, m0: usize, max_nodes: usize, tol: f64) -> Result<(f64, usize)> {
    let mut m = m0;
    let mut prev = eval(m);
    while 2 * m <= max_nodes {
        let next = eval(2 * m);
        if (next - prev).abs() <= tol {
            return Ok((next, 2 * m));
        }
        prev = next;
        m *= 2;
    }
    Err(Error::Convergence(format!("Nyström value not stable to {tol} at {m} nodes")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials() {
        let r = gauss_legendre(10, -2.0, 3.0);
        let s: f64 = r.iter().map(|&(x, w)| w * x.powi(7)).sum();
        let exact = (3f64.powi(8) - 2f64.powi(8)) / 8.0;
        assert!((s - exact).abs() < 1e-9 * exact.abs());
        let c = composite_gauss_legendre(4, 0.0, 1.0, 5);
        assert_eq!(c.len(), 20);
        assert!((c.iter().map(|r| r.1).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_kernel() {
        // det(I − λ e^{x+y}) on (0, 1) equals 1 − λ(e² − 1)/2.
        let lam = 0.1;
        let d = fredholm_det(|x, y| lam * (x + y).exp(), 0.0, 1.0, 20);
        assert!((d - (1.0 - lam * (1f64.exp().powi(2) - 1.0) / 2.0)).abs() < 1e-13);
    }
}
