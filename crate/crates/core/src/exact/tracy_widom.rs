//! Tracy–Widom laws and the two-time Airy process distribution.
//!
//! - `F₂(s) = det(I − K_Ai)` on `L²(s, ∞)`, `K_Ai(x, y) = (Ai(x)Ai′(y) − Ai′(x)Ai(y))/(x − y)`.
//! - `F₁(s) = det(I − K₁)` on `L²(s, ∞)`, `K₁(x, y) = ½ Ai((x + y)/2)`.
//!
//! The half-lines are cut where the kernels are below `e^{−80}`.

use super::airy::airy_pair;
use super::fredholm::{composite_gauss_legendre, converged, det_identity_minus, fredholm_det, gauss_legendre};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use std::f64::consts::PI;

pub const DEFAULT_NODES: usize = 80;
pub const MAX_NODES: usize = 320;
pub const TOLERANCE: f64 = 1e-8;

pub fn airy_kernel(x: f64, y: f64) -> f64 {
    let (ax, apx) = airy_pair(x);
    if x == y {
        return apx * apx - x * ax * ax;
    }
    let (ay, apy) = airy_pair(y);
    (ax * apy - apx * ay) / (x - y)
}

fn check_range(x: f64) -> Result<()> {
    if !(-12.0..=8.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [−12, 8]")));
    }
    Ok(())
}

/// `F₂(s)` with a fixed node count.
pub fn gue_cdf_nodes(s: f64, m: usize) -> f64 {
    let b = s.max(0.0) + 16.0;
    fredholm_det(airy_kernel, s, b, m).clamp(0.0, 1.0)
}

/// `F₁(s)` with a fixed node count.
pub fn goe_cdf_nodes(s: f64, m: usize) -> f64 {
    let b = s.max(0.0) + 32.0;
    fredholm_det(|x, y| 0.5 * airy_pair(0.5 * (x + y)).0, s, b, m).clamp(0.0, 1.0)
}

/// GUE Tracy–Widom CDF on `[−12, 8]`, doubled from 80 nodes until stable to
/// `10⁻⁸`.
pub fn tracy_widom_gue_cdf(x: f64) -> Result<f64> {
    check_range(x)?;
    Ok(converged(|m| gue_cdf_nodes(x, m), DEFAULT_NODES, MAX_NODES, TOLERANCE)?.0)
}

/// GOE Tracy–Widom CDF on `[−12, 8]`.
pub fn tracy_widom_goe_cdf(x: f64) -> Result<f64> {
    check_range(x)?;
    Ok(converged(|m| goe_cdf_nodes(x, m), DEFAULT_NODES, MAX_NODES, TOLERANCE)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    Gue,
    Goe,
}

/// Mean and variance from `E X = b − ∫_a^b F` and `E X² = b² − 2∫_a^b xF`,
/// with `[a, b]` wide enough that `F(a)` and `1 − F(b)` are negligible.
/// Composite Gauss–Legendre on panels of width ½; `nodes` is the Nyström
/// order used for each CDF value.
pub fn moments(ensemble: Ensemble, nodes: usize) -> (f64, f64) {
    let (a, b) = match ensemble {
        Ensemble::Gue => (-14.0, 8.0),
        Ensemble::Goe => (-16.0, 12.0),
    };
    let panels = (2.0 * (b - a)) as usize;
    let rule = composite_gauss_legendre(10, a, b, panels);
    let (mut i0, mut i1) = (0.0, 0.0);
    for (x, w) in rule {
        let f = match ensemble {
            Ensemble::Gue => gue_cdf_nodes(x, nodes),
            Ensemble::Goe => goe_cdf_nodes(x, nodes),
        };
        i0 += w * f;
        i1 += w * x * f;
    }
    let mean = b - i0;
    let second = b * b - 2.0 * i1;
    (mean, second - mean * mean)
}

/// A CDF sampled on a uniform grid and interpolated linearly, for repeated
/// KS evaluations and inverse-transform sampling.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl TabulatedCdf {
    /// Grid `[−10, 10]` in steps of 0.01 with 60 Nyström nodes per value;
    /// the values are made nondecreasing by a running max.
    pub fn new(ensemble: Ensemble) -> Self {
        Self::with_grid(ensemble, -10.0, 10.0, 0.01, 60)
    }

    pub fn with_grid(ensemble: Ensemble, lo: f64, hi: f64, step: f64, nodes: usize) -> Self {
        let n = ((hi - lo) / step).round() as usize + 1;
        let mut values: Vec<f64> = (0..n)
            .map(|i| {
                let x = lo + step * i as f64;
                match ensemble {
                    Ensemble::Gue => gue_cdf_nodes(x, nodes),
                    Ensemble::Goe => goe_cdf_nodes(x, nodes),
                }
            })
            .collect();
        for i in 1..n {
            values[i] = values[i].max(values[i - 1]);
        }
        TabulatedCdf { lo, step, values }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.lo) / self.step;
        if t <= 0.0 {
            return self.values[0];
        }
        let i = t.floor() as usize;
        if i + 1 >= self.values.len() {
            return self.values[self.values.len() - 1];
        }
        let f = t - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    /// Smallest grid-interpolated `x` with `F(x) ≥ u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let v = &self.values;
        let j = v.partition_point(|&f| f < u);
        if j == 0 {
            return self.lo;
        }
        if j == v.len() {
            return self.lo + self.step * (v.len() - 1) as f64;
        }
        let (a, b) = (v[j - 1], v[j]);
        let f = if b > a { (u - a) / (b - a) } else { 1.0 };
        self.lo + self.step * (j as f64 - 1.0 + f)
    }
}

/// `∫ e^{−λ a} Ai(ξ_i + λ) Ai(ξ_j + λ) dλ` over a λ rule, for all pairs.
fn lambda_gram(xi: &[f64], eta: &[f64], rule: &[(f64, f64)], decay: f64) -> DMatrix<f64> {
    let n = rule.len();
    let a = DMatrix::from_fn(xi.len(), n, |i, k| {
        let (lam, w) = rule[k];
        w * (-decay * lam).exp() * airy_pair(xi[i] + lam).0
    });
    let b = DMatrix::from_fn(eta.len(), n, |j, k| airy_pair(eta[j] + rule[k].0).0);
    a * b.transpose()
}

/// Which representation of the backward (t < t′) kernel to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackwardForm {
    /// `−∫_{−∞}^0 e^{λτ} Ai Ai dλ`, well conditioned for `τ ≳ ½`.
    Direct,
    /// `∫_0^∞ e^{λτ} Ai Ai dλ − (4πτ)^{−1/2} exp(−(ξ − ξ′)²/(4τ) − τ(ξ + ξ′)/2 + τ³/12)`.
    Gaussian,
    /// Direct for `τ ≥ ½`, Gaussian below.
    Auto,
}

/// Two-time joint CDF `P(𝒜(t₁) ≤ x₁, 𝒜(t₂) ≤ x₂)` with `m` nodes per time.
///
/// At `t₁ = t₂` the block operator no longer represents the joint law, so the
/// one-time value `F₂(min(x₁, x₂))` is returned.
pub fn extended_airy_joint_nodes(t1: f64, x1: f64, t2: f64, x2: f64, m: usize, form: BackwardForm) -> f64 {
    if t1 == t2 {
        return gue_cdf_nodes(x1.min(x2), m);
    }
    let ((t1, x1), (t2, x2)) = if t1 < t2 { ((t1, x1), (t2, x2)) } else { ((t2, x2), (t1, x1)) };
    let tau = t2 - t1;
    let r1 = gauss_legendre(m, x1, x1.max(0.0) + 16.0);
    let r2 = gauss_legendre(m, x2, x2.max(0.0) + 16.0);
    let n1: Vec<f64> = r1.iter().map(|r| r.0).collect();
    let n2: Vec<f64> = r2.iter().map(|r| r.0).collect();
    let lo = x1.min(x2);
    // Forward block (t₂ ≥ t₁): ∫₀^∞ e^{−λτ} Ai Ai, cut where Ai is negligible.
    let lam_plus = (20.0 - lo).max(4.0);
    let plus = composite_gauss_legendre(16, 0.0, lam_plus, lam_plus.ceil() as usize);
    let forward = lambda_gram(&n2, &n1, &plus, tau);
    let use_direct = match form {
        BackwardForm::Direct => true,
        BackwardForm::Gaussian => false,
        BackwardForm::Auto => tau >= 0.5,
    };
    let backward = if use_direct {
        let lam_minus = 40.0 / tau;
        let minus = composite_gauss_legendre(16, -lam_minus, 0.0, lam_minus.ceil() as usize);
        -lambda_gram(&n1, &n2, &minus, -tau)
    } else {
        let grow = lambda_gram(&n1, &n2, &plus, -tau);
        DMatrix::from_fn(m, m, |i, j| {
            let (a, b) = (n1[i], n2[j]);
            let g = (-(a - b).powi(2) / (4.0 * tau) - tau * (a + b) / 2.0 + tau.powi(3) / 12.0).exp()
                / (4.0 * PI * tau).sqrt();
            grow[(i, j)] - g
        })
    };
    let sw1: Vec<f64> = r1.iter().map(|r| r.1.sqrt()).collect();
    let sw2: Vec<f64> = r2.iter().map(|r| r.1.sqrt()).collect();
    let mat = DMatrix::from_fn(2 * m, 2 * m, |i, j| match (i < m, j < m) {
        (true, true) => sw1[i] * airy_kernel(n1[i], n1[j]) * sw1[j],
        (false, false) => sw2[i - m] * airy_kernel(n2[i - m], n2[j - m]) * sw2[j - m],
        (true, false) => sw1[i] * backward[(i, j - m)] * sw2[j - m],
        (false, true) => sw2[i - m] * forward[(i - m, j)] * sw1[j],
    });
    det_identity_minus(mat).clamp(0.0, 1.0)
}

/// Two-time joint CDF, doubled from 40 nodes per time until stable to `10⁻⁸`.
pub fn extended_airy_joint(t1: f64, x1: f64, t2: f64, x2: f64) -> Result<f64> {
    check_range(x1)?;
    check_range(x2)?;
    Ok(converged(|m| extended_airy_joint_nodes(t1, x1, t2, x2, m, BackwardForm::Auto), 40, 160, TOLERANCE)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gue_reference_values() {
        assert!((tracy_widom_gue_cdf(-2.0).unwrap() - 0.413_224_142_505_11).abs() < 1e-9);
        assert!((tracy_widom_gue_cdf(0.0).unwrap() - 0.969_372_828_355_26).abs() < 1e-9);
        assert!(tracy_widom_gue_cdf(8.0).unwrap() >= 1.0 - 1e-8);
        assert!(tracy_widom_gue_cdf(-13.0).is_err());
    }

    #[test]
    fn goe_reference_values() {
        assert!((tracy_widom_goe_cdf(-2.0).unwrap() - 0.274_320_197_909_21).abs() < 1e-9);
        assert!((tracy_widom_goe_cdf(0.0).unwrap() - 0.831_908_066_202_94).abs() < 1e-9);
        assert!(tracy_widom_goe_cdf(8.0).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn monotone_and_tails_ordered() {
        let (mut p2, mut p1) = (0.0, 0.0);
        for k in 0..200 {
            let x = -8.0 + 0.07 * k as f64;
            let f2 = gue_cdf_nodes(x, 80);
            let f1 = goe_cdf_nodes(x, 80);
            assert!(f2 >= p2 - 1e-12 && f1 >= p1 - 1e-12, "x = {x}");
            (p2, p1) = (f2, f1);
        }
        // The GOE left tail is heavier; the two CDFs cross once near −3.3.
        assert!(goe_cdf_nodes(-5.0, 80) > gue_cdf_nodes(-5.0, 80));
        assert!(goe_cdf_nodes(-2.0, 80) < gue_cdf_nodes(-2.0, 80));
    }

    #[test]
    fn extended_reductions() {
        let (x1, x2) = (-1.0, -0.5);
        let f1 = gue_cdf_nodes(x1, 80);
        let f2 = gue_cdf_nodes(x2, 80);
        let same = extended_airy_joint(0.0, x1, 0.0, x1).unwrap();
        assert!((same - f1).abs() < 1e-6);
        let far = extended_airy_joint(0.0, x1, 6.0, x2).unwrap();
        assert!((far - f1 * f2).abs() < 1e-2);
        let near = extended_airy_joint(0.0, x1, 0.3, x2).unwrap();
        assert!(near <= f1.min(f2) + 1e-9 && near >= f1 * f2 - 1e-9);
    }

    #[test]
    fn backward_forms_agree() {
        for &tau in &[0.4, 0.7] {
            let a = extended_airy_joint_nodes(0.0, -1.5, tau, -0.7, 60, BackwardForm::Direct);
            let b = extended_airy_joint_nodes(0.0, -1.5, tau, -0.7, 60, BackwardForm::Gaussian);
            assert!((a - b).abs() < 1e-8, "τ = {tau}: {a} vs {b}");
        }
    }

    #[test]
    fn table_interpolates_and_inverts() {
        let t = TabulatedCdf::with_grid(Ensemble::Gue, -8.0, 6.0, 0.01, 60);
        for &x in &[-3.217, -1.5, 0.004, 1.333] {
            assert!((t.eval(x) - gue_cdf_nodes(x, 80)).abs() < 1e-4, "x = {x}");
        }
        for &u in &[0.01, 0.3, 0.5, 0.97] {
            assert!((t.eval(t.quantile(u)) - u).abs() < 1e-9);
        }
        assert_eq!(t.eval(-100.0), t.eval(-8.0));
        assert_eq!(t.eval(100.0), t.eval(6.0));
    }

    #[test]
    fn moments_match_reference() {
        let (m2, v2) = moments(Ensemble::Gue, 60);
        assert!((m2 + 1.771_086_807_4).abs() < 1e-6, "{m2}");
        assert!((v2 - 0.813_194_792_8).abs() < 1e-6, "{v2}");
        let (m1, _) = moments(Ensemble::Goe, 60);
        assert!((m1 + 1.206_533_57).abs() < 1e-6, "{m1}");
    }
}
