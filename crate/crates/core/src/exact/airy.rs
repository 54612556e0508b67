//! Airy function `Ai` and its derivative.
//!
//! `Ai` solves `y″ = x y`, so every derivative follows from the recursion
//! `y⁽ⁿ⁺²⁾ = x y⁽ⁿ⁾ + n y⁽ⁿ⁻¹⁾` and a Taylor series converges everywhere.
//! A table of `(Ai, Ai′)` at spacing ½ is built once:
//! - on `[−80, 0]` by stepping forward from the exact values at 0 (the
//!   solutions oscillate there, so errors grow only linearly);
//! - on `[0, 10]` by stepping backward from the asymptotic expansion at 10
//!   (backward is the stable direction for the decaying solution).
//!
//! Queries inside the table are one Taylor step from the nearest node; queries
//! outside use the asymptotic expansions, which are accurate far below the
//! required tolerance there.

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

/// `Ai(0) = 3^{−2/3}/Γ(2/3)`.
pub const AI0: f64 = 0.355_028_053_887_817_2;
/// `Ai′(0) = −3^{−1/3}/Γ(1/3)`.
pub const AIP0: f64 = -0.258_819_403_792_806_8;

const H: f64 = 0.5;
const LEFT: f64 = -80.0;
const RIGHT: f64 = 10.0;

struct Table {
    /// Node `i` is at `LEFT + i·H`.
    nodes: Vec<(f64, f64)>,
}

fn table() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| {
        let n_neg = ((-LEFT) / H).round() as usize;
        let n_pos = (RIGHT / H).round() as usize;
        let mut nodes = vec![(0.0, 0.0); n_neg + n_pos + 1];
        nodes[n_neg] = (AI0, AIP0);
        for i in (0..n_neg).rev() {
            let x0 = LEFT + (i + 1) as f64 * H;
            let (y, yp) = nodes[i + 1];
            nodes[i] = taylor(x0, y, yp, -H);
        }
        nodes[n_neg + n_pos] = asymptotic_pos(RIGHT);
        for i in (n_neg + 1..n_neg + n_pos).rev() {
            let x0 = LEFT + (i + 1) as f64 * H;
            let (y, yp) = nodes[i + 1];
            nodes[i] = taylor(x0, y, yp, -H);
        }
        Table { nodes }
    })
}

/// `(y(x0 + h), y′(x0 + h))` for the solution of `y″ = x y` with data
/// `(y, y′)` at `x0`. Terms `t_n = y⁽ⁿ⁾ hⁿ/n!` obey
/// `t_{n+2} = (x0 h² t_n + h³ t_{n−1})/((n + 1)(n + 2))`.
fn taylor(x0: f64, y: f64, yp: f64, h: f64) -> (f64, f64) {
    if h == 0.0 {
        return (y, yp);
    }
    let mut t_prev = 0.0; // t_{n−1}
    let mut t0 = y; // t_n
    let mut t1 = yp * h; // t_{n+1}
    let mut val = t0 + t1;
    let mut der = t1; // Σ n t_n
    let h2 = h * h;
    let h3 = h2 * h;
    let scale = y.abs() + (yp * h).abs();
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let t2 = (x0 * h2 * t0 + h3 * t_prev) / ((nf + 1.0) * (nf + 2.0));
        val += t2;
        der += (nf + 2.0) * t2;
        t_prev = t0;
        t0 = t1;
        t1 = t2;
        n += 1;
        if n > 8 && t0.abs() + t1.abs() + t_prev.abs() <= 1e-18 * (scale + val.abs()) {
            break;
        }
        if n > 400 {
            break;
        }
    }
    (val, der / h)
}

fn u_coeffs() -> &'static [f64; 24] {
    static U: OnceLock<[f64; 24]> = OnceLock::new();
    U.get_or_init(|| {
        let mut u = [1.0; 24];
        for k in 1..24 {
            let kf = k as f64;
            u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        }
        u
    })
}

fn v_coeff(k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let kf = k as f64;
    -u_coeffs()[k] * (6.0 * kf + 1.0) / (6.0 * kf - 1.0)
}

/// Truncated asymptotic sum `Σ c_k s^k / ζ^k`, stopped at the smallest term.
fn asym_sum(zeta: f64, sign: f64, parity: Option<usize>, coeff: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for k in 0..24 {
        if let Some(p) = parity {
            if k % 2 != p {
                continue;
            }
        }
        let j = match parity {
            Some(_) => (k / 2) as i32,
            None => k as i32,
        };
        let term = coeff(k) * sign.powi(j) / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        sum += term;
    }
    sum
}

fn asymptotic_pos(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    let u = asym_sum(zeta, -1.0, None, |k| u_coeffs()[k]);
    let v = asym_sum(zeta, -1.0, None, v_coeff);
    (e / q * u, -e * q * v)
}

fn asymptotic_neg(x: f64) -> (f64, f64) {
    let z = -x;
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    let q = z.powf(0.25);
    let u_even = asym_sum(zeta, -1.0, Some(0), |k| u_coeffs()[k]);
    let u_odd = asym_sum(zeta, -1.0, Some(1), |k| u_coeffs()[k]);
    let v_even = asym_sum(zeta, -1.0, Some(0), v_coeff);
    let v_odd = asym_sum(zeta, -1.0, Some(1), v_coeff);
    let r = 1.0 / PI.sqrt();
    (r / q * (c * u_even + s * u_odd), r * q * (s * v_even - c * v_odd))
}

/// `(Ai(x), Ai′(x))` for any finite `x`; beyond the table the asymptotic
/// expansions are used.
pub fn airy_pair(x: f64) -> (f64, f64) {
    if x > RIGHT {
        return asymptotic_pos(x);
    }
    if x < LEFT {
        return asymptotic_neg(x);
    }
    let t = table();
    let i = ((x - LEFT) / H).round() as usize;
    let i = i.min(t.nodes.len() - 1);
    let x0 = LEFT + i as f64 * H;
    let (y, yp) = t.nodes[i];
    taylor(x0, y, yp, x - x0)
}

/// `Ai(x)` on the validated range `[−40, 40]`.
pub fn airy_ai(x: f64) -> Result<f64> {
    if !(-40.0..=40.0).contains(&x) {
        return Err(Error::Domain(format!("Ai({x}) outside [−40, 40]")));
    }
    Ok(airy_pair(x).0)
}

/// `Ai′(x)` on `[−40, 40]`.
pub fn airy_ai_prime(x: f64) -> Result<f64> {
    if !(-40.0..=40.0).contains(&x) {
        return Err(Error::Domain(format!("Ai′({x}) outside [−40, 40]")));
    }
    Ok(airy_pair(x).1)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values (15+ digits) of Ai and Ai′.
    const REF: &[(f64, f64, f64)] = &[
        (1.0, 0.135_292_416_312_881_4, -0.159_147_441_296_793_2),
        (2.0, 0.034_924_130_423_274_38, -0.053_090_384_433_653_63),
        (5.0, 1.083_444_281_360_744e-4, -2.474_138_908_684_624e-4),
        (-1.0, 0.535_560_883_292_352_1, -0.010_160_567_116_645_2),
        (-5.0, 0.350_761_009_024_114_2, 0.327_192_818_554_443_8),
        (-10.0, 0.040_241_238_486_443_19, 0.996_265_044_132_790_1),
        (-40.0, -0.045_933_923_437_957_25, -1.389_090_875_260_718_4),
    ];

    #[test]
    fn reference_values() {
        for &(x, ai, aip) in REF {
            let (a, ap) = airy_pair(x);
            assert!((a - ai).abs() <= 1e-11 * ai.abs(), "Ai({x}) = {a}, want {ai}");
            assert!((ap - aip).abs() <= 1e-11 * aip.abs(), "Ai′({x}) = {ap}, want {aip}");
        }
    }

    #[test]
    fn table_joins_at_zero() {
        // The backward sweep from x = 10 must land on the exact values at 0.
        let t = table();
        let n_neg = ((-LEFT) / H).round() as usize;
        let (y, yp) = taylor(H, t.nodes[n_neg + 1].0, t.nodes[n_neg + 1].1, -H);
        assert!((y - AI0).abs() < 1e-14);
        assert!((yp - AIP0).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_matches_table() {
        for &x in &[-40.0, -60.0, -79.5] {
            let (a, ap) = airy_pair(x);
            let (b, bp) = asymptotic_neg(x);
            assert!((a - b).abs() < 1e-12, "{x}: {a} vs {b}");
            assert!((ap - bp).abs() < 1e-11, "{x}: {ap} vs {bp}");
        }
        for &x in &[8.0, 9.5] {
            let (a, _) = airy_pair(x);
            let (b, _) = asymptotic_pos(x);
            assert!((a - b).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn decays_monotonically_on_right() {
        let mut prev = airy_ai(1.0).unwrap();
        for k in 1..=390 {
            let v = airy_ai(1.0 + k as f64 * 0.1).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn ode_residual() {
        // Richardson-extrapolated central second difference, error O(h⁴).
        let f = |t: f64| airy_pair(t).0;
        let d2 = |x: f64, h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        let h = 5e-3;
        for k in 0..100 {
            let x = -10.0 + 0.2 * k as f64 + 0.0123;
            let second = (4.0 * d2(x, h) - d2(x, 2.0 * h)) / 3.0;
            assert!((second - x * f(x)).abs() <= 1e-8, "x = {x}: {}", second - x * f(x));
        }
        assert!(airy_ai(41.0).is_err());
    }
}
