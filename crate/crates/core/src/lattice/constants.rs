use crate::error::{param, Result};
use serde::Serialize;

/// Closed-form scaling constants for parameter `q`.
///
/// Invariants: `a0_star == a0 + 2` up to rounding, `a0 * d0 == b0` up to
/// rounding, and all constants are positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingParams {
    pub q: f64,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub d0: f64,
    pub a0_star: f64,
    pub d0_star: f64,
}

impl ScalingParams {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return param(format!("q = {q} not in (0, 1)"));
        }
        let r = q.sqrt();
        Ok(ScalingParams {
            q,
            a0: 2.0 * r / (1.0 - r),
            b0: q.powf(1.0 / 6.0) * (1.0 + r).cbrt() / (1.0 - r),
            c0: (1.0 + r).powf(2.0 / 3.0) / q.powf(1.0 / 6.0),
            d0: (1.0 + r).cbrt() / (2.0 * q.cbrt()),
            a0_star: 2.0 / (1.0 - r),
            d0_star: q.powf(1.0 / 6.0) * (1.0 + r).cbrt() / 2.0,
        })
    }

    /// Law-of-large-numbers rate: `Ǧ(γN, N) ≈ a0(γ) N`.
    pub fn a0_gamma(&self, gamma: f64) -> f64 {
        let q = self.q;
        ((gamma + 1.0) * q + 2.0 * (gamma * q).sqrt()) / (1.0 - q)
    }

    /// Fluctuation scale: `Ǧ(γN, N) − a0(γ)N ≈ b0(γ) N^{1/3} χ`.
    pub fn b0_gamma(&self, gamma: f64) -> f64 {
        let q = self.q;
        q.powf(1.0 / 6.0) * gamma.powf(-1.0 / 6.0) * (q.sqrt() + gamma.sqrt()).powf(2.0 / 3.0)
            * (1.0 + (gamma * q).sqrt()).powf(2.0 / 3.0)
            / (1.0 - q)
    }

    /// Rate for the one-based weights `w* = w + 1`.
    pub fn a0_star_gamma(&self, gamma: f64) -> f64 {
        self.a0_gamma(gamma) + gamma + 1.0
    }
}
