//! Executable checks of the growth and shape conditions on initial data.
//!
//! Path variants (`Hyp`, `HypStar`) take a down-right path per `N`; boundary
//! variants (`HypVert`, `HypCorner`) take a boundary function `f_N` on
//! integer points. Every check is evaluated on the lattice objects actually
//! supplied, so a report is only as good as the window the caller passes.

use super::constants::ScalingParams;
use super::path::DownRightPath;
use super::shape::{distance_to_scaled_shape, in_region_d, ShapeVariant};
use crate::error::{param, Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HypVariant {
    Hyp,
    HypStar,
    HypVert,
    HypCorner,
}

impl HypVariant {
    pub fn is_path(self) -> bool {
        matches!(self, HypVariant::Hyp | HypVariant::HypStar)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisParams {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// `−∞` allowed.
    pub a_inf: f64,
    /// `+∞` allowed.
    pub b_inf: f64,
    /// `m_N = m_scale · N^{−m_exp}`.
    pub m_scale: f64,
    pub m_exp: f64,
    pub sigma: f64,
    pub variant: HypVariant,
}

impl HypothesisParams {
    /// Defaults: `C = 1`, `c₁ = ½`, `c₂ = 1/6`, `c₃` at the middle of its
    /// admissible range, `(a_∞, b_∞) = ℝ`, `m_N = N^{−1/3}/𝐝₀` (one lattice
    /// unit of diagonal offset).
    pub fn defaults(variant: HypVariant, params: &ScalingParams) -> Self {
        let rq = params.q.sqrt();
        let (c3, d) = match variant {
            HypVariant::Hyp => (0.5 * (-1.0 - 2.0 / rq), params.d0),
            HypVariant::HypStar => (0.5 * (-1.0 - 2.0 * rq), params.d0_star),
            HypVariant::HypVert | HypVariant::HypCorner => (0.01, params.d0),
        };
        HypothesisParams {
            c: 1.0,
            c1: 0.5,
            c2: 1.0 / 6.0,
            c3,
            a_inf: f64::NEG_INFINITY,
            b_inf: f64::INFINITY,
            m_scale: 1.0 / d,
            m_exp: 1.0 / 3.0,
            sigma: 0.0,
            variant,
        }
    }

    pub fn validate(&self, params: &ScalingParams) -> Result<()> {
        let rq = params.q.sqrt();
        if !(self.c > 0.0) {
            return param(format!("C = {} must be positive", self.c));
        }
        if !(self.c1 > 0.0 && self.c1 < 1.0) {
            return param(format!("c1 = {} not in (0, 1)", self.c1));
        }
        if !(self.c2 > 0.0 && self.c2 < 1.0 / 3.0) {
            return param(format!("c2 = {} not in (0, 1/3)", self.c2));
        }
        let (lo, hi) = match self.variant {
            HypVariant::Hyp => (-1.0 - 2.0 / rq, 0.0),
            HypVariant::HypStar => (-1.0 - 2.0 * rq, 0.0),
            HypVariant::HypVert | HypVariant::HypCorner => (0.0, f64::INFINITY),
        };
        if !(self.c3 > lo && self.c3 < hi) {
            return param(format!("c3 = {} not in ({lo}, {hi})", self.c3));
        }
        if self.a_inf == f64::INFINITY || self.b_inf == f64::NEG_INFINITY || !(self.a_inf < self.b_inf) {
            return param(format!("(a_inf, b_inf) = ({}, {}) is not an interval", self.a_inf, self.b_inf));
        }
        if !(self.m_scale > 0.0 && self.m_exp > 0.0) {
            return param("m_N must be positive and tend to zero");
        }
        Ok(())
    }

    pub fn m_n(&self, n: u64) -> f64 {
        self.m_scale * (n as f64).powf(-self.m_exp)
    }

    /// `I_N = (a_∞, b_∞) ∩ (−N^{c₂}, N^{c₂})`.
    pub fn interval(&self, n: u64) -> (f64, f64) {
        let w = (n as f64).powf(self.c2);
        (self.a_inf.max(-w), self.b_inf.min(w))
    }
}

/// Per-`N` outcome. For boundary variants the region fields are vacuous and
/// `outer_margin` is the smallest slack in the strict outer inequality.
#[derive(Debug, Clone, Serialize)]
pub struct NReport {
    pub n: u64,
    pub quadratic_ok: bool,
    pub central_points: usize,
    pub central_residual: f64,
    pub m_n: f64,
    pub central_ok: bool,
    pub region_violations: usize,
    pub region_ok: bool,
    pub outer_margin: f64,
    pub outer_ok: bool,
}

impl NReport {
    pub fn pass(&self) -> bool {
        self.quadratic_ok && self.central_ok && self.region_ok && self.outer_ok
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub variant: HypVariant,
    pub per_n: Vec<NReport>,
    pub quadratic_ok: bool,
    pub central_ok: bool,
    pub region_ok: bool,
    pub outer_ok: bool,
}

impl ValidationReport {
    fn from_reports(variant: HypVariant, per_n: Vec<NReport>) -> Self {
        ValidationReport {
            variant,
            quadratic_ok: per_n.iter().all(|r| r.quadratic_ok),
            central_ok: per_n.iter().all(|r| r.central_ok),
            region_ok: per_n.iter().all(|r| r.region_ok),
            outer_ok: per_n.iter().all(|r| r.outer_ok),
            per_n,
        }
    }

    pub fn pass(&self) -> bool {
        self.quadratic_ok && self.central_ok && self.region_ok && self.outer_ok
    }
}

/// Quadratic growth bound on a grid of step 1/64 over `[−R, R]`, where
/// `R = max(64, 2N^{c₂})`. Two-sided for path variants, one-sided otherwise.
fn quadratic_ok(ell: &dyn Fn(f64) -> f64, hp: &HypothesisParams, n: u64) -> bool {
    let r = (2.0 * (n as f64).powf(hp.c2)).max(64.0);
    let steps = (128.0 * r).ceil() as i64;
    (0..=steps).all(|k| {
        let s = -r + k as f64 / 64.0;
        let v = ell(s);
        let bound = hp.c + hp.c1 * s * s;
        if hp.variant.is_path() {
            v.abs() < bound
        } else {
            v < bound
        }
    })
}

/// One path per `N`. The central part is the set of vertices with
/// `|x − y| < 2𝐜₀N^{2/3 + c₂}`; central vertices whose parameter
/// `s = (x − y)/(2𝐜₀N^{2/3})` falls outside `I_N` are checked as non-central.
pub fn validate_paths(
    paths: &[(u64, DownRightPath)],
    ell: &dyn Fn(f64) -> f64,
    hp: &HypothesisParams,
    params: &ScalingParams,
) -> Result<ValidationReport> {
    if !hp.variant.is_path() {
        return Err(Error::Config(format!("{:?} is a boundary hypothesis", hp.variant)));
    }
    hp.validate(params)?;
    let (shape, d_unit0) = match hp.variant {
        HypVariant::HypStar => (ShapeVariant::LStar, params.d0_star),
        _ => (ShapeVariant::L, params.d0),
    };
    let mut per_n = Vec::with_capacity(paths.len());
    for (n, path) in paths {
        let n = *n;
        let nf = n as f64;
        let u_unit = params.c0 * nf.powf(2.0 / 3.0);
        let d_unit = d_unit0 * nf.cbrt();
        let strip = 2.0 * params.c0 * nf.powf(2.0 / 3.0 + hp.c2);
        let (a_n, b_n) = hp.interval(n);
        let threshold = nf.powf(1.0 / 3.0 + 2.0 * hp.c2);
        let mut central_points = 0;
        let mut residual = 0.0f64;
        let mut region_violations = 0;
        let mut min_dist = f64::INFINITY;
        for &(x, y) in path.vertices() {
            let (xf, yf) = (x as f64, y as f64);
            let s = (xf - yf) / (2.0 * u_unit);
            if (xf - yf).abs() < strip && s > a_n && s < b_n {
                central_points += 1;
                let l_n = -(xf + yf) / (2.0 * d_unit) - ell(s);
                residual = residual.max(l_n.abs());
                continue;
            }
            if xf <= nf && yf <= nf {
                if !in_region_d(xf / nf, yf / nf, hp.c3, params, shape) {
                    region_violations += 1;
                }
                min_dist = min_dist.min(distance_to_scaled_shape((xf, yf), nf, params, shape));
            }
        }
        let m_n = hp.m_n(n);
        per_n.push(NReport {
            n,
            quadratic_ok: quadratic_ok(ell, hp, n),
            central_points,
            central_residual: residual,
            m_n,
            central_ok: central_points > 0 && residual <= m_n,
            region_violations,
            region_ok: region_violations == 0,
            outer_margin: min_dist - threshold,
            outer_ok: min_dist > threshold,
        });
    }
    Ok(ValidationReport::from_reports(hp.variant, per_n))
}

/// Boundary function `f_N` sampled on the integer points `lo..=hi` of its
/// domain `D_N`.
pub struct BoundaryCheck<'a> {
    pub n: u64,
    pub lo: i64,
    pub hi: i64,
    pub f: &'a dyn Fn(i64) -> f64,
}

/// Central characterization at `y = 2s𝐜₀N^{2/3}`:
/// `f_N(y) = 𝐚₀N − s𝐚₀𝐜₀N^{2/3} − (ℓ(s) + l_N(s))𝐝₀N^{1/3}` (with `|s|` for
/// the corner variant), and outside `I_N` the strict lower bound
/// `f_N(yN)/N > max(𝐚₀ − 𝐚₀y/2 − c₁𝐝₀(y/(2𝐜₀))², a₀(1 − y) + c₃|y|)`
/// (with `|y|` in the first two terms for the corner variant), for scaled
/// `y ≤ 1`.
pub fn validate_boundary(
    checks: &[BoundaryCheck<'_>],
    ell: &dyn Fn(f64) -> f64,
    hp: &HypothesisParams,
    params: &ScalingParams,
) -> Result<ValidationReport> {
    if hp.variant.is_path() {
        return Err(Error::Config(format!("{:?} is a path hypothesis", hp.variant)));
    }
    hp.validate(params)?;
    let corner = hp.variant == HypVariant::HypCorner;
    let mut per_n = Vec::with_capacity(checks.len());
    for chk in checks {
        let n = chk.n;
        let nf = n as f64;
        if chk.hi < chk.lo {
            return Err(Error::Window(format!("empty boundary domain for N = {n}")));
        }
        if corner && (chk.lo < -(n as i64) || chk.hi > n as i64) {
            return Err(Error::Window(format!("corner boundary domain must lie in [−N, N] for N = {n}")));
        }
        let u2 = 2.0 * params.c0 * nf.powf(2.0 / 3.0);
        let d_unit = params.d0 * nf.cbrt();
        let (a_n, b_n) = hp.interval(n);
        let mut central_points = 0;
        let mut residual = 0.0f64;
        let mut margin = f64::INFINITY;
        for k in chk.lo..=chk.hi {
            let s = k as f64 / u2;
            let fv = (chk.f)(k);
            if s > a_n && s < b_n {
                central_points += 1;
                let sv = if corner { s.abs() } else { s };
                let l_n = (params.a0 * nf - sv * params.a0 * params.c0 * nf.powf(2.0 / 3.0) - fv) / d_unit - ell(s);
                residual = residual.max(l_n.abs());
                continue;
            }
            let y = k as f64 / nf;
            if y > 1.0 {
                continue;
            }
            let ya = if corner { y.abs() } else { y };
            let para = params.a0 - params.a0 * ya / 2.0 - hp.c1 * params.d0 * (y / (2.0 * params.c0)).powi(2);
            let shape = params.a0_gamma((1.0 - ya).max(0.0)) + hp.c3 * y.abs();
            margin = margin.min(fv / nf - para.max(shape));
        }
        let m_n = hp.m_n(n);
        per_n.push(NReport {
            n,
            quadratic_ok: quadratic_ok(ell, hp, n),
            central_points,
            central_residual: residual,
            m_n,
            central_ok: central_points > 0 && residual <= m_n,
            region_violations: 0,
            region_ok: true,
            outer_margin: margin,
            outer_ok: margin > 0.0,
        });
    }
    Ok(ValidationReport::from_reports(hp.variant, per_n))
}
