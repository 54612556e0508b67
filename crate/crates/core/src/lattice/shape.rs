use super::constants::ScalingParams;
use crate::error::{param, Result};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Which weights the limit shape refers to: zero-based (`w`) or one-based
/// (`w* = w + 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShapeVariant {
    L,
    LStar,
}

/// Homogeneous rate `F(x, y) = lim Ǧ(xN, yN)/N` for `x, y ≥ 0`.
pub fn rate(x: f64, y: f64, params: &ScalingParams, variant: ShapeVariant) -> f64 {
    let q = params.q;
    let cross = 2.0 * (x * y * q).sqrt();
    match variant {
        ShapeVariant::L => ((x + y) * q + cross) / (1.0 - q),
        ShapeVariant::LStar => (x + y + cross) / (1.0 - q),
    }
}

fn level(params: &ScalingParams, variant: ShapeVariant) -> f64 {
    match variant {
        ShapeVariant::L => params.a0,
        ShapeVariant::LStar => params.a0_star,
    }
}

fn radius_unchecked(theta: f64, params: &ScalingParams, variant: ShapeVariant) -> f64 {
    let r = params.q.sqrt();
    // Exact axis directions at the endpoints, where the radius has a square-root
    // singularity in the angle.
    let (s, c) = if theta <= 0.0 {
        (0.0, 1.0)
    } else if theta >= FRAC_PI_2 {
        (1.0, 0.0)
    } else {
        theta.sin_cos()
    };
    match variant {
        ShapeVariant::L => 2.0 * (1.0 + r) / ((c + s) * r + 2.0 * (c * s).sqrt()),
        ShapeVariant::LStar => 2.0 * (1.0 + r) / ((c + s) + 2.0 * (c * s * params.q).sqrt()),
    }
}

/// Polar radius of the level curve `{F = level}` in the open quadrant.
pub fn limit_shape_radius(theta: f64, params: &ScalingParams, variant: ShapeVariant) -> Result<f64> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return param(format!("angle {theta} not in (0, π/2)"));
    }
    Ok(radius_unchecked(theta, params, variant))
}

/// Point of the level curve at angle `theta ∈ [0, π/2]`, endpoints included.
pub fn limit_shape_point(theta: f64, params: &ScalingParams, variant: ShapeVariant) -> (f64, f64) {
    let r = radius_unchecked(theta, params, variant);
    if theta >= FRAC_PI_2 {
        return (0.0, r);
    }
    (r * theta.cos(), r * theta.sin().max(0.0))
}

/// `F(x, y) − level`: negative strictly inside the curve, zero on it.
pub fn on_limit_shape(x: f64, y: f64, params: &ScalingParams, variant: ShapeVariant) -> f64 {
    rate(x, y, params, variant) - level(params, variant)
}

/// Whether `(x, y)` lies in the region bounded by `x = 1`, `y = 1` and the
/// reflected curve `{(1 − y', 1 − x')}`, with corners below `c3` cut off.
pub fn in_region_d(x: f64, y: f64, c3: f64, params: &ScalingParams, variant: ShapeVariant) -> bool {
    x <= 1.0 && y <= 1.0 && x >= c3 && y >= c3 && on_limit_shape(1.0 - y, 1.0 - x, params, variant) <= 0.0
}

/// Euclidean distance from `p` to `N` times the reflected curve.
///
/// Coarse scan over the angle followed by golden-section refinement; the
/// distance along the convex curve is unimodal near its minimizer.
pub fn distance_to_scaled_shape(p: (f64, f64), n: f64, params: &ScalingParams, variant: ShapeVariant) -> f64 {
    let d2 = |theta: f64| {
        let (u, v) = limit_shape_point(theta, params, variant);
        let (x, y) = (n * (1.0 - v), n * (1.0 - u));
        (x - p.0).powi(2) + (y - p.1).powi(2)
    };
    const COARSE: usize = 256;
    let h = FRAC_PI_2 / COARSE as f64;
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..=COARSE {
        let v = d2(k as f64 * h);
        if v < best_val {
            best_val = v;
            best = k;
        }
    }
    let mut a = (best as f64 - 1.0).max(0.0) * h;
    let mut b = (best as f64 + 1.0).min(COARSE as f64) * h;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (d2(c), d2(d));
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = d2(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = d2(d);
        }
    }
    best_val.min(fc).min(fd).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    #[test]
    fn diagonal_radius_is_sqrt2() {
        for &q in &[0.1, 0.25, 0.7] {
            let p = ScalingParams::new(q).unwrap();
            for v in [ShapeVariant::L, ShapeVariant::LStar] {
                assert!((limit_shape_radius(FRAC_PI_4, &p, v).unwrap() - SQRT_2).abs() < 1e-14);
                assert!(on_limit_shape(1.0, 1.0, &p, v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn endpoint_abscissa() {
        let p = ScalingParams::new(0.25).unwrap();
        assert!((limit_shape_point(0.0, &p, ShapeVariant::L).0 - 6.0).abs() < 1e-12);
        assert!((limit_shape_point(0.0, &p, ShapeVariant::LStar).0 - 3.0).abs() < 1e-12);
        assert!(limit_shape_radius(0.0, &p, ShapeVariant::L).is_err());
        assert!(limit_shape_radius(FRAC_PI_2, &p, ShapeVariant::L).is_err());
    }

    #[test]
    fn curve_points_on_level_set() {
        let p = ScalingParams::new(0.4).unwrap();
        for k in 1..100 {
            let th = FRAC_PI_2 * k as f64 / 100.0;
            for v in [ShapeVariant::L, ShapeVariant::LStar] {
                let (x, y) = limit_shape_point(th, &p, v);
                assert!(on_limit_shape(x, y, &p, v).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn distance_of_origin_is_zero() {
        let p = ScalingParams::new(0.25).unwrap();
        assert!(distance_to_scaled_shape((0.0, 0.0), 100.0, &p, ShapeVariant::L) < 1e-6);
        // Corner point of the reflected curve: (1 − 6, 1) scaled.
        let d = distance_to_scaled_shape((-500.0, 100.0), 100.0, &p, ShapeVariant::L);
        assert!(d < 1e-6);
        assert!(distance_to_scaled_shape((10.0, 10.0), 100.0, &p, ShapeVariant::L) > 14.0);
    }

    #[test]
    fn antidiagonal_inside_region() {
        let p = ScalingParams::new(0.25).unwrap();
        for k in -10..=10 {
            let x = k as f64 / 10.0;
            assert!(in_region_d(x, -x, -2.0, &p, ShapeVariant::L));
        }
        assert!(in_region_d(0.5, 0.5, -2.0, &p, ShapeVariant::L));
        assert!(!in_region_d(-0.5, -0.5, -2.0, &p, ShapeVariant::L));
        assert!(!in_region_d(-3.0, 0.9, -2.0, &p, ShapeVariant::L));
    }
}
