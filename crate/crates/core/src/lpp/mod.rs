//! Last passage times by dynamic programming.
//!
//! `G_{(x′,y′)}(x, y)` is the maximal weight of an up-right path from `(x, y)`
//! to `(x′, y′)`, both endpoints included, and `−∞` when `(x′, y′)` does not
//! dominate `(x, y)`. `Ǧ(x, y) = G_{(x,y)}(0, 0)`.
//!
//! Every engine reads weights through [`SiteWeights`], so fields are never
//! materialized; memory is one row of the sweep.

mod curve;
mod profile;

pub use curve::{to_curve, with_boundary, BoundaryAxis, BoundaryResult, CurveResult};
pub use profile::{
    antidiagonal_profile, antidiagonal_profiles, paired_h, rescale_h, rescale_h_general, AntidiagonalProfile,
    SampledProcess,
};

use crate::error::{Error, Result};
use crate::weights::{Variant, WeightField};
use serde::Serialize;

/// A last passage time: `−∞` or a finite integer. `NegInf` orders below every
/// finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Passage {
    NegInf,
    Finite(i64),
}

impl Passage {
    pub fn finite(self) -> Option<i64> {
        match self {
            Passage::Finite(v) => Some(v),
            Passage::NegInf => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Passage::Finite(v) => v as f64,
            Passage::NegInf => f64::NEG_INFINITY,
        }
    }

    pub(crate) fn from_raw(v: i64) -> Self {
        if v <= NEG {
            Passage::NegInf
        } else {
            Passage::Finite(v)
        }
    }
}

/// Internal sentinel for `−∞` inside sweeps. Far enough from `i64::MIN` that
/// adding any realistic path weight cannot wrap; converted to
/// [`Passage::NegInf`] before leaving the module.
pub(crate) const NEG: i64 = i64::MIN / 4;

/// Site weights as a pure function of the site.
pub trait SiteWeights {
    fn weight(&self, i: i64, j: i64) -> i64;
}

impl SiteWeights for WeightField {
    #[inline(always)]
    fn weight(&self, i: i64, j: i64) -> i64 {
        self.weight_at(i, j)
    }
}

/// Explicit weights on a finite grid `[x0, x0 + width) × [y0, y0 + height)`,
/// zero outside. Used by oracles and small examples.
#[derive(Debug, Clone)]
pub struct GridWeights {
    pub x0: i64,
    pub y0: i64,
    pub width: usize,
    /// Row-major, `rows[j][i]` is the weight at `(x0 + i, y0 + j)`.
    pub rows: Vec<Vec<i64>>,
}

impl SiteWeights for GridWeights {
    fn weight(&self, i: i64, j: i64) -> i64 {
        let (a, b) = (i - self.x0, j - self.y0);
        if a < 0 || b < 0 || a as usize >= self.width || b as usize >= self.rows.len() {
            return 0;
        }
        self.rows[b as usize][a as usize]
    }
}

/// `G_{to}(from)`. Row sweep along the shorter side: `O(area)` time,
/// `O(min(width, height))` memory.
pub fn point<W: SiteWeights + ?Sized>(w: &W, from: (i64, i64), to: (i64, i64)) -> Passage {
    if to.0 < from.0 || to.1 < from.1 {
        return Passage::NegInf;
    }
    let width = (to.0 - from.0 + 1) as usize;
    let height = (to.1 - from.1 + 1) as usize;
    let v = if width <= height {
        sweep(width, height, |a, b| w.weight(from.0 + a as i64, from.1 + b as i64))
    } else {
        // Transposed sweep; the recursion is symmetric in the two axes.
        sweep(height, width, |a, b| w.weight(from.0 + b as i64, from.1 + a as i64))
    };
    Passage::Finite(v)
}

fn sweep(width: usize, height: usize, wt: impl Fn(usize, usize) -> i64) -> i64 {
    let mut row = vec![0i64; width];
    for b in 0..height {
        let mut left = NEG;
        for (a, cell) in row.iter_mut().enumerate() {
            let below = if b == 0 { NEG } else { *cell };
            let best = if a == 0 && b == 0 { 0 } else { left.max(below) };
            *cell = best + wt(a, b);
            left = *cell;
        }
    }
    row[width - 1]
}

/// `G_{to}(from)` with one non-integer coordinate of `from`, by linear
/// interpolation between the two neighbouring lattice values.
pub fn point_interp<W: SiteWeights + ?Sized>(w: &W, from: (f64, f64), to: (i64, i64)) -> Result<f64> {
    let fx = from.0.fract() != 0.0;
    let fy = from.1.fract() != 0.0;
    if !from.0.is_finite() || !from.1.is_finite() {
        return Err(Error::Domain("non-finite endpoint".into()));
    }
    match (fx, fy) {
        (false, false) => Ok(point(w, (from.0 as i64, from.1 as i64), to).as_f64()),
        (true, true) => Err(Error::Domain(format!("both coordinates of {from:?} are non-integer"))),
        (true, false) => {
            let x = from.0.floor();
            let t = from.0 - x;
            let a = point(w, (x as i64, from.1 as i64), to).as_f64();
            let b = point(w, (x as i64 + 1, from.1 as i64), to).as_f64();
            Ok(lerp(a, b, t))
        }
        (false, true) => {
            let y = from.1.floor();
            let t = from.1 - y;
            let a = point(w, (from.0 as i64, y as i64), to).as_f64();
            let b = point(w, (from.0 as i64, y as i64 + 1), to).as_f64();
            Ok(lerp(a, b, t))
        }
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        (1.0 - t) * a + t * b
    }
}

/// `G*` on the one-based weights `w* = w + 1` of the same seed. On coupled
/// fields `G* − G = x′ + y′ − x − y + 1` exactly.
pub fn star(field: &WeightField, from: (i64, i64), to: (i64, i64)) -> Passage {
    point(&field.with_variant(Variant::OneBased), from, to)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: Vec<Vec<i64>>) -> GridWeights {
        GridWeights { x0: 0, y0: 0, width: rows[0].len(), rows }
    }

    #[test]
    fn single_site_and_two_by_two() {
        let g = grid(vec![vec![3, 1], vec![4, 5]]);
        assert_eq!(point(&g, (0, 0), (0, 0)), Passage::Finite(3));
        // w(0,0) + max(w(1,0), w(0,1)) + w(1,1) = 3 + 4 + 5.
        assert_eq!(point(&g, (0, 0), (1, 1)), Passage::Finite(12));
        assert_eq!(point(&g, (1, 0), (0, 1)), Passage::NegInf);
    }

    #[test]
    fn transposed_sweep_agrees() {
        let f = WeightField::new(11, 0.5).unwrap();
        let a = point(&f, (-3, 2), (20, 5));
        let t = |i: i64, j: i64| f.weight_at(j, i);
        struct T<F>(F);
        impl<F: Fn(i64, i64) -> i64> SiteWeights for T<F> {
            fn weight(&self, i: i64, j: i64) -> i64 {
                (self.0)(i, j)
            }
        }
        assert_eq!(a, point(&T(t), (2, -3), (5, 20)));
    }

    #[test]
    fn interpolation() {
        let f = WeightField::new(5, 0.25).unwrap();
        let to = (10, 10);
        let g0 = point(&f, (2, 3), to).as_f64();
        let g1 = point(&f, (2, 4), to).as_f64();
        assert_eq!(point_interp(&f, (2.0, 3.0), to).unwrap(), g0);
        assert!((point_interp(&f, (2.0, 3.5), to).unwrap() - 0.5 * (g0 + g1)).abs() < 1e-12);
        assert!((point_interp(&f, (2.0, 3.3), to).unwrap() - (0.7 * g0 + 0.3 * g1)).abs() < 1e-12);
        assert!(point_interp(&f, (2.5, 3.5), to).is_err());
    }

    #[test]
    fn star_identity() {
        let f = WeightField::new(17, 0.25).unwrap();
        for k in 0..20i64 {
            let from = (k - 7, 3 - k);
            let to = (from.0 + k % 5 + 1, from.1 + (k * 3) % 7);
            let g = point(&f, from, to).finite().unwrap();
            let gs = star(&f, from, to).finite().unwrap();
            assert_eq!(gs - g, to.0 + to.1 - from.0 - from.1 + 1);
        }
        assert_eq!(star(&f, (0, 0), (0, 0)).finite().unwrap(), f.weight_at(0, 0) + 1);
        assert!(star(&f, (0, 0), (3, 2)).finite().unwrap() >= 6);
    }

    #[test]
    fn passage_order() {
        assert!(Passage::NegInf < Passage::Finite(i64::MIN / 2));
        assert!(Passage::Finite(0) < Passage::Finite(1));
    }
}
