use super::{Passage, SiteWeights, NEG};
use crate::error::{Error, Result};
use crate::lattice::DownRightPath;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CurveResult {
    pub value: Passage,
    /// Index into the path's vertex list and the vertex itself; `None` when
    /// no vertex is dominated by the target.
    pub argmax: Option<(usize, (i64, i64))>,
}

/// Point-to-curve time `max_v G_{target}(v)` over path vertices `v ≤ target`.
///
/// Reverse sweep over the up-closed region above the path, one row at a time
/// from `y = target.1` down to the lowest relevant vertex. In row `y` the
/// region starts at the leftmost vertex with ordinate `≤ y`. Ties go to the
/// earliest vertex along the path.
pub fn to_curve<W: SiteWeights + ?Sized>(w: &W, target: (i64, i64), path: &DownRightPath) -> CurveResult {
    let verts: Vec<(usize, (i64, i64))> = path
        .vertices()
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, (x, y))| x <= target.0 && y <= target.1)
        .collect();
    if verts.is_empty() {
        return CurveResult { value: Passage::NegInf, argmax: None };
    }
    let x_lo = verts[0].1 .0;
    let y_lo = verts[verts.len() - 1].1 .1;
    let width = (target.0 - x_lo + 1) as usize;
    let mut row = vec![NEG; width];
    let mut best = NEG;
    let mut arg = None;
    // Vertices are in path order: y nonincreasing, x nondecreasing, so the
    // first vertex with ordinate ≤ y is the leftmost one and moves right as
    // y decreases.
    let mut p = 0;
    for y in (y_lo..=target.1).rev() {
        while verts[p].1 .1 > y {
            p += 1;
        }
        let a0 = (verts[p].1 .0 - x_lo) as usize;
        let mut right = NEG;
        for a in (a0..width).rev() {
            let x = x_lo + a as i64;
            let prev = if x == target.0 && y == target.1 { 0 } else { right.max(row[a]) };
            let v = if prev <= NEG { NEG } else { prev + w.weight(x, y) };
            row[a] = v;
            right = v;
        }
        for &(idx, (x, _)) in verts[p..].iter().take_while(|v| v.1 .1 == y) {
            let v = row[(x - x_lo) as usize];
            if v > best {
                best = v;
                arg = Some((idx, (x, y)));
            }
        }
    }
    CurveResult { value: Passage::from_raw(best), argmax: arg }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryAxis {
    /// Sources `(0, y)` for `y` in the domain.
    Vertical,
    /// Sources `(0, y)` for `y ≥ 0` with penalty `f(y)` and `(x, 0)` for
    /// `x ≥ 0` with penalty `f(−x)`.
    Corner,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryResult {
    pub value: f64,
    /// Penalty coordinate `y` (for the corner variant, `−x` on the horizontal
    /// arm) of the maximizer; ties go to the smallest coordinate.
    pub argmax: i64,
    /// The maximizer sits at an end of the supplied domain, so the window may
    /// be too small.
    pub at_edge: bool,
}

/// `max_y (G_{target}(source(y)) − f(y))` over `y ∈ [lo, hi]`. `f` may return
/// `+∞` to exclude a point.
pub fn with_boundary<W: SiteWeights + ?Sized>(
    w: &W,
    target: (i64, i64),
    axis: BoundaryAxis,
    lo: i64,
    hi: i64,
    f: &dyn Fn(i64) -> f64,
) -> Result<BoundaryResult> {
    if hi < lo {
        return Err(Error::Domain(format!("empty boundary domain [{lo}, {hi}]")));
    }
    let (tx, ty) = target;
    if tx < 0 {
        return Err(Error::Domain(format!("target {target:?} lies left of the boundary")));
    }
    let mut best = f64::NEG_INFINITY;
    let mut arg = None;
    let mut consider = |y: i64, g: i64| {
        if g <= NEG {
            return;
        }
        let v = g as f64 - f(y);
        if v > best || (v == best && arg.is_some_and(|a| y < a)) {
            best = v;
            arg = Some(y);
        }
    };
    match axis {
        BoundaryAxis::Vertical => {
            let y_top = hi.min(ty);
            if y_top >= lo {
                // Reverse sweep over [0, tx] × [lo, ty]; column 0 gives G(0, y).
                let width = (tx + 1) as usize;
                let mut row = vec![NEG; width];
                for y in (lo..=ty).rev() {
                    sweep_row_reverse(w, &mut row, y, target);
                    if y <= y_top {
                        consider(y, row[0]);
                    }
                }
            }
        }
        BoundaryAxis::Corner => {
            if ty < 0 {
                return Err(Error::Domain(format!("target {target:?} lies below the corner")));
            }
            let width = (tx + 1) as usize;
            let mut row = vec![NEG; width];
            for y in (0..=ty).rev() {
                sweep_row_reverse(w, &mut row, y, target);
                if y >= lo && y <= hi {
                    consider(y, row[0]);
                }
                if y == 0 {
                    for (x, &g) in row.iter().enumerate().skip(1) {
                        let key = -(x as i64);
                        if key >= lo && key <= hi {
                            consider(key, g);
                        }
                    }
                }
            }
        }
    }
    match arg {
        None => Err(Error::Domain("no admissible source below the target".into())),
        Some(a) => Ok(BoundaryResult { value: best, argmax: a, at_edge: a == lo || a == hi }),
    }
}

/// One row of the reverse recursion `R(x, y) = w(x, y) + max(R(x + 1, y), R(x, y + 1))`
/// over `x ∈ [0, target.0]`, with `R(target) = w(target)`.
fn sweep_row_reverse<W: SiteWeights + ?Sized>(w: &W, row: &mut [i64], y: i64, target: (i64, i64)) {
    let mut right = NEG;
    for x in (0..row.len()).rev() {
        let xi = x as i64;
        let prev = if xi == target.0 && y == target.1 { 0 } else { right.max(row[x]) };
        let v = if prev <= NEG { NEG } else { prev + w.weight(xi, y) };
        row[x] = v;
        right = v;
    }
}
