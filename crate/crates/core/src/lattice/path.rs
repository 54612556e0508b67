use super::constants::ScalingParams;
use crate::error::{Error, Result};
use serde::Serialize;

/// Lattice path made of unit right `(1, 0)` and down `(0, −1)` steps.
///
/// The continuous parameter `t ∈ [0, len − 1]` runs along the vertices; the
/// point at non-integer `t` lies on the segment between vertices `⌊t⌋` and
/// `⌊t⌋ + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DownRightPath {
    vertices: Vec<(i64, i64)>,
}

impl DownRightPath {
    pub fn new(vertices: Vec<(i64, i64)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Path("empty vertex list".into()));
        }
        for (k, w) in vertices.windows(2).enumerate() {
            let step = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            if step != (1, 0) && step != (0, -1) {
                return Err(Error::Path(format!("step {k} from {:?} to {:?} is not right or down", w[0], w[1])));
            }
        }
        Ok(DownRightPath { vertices })
    }

    pub fn point(p: (i64, i64)) -> Self {
        DownRightPath { vertices: vec![p] }
    }

    pub fn vertices(&self) -> &[(i64, i64)] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn point_at(&self, t: f64) -> Option<(f64, f64)> {
        if !(t >= 0.0 && t <= (self.len() - 1) as f64) {
            return None;
        }
        let k = (t.floor() as usize).min(self.len() - 1);
        let f = t - k as f64;
        let a = self.vertices[k];
        if f == 0.0 {
            return Some((a.0 as f64, a.1 as f64));
        }
        let b = self.vertices[k + 1];
        Some((a.0 as f64 + f * (b.0 - a.0) as f64, a.1 as f64 + f * (b.1 - a.1) as f64))
    }

    /// Vertices weakly dominated by `target`, in path order.
    pub fn clipped(&self, target: (i64, i64)) -> Vec<(i64, i64)> {
        self.vertices.iter().copied().filter(|&(x, y)| x <= target.0 && y <= target.1).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y\n");
        for (x, y) in &self.vertices {
            s.push_str(&format!("{x},{y}\n"));
        }
        s
    }
}

/// Saw-tooth profile: `k − s` on `[k, k + ½]`, `s − k − 1` on `[k + ½, k + 1]`.
pub fn sawtooth_l0(s: f64) -> f64 {
    let k = s.floor();
    if s - k <= 0.5 {
        k - s
    } else {
        s - k - 1.0
    }
}

/// Staircase `{(−l⁰(s) + s, −l⁰(s) − s)}` for `s ∈ [k_lo, k_hi]`: vertices
/// `(k, −k)` and `(k + 1, −k)`.
pub fn sawtooth_path(k_lo: i64, k_hi: i64) -> Result<DownRightPath> {
    if k_hi < k_lo {
        return Err(Error::Path(format!("empty range [{k_lo}, {k_hi}]")));
    }
    let mut v = Vec::with_capacity(2 * (k_hi - k_lo) as usize + 1);
    for k in k_lo..k_hi {
        v.push((k, -k));
        v.push((k + 1, -k));
    }
    v.push((k_hi, -k_hi));
    DownRightPath::new(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProfileVariant {
    /// Diagonal offset unit `𝐝₀N^{1/3}`.
    Hyp,
    /// Diagonal offset unit `𝐝₀*N^{1/3}`.
    HypStar,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfilePath {
    pub path: DownRightPath,
    /// `max |realized offset − (ℓ + l_N)|` in units of `ℓ`.
    pub rounding_discrepancy: f64,
}

/// Staircase whose points sit at `(u − (ℓ(s) + l_N(s)) D, −u − (ℓ(s) + l_N(s)) D)`
/// with `u = s𝐜₀N^{2/3}` and `D = 𝐝₀N^{1/3}` (or `𝐝₀*N^{1/3}`), rounded to the
/// lattice, for `s` in `[s_lo, s_hi]`.
///
/// In coordinates `m = x − y`, `d = x + y` a down-right path is a ±1 walk
/// `m ↦ d(m)`; `d(m)` is the integer of parity `m` nearest to the target
/// `−2(ℓ + l_N)D`, ties upward. Rounding moves `d` by at most 1, so the
/// discrepancy is at most `1/(2D)`.
pub fn path_from_profile(
    ell: &dyn Fn(f64) -> f64,
    l_n: &dyn Fn(f64) -> f64,
    n: u64,
    params: &ScalingParams,
    variant: ProfileVariant,
    s_lo: f64,
    s_hi: f64,
) -> Result<ProfilePath> {
    let nf = n as f64;
    let u_unit = params.c0 * nf.powf(2.0 / 3.0);
    let d_unit = match variant {
        ProfileVariant::Hyp => params.d0,
        ProfileVariant::HypStar => params.d0_star,
    } * nf.cbrt();
    if !(s_hi > s_lo) {
        return Err(Error::Window(format!("empty interval ({s_lo}, {s_hi})")));
    }
    let m_lo = (2.0 * u_unit * s_lo).ceil() as i64;
    let m_hi = (2.0 * u_unit * s_hi).floor() as i64;
    if m_hi <= m_lo {
        return Err(Error::Window(format!("N = {n} too small for interval ({s_lo}, {s_hi})")));
    }
    let mut vertices = Vec::with_capacity((m_hi - m_lo + 1) as usize);
    let mut worst = 0.0f64;
    let mut prev: Option<i64> = None;
    for m in m_lo..=m_hi {
        let s = m as f64 / (2.0 * u_unit);
        let offset = ell(s) + l_n(s);
        if !offset.is_finite() {
            return Err(Error::Path(format!("profile not finite at s = {s}")));
        }
        let target = -2.0 * offset * d_unit;
        let d = nearest_with_parity(target, m);
        if let Some(p) = prev {
            if (d - p).abs() != 1 {
                return Err(Error::Path(format!("profile too steep near s = {s} for N = {n}")));
            }
        }
        prev = Some(d);
        worst = worst.max((target - d as f64).abs() / (2.0 * d_unit));
        vertices.push(((m + d) / 2, (d - m) / 2));
    }
    Ok(ProfilePath { path: DownRightPath::new(vertices)?, rounding_discrepancy: worst })
}

fn nearest_with_parity(target: f64, m: i64) -> i64 {
    // Candidates of the right parity bracketing the target.
    let base = target.floor() as i64;
    let lo = if (base - m).rem_euclid(2) == 0 { base } else { base - 1 };
    let hi = lo + 2;
    if target - (lo as f64) < (hi as f64) - target {
        lo
    } else {
        hi
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HeightPathMeta {
    /// Leftmost vacant site, or `None` when the window has none (`K₁ = −∞`).
    pub k1: Option<i64>,
    /// One plus the rightmost occupied site, or `None` (`K₂ = +∞`).
    pub k2: Option<i64>,
    pub left_truncated: bool,
    pub right_truncated: bool,
}

/// Polygonal chain `{((s + h(s))/2, (h(s) − s)/2) : s ∈ [K₁, K₂]}` of a height
/// profile `h(lo), h(lo + 1), …`. A `+1` increment (vacant site) is a right
/// step and a `−1` increment (occupied site) is a down step. Infinite ends are
/// cut at the window and flagged in the metadata.
pub fn path_from_heights(lo: i64, h: &[i64]) -> Result<(DownRightPath, HeightPathMeta)> {
    if h.is_empty() {
        return Err(Error::Path("empty height profile".into()));
    }
    for (k, w) in h.windows(2).enumerate() {
        if (w[1] - w[0]).abs() != 1 {
            return Err(Error::Path(format!("increment at site {} is not ±1", lo + k as i64)));
        }
    }
    for (k, &v) in h.iter().enumerate() {
        if (v - (lo + k as i64)).rem_euclid(2) != 0 {
            return Err(Error::Path(format!("parity violated at site {}", lo + k as i64)));
        }
    }
    let hi = lo + h.len() as i64 - 1;
    let vacant = |s: i64| h[(s - lo + 1) as usize] - h[(s - lo) as usize] == 1;
    let k1 = (lo..hi).find(|&s| vacant(s));
    let k2 = (lo..hi).rev().find(|&s| !vacant(s)).map(|s| s + 1);
    let from = k1.unwrap_or(lo);
    let to = k2.unwrap_or(hi);
    let meta = HeightPathMeta { k1, k2, left_truncated: k1.is_none(), right_truncated: k2.is_none() };
    if to < from {
        // Every particle lies to the left of every hole: the chain is the
        // single corner at K₁ = K₂.
        let s = from;
        let v = h[(s - lo) as usize];
        return Ok((DownRightPath::point(((s + v) / 2, (v - s) / 2)), meta));
    }
    let vertices = (from..=to)
        .map(|s| {
            let v = h[(s - lo) as usize];
            ((s + v) / 2, (v - s) / 2)
        })
        .collect();
    Ok((DownRightPath::new(vertices)?, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sawtooth_values() {
        assert_eq!(sawtooth_l0(0.0), 0.0);
        assert_eq!(sawtooth_l0(1.0), 0.0);
        assert_eq!(sawtooth_l0(0.5), -0.5);
        for &s in &[0.1, 0.37, 0.9] {
            assert!((sawtooth_l0(s + 1.0) - sawtooth_l0(s)).abs() < 1e-12);
        }
        let p = sawtooth_path(0, 1).unwrap();
        assert_eq!(p.vertices(), &[(0, 0), (1, 0), (1, -1)]);
    }

    #[test]
    fn sawtooth_matches_formula() {
        let p = sawtooth_path(-3, 3).unwrap();
        for (k, v) in p.vertices().iter().enumerate() {
            let s = -3.0 + 0.5 * k as f64;
            let l = sawtooth_l0(s);
            assert_eq!((v.0 as f64, v.1 as f64), (-l + s, -l - s));
        }
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(DownRightPath::new(vec![(0, 0), (1, 1)]).is_err());
        assert!(DownRightPath::new(vec![(0, 0), (0, 1)]).is_err());
        assert!(DownRightPath::new(vec![]).is_err());
    }

    #[test]
    fn point_at_interpolates() {
        let p = sawtooth_path(0, 1).unwrap();
        assert_eq!(p.point_at(0.5), Some((0.5, 0.0)));
        assert_eq!(p.point_at(1.25), Some((1.0, -0.25)));
        assert_eq!(p.point_at(2.5), None);
    }

    #[test]
    fn zero_profile_is_sawtooth() {
        let params = ScalingParams::new(0.25).unwrap();
        let pp = path_from_profile(&|_| 0.0, &|_| 0.0, 1000, &params, ProfileVariant::Hyp, -2.0, 2.0).unwrap();
        for &(x, y) in pp.path.vertices() {
            let m = x - y;
            let d = x + y;
            assert_eq!(d, if m.rem_euclid(2) == 0 { 0 } else { 1 });
        }
    }

    #[test]
    fn quadratic_profile_rounding_bound() {
        let params = ScalingParams::new(0.25).unwrap();
        let n = 10_000u64;
        let pp = path_from_profile(&|s| -s * s, &|_| 0.0, n, &params, ProfileVariant::Hyp, -1.5, 1.5).unwrap();
        assert!(pp.rounding_discrepancy <= 1.0 / (params.d0 * (n as f64).cbrt()));
    }

    #[test]
    fn heights_step_is_corner() {
        let lo = -10;
        let h: Vec<i64> = (lo..=10).map(|s: i64| s.abs()).collect();
        let (p, meta) = path_from_heights(lo, &h).unwrap();
        assert_eq!(p.vertices(), &[(0, 0)]);
        assert_eq!((meta.k1, meta.k2), (Some(0), Some(0)));
    }

    #[test]
    fn heights_flat_is_staircase() {
        let lo = -6;
        let h: Vec<i64> = (lo..=6).map(|s: i64| if s.rem_euclid(2) == 0 { 0 } else { -1 }).collect();
        let (p, _) = path_from_heights(lo, &h).unwrap();
        for &(x, y) in p.vertices() {
            assert!(x + y == 0 || x + y == -1);
        }
    }

    #[test]
    fn heights_all_vacant_is_horizontal() {
        let h: Vec<i64> = (0..=4).collect();
        let (p, meta) = path_from_heights(0, &h).unwrap();
        assert_eq!(p.vertices(), &[(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)]);
        assert!(meta.right_truncated);
    }
}
