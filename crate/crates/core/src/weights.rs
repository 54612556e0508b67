//! Deterministic geometric weight fields.
//!
//! A site with success parameter `α` carries `P(w = k) = α(1 − α)^k`; the bulk
//! parameter is `α = 1 − q`. Weights are inverse-transform samples of the
//! counter-based uniform [`crate::rng::site_uniform`], so every weight is a pure
//! function of `(seed, i, j)` and fields with different parameters but the same
//! seed are monotonically coupled.

use crate::error::{Error, Result};
use crate::rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// `w ≥ 0`.
    ZeroBased,
    /// `w* = w + 1 ≥ 1`, the TASEP waiting times.
    OneBased,
}

/// Finitely many columns or rows with a drifted parameter
/// `α = 1 − √q (1 − 2w/(𝐝₀ N^{1/3}))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Inhomogeneity {
    /// Columns `0..k`; column `i − 1` uses `drifts[i − 1]`.
    Columns { drifts: Vec<f64>, n: u64 },
    /// Rows `offset + 1 ..= offset + k`; row `offset + m` uses `drifts[m − 1]`.
    Rows { offset: i64, drifts: Vec<f64>, n: u64 },
    /// Row 0 (`i ≥ 1`) uses `w_plus`, column 0 (`j ≥ 1`) uses `w_minus`,
    /// and `w(0, 0) = 0`.
    BothAxes { w_plus: f64, w_minus: f64, n: u64 },
    /// `w(0, 0) = 0`, all other sites bulk.
    PinnedSite,
}

impl Inhomogeneity {
    fn is_pinned(&self, i: i64, j: i64) -> bool {
        matches!(self, Inhomogeneity::BothAxes { .. } | Inhomogeneity::PinnedSite) && i == 0 && j == 0
    }
}

fn drifted(q: f64, w: f64, n: u64) -> f64 {
    let d0 = (1.0 + q.sqrt()).cbrt() / (2.0 * q.cbrt());
    1.0 - q.sqrt() * (1.0 - 2.0 * w / (d0 * (n as f64).cbrt()))
}

/// Success parameter of site `(i, j)`.
pub fn site_parameter(spec: Option<&Inhomogeneity>, q: f64, i: i64, j: i64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Parameter(format!("q = {q} not in (0, 1)")));
    }
    let alpha = match spec {
        None | Some(Inhomogeneity::PinnedSite) => 1.0 - q,
        Some(Inhomogeneity::Columns { drifts, n }) => {
            if i >= 0 && (i as usize) < drifts.len() {
                drifted(q, drifts[i as usize], *n)
            } else {
                1.0 - q
            }
        }
        Some(Inhomogeneity::Rows { offset, drifts, n }) => {
            let m = j - offset;
            if m >= 1 && (m as usize) <= drifts.len() {
                drifted(q, drifts[m as usize - 1], *n)
            } else {
                1.0 - q
            }
        }
        Some(Inhomogeneity::BothAxes { w_plus, w_minus, n }) => {
            if i >= 1 && j == 0 {
                drifted(q, *w_plus, *n)
            } else if i == 0 && j >= 1 {
                drifted(q, *w_minus, *n)
            } else {
                1.0 - q
            }
        }
    };
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::SiteParameter { i, j, alpha })
    }
}

/// `⌊ln(1 − u) / ln(1 − α)⌋`; nonincreasing in `α` for fixed `u`.
pub fn geometric_inverse_sample(alpha: f64, u: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} not in (0, 1)")));
    }
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Parameter(format!("u = {u} not in [0, 1)")));
    }
    Ok(inverse_unchecked(alpha, u))
}

#[inline]
fn inverse_unchecked(alpha: f64, u: f64) -> u64 {
    ((-u).ln_1p() / (-alpha).ln_1p()).floor() as u64
}

const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

/// Integer thresholds reproducing [`geometric_inverse_sample`] bit-exactly:
/// `w ≥ k` iff `bits53 ≥ thresholds[k − 1]`.
#[derive(Debug, Clone)]
struct GeomTable {
    alpha: f64,
    thresholds: Vec<u64>,
}

impl GeomTable {
    fn new(alpha: f64) -> Self {
        let top = (1u64 << 53) - 1;
        let mut thresholds = Vec::new();
        let mut k = 1u64;
        loop {
            if inverse_unchecked(alpha, top as f64 * UNIT) < k {
                break;
            }
            // Smallest b with sample(b) >= k; sample is monotone in b.
            let (mut lo, mut hi) = (0u64, top);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if inverse_unchecked(alpha, mid as f64 * UNIT) >= k {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            thresholds.push(lo);
            k += 1;
        }
        GeomTable { alpha, thresholds }
    }

    #[inline(always)]
    fn sample(&self, bits: u64) -> u64 {
        let mut k = 0;
        for &t in &self.thresholds {
            if bits < t {
                return k;
            }
            k += 1;
        }
        inverse_unchecked(self.alpha, bits as f64 * UNIT)
    }
}

/// Seeded weight field. Cheap to clone; immutable after construction.
#[derive(Debug, Clone)]
pub struct WeightField {
    pub seed: u64,
    pub q: f64,
    pub variant: Variant,
    pub perturbation: Option<Inhomogeneity>,
    bulk: GeomTable,
    // Tables for the drifted lines, indexed like the drift vectors.
    lines: Vec<GeomTable>,
    axes: Option<(GeomTable, GeomTable)>,
}

impl WeightField {
    pub fn new(seed: u64, q: f64) -> Result<Self> {
        Self::build(seed, q, Variant::ZeroBased, None)
    }

    pub fn one_based(seed: u64, q: f64) -> Result<Self> {
        Self::build(seed, q, Variant::OneBased, None)
    }

    pub fn build(seed: u64, q: f64, variant: Variant, perturbation: Option<Inhomogeneity>) -> Result<Self> {
        let bulk_alpha = site_parameter(None, q, 0, 0)?;
        let mut lines = Vec::new();
        let mut axes = None;
        match &perturbation {
            Some(Inhomogeneity::Columns { drifts, .. }) => {
                for i in 0..drifts.len() as i64 {
                    lines.push(GeomTable::new(site_parameter(perturbation.as_ref(), q, i, 0)?));
                }
            }
            Some(Inhomogeneity::Rows { offset, drifts, .. }) => {
                for m in 1..=drifts.len() as i64 {
                    lines.push(GeomTable::new(site_parameter(perturbation.as_ref(), q, 0, offset + m)?));
                }
            }
            Some(Inhomogeneity::BothAxes { .. }) => {
                let p = perturbation.as_ref();
                axes = Some((
                    GeomTable::new(site_parameter(p, q, 1, 0)?),
                    GeomTable::new(site_parameter(p, q, 0, 1)?),
                ));
            }
            Some(Inhomogeneity::PinnedSite) | None => {}
        }
        Ok(WeightField { seed, q, variant, perturbation, bulk: GeomTable::new(bulk_alpha), lines, axes })
    }

    /// Same seed and parameters, different variant.
    pub fn with_variant(&self, variant: Variant) -> Self {
        WeightField { variant, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        WeightField { seed, ..self.clone() }
    }

    pub fn offset(&self) -> i64 {
        match self.variant {
            Variant::ZeroBased => 0,
            Variant::OneBased => 1,
        }
    }

    #[inline(always)]
    fn table(&self, i: i64, j: i64) -> &GeomTable {
        match &self.perturbation {
            None | Some(Inhomogeneity::PinnedSite) => &self.bulk,
            Some(Inhomogeneity::Columns { drifts, .. }) => {
                if i >= 0 && (i as usize) < drifts.len() {
                    &self.lines[i as usize]
                } else {
                    &self.bulk
                }
            }
            Some(Inhomogeneity::Rows { offset, drifts, .. }) => {
                let m = j - offset;
                if m >= 1 && (m as usize) <= drifts.len() {
                    &self.lines[m as usize - 1]
                } else {
                    &self.bulk
                }
            }
            Some(Inhomogeneity::BothAxes { .. }) => {
                let (row, col) = self.axes.as_ref().expect("axes tables");
                if i >= 1 && j == 0 {
                    row
                } else if i == 0 && j >= 1 {
                    col
                } else {
                    &self.bulk
                }
            }
        }
    }

    /// Weight at `(i, j)`.
    #[inline(always)]
    pub fn weight_at(&self, i: i64, j: i64) -> i64 {
        if let Some(p) = &self.perturbation {
            if p.is_pinned(i, j) {
                return 0;
            }
        }
        let bits = rng::site_bits53(self.seed, i, j);
        self.table(i, j).sample(bits) as i64 + self.offset()
    }

    /// The uniform behind `weight_at(i, j)`.
    pub fn uniform_at(&self, i: i64, j: i64) -> f64 {
        rng::site_uniform(self.seed, i, j)
    }

    pub fn site_parameter(&self, i: i64, j: i64) -> f64 {
        site_parameter(self.perturbation.as_ref(), self.q, i, j).expect("validated at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bulk_parameter_and_drifted_column() {
        assert_eq!(site_parameter(None, 0.25, 3, 4).unwrap(), 0.75);
        let cols = Inhomogeneity::Columns { drifts: vec![0.0], n: 1000 };
        assert!((site_parameter(Some(&cols), 0.25, 0, 7).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(site_parameter(Some(&cols), 0.25, 1, 7).unwrap(), 0.75);
        let cols = Inhomogeneity::Columns { drifts: vec![1.0], n: 1000 };
        let a = site_parameter(Some(&cols), 0.25, 0, 0).unwrap();
        assert!((a - 0.610064).abs() < 1e-6, "{a}");
    }

    #[test]
    fn invalid_parameter_names_site() {
        let cols = Inhomogeneity::Columns { drifts: vec![0.0, -100.0], n: 8 };
        match site_parameter(Some(&cols), 0.25, 1, 0) {
            Err(Error::SiteParameter { i: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(WeightField::build(1, 0.25, Variant::ZeroBased, Some(cols)).is_err());
        assert!(WeightField::new(1, 1.0).is_err());
    }

    #[test]
    fn inverse_sample_examples() {
        assert_eq!(geometric_inverse_sample(0.75, 0.0).unwrap(), 0);
        assert_eq!(geometric_inverse_sample(0.75, 0.9375 - 1e-12).unwrap(), 1);
        assert!(geometric_inverse_sample(0.5, 0.9).unwrap() >= geometric_inverse_sample(0.75, 0.9).unwrap());
        assert!(geometric_inverse_sample(1.0, 0.5).is_err());
        assert!(geometric_inverse_sample(0.5, 1.0).is_err());
    }

    #[test]
    fn table_matches_formula_exactly() {
        for &q in &[0.1, 0.25, 0.5, 0.9] {
            let f = WeightField::new(11, q).unwrap();
            for i in 0..300 {
                for j in 0..300 {
                    let u = f.uniform_at(i, j);
                    assert_eq!(f.weight_at(i, j) as u64, geometric_inverse_sample(1.0 - q, u).unwrap());
                }
            }
        }
    }

    #[test]
    fn table_matches_formula_near_thresholds() {
        let t = GeomTable::new(0.75);
        for &b in &t.thresholds {
            for d in [-2i64, -1, 0, 1, 2] {
                let bits = (b as i64 + d).max(0) as u64;
                assert_eq!(t.sample(bits), inverse_unchecked(0.75, bits as f64 * UNIT));
            }
        }
    }

    #[test]
    fn one_based_and_pinned() {
        let z = WeightField::new(5, 0.25).unwrap();
        let o = z.with_variant(Variant::OneBased);
        for i in 0..20 {
            assert_eq!(o.weight_at(i, 2 * i), z.weight_at(i, 2 * i) + 1);
        }
        let p = WeightField::build(5, 0.25, Variant::OneBased, Some(Inhomogeneity::PinnedSite)).unwrap();
        assert_eq!(p.weight_at(0, 0), 0);
        assert_eq!(p.weight_at(1, 0), o.weight_at(1, 0));
    }

    #[test]
    fn mean_and_zero_mass() {
        let f = WeightField::new(1, 0.25).unwrap();
        let n = 1_000_000;
        let (mut sum, mut zeros) = (0i64, 0u64);
        for k in 0..n {
            let w = f.weight_at(k % 1000, k / 1000);
            sum += w;
            zeros += (w == 0) as u64;
        }
        let mean = sum as f64 / n as f64;
        assert!((mean - 1.0 / 3.0).abs() < 0.005, "{mean}");
        assert!((zeros as f64 / n as f64 - 0.75).abs() < 0.003);
    }

    #[test]
    fn coupled_fields_are_monotone_in_parameter() {
        let lo = WeightField::build(9, 0.25, Variant::ZeroBased, Some(Inhomogeneity::Columns { drifts: vec![-1.0], n: 500 })).unwrap();
        let hi = WeightField::build(9, 0.25, Variant::ZeroBased, Some(Inhomogeneity::Columns { drifts: vec![1.0], n: 500 })).unwrap();
        for j in 0..10_000 {
            assert!(lo.weight_at(0, j) >= hi.weight_at(0, j));
            assert_eq!(lo.weight_at(1, j), hi.weight_at(1, j));
        }
    }
}
