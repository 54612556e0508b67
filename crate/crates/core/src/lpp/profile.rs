use super::{SiteWeights, NEG};
use crate::error::{Error, Result};
use crate::lattice::ScalingParams;
use serde::Serialize;

/// `Ǧ(n + k, n − k)` for `k ∈ [k_min, k_max]`, together with the off-level
/// values `Ǧ(n + k, n − k − 1)` for `k ∈ [k_min, k_max)` that the saw-tooth
/// passes through at half-integer offsets.
#[derive(Debug, Clone, Serialize)]
pub struct AntidiagonalProfile {
    pub n: u64,
    pub k_min: i64,
    pub k_max: i64,
    pub values: Vec<i64>,
    pub half: Vec<i64>,
}

impl AntidiagonalProfile {
    pub fn at(&self, k: i64) -> Option<i64> {
        if k < self.k_min || k > self.k_max {
            return None;
        }
        Some(self.values[(k - self.k_min) as usize])
    }

    pub fn max(&self) -> i64 {
        *self.values.iter().max().expect("nonempty profile")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,value\n");
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(&format!("{},{v}\n", self.k_min + i as i64));
        }
        s
    }
}

/// One forward sweep from the origin producing the profiles of every
/// requested level over the same `k` window.
pub fn antidiagonal_profiles<W: SiteWeights + ?Sized>(
    w: &W,
    levels: &[u64],
    k_min: i64,
    k_max: i64,
) -> Result<Vec<AntidiagonalProfile>> {
    if levels.is_empty() || k_max < k_min {
        return Err(Error::Window(format!("empty profile request k ∈ [{k_min}, {k_max}]")));
    }
    for &n in levels {
        let n = n as i64;
        if k_min < -n || k_max > n {
            return Err(Error::Window(format!("k ∈ [{k_min}, {k_max}] exceeds |k| ≤ {n}")));
        }
    }
    let top = *levels.iter().max().unwrap() as i64;
    // Rows needed: y ≤ n − k_min; columns: x ≤ n + k_max.
    let y_max = top - k_min;
    let x_max = top + k_max;
    let len = k_max - k_min + 1;
    let mut out: Vec<AntidiagonalProfile> = levels
        .iter()
        .map(|&n| AntidiagonalProfile {
            n,
            k_min,
            k_max,
            values: vec![0; len as usize],
            half: vec![0; (len - 1) as usize],
        })
        .collect();
    let mut row = vec![NEG; (x_max + 1) as usize];
    for y in 0..=y_max {
        // Cells beyond the top level's antidiagonal are never read.
        let x_end = (2 * top - y).min(x_max);
        let mut left = NEG;
        for x in 0..=x_end {
            let xi = x as usize;
            let below = row[xi];
            let prev = if x == 0 && y == 0 { 0 } else { left.max(below) };
            let v = prev + w.weight(x, y);
            row[xi] = v;
            left = v;
        }
        for p in out.iter_mut() {
            let n = p.n as i64;
            let k = n - y;
            if k >= k_min && k <= k_max {
                p.values[(k - k_min) as usize] = row[(n + k) as usize];
            }
            // Half level: (n + k, n − k − 1) with y = n − k − 1.
            let k = n - y - 1;
            if k >= k_min && k < k_max {
                p.half[(k - k_min) as usize] = row[(n + k) as usize];
            }
        }
    }
    Ok(out)
}

pub fn antidiagonal_profile<W: SiteWeights + ?Sized>(
    w: &W,
    n: u64,
    k_min: i64,
    k_max: i64,
) -> Result<AntidiagonalProfile> {
    Ok(antidiagonal_profiles(w, &[n], k_min, k_max)?.remove(0))
}

/// Piecewise-linear process sampled at its breakpoints.
#[derive(Debug, Clone, Serialize)]
pub struct SampledProcess {
    pub s: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledProcess {
    pub fn at(&self, s: f64) -> Option<f64> {
        let n = self.s.len();
        if n == 0 || s < self.s[0] || s > self.s[n - 1] {
            return None;
        }
        let i = self.s.partition_point(|&t| t <= s).min(n - 1).max(1);
        let (s0, s1) = (self.s[i - 1], self.s[i]);
        let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        Some((1.0 - t) * self.values[i - 1] + t * self.values[i])
    }

    /// `max_{|s| ≤ m} |self − other|` for processes on the same breakpoints;
    /// a piecewise-linear difference peaks at a breakpoint or at `±m`.
    pub fn max_abs_diff(&self, other: &SampledProcess, m: f64) -> Result<f64> {
        if self.s != other.s {
            return Err(Error::Domain("processes sampled on different grids".into()));
        }
        let mut d = 0.0f64;
        for (i, &s) in self.s.iter().enumerate() {
            if s.abs() <= m {
                d = d.max((self.values[i] - other.values[i]).abs());
            }
        }
        for e in [-m, m] {
            let a = self.at(e).ok_or_else(|| Error::Window(format!("s = {e} outside the sampled window")))?;
            let b = other.at(e).unwrap();
            d = d.max((a - b).abs());
        }
        Ok(d)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,value\n");
        for (s, v) in self.s.iter().zip(&self.values) {
            out.push_str(&format!("{s},{v}\n"));
        }
        out
    }
}

/// `H_N(s) = (Ǧ(N + l⁰(u) + u, N + l⁰(u) − u) − 𝐚₀N)/(𝐛₀N^{1/3})`, `u = s𝐜₀N^{2/3}`,
/// sampled at the saw-tooth breakpoints `u ∈ ½ℤ`. Integer `u = k` hits
/// `Ǧ(N + k, N − k)`, half-integer `u = k + ½` hits `Ǧ(N + k, N − k − 1)`, and
/// the saw-tooth interpolates linearly in between.
pub fn rescale_h(profile: &AntidiagonalProfile, params: &ScalingParams) -> SampledProcess {
    let nf = profile.n as f64;
    let u_unit = params.c0 * nf.powf(2.0 / 3.0);
    let b = params.b0 * nf.cbrt();
    let mean = params.a0 * nf;
    let mut s = Vec::with_capacity(2 * profile.values.len());
    let mut values = Vec::with_capacity(2 * profile.values.len());
    for (i, &v) in profile.values.iter().enumerate() {
        let k = profile.k_min + i as i64;
        s.push(k as f64 / u_unit);
        values.push((v as f64 - mean) / b);
        if i < profile.half.len() {
            s.push((k as f64 + 0.5) / u_unit);
            values.push((profile.half[i] as f64 - mean) / b);
        }
    }
    SampledProcess { s, values }
}

/// `H̃_N(s)` with the level shift `ℓ_N(s)N^α` rounded to the nearest integer
/// `d(s)`, evaluated on the saw-tooth of level `N + d(s)` and centred by
/// `𝐚₀(N + d(s))`. Scale and abscissa use `N`, as in `H_N`.
pub fn rescale_h_general<W: SiteWeights + ?Sized>(
    w: &W,
    n: u64,
    alpha: f64,
    ell_n: &dyn Fn(f64) -> f64,
    k_min: i64,
    k_max: i64,
    params: &ScalingParams,
) -> Result<SampledProcess> {
    Ok(paired_h(w, n, alpha, ell_n, k_min, k_max, params)?.1)
}

/// `(H_N, H̃_N)` from one sweep of the same weights.
pub fn paired_h<W: SiteWeights + ?Sized>(
    w: &W,
    n: u64,
    alpha: f64,
    ell_n: &dyn Fn(f64) -> f64,
    k_min: i64,
    k_max: i64,
    params: &ScalingParams,
) -> Result<(SampledProcess, SampledProcess)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha = {alpha} not in (0, 1)")));
    }
    let nf = n as f64;
    let u_unit = params.c0 * nf.powf(2.0 / 3.0);
    let shift = |u: f64| -> Result<i64> {
        let v = ell_n(u / u_unit) * nf.powf(alpha);
        if !v.is_finite() {
            return Err(Error::Domain(format!("ℓ_N not finite at s = {}", u / u_unit)));
        }
        Ok(v.round() as i64)
    };
    let mut shifts = Vec::new();
    for j in 2 * k_min..=2 * k_max {
        shifts.push(shift(j as f64 / 2.0)?);
    }
    let mut levels: Vec<u64> = vec![n];
    for &d in &shifts {
        let lv = n as i64 + d;
        if lv < 0 {
            return Err(Error::Window(format!("shifted level N + d = {lv} is negative")));
        }
        if !levels.contains(&(lv as u64)) {
            levels.push(lv as u64);
        }
    }
    let profiles = antidiagonal_profiles(w, &levels, k_min, k_max)?;
    let base = rescale_h(&profiles[0], params);
    let mut tilde = base.clone();
    for (idx, &d) in shifts.iter().enumerate() {
        let lv = (n as i64 + d) as u64;
        let p = profiles.iter().find(|p| p.n == lv).unwrap();
        // Breakpoint idx of the sampled process: even → integer k, odd → half.
        let i = idx / 2;
        let raw = if idx % 2 == 0 { p.values[i] } else { p.half[i] };
        tilde.values[idx] = (raw as f64 - params.a0 * lv as f64) / (params.b0 * nf.cbrt());
    }
    Ok((base, tilde))
}
