//! Smoothed density curves, error metric, counting and slicing.
//!
//! All integrals use the trapezoid rule. Integration and slicing clamp
//! negative values to zero (KPM curves oscillate); stored curves keep
//! their raw values.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Kpm,
    Lanczos,
    /// Smoothed exact eigenvalues.
    Exact,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Kpm => "kpm",
            Method::Lanczos => "lanczos",
            Method::Exact => "exact",
        }
    }
}

/// Run parameters recorded alongside a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub method: Method,
    pub n: usize,
    pub m: Option<usize>,
    pub n_vec: Option<usize>,
    pub seed: Option<u64>,
    pub sigma: Option<f64>,
    pub tau: Option<f64>,
    /// Degrees of the `B⁻¹` and `B^{-1/2}` surrogates.
    pub k1: Option<usize>,
    pub k2: Option<usize>,
}

impl CurveMeta {
    pub fn new(method: Method, n: usize) -> Self {
        Self { method, n, m: None, n_vec: None, seed: None, sigma: None, tau: None, k1: None, k2: None }
    }

    pub fn with_lanczos(mut self, m: usize, n_vec: usize, seed: u64, sigma: f64) -> Self {
        self.m = Some(m);
        self.n_vec = Some(n_vec);
        self.seed = Some(seed);
        self.sigma = Some(sigma);
        self
    }

    pub fn with_kpm(mut self, m: usize, n_vec: usize, seed: u64) -> Self {
        self.m = Some(m);
        self.n_vec = Some(n_vec);
        self.seed = Some(seed);
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_approximants(mut self, tau: f64, k1: usize, k2: usize) -> Self {
        self.tau = Some(tau);
        self.k1 = Some(k1);
        self.k2 = Some(k2);
        self
    }
}

/// Density values on an ascending grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
    meta: CurveMeta,
}

impl DosCurve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, meta: CurveMeta) -> Result<Self> {
        check_dim(grid.len(), values.len())?;
        if grid.is_empty() {
            return Err(Error::InvalidArgument("empty grid".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("grid must be finite and strictly increasing".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { at: grid[i] });
        }
        Ok(Self { grid, values, meta })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &CurveMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut CurveMeta {
        &mut self.meta
    }

    pub fn lo(&self) -> f64 {
        self.grid[0]
    }

    pub fn hi(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    /// Trapezoid integral of the raw values over the whole grid.
    pub fn trapezoid(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1]))
            .sum()
    }

    /// Same curve with values multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v * s).collect(), meta: self.meta.clone() }
    }

    /// Linear interpolation of `max(φ, 0)`; `x` must lie in the grid span.
    fn clamped_at(&self, x: f64) -> f64 {
        let g = &self.grid;
        let j = match g.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(j) => return self.values[j].max(0.0),
            Err(j) => j,
        };
        let (x0, x1) = (g[j - 1], g[j]);
        let (y0, y1) = (self.values[j - 1].max(0.0), self.values[j].max(0.0));
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn check_span(&self, a: f64, b: f64) -> Result<()> {
        if !(a <= b) {
            return Err(Error::InvalidInterval { a, b });
        }
        if a < self.lo() || b > self.hi() {
            return Err(Error::OutsideGrid { a, b, lo: self.lo(), hi: self.hi() });
        }
        Ok(())
    }
}

/// `g_σ(t) = exp(-t²/(2σ²)) / (√(2π) σ)`
pub fn gaussian(t: f64, sigma: f64) -> f64 {
    libm::exp(-t * t / (2.0 * sigma * sigma)) / (libm::sqrt(2.0 * PI) * sigma)
}

/// `Σ_j w_j g_σ(t_i - λ_j)` at each grid point, by direct summation.
pub fn smooth_values(points: impl Iterator<Item = (f64, f64)> + Clone, sigma: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    Ok(grid.iter().map(|&t| points.clone().map(|(l, w)| w * gaussian(t - l, sigma)).sum()).collect())
}

/// Gaussian-smoothed density of weighted point masses.
pub fn smooth_dos(points: &[(f64, f64)], sigma: f64, grid: &[f64]) -> Result<DosCurve> {
    let values = smooth_values(points.iter().copied(), sigma, grid)?;
    DosCurve::new(grid.to_vec(), values, CurveMeta::new(Method::Exact, points.len()).with_sigma(sigma))
}

/// Smoothed DOS of known eigenvalues, each with weight `1/n`.
pub fn exact_dos(eigs: &[f64], sigma: f64, grid: &[f64]) -> Result<DosCurve> {
    let w = 1.0 / eigs.len() as f64;
    let values = smooth_values(eigs.iter().map(move |&l| (l, w)), sigma, grid)?;
    DosCurve::new(grid.to_vec(), values, CurveMeta::new(Method::Exact, eigs.len()).with_sigma(sigma))
}

/// `σ = (λ_hi - λ_lo) / (60 √(2 ln 1.25))`
pub fn sigma_heuristic(lo: f64, hi: f64) -> f64 {
    (hi - lo) / (60.0 * libm::sqrt(2.0 * libm::log(1.25)))
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { hi } else { lo + i as f64 * step }).collect()
        }
    }
}

/// `n` cell midpoints of `[lo, hi]`; keeps clear of the interval ends,
/// where the KPM weight is singular.
pub fn midpoint_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * step).collect()
}

/// `Σ |φ̃(t_i) - φ(t_i)| / Σ |φ(t_i)|`, relative to the second curve.
pub fn l1_error(approx: &DosCurve, exact: &DosCurve) -> Result<f64> {
    if approx.grid != exact.grid {
        return Err(Error::GridMismatch);
    }
    let num: f64 = approx.values.iter().zip(&exact.values).map(|(a, e)| (a - e).abs()).sum();
    let den: f64 = exact.values.iter().map(|e| e.abs()).sum();
    Ok(num / den)
}

/// Estimated number of eigenvalues in `[a, b]`: trapezoid integral of
/// `n max(φ̃, 0)`, interpolating linearly at the ends.
pub fn count_estimate(curve: &DosCurve, a: f64, b: f64, n: usize) -> Result<f64> {
    curve.check_span(a, b)?;
    if a == b {
        return Ok(0.0);
    }
    let g = &curve.grid;
    let mut xs = vec![a];
    xs.extend(g.iter().copied().filter(|&x| x > a && x < b));
    xs.push(b);
    let mut s = 0.0;
    let mut prev = (a, curve.clamped_at(a));
    for &x in &xs[1..] {
        let y = curve.clamped_at(x);
        s += 0.5 * (x - prev.0) * (prev.1 + y);
        prev = (x, y);
    }
    Ok(n as f64 * s)
}

/// Breakpoints splitting `[a, b]` into slices of about equal estimated
/// eigenvalue count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSet {
    pub breakpoints: Vec<f64>,
    pub est_counts: Vec<f64>,
    pub total_est: f64,
    /// Exact per-slice counts, when an oracle spectrum was supplied.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub true_counts: Option<Vec<usize>>,
}

impl SliceSet {
    pub fn n_slices(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Counts eigenvalues per slice: `[t_i, t_{i+1})`, the last slice closed.
    pub fn count_true(&self, eigs: &[f64]) -> Vec<usize> {
        let bp = &self.breakpoints;
        let ns = self.n_slices();
        (0..ns)
            .map(|i| {
                eigs.iter()
                    .filter(|&&l| l >= bp[i] && (l < bp[i + 1] || (i + 1 == ns && l <= bp[i + 1])))
                    .count()
            })
            .collect()
    }

    pub fn with_true_counts(mut self, eigs: &[f64]) -> Self {
        self.true_counts = Some(self.count_true(eigs));
        self
    }
}

/// Default resolution of the slicing grid.
pub const DEFAULT_SLICE_GRID: usize = 1000;

/// Splits `[a, b]` into `n_s` slices using the cumulative integral of
/// `max(φ̃, 0)` on `N + 1` evenly spaced points. Each interior
/// breakpoint is the first point whose accumulated mass since the
/// previous breakpoint reaches `y_N / n_s`; the last one is `b`.
/// Counts are scaled by the curve's dimension `meta.n`.
pub fn slice_spectrum(curve: &DosCurve, a: f64, b: f64, n_s: usize, big_n: usize) -> Result<SliceSet> {
    if n_s == 0 {
        return Err(Error::InvalidArgument("need at least one slice".into()));
    }
    if big_n < 10 * n_s {
        return Err(Error::InvalidArgument(format!("slicing grid {big_n} is below 10 points per slice")));
    }
    if !(a < b) {
        return Err(Error::InvalidInterval { a, b });
    }
    curve.check_span(a, b)?;
    let xs = uniform_grid(a, b, big_n + 1);
    let ys: Vec<f64> = xs.iter().map(|&x| curve.clamped_at(x)).collect();
    let mut cum = vec![0.0; big_n + 1];
    for j in 1..=big_n {
        cum[j] = cum[j - 1] + 0.5 * (xs[j] - xs[j - 1]) * (ys[j - 1] + ys[j]);
    }
    let total = cum[big_n];
    if !(total > 0.0) {
        return Err(Error::NoMass { a, b });
    }
    let quota = total / n_s as f64;
    let mut breakpoints = vec![a];
    let mut marks = vec![0.0];
    let mut last = 0.0;
    for j in 1..big_n {
        if breakpoints.len() == n_s {
            break;
        }
        if cum[j] - last >= quota {
            breakpoints.push(xs[j]);
            marks.push(cum[j]);
            last = cum[j];
        }
    }
    breakpoints.push(b);
    marks.push(total);
    let n = curve.meta.n as f64;
    let est_counts = marks.windows(2).map(|w| n * (w[1] - w[0])).collect();
    Ok(SliceSet { breakpoints, est_counts, total_est: n * total, true_counts: None })
}
