//! Truncated Chebyshev expansions on an interval `[a, b]`.
//!
//! The variable `λ ∈ [a, b]` is mapped to `t = (λ - c) / h ∈ [-1, 1]` with
//! `c = (a + b) / 2` and `h = (b - a) / 2`. Coefficients are the projection
//! integrals `γ_i = (2 - δ_{i0}) / π ∫ f T_i / √(1 - t²)` evaluated by
//! Gauss–Chebyshev quadrature.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::op::LinearOp;
use crate::vecops::axpy;

/// Default ceiling for [`select_degree`].
pub const DEFAULT_K_MAX: usize = 512;

/// Smallest sup-norm grid accepted by [`sup_error_rel`].
pub const MIN_GRID: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChebInterval {
    a: f64,
    b: f64,
}

impl ChebInterval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn h(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    /// `b / a`, the condition number when `[a, b]` encloses `spec(B)`.
    pub fn kappa(&self) -> f64 {
        self.b / self.a
    }

    pub fn to_unit(&self, lambda: f64) -> f64 {
        (lambda - self.c()) / self.h()
    }

    pub fn from_unit(&self, t: f64) -> f64 {
        self.c() + self.h() * t
    }
}

/// Which function an expansion approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FnKind {
    /// `1/λ`
    Inverse,
    /// `1/√λ`
    InverseSqrt,
    Custom,
}

impl FnKind {
    /// Evaluates the function; `None` for [`FnKind::Custom`].
    pub fn eval(self, lambda: f64) -> Option<f64> {
        match self {
            FnKind::Inverse => Some(1.0 / lambda),
            FnKind::InverseSqrt => Some(1.0 / libm::sqrt(lambda)),
            FnKind::Custom => None,
        }
    }

    fn func(self) -> fn(f64) -> f64 {
        match self {
            FnKind::Inverse => |x| 1.0 / x,
            FnKind::InverseSqrt => |x| 1.0 / libm::sqrt(x),
            FnKind::Custom => |_| f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebExpansion {
    interval: ChebInterval,
    coeffs: Vec<f64>,
    kind: FnKind,
}

impl ChebExpansion {
    pub fn new(interval: ChebInterval, coeffs: Vec<f64>, kind: FnKind) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("an expansion needs at least one coefficient".into()));
        }
        Ok(Self { interval, coeffs, kind })
    }

    /// The constant expansion `f ≡ value`.
    pub fn constant(interval: ChebInterval, value: f64) -> Self {
        Self { interval, coeffs: vec![value], kind: FnKind::Custom }
    }

    pub fn interval(&self) -> ChebInterval {
        self.interval
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn kind(&self) -> FnKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `Σ γ_i T_i((λ - c)/h)` by the Clenshaw recurrence. Points outside
    /// `[a, b]` are evaluated as the polynomial continuation; use
    /// [`ChebExpansion::contains`] to flag them.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.eval_unit(self.interval.to_unit(lambda))
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.interval.a && lambda <= self.interval.b
    }

    /// Evaluates at the mapped variable `t`.
    pub fn eval_unit(&self, t: f64) -> f64 {
        clenshaw(&self.coeffs, t)
    }
}

fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &g in coeffs[1..].iter().rev() {
        let b0 = 2.0 * t * b1 - b2 + g;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + coeffs[0]
}

/// Number of quadrature nodes used for a degree-`k` fit.
pub fn quadrature_nodes_for(k: usize) -> usize {
    (4 * k).max(8)
}

/// Sup-norm grid size for an expansion of degree `k`.
pub fn grid_size_for(k: usize) -> usize {
    (100 * (k + 1)).max(MIN_GRID)
}

/// Angles `θ_j = (j + 1/2) π / ν` of the `ν`-point Gauss–Chebyshev rule;
/// the nodes are `cos θ_j`.
pub fn gauss_chebyshev_angles(nu: usize) -> Vec<f64> {
    (0..nu).map(|j| (j as f64 + 0.5) * PI / nu as f64).collect()
}

/// `∫_{-1}^{1} p(s) / √(1 - s²) ds` with the `ν`-point rule, exact for
/// polynomials up to degree `2ν - 1`.
pub fn gauss_chebyshev_integrate(p: impl Fn(f64) -> f64, nu: usize) -> f64 {
    let s: f64 = gauss_chebyshev_angles(nu).into_iter().map(|th| p(libm::cos(th))).sum();
    s * PI / nu as f64
}

/// Degree-`k` Chebyshev projection of `f` on `iv`.
pub fn cheb_coeffs(f: impl Fn(f64) -> f64, iv: ChebInterval, k: usize, kind: FnKind) -> Result<ChebExpansion> {
    let nu = quadrature_nodes_for(k);
    let angles = gauss_chebyshev_angles(nu);
    let mut fv = Vec::with_capacity(nu);
    for &th in &angles {
        let x = iv.from_unit(libm::cos(th));
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::NonFinite { at: x });
        }
        fv.push(y);
    }
    let coeffs = (0..=k)
        .map(|i| {
            let s: f64 = fv.iter().zip(&angles).map(|(y, &th)| y * libm::cos(i as f64 * th)).sum();
            let w = if i == 0 { 1.0 } else { 2.0 };
            w * s / nu as f64
        })
        .collect();
    Ok(ChebExpansion { interval: iv, coeffs, kind })
}

/// [`cheb_coeffs`] for one of the built-in functions.
pub fn cheb_fit(kind: FnKind, iv: ChebInterval, k: usize) -> Result<ChebExpansion> {
    if kind == FnKind::Custom {
        return Err(Error::InvalidArgument("custom functions need cheb_coeffs".into()));
    }
    cheb_coeffs(kind.func(), iv, k, kind)
}

/// Estimated `max |(f - e) / f|` on a uniform `n_grid`-point grid over
/// `[a, b]` (endpoints included). This is a sampled estimate, not an
/// exact norm.
pub fn sup_error_rel(e: &ChebExpansion, f: impl Fn(f64) -> f64, n_grid: usize) -> Result<f64> {
    sup_error(e, f, n_grid, true)
}

/// Like [`sup_error_rel`] but for the absolute error `max |f - e|`.
pub fn sup_error_abs(e: &ChebExpansion, f: impl Fn(f64) -> f64, n_grid: usize) -> Result<f64> {
    sup_error(e, f, n_grid, false)
}

fn sup_error(e: &ChebExpansion, f: impl Fn(f64) -> f64, n_grid: usize, relative: bool) -> Result<f64> {
    if n_grid < MIN_GRID {
        return Err(Error::InvalidArgument(format!("sup-norm grid needs at least {MIN_GRID} points, got {n_grid}")));
    }
    let (a, b) = (e.interval.a, e.interval.b);
    let step = (b - a) / (n_grid - 1) as f64;
    let mut worst = 0.0f64;
    for i in 0..n_grid {
        let x = if i == n_grid - 1 { b } else { a + i as f64 * step };
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::NonFinite { at: x });
        }
        let mut err = (y - e.eval(x)).abs();
        if relative {
            if y == 0.0 {
                return Err(Error::NonFinite { at: x });
            }
            err /= y.abs();
        }
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Lowest degree `k ≤ k_max` whose relative sup error is at most `tau`,
/// found by a linear search with the grid of [`grid_size_for`].
pub fn select_degree(
    f: impl Fn(f64) -> f64,
    iv: ChebInterval,
    tau: f64,
    kind: FnKind,
    k_max: usize,
) -> Result<ChebExpansion> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidArgument(format!("tau must lie in (0, 1), got {tau}")));
    }
    let mut best = (0usize, f64::INFINITY);
    for k in 0..=k_max {
        let e = cheb_coeffs(&f, iv, k, kind)?;
        let err = sup_error_rel(&e, &f, grid_size_for(k))?;
        if err <= tau {
            return Ok(e);
        }
        if err < best.1 {
            best = (k, err);
        }
    }
    Err(Error::DegreeNotReached { k_max, best_degree: best.0, best_error: best.1 })
}

/// [`select_degree`] for `1/λ` or `1/√λ`.
pub fn select_degree_kind(kind: FnKind, iv: ChebInterval, tau: f64, k_max: usize) -> Result<ChebExpansion> {
    if kind == FnKind::Custom {
        return Err(Error::InvalidArgument("custom functions need select_degree".into()));
    }
    select_degree(kind.func(), iv, tau, kind, k_max)
}

/// `Σ γ_i T_i((M - cI)/h) v` with exactly `k` products by `M`.
pub fn apply_poly<M: LinearOp + ?Sized>(e: &ChebExpansion, m: &M, v: &[f64]) -> Result<Vec<f64>> {
    check_dim(m.dim(), v.len())?;
    let mut out = vec![0.0; v.len()];
    apply_poly_into(e, m, v, &mut out);
    Ok(out)
}

/// In-place form of [`apply_poly`]; panics on length mismatch.
pub fn apply_poly_into<M: LinearOp + ?Sized>(e: &ChebExpansion, m: &M, v: &[f64], out: &mut [f64]) {
    let n = v.len();
    assert_eq!(out.len(), n, "apply_poly output length");
    let (c, h) = (e.interval.c(), e.interval.h());
    let g = &e.coeffs;
    out.iter_mut().zip(v).for_each(|(o, x)| *o = g[0] * x);
    if g.len() == 1 {
        return;
    }
    let mut prev = v.to_vec();
    let mut cur = vec![0.0; n];
    m.apply(v, &mut cur);
    for (ci, &x) in cur.iter_mut().zip(v) {
        *ci = (*ci - c * x) / h;
    }
    axpy(g[1], &cur, out);
    let mut next = vec![0.0; n];
    for &gi in &g[2..] {
        m.apply(&cur, &mut next);
        for ((nx, &cu), &pr) in next.iter_mut().zip(&cur).zip(&prev) {
            *nx = 2.0 * (*nx - c * cu) / h - pr;
        }
        axpy(gi, &next, out);
        core::mem::swap(&mut prev, &mut cur);
        core::mem::swap(&mut cur, &mut next);
    }
}

/// Theoretical error bounds for the expansion of `1/λ` or `1/√λ` on an
/// interval, from analyticity inside a Bernstein ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: FnKind,
    pub degree: usize,
    pub rho: f64,
    pub m_rho: f64,
    pub bound_sup: f64,
    pub bound_cheb: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub kappa: f64,
}

/// Largest admissible ellipse parameter: `c/h + √((c/h)² - 1)`.
pub fn rho_upper(iv: ChebInterval) -> f64 {
    let r = iv.c() / iv.h();
    r + libm::sqrt(r * r - 1.0)
}

/// `ρ₁ = √(c/h) + √(c/h - 1)`, equal to `[√(κ+1) + √2] / √(κ-1)`.
pub fn rho1(iv: ChebInterval) -> f64 {
    let r = iv.c() / iv.h();
    libm::sqrt(r) + libm::sqrt(r - 1.0)
}

/// Bounds for the degree-`k` expansion of `kind` on `iv` at ellipse
/// parameter `rho` (default `ρ₁`).
///
/// `M(ρ)` is the maximum modulus of the function on the ellipse:
/// `1/d` for `1/λ` and `1/√d` for `1/√λ`, with `d = c - h(ρ + ρ⁻¹)/2`.
pub fn bernstein_bound(iv: ChebInterval, k: usize, kind: FnKind, rho: Option<f64>) -> Result<BoundReport> {
    if !(iv.a > 0.0) {
        return Err(Error::InvalidInterval { a: iv.a, b: iv.b });
    }
    let upper = rho_upper(iv);
    let r1 = rho1(iv);
    let rho = rho.unwrap_or(r1);
    if !(rho > 1.0 && rho < upper) {
        return Err(Error::RhoOutOfRange { rho, upper });
    }
    let d = iv.c() - 0.5 * iv.h() * (rho + 1.0 / rho);
    let m_rho = match kind {
        FnKind::Inverse => 1.0 / d,
        FnKind::InverseSqrt => 1.0 / libm::sqrt(d),
        FnKind::Custom => return Err(Error::InvalidArgument("bounds are only available for 1/λ and 1/√λ".into())),
    };
    let decay = libm::pow(rho, -(k as f64));
    let kappa = iv.kappa();
    Ok(BoundReport {
        kind,
        degree: k,
        rho,
        m_rho,
        bound_sup: 2.0 * m_rho * decay / (rho - 1.0),
        bound_cheb: libm::sqrt(2.0 * PI / (rho * rho - 1.0)) * m_rho * decay,
        rho0: (kappa + 1.0) / (kappa - 1.0),
        rho1: r1,
        kappa,
    })
}
