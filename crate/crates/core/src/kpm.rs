//! Kernel Polynomial Method.
//!
//! With `Ã = (A - cI)/h` mapping the spectrum into `(-1, 1)`, the DOS in
//! the mapped variable is approximated by
//! `φ̃(t) = Σ_k μ_k T_k(t) / √(1 - t²)` where
//! `μ_k = (2 - δ_{k0}) / (π n_vec) Σ_l v_lᵀ T_k(Ã) v_l` over unit random
//! vectors `v_l`. For a pencil the same moments come from the sequence
//! `w_{k+1} = 2 (B⁻¹A - cI)/h w_k - w_{k-1}` started at `w₀ = S⁻¹v₀`,
//! with `v₀ᵀT_k v₀ = w₀ᵀ B w_k`.
//!
//! No damping kernel is applied, so curves can dip below zero.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::SpectrumBounds;
use crate::cheb::ChebExpansion;
use crate::dos::{CurveMeta, DosCurve, Method};
use crate::error::{check_dim, Error, Result};
use crate::op::{LinearOp, PencilOps};
use crate::rng::{sample_rng, unit_gaussian_vector};
use crate::vecops::{dot, norm2};

/// The recurrence is declared divergent once a vector grows past this
/// multiple of the start vector's norm; inside correct bounds it stays
/// of order one.
const GROWTH_LIMIT: f64 = 1e10;

/// Points with `|t| ≥ 1 - WEIGHT_GUARD` are excluded from evaluation.
pub const WEIGHT_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpmExpansion {
    pub mu: Vec<f64>,
    pub n: usize,
    pub n_vec: usize,
    pub bounds: SpectrumBounds,
    pub seed: u64,
}

impl KpmExpansion {
    pub fn m(&self) -> usize {
        self.mu.len() - 1
    }

    /// Averages raw per-sample moments `v_lᵀ T_k v_l` (in sample order).
    pub fn from_samples(raw: &[Vec<f64>], n: usize, bounds: SpectrumBounds, seed: u64) -> Result<Self> {
        let first = raw.first().ok_or_else(|| Error::InvalidArgument("no KPM samples".into()))?;
        let len = first.len();
        let mut mu = vec![0.0; len];
        for r in raw {
            check_dim(len, r.len())?;
            for (acc, x) in mu.iter_mut().zip(r) {
                *acc += x;
            }
        }
        let s = 1.0 / (PI * raw.len() as f64);
        for (k, x) in mu.iter_mut().enumerate() {
            *x *= if k == 0 { s } else { 2.0 * s };
        }
        Ok(Self { mu, n, n_vec: raw.len(), bounds, seed })
    }

    /// Mapped-variable density `Σ μ_k T_k(t) / √(1 - t²)`.
    pub fn eval_unit(&self, t: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &g in self.mu[1..].iter().rev() {
            let b0 = 2.0 * t * b1 - b2 + g;
            b2 = b1;
            b1 = b0;
        }
        (t * b1 - b2 + self.mu[0]) / libm::sqrt(1.0 - t * t)
    }

    /// `∫ φ̃(t) f(t) dt` for `f` given by its Chebyshev expansion on the
    /// same mapped interval; orthogonality reduces it to
    /// `Σ μ_k γ_k π / (2 - δ_{k0})`.
    pub fn pairing(&self, f: &ChebExpansion) -> f64 {
        self.mu
            .iter()
            .zip(f.coeffs())
            .enumerate()
            .map(|(k, (m, g))| m * g * if k == 0 { PI } else { 0.5 * PI })
            .sum()
    }
}

fn map_params(bounds: &SpectrumBounds) -> (f64, f64) {
    (bounds.center(), bounds.half_width())
}

fn check_growth(x: &[f64], ref_norm: f64, degree: usize) -> Result<()> {
    let nx = norm2(x);
    if !nx.is_finite() || nx > GROWTH_LIMIT * ref_norm {
        return Err(Error::Divergence { degree });
    }
    Ok(())
}

/// Raw moments `v₀ᵀ T_k(Ã) v₀`, `k = 0..=m`, for sample `index`.
pub fn kpm_sample_std<M: LinearOp + ?Sized>(
    a: &M,
    bounds: &SpectrumBounds,
    m: usize,
    seed: u64,
    index: u64,
) -> Result<Vec<f64>> {
    let n = a.dim();
    let (c, h) = map_params(bounds);
    let v0 = unit_gaussian_vector(&mut sample_rng(seed, index), n);
    let mut out = Vec::with_capacity(m + 1);
    out.push(dot(&v0, &v0));
    if m == 0 {
        return Ok(out);
    }
    let mut prev = v0.clone();
    let mut cur = vec![0.0; n];
    a.apply(&v0, &mut cur);
    for (x, &y) in cur.iter_mut().zip(&v0) {
        *x = (*x - c * y) / h;
    }
    out.push(dot(&v0, &cur));
    let mut next = vec![0.0; n];
    for k in 2..=m {
        a.apply(&cur, &mut next);
        for ((x, &cu), &pr) in next.iter_mut().zip(&cur).zip(&prev) {
            *x = 2.0 * (*x - c * cu) / h - pr;
        }
        check_growth(&next, 1.0, k)?;
        out.push(dot(&v0, &next));
        core::mem::swap(&mut prev, &mut cur);
        core::mem::swap(&mut cur, &mut next);
    }
    Ok(out)
}

/// Raw pencil moments `w₀ᵀ B w_k` for sample `index`.
pub fn kpm_sample_pencil<P: PencilOps + ?Sized>(
    ops: &P,
    bounds: &SpectrumBounds,
    m: usize,
    seed: u64,
    index: u64,
) -> Result<Vec<f64>> {
    let n = ops.dim();
    let (c, h) = map_params(bounds);
    let v0 = unit_gaussian_vector(&mut sample_rng(seed, index), n);
    let mut w0 = vec![0.0; n];
    ops.start_transform(&v0, &mut w0);
    let mut bw0 = vec![0.0; n];
    ops.apply_b(&w0, &mut bw0);
    let ref_norm = norm2(&w0);
    let mut out = Vec::with_capacity(m + 1);
    out.push(dot(&bw0, &w0));
    if m == 0 {
        return Ok(out);
    }
    let mut tmp = vec![0.0; n];
    // y = (B⁻¹A - cI)/h x
    let step = |x: &[f64], y: &mut [f64], tmp: &mut [f64]| {
        ops.apply_a(x, tmp);
        ops.solve_b(tmp, y);
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = (*yi - c * xi) / h;
        }
    };
    let mut prev = w0.clone();
    let mut cur = vec![0.0; n];
    step(&w0, &mut cur, &mut tmp);
    out.push(dot(&bw0, &cur));
    let mut next = vec![0.0; n];
    for k in 2..=m {
        step(&cur, &mut next, &mut tmp);
        for (x, &pr) in next.iter_mut().zip(&prev) {
            *x = 2.0 * *x - pr;
        }
        check_growth(&next, ref_norm, k)?;
        out.push(dot(&bw0, &next));
        core::mem::swap(&mut prev, &mut cur);
        core::mem::swap(&mut cur, &mut next);
    }
    Ok(out)
}

fn check_args(n_vec: usize, bounds: &SpectrumBounds) -> Result<()> {
    if n_vec == 0 {
        return Err(Error::InvalidArgument("n_vec must be at least 1".into()));
    }
    if !(bounds.hi > bounds.lo) {
        return Err(Error::InvalidInterval { a: bounds.lo, b: bounds.hi });
    }
    Ok(())
}

/// KPM moments of a symmetric matrix.
pub fn kpm_std<M: LinearOp + ?Sized>(
    a: &M,
    m: usize,
    n_vec: usize,
    seed: u64,
    bounds: SpectrumBounds,
) -> Result<KpmExpansion> {
    check_args(n_vec, &bounds)?;
    let raw = (0..n_vec as u64).map(|i| kpm_sample_std(a, &bounds, m, seed, i)).collect::<Result<Vec<_>>>()?;
    KpmExpansion::from_samples(&raw, a.dim(), bounds, seed)
}

/// KPM moments of a pencil through the `w`-recurrence.
pub fn kpm_pencil<P: PencilOps + ?Sized>(
    ops: &P,
    m: usize,
    n_vec: usize,
    seed: u64,
    bounds: SpectrumBounds,
) -> Result<KpmExpansion> {
    check_args(n_vec, &bounds)?;
    let raw = (0..n_vec as u64).map(|i| kpm_sample_pencil(ops, &bounds, m, seed, i)).collect::<Result<Vec<_>>>()?;
    KpmExpansion::from_samples(&raw, ops.dim(), bounds, seed)
}

/// Density in `λ` coordinates on `grid`; every point must map strictly
/// inside `(-1, 1)`.
pub fn kpm_eval(e: &KpmExpansion, grid: &[f64]) -> Result<DosCurve> {
    let (curve, excluded) = kpm_eval_masked(e, grid)?;
    match excluded.first() {
        Some(&i) => Err(Error::GridOutsideBounds { t: (grid[i] - e.bounds.center()) / e.bounds.half_width() }),
        None => Ok(curve),
    }
}

/// Like [`kpm_eval`] but grid points too close to or beyond the interval
/// ends get the value 0 and their indices are returned.
pub fn kpm_eval_masked(e: &KpmExpansion, grid: &[f64]) -> Result<(DosCurve, Vec<usize>)> {
    let (c, h) = map_params(&e.bounds);
    let mut excluded = Vec::new();
    let values = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let t = (x - c) / h;
            if t.abs() >= 1.0 - WEIGHT_GUARD {
                excluded.push(i);
                0.0
            } else {
                e.eval_unit(t) / h
            }
        })
        .collect();
    let meta = CurveMeta::new(Method::Kpm, e.n).with_kpm(e.m(), e.n_vec, e.seed);
    Ok((DosCurve::new(grid.to_vec(), values, meta)?, excluded))
}
