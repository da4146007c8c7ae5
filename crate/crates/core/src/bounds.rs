//! Spectrum enclosures from a short Lanczos run.
//!
//! The interval is `[θ₁ - r₁, θ_m + r_m]`, where `r_i` are the Ritz
//! residual norms of the extreme pairs, widened by a further 0.5% of its
//! width on each side so that the true spectrum maps strictly inside
//! `(-1, 1)`. This is a heuristic, not a certified enclosure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lanczos::{lanczos_pencil, lanczos_std, tridiag_eigen, Tridiag};
use crate::op::{LinearOp, PencilOps};
use crate::rng::{gaussian_vector, sample_rng};

/// Default number of Lanczos steps for a bounds pass.
pub const DEFAULT_STEPS: usize = 30;

/// Relative widening applied after the residual margins.
pub const INFLATE: f64 = 0.005;

/// Random stream reserved for the start vector of bounds passes, kept
/// apart from the per-sample streams `0..n_vec`.
pub const BOUNDS_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBounds {
    pub lo: f64,
    pub hi: f64,
    pub m_used: usize,
    /// Residual margin below the smallest Ritz value.
    pub residual_lo: f64,
    /// Residual margin above the largest Ritz value.
    pub residual_hi: f64,
    pub ritz_lo: f64,
    pub ritz_hi: f64,
}

impl SpectrumBounds {
    /// Bounds given directly, e.g. from known eigenvalues.
    pub fn fixed(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { a: lo, b: hi });
        }
        Ok(Self { lo, hi, m_used: 0, residual_lo: 0.0, residual_hi: 0.0, ritz_lo: lo, ritz_hi: hi })
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn from_tridiag(t: &Tridiag) -> Result<Self> {
        let m = t.m();
        if m == 1 {
            // invariant subspace of dimension one: the operator acts as a scalar
            let a = t.alpha[0];
            let eps = 1e-9 * a.abs().max(1.0);
            return Ok(Self { lo: a - eps, hi: a + eps, m_used: 1, residual_lo: 0.0, residual_hi: 0.0, ritz_lo: a, ritz_hi: a });
        }
        let e = tridiag_eigen(t)?;
        let r = e.residuals(t.beta_next);
        let (t1, tm) = (e.theta[0], e.theta[m - 1]);
        let (lo, hi) = (t1 - r[0], tm + r[m - 1]);
        let pad = INFLATE * (hi - lo);
        Ok(Self { lo: lo - pad, hi: hi + pad, m_used: m, residual_lo: r[0], residual_hi: r[m - 1], ritz_lo: t1, ritz_hi: tm })
    }
}

/// Bounds for a symmetric operator from `min(m, n)` Lanczos steps.
pub fn lanczos_bounds<M: LinearOp + ?Sized>(op: &M, m: usize, seed: u64) -> Result<SpectrumBounds> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    let v = gaussian_vector(&mut sample_rng(seed, BOUNDS_STREAM), n);
    let t = lanczos_std(op, &v, m.clamp(1, n))?;
    SpectrumBounds::from_tridiag(&t)
}

/// Bounds for the pencil operator `B⁻¹A`, with residuals measured in the
/// `B`-inner product.
pub fn pencil_bounds<P: PencilOps + ?Sized>(ops: &P, m: usize, seed: u64) -> Result<SpectrumBounds> {
    let n = ops.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    let v = gaussian_vector(&mut sample_rng(seed, BOUNDS_STREAM), n);
    let (t, _) = lanczos_pencil(ops, &v, m.clamp(1, n), false)?;
    SpectrumBounds::from_tridiag(&t)
}
