//! Compressed sparse row storage for symmetric matrices and the pencil type.
//!
//! Both triangles are stored explicitly, so `matvec` is a plain row-wise
//! sum in ascending column order.

use alloc::vec;
use alloc::vec::Vec;
use alloc::format;

use crate::bounds::{self, SpectrumBounds};
use crate::cheb::{self, ChebExpansion, ChebInterval, FnKind};
use crate::error::{check_dim, Error, Result};
use crate::op::{LinearOp, PencilOps};

const SYMMETRY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, checking the structural
    /// invariants (monotone offsets, strictly increasing columns per row).
    pub fn from_raw(n: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, vals: Vec<f64>) -> Result<Self> {
        if row_ptr.len() != n + 1 {
            return Err(Error::InvalidStructure(format!("row_ptr has length {}, expected {}", row_ptr.len(), n + 1)));
        }
        if row_ptr[0] != 0 || row_ptr[n] != col_idx.len() || col_idx.len() != vals.len() {
            return Err(Error::InvalidStructure("row_ptr does not span the stored entries".into()));
        }
        for i in 0..n {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidStructure(format!("row_ptr decreases at row {i}")));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.iter().any(|&j| j >= n) {
                return Err(Error::InvalidStructure(format!("column index out of range in row {i}")));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidStructure(format!("columns not strictly increasing in row {i}")));
            }
        }
        Ok(Self { n, row_ptr, col_idx, vals })
    }

    /// Assembles from `(row, col, value)` triplets (0-based). Duplicates are
    /// summed. No symmetry mirroring happens here.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut t: Vec<(usize, usize, f64)> = triplets.to_vec();
        if let Some(&(i, j, _)) = t.iter().find(|&&(i, j, _)| i >= n || j >= n) {
            return Err(Error::InvalidStructure(format!("entry ({i}, {j}) outside a {n}x{n} matrix")));
        }
        t.sort_by_key(|x| (x.0, x.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self::from_raw(n, row_ptr, col_idx, vals)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self { n, row_ptr: (0..=n).collect(), col_idx: (0..n).collect(), vals: d.to_vec() }
    }

    /// From a dense row-major `n x n` array; exact zeros are not stored.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        check_dim(n * n, dense.len())?;
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let v = dense[i * n + j];
                if v != 0.0 {
                    col_idx.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { n, row_ptr, col_idx, vals })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    /// Stored entries of row `i` as `(column, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// All stored entries as 0-based triplets, row-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// Checks numerical symmetry: every stored `(i, j, v)` has a partner
    /// `(j, i)` within `1e-12` relative.
    pub fn validate_symmetric(&self) -> Result<()> {
        for (i, j, v) in self.triplets() {
            if i == j {
                continue;
            }
            let r = self.row_ptr[j]..self.row_ptr[j + 1];
            let ok = match self.col_idx[r.clone()].binary_search(&i) {
                Ok(k) => {
                    let w = self.vals[r.start + k];
                    (v - w).abs() <= SYMMETRY_RTOL * v.abs().max(w.abs())
                }
                Err(_) => v == 0.0,
            };
            if !ok {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
        Ok(())
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, v.len())?;
        let mut y = vec![0.0; self.n];
        self.matvec_into(v, &mut y);
        Ok(y)
    }

    /// `y = M v`. Panics if the lengths do not match `n`.
    pub fn matvec_into(&self, v: &[f64], y: &mut [f64]) {
        assert_eq!(v.len(), self.n, "matvec input length");
        assert_eq!(y.len(), self.n, "matvec output length");
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            let mut s = 0.0;
            for (&j, &a) in self.col_idx[r.clone()].iter().zip(&self.vals[r]) {
                s += a * v[j];
            }
            *yi = s;
        }
    }

    /// `diag(s) M diag(s)`.
    pub fn congruence_diag(&self, s: &[f64]) -> Result<Self> {
        check_dim(self.n, s.len())?;
        let mut out = self.clone();
        for i in 0..self.n {
            for k in out.row_ptr[i]..out.row_ptr[i + 1] {
                out.vals[k] *= s[i] * s[out.col_idx[k]];
            }
        }
        Ok(out)
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for (i, j, v) in self.triplets() {
            d[i * self.n + j] = v;
        }
        d
    }
}

impl LinearOp for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y)
    }
}

/// Settings for building the Chebyshev surrogates of `B⁻¹` and `B^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxOptions {
    /// Relative sup-norm tolerance for both surrogates.
    pub tau: f64,
    pub k_max: usize,
    /// Lanczos steps for the spectrum bounds of `B`.
    pub bound_steps: usize,
    pub seed: u64,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self { tau: 1e-3, k_max: cheb::DEFAULT_K_MAX, bound_steps: bounds::DEFAULT_STEPS, seed: 0 }
    }
}

/// A symmetric definite pencil `(A, B)` with optional diagonal scaling
/// state and cached Chebyshev approximants of `1/λ` and `1/√λ` on an
/// interval enclosing `spec(B)`.
#[derive(Debug, Clone)]
pub struct Pencil {
    a: CsrMatrix,
    b: CsrMatrix,
    d_sqrt: Option<Vec<f64>>,
    b_interval: Option<ChebInterval>,
    b_bounds: Option<SpectrumBounds>,
    g_approx: Option<ChebExpansion>,
    q_approx: Option<ChebExpansion>,
}

impl Pencil {
    pub fn new(a: CsrMatrix, b: CsrMatrix) -> Result<Self> {
        check_dim(a.n(), b.n())?;
        Ok(Self { a, b, d_sqrt: None, b_interval: None, b_bounds: None, g_approx: None, q_approx: None })
    }

    /// The standard problem: `B = I`.
    pub fn standard(a: CsrMatrix) -> Self {
        let b = CsrMatrix::identity(a.n());
        Self { a, b, d_sqrt: None, b_interval: None, b_bounds: None, g_approx: None, q_approx: None }
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn a(&self) -> &CsrMatrix {
        &self.a
    }

    pub fn b(&self) -> &CsrMatrix {
        &self.b
    }

    pub fn is_scaled(&self) -> bool {
        self.d_sqrt.is_some()
    }

    /// Per-row factors `D^{1/2}` of the scaling applied, if any.
    pub fn d_sqrt(&self) -> Option<&[f64]> {
        self.d_sqrt.as_deref()
    }

    pub fn b_interval(&self) -> Option<ChebInterval> {
        self.b_interval
    }

    /// The Lanczos bounds of `B` the interval was derived from.
    pub fn b_bounds(&self) -> Option<&SpectrumBounds> {
        self.b_bounds.as_ref()
    }

    pub fn g_approx(&self) -> Option<&ChebExpansion> {
        self.g_approx.as_ref()
    }

    pub fn q_approx(&self) -> Option<&ChebExpansion> {
        self.q_approx.as_ref()
    }

    /// Congruence scaling by `D^{-1/2}` with `D = diag(B)`. The scaled
    /// pencil has the same eigenvalues and a unit diagonal in `B`.
    /// Cached approximants are dropped, since the spectrum of `B` changes.
    pub fn diag_scale(self) -> Result<Self> {
        let d = self.b.diag();
        if let Some((index, &value)) = d.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(Error::NonPositiveDiagonal { index, value });
        }
        let dsq: Vec<f64> = d.iter().map(|&v| libm::sqrt(v)).collect();
        let inv: Vec<f64> = dsq.iter().map(|&s| 1.0 / s).collect();
        let a = self.a.congruence_diag(&inv)?;
        let mut b = self.b.congruence_diag(&inv)?;
        // exact ones on the diagonal
        for i in 0..b.n {
            for k in b.row_ptr[i]..b.row_ptr[i + 1] {
                if b.col_idx[k] == i {
                    b.vals[k] = 1.0;
                }
            }
        }
        let d_sqrt = match self.d_sqrt {
            Some(prev) => prev.iter().zip(&dsq).map(|(p, s)| p * s).collect(),
            None => dsq,
        };
        Ok(Self { a, b, d_sqrt: Some(d_sqrt), b_interval: None, b_bounds: None, g_approx: None, q_approx: None })
    }

    /// Estimates an interval enclosing `spec(B)` with Lanczos and selects
    /// the lowest-degree Chebyshev approximants of `1/λ` and `1/√λ` meeting
    /// the relative tolerance `opts.tau`.
    pub fn approximate(mut self, opts: &ApproxOptions) -> Result<Self> {
        if !(opts.tau > 0.0 && opts.tau < 1.0) {
            return Err(Error::InvalidArgument(format!("tau must lie in (0, 1), got {}", opts.tau)));
        }
        let bb = bounds::lanczos_bounds(&self.b, opts.bound_steps, opts.seed)?;
        let iv = positive_interval(&bb)?;
        self.set_interval(iv, opts.tau, opts.k_max)?;
        self.b_bounds = Some(bb);
        Ok(self)
    }

    /// Like [`Pencil::approximate`] but with a caller-supplied interval for
    /// `spec(B)`.
    pub fn approximate_on(mut self, iv: ChebInterval, tau: f64, k_max: usize) -> Result<Self> {
        if !(iv.a() > 0.0) {
            return Err(Error::InvalidInterval { a: iv.a(), b: iv.b() });
        }
        self.set_interval(iv, tau, k_max)?;
        Ok(self)
    }

    fn set_interval(&mut self, iv: ChebInterval, tau: f64, k_max: usize) -> Result<()> {
        let g = cheb::select_degree_kind(FnKind::Inverse, iv, tau, k_max)?;
        let q = cheb::select_degree_kind(FnKind::InverseSqrt, iv, tau, k_max)?;
        self.b_interval = Some(iv);
        self.g_approx = Some(g);
        self.q_approx = Some(q);
        Ok(())
    }

    /// Installs explicit approximants (for experiments with fixed degrees).
    pub fn with_approximants(mut self, g: ChebExpansion, q: ChebExpansion) -> Result<Self> {
        if g.interval() != q.interval() {
            return Err(Error::InvalidArgument("approximants must share one interval".into()));
        }
        self.b_interval = Some(g.interval());
        self.g_approx = Some(g);
        self.q_approx = Some(q);
        Ok(self)
    }

    /// Factorization-free pencil operations backed by the approximants.
    pub fn ops(&self) -> Result<ChebOps<'_>> {
        match (&self.g_approx, &self.q_approx) {
            (Some(g), Some(q)) => Ok(ChebOps { a: &self.a, b: &self.b, g, q }),
            _ => Err(Error::InvalidArgument("pencil has no B-approximants; call approximate() first".into())),
        }
    }
}

/// Turns Lanczos bounds of `B` into a Chebyshev interval with a positive
/// left end. A residual margin that crosses zero falls back to half the
/// smallest Ritz value.
fn positive_interval(bb: &SpectrumBounds) -> Result<ChebInterval> {
    if !(bb.ritz_lo > 0.0) {
        return Err(Error::NotPositiveDefinite { lowest: bb.ritz_lo });
    }
    let lo = if bb.lo > 0.0 { bb.lo } else { 0.5 * bb.ritz_lo };
    ChebInterval::new(lo, bb.hi)
}

/// [`PencilOps`] with `B⁻¹ ≈ g(B)` and `B^{-1/2} ≈ q(B)`.
#[derive(Debug, Clone, Copy)]
pub struct ChebOps<'a> {
    a: &'a CsrMatrix,
    b: &'a CsrMatrix,
    g: &'a ChebExpansion,
    q: &'a ChebExpansion,
}

impl PencilOps for ChebOps<'_> {
    fn dim(&self) -> usize {
        self.a.n()
    }
    fn apply_a(&self, x: &[f64], y: &mut [f64]) {
        self.a.matvec_into(x, y)
    }
    fn apply_b(&self, x: &[f64], y: &mut [f64]) {
        self.b.matvec_into(x, y)
    }
    fn solve_b(&self, x: &[f64], y: &mut [f64]) {
        cheb::apply_poly_into(self.g, self.b, x, y)
    }
    fn start_transform(&self, x: &[f64], y: &mut [f64]) {
        cheb::apply_poly_into(self.q, self.b, x, y)
    }
}
