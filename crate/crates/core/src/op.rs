//! Operator abstractions shared by the estimators.

use crate::vecops::{axpy, scale};

/// A symmetric linear operator applied through `y = M x`.
pub trait LinearOp {
    fn dim(&self) -> usize;
    /// Writes `M x` into `y`. Both slices have length [`LinearOp::dim`].
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl<T: LinearOp + ?Sized> LinearOp for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }
}

/// Wraps a closure as a [`LinearOp`].
pub struct FnOp<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOp<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOp for FnOp<F> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

/// `(M - c I) / h`, the operator mapped onto `[-1, 1]`.
pub struct Shifted<'a, M: ?Sized> {
    pub op: &'a M,
    pub c: f64,
    pub h: f64,
}

impl<M: LinearOp + ?Sized> LinearOp for Shifted<'_, M> {
    fn dim(&self) -> usize {
        self.op.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply(x, y);
        axpy(-self.c, x, y);
        scale(1.0 / self.h, y);
    }
}

/// The operations a pencil estimator needs from `(A, B)`.
///
/// `solve_b` and `start_transform` stand in for `B⁻¹` and `S⁻¹` (with
/// `S` a square-root or Cholesky-transpose factor of `B`). The production
/// implementation uses Chebyshev polynomials in `B`; the dense oracle
/// provides exact versions for validation.
pub trait PencilOps {
    fn dim(&self) -> usize;
    fn apply_a(&self, x: &[f64], y: &mut [f64]);
    fn apply_b(&self, x: &[f64], y: &mut [f64]);
    fn solve_b(&self, x: &[f64], y: &mut [f64]);
    fn start_transform(&self, x: &[f64], y: &mut [f64]);
}

impl<T: PencilOps + ?Sized> PencilOps for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_a(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply_a(x, y)
    }
    fn apply_b(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply_b(x, y)
    }
    fn solve_b(&self, x: &[f64], y: &mut [f64]) {
        (**self).solve_b(x, y)
    }
    fn start_transform(&self, x: &[f64], y: &mut [f64]) {
        (**self).start_transform(x, y)
    }
}

/// `B⁻¹A` (as approximated by the pencil's `solve_b`) viewed as a plain
/// operator. It is self-adjoint in the `B`-inner product, not the
/// Euclidean one.
pub struct PencilOperator<'a, P: ?Sized> {
    pub pencil: &'a P,
}

impl<P: PencilOps + ?Sized> LinearOp for PencilOperator<'_, P> {
    fn dim(&self) -> usize {
        self.pencil.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut ax = alloc::vec![0.0; x.len()];
        self.pencil.apply_a(x, &mut ax);
        self.pencil.solve_b(&ax, y);
    }
}
