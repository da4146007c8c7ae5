//! Factorization-free spectral density estimation for symmetric definite
//! matrix pencils `(A, B)`.
//!
//! Everything that touches `B⁻¹` or `B^{-1/2}` goes through low degree
//! Chebyshev polynomials in `B`, so the estimators only ever need
//! matrix-vector products. Two estimators are provided:
//!
//! * [`kpm`]: the Kernel Polynomial Method, with the pencil handled through
//!   the `w`-recurrence on `B⁻¹A`.
//! * [`lanczos`]: stochastic Lanczos quadrature in the `B`-inner product.
//!
//! The [`dos`] module turns either result into a smoothed density curve,
//! integrates it to count eigenvalues and slices an interval into pieces of
//! roughly equal eigenvalue count. [`oracle`] holds small dense reference
//! solvers used for validation; the production path never calls it.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the thread pool live in the companion `gdos` crate.

#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
pub mod cheb;
pub mod dos;
pub mod error;
pub mod kpm;
pub mod lanczos;
pub mod op;
pub mod oracle;
pub mod rng;
pub mod sparse;
pub mod synth;

pub(crate) mod vecops;

pub use bounds::SpectrumBounds;
pub use cheb::{ChebExpansion, ChebInterval, FnKind};
pub use dos::{CurveMeta, DosCurve, Method, SliceSet};
pub use error::{Error, Result};
pub use kpm::KpmExpansion;
pub use lanczos::{QuadratureRule, Tridiag};
pub use op::{LinearOp, PencilOps};
pub use sparse::{CsrMatrix, Pencil};
