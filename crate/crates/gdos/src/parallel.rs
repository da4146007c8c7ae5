//! Sample-parallel estimators.
//!
//! Each sample draws from its own random stream, so the work can be
//! spread over any number of threads. Results are collected in sample
//! order before the reduction, which makes the output independent of the
//! thread count.

use gdos_core::dos::{CurveMeta, DosCurve, Method};
use gdos_core::kpm::{kpm_sample_pencil, KpmExpansion};
use gdos_core::lanczos::{combine_rules, lanczos_sample, QuadratureRule};
use gdos_core::{Error, PencilOps, SpectrumBounds};
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Runs `f` on a pool of `threads` workers (`None`: one per core).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    let pool = b.build().map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn check_nvec(n_vec: usize) -> gdos_core::Result<()> {
    if n_vec == 0 {
        return Err(Error::InvalidArgument("n_vec must be at least 1".into()));
    }
    Ok(())
}

pub fn lanczos_rules<P: PencilOps + Sync + ?Sized>(
    ops: &P,
    m: usize,
    n_vec: usize,
    seed: u64,
) -> gdos_core::Result<Vec<QuadratureRule>> {
    check_nvec(n_vec)?;
    (0..n_vec as u64).into_par_iter().map(|i| lanczos_sample(ops, m, seed, i)).collect()
}

/// Parallel counterpart of `gdos_core::lanczos::lanczos_dos`.
pub fn lanczos_dos<P: PencilOps + Sync + ?Sized>(
    ops: &P,
    m: usize,
    n_vec: usize,
    seed: u64,
    sigma: f64,
    grid: &[f64],
) -> gdos_core::Result<DosCurve> {
    let rules = lanczos_rules(ops, m, n_vec, seed)?;
    let meta = CurveMeta::new(Method::Lanczos, ops.dim()).with_lanczos(m, n_vec, seed, sigma);
    combine_rules(&rules, sigma, grid, meta)
}

/// Parallel counterpart of `gdos_core::kpm::kpm_pencil`.
pub fn kpm_pencil<P: PencilOps + Sync + ?Sized>(
    ops: &P,
    m: usize,
    n_vec: usize,
    seed: u64,
    bounds: SpectrumBounds,
) -> gdos_core::Result<KpmExpansion> {
    check_nvec(n_vec)?;
    if !(bounds.hi > bounds.lo) {
        return Err(Error::InvalidInterval { a: bounds.lo, b: bounds.hi });
    }
    let raw: Vec<Vec<f64>> =
        (0..n_vec as u64).into_par_iter().map(|i| kpm_sample_pencil(ops, &bounds, m, seed, i)).collect::<gdos_core::Result<_>>()?;
    KpmExpansion::from_samples(&raw, ops.dim(), bounds, seed)
}
