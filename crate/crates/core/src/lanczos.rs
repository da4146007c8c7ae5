//! Lanczos tridiagonalization with full reorthogonalization and the
//! quadrature rules derived from it.
//!
//! [`lanczos_std`] works in the Euclidean inner product. [`lanczos_pencil`]
//! works in the `B`-inner product on `B⁻¹A`, carrying the auxiliary
//! sequence `z_j = B w_j` so that `B` itself is only ever multiplied.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dos::{self, CurveMeta, DosCurve, Method};
use crate::error::{check_dim, Error, Result};
use crate::op::{LinearOp, PencilOps};
use crate::rng::{gaussian_vector, sample_rng};
use crate::vecops::{axpy, dot, norm2, scale};

/// Relative threshold on `β` below which the recurrence is treated as
/// broken down.
const BREAKDOWN_RTOL: f64 = 1e-13;

/// Symmetric tridiagonal `T_m` with diagonal `alpha` and off-diagonal
/// `beta` (`beta[j]` couples rows `j` and `j + 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tridiag {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// The next coefficient `β_{m+1}`; zero after breakdown. The Ritz
    /// residual of pair `i` is `beta_next · |last component of y_i|`.
    pub beta_next: f64,
}

impl Tridiag {
    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    /// True when the recurrence stopped early on an invariant subspace.
    pub fn broke_down(&self) -> bool {
        self.beta_next == 0.0
    }
}

/// Lanczos vectors kept for diagnostics: `w_j` and, for the pencil
/// variant, `z_j = B w_j` (equal to `w` in the standard case).
#[derive(Debug, Clone, PartialEq)]
pub struct LanczosBasis {
    pub w: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
}

/// Gaussian quadrature rule `Σ a_i δ(t - θ_i)` with ascending nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub theta: Vec<f64>,
    pub weight: Vec<f64>,
}

impl QuadratureRule {
    pub fn from_tridiag(t: &Tridiag) -> Result<Self> {
        let e = tridiag_eigen(t)?;
        let weight = e.first.iter().map(|y| y * y).collect();
        Ok(Self { theta: e.theta, weight })
    }

    /// `Σ a_i f(θ_i)`
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.theta.iter().zip(&self.weight).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// Eigen-decomposition of a [`Tridiag`] reduced to what quadrature and
/// residual estimates need.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigen {
    /// Eigenvalues, ascending.
    pub theta: Vec<f64>,
    /// First components `e₁ᵀ y_i` of the unit eigenvectors.
    pub first: Vec<f64>,
    /// Last components `e_mᵀ y_i`.
    pub last: Vec<f64>,
    /// Full eigenvector matrix, row-major `m x m`, column `i` is `y_i`.
    pub vectors: Vec<f64>,
}

impl TridiagEigen {
    /// Ritz residual norms `β_{m+1} |e_mᵀ y_i|`.
    pub fn residuals(&self, beta_next: f64) -> Vec<f64> {
        self.last.iter().map(|y| beta_next * y.abs()).collect()
    }
}

/// Full eigen-decomposition by implicit-shift QL iteration.
pub fn tridiag_eigen(t: &Tridiag) -> Result<TridiagEigen> {
    let n = t.m();
    if n == 0 {
        return Err(Error::InvalidArgument("empty tridiagonal matrix".into()));
    }
    check_dim(n - 1, t.beta.len())?;
    let mut d = t.alpha.clone();
    let mut e = t.beta.clone();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    let max_iter = 50 * n;
    let mut iters = 0;
    for l in 0..n {
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iters += 1;
            if iters > max_iter {
                return Err(Error::TridiagNoConvergence { size: n });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[mm] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = mm;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zf = z[k * n + i + 1];
                    let zi = z[k * n + i];
                    z[k * n + i + 1] = s * zi + c * zf;
                    z[k * n + i] = c * zi - s * zf;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    // stable ascending sort keeps ties in original order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].partial_cmp(&d[y]).unwrap_or(core::cmp::Ordering::Equal));
    let theta = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + new] = z[k * n + old];
        }
    }
    let first = vectors[..n].to_vec();
    let last = vectors[(n - 1) * n..].to_vec();
    Ok(TridiagEigen { theta, first, last, vectors })
}

/// Projects `x` against the stored pairs: `x -= Σ (x, w_i) z_i`, with a
/// second sweep when the first removed more than half of `x`.
fn reorthogonalize(x: &mut [f64], w: &[Vec<f64>], z: &[Vec<f64>]) {
    for _ in 0..2 {
        let before = norm2(x);
        for (wi, zi) in w.iter().zip(z) {
            let c = dot(x, wi);
            axpy(-c, zi, x);
        }
        if norm2(x) >= 0.5 * before {
            break;
        }
    }
}

/// Standard Lanczos on a symmetric operator from start vector `v1`
/// (normalized internally), `m` steps, full reorthogonalization.
pub fn lanczos_std<M: LinearOp + ?Sized>(op: &M, v1: &[f64], m: usize) -> Result<Tridiag> {
    lanczos_std_basis(op, v1, m, false).map(|(t, _)| t)
}

/// [`lanczos_std`] optionally returning the Lanczos vectors.
pub fn lanczos_std_basis<M: LinearOp + ?Sized>(
    op: &M,
    v1: &[f64],
    m: usize,
    keep_basis: bool,
) -> Result<(Tridiag, Option<LanczosBasis>)> {
    let n = op.dim();
    check_dim(n, v1.len())?;
    check_steps(m, n)?;
    let nrm = norm2(v1);
    if !(nrm > 0.0) {
        return Err(Error::ZeroVector);
    }
    let mut v = v1.to_vec();
    scale(1.0 / nrm, &mut v);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    let mut beta_next = 0.0;
    let mut norm_est = 0.0f64;
    let mut x = vec![0.0; n];
    for j in 0..m {
        op.apply(&v, &mut x);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut x);
        }
        let a = dot(&x, &v);
        axpy(-a, &v, &mut x);
        basis.push(v.clone());
        alpha.push(a);
        reorthogonalize(&mut x, &basis, &basis);
        let b = norm2(&x);
        norm_est = norm_est.max(a.abs() + b + if j > 0 { beta[j - 1] } else { 0.0 });
        if b <= BREAKDOWN_RTOL * norm_est {
            beta_next = 0.0;
            break;
        }
        if j + 1 == m {
            beta_next = b;
            break;
        }
        beta.push(b);
        for (vi, xi) in v.iter_mut().zip(&x) {
            *vi = xi / b;
        }
    }
    let basis = keep_basis.then(|| LanczosBasis { w: basis.clone(), z: basis });
    Ok((Tridiag { alpha, beta, beta_next }, basis))
}

fn check_steps(m: usize, n: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("Lanczos needs at least one step".into()));
    }
    if m > n {
        return Err(Error::InvalidArgument(format!("{m} Lanczos steps exceed dimension {n}")));
    }
    Ok(())
}

/// Lanczos for the pencil in the `B`-inner product.
///
/// The start vector is `w₁ = S⁻¹ v1_raw` (via `start_transform`), scaled
/// to unit `B`-norm. Each step applies `solve_b` once to the
/// reorthogonalized `z`. A nonpositive `(w, z)` means the surrogate of
/// `B⁻¹` is not positive definite enough for the current tolerance.
pub fn lanczos_pencil<P: PencilOps + ?Sized>(
    ops: &P,
    v1_raw: &[f64],
    m: usize,
    keep_basis: bool,
) -> Result<(Tridiag, Option<LanczosBasis>)> {
    let n = ops.dim();
    check_dim(n, v1_raw.len())?;
    check_steps(m, n)?;
    if !(norm2(v1_raw) > 0.0) {
        return Err(Error::ZeroVector);
    }
    let mut w = vec![0.0; n];
    ops.start_transform(v1_raw, &mut w);
    let mut z = vec![0.0; n];
    ops.apply_b(&w, &mut z);
    let t2 = dot(&w, &z);
    if !(t2 > 0.0) {
        return Err(Error::IndefiniteBInner { step: 0, value: t2 });
    }
    let t = libm::sqrt(t2);
    scale(1.0 / t, &mut w);
    scale(1.0 / t, &mut z);

    let mut ws: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut zs: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    let mut beta_next = 0.0;
    let mut norm_est = 0.0f64;
    let mut x = vec![0.0; n];
    for j in 0..m {
        ops.apply_a(&w, &mut x);
        if j > 0 {
            axpy(-beta[j - 1], &zs[j - 1], &mut x);
        }
        let a = dot(&x, &w);
        axpy(-a, &z, &mut x);
        ws.push(w.clone());
        zs.push(z.clone());
        alpha.push(a);
        reorthogonalize(&mut x, &ws, &zs);
        ops.solve_b(&x, &mut w);
        let b2 = dot(&w, &x);
        let prev = if j > 0 { beta[j - 1] } else { 0.0 };
        let small = BREAKDOWN_RTOL * norm_est.max(a.abs() + prev);
        if b2.abs() <= small * small {
            beta_next = 0.0;
            break;
        }
        if b2 < 0.0 {
            return Err(Error::IndefiniteBInner { step: j + 1, value: b2 });
        }
        let b = libm::sqrt(b2);
        norm_est = norm_est.max(a.abs() + b + prev);
        if b <= BREAKDOWN_RTOL * norm_est {
            beta_next = 0.0;
            break;
        }
        if j + 1 == m {
            beta_next = b;
            break;
        }
        beta.push(b);
        scale(1.0 / b, &mut w);
        for (zi, xi) in z.iter_mut().zip(&x) {
            *zi = xi / b;
        }
    }
    let basis = keep_basis.then_some(LanczosBasis { w: ws, z: zs });
    Ok((Tridiag { alpha, beta, beta_next }, basis))
}

/// One stochastic sample: Gaussian start vector from stream
/// `(seed, index)`, `min(m, n)` pencil Lanczos steps, quadrature rule.
pub fn lanczos_sample<P: PencilOps + ?Sized>(ops: &P, m: usize, seed: u64, index: u64) -> Result<QuadratureRule> {
    let n = ops.dim();
    let v = gaussian_vector(&mut sample_rng(seed, index), n);
    let (t, _) = lanczos_pencil(ops, &v, m.min(n), false)?;
    QuadratureRule::from_tridiag(&t)
}

/// Averages per-sample rules into one smoothed curve, in sample order.
pub fn combine_rules(rules: &[QuadratureRule], sigma: f64, grid: &[f64], meta: CurveMeta) -> Result<DosCurve> {
    if rules.is_empty() {
        return Err(Error::InvalidArgument("no quadrature rules to combine".into()));
    }
    let inv = 1.0 / rules.len() as f64;
    let mut values = vec![0.0; grid.len()];
    for r in rules {
        let c = dos::smooth_values(r.theta.iter().copied().zip(r.weight.iter().copied()), sigma, grid)?;
        axpy(inv, &c, &mut values);
    }
    DosCurve::new(grid.to_vec(), values, meta)
}

/// Stochastic Lanczos quadrature DOS: `n_vec` samples, Gaussian
/// smoothing of width `sigma`. Returns the curve and the raw rules.
pub fn lanczos_dos<P: PencilOps + ?Sized>(
    ops: &P,
    m: usize,
    n_vec: usize,
    seed: u64,
    sigma: f64,
    grid: &[f64],
) -> Result<(DosCurve, Vec<QuadratureRule>)> {
    if n_vec == 0 {
        return Err(Error::InvalidArgument("n_vec must be at least 1".into()));
    }
    let rules = (0..n_vec as u64).map(|i| lanczos_sample(ops, m, seed, i)).collect::<Result<Vec<_>>>()?;
    let meta = CurveMeta::new(Method::Lanczos, ops.dim()).with_lanczos(m, n_vec, seed, sigma);
    let curve = combine_rules(&rules, sigma, grid, meta)?;
    Ok((curve, rules))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{dense_eigs_sym, DenseSym, ExactPencilOps, StartMode};
    use crate::sparse::{CsrMatrix, Pencil};
    use crate::synth;
    use proptest::prelude::*;

    fn sturm_count(t: &Tridiag, x: f64) -> usize {
        // number of eigenvalues below x
        let mut count = 0;
        let mut q = 1.0f64;
        for i in 0..t.m() {
            let b2 = if i == 0 { 0.0 } else { t.beta[i - 1] * t.beta[i - 1] };
            q = t.alpha[i] - x - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bisect_eig(t: &Tridiag, k: usize, lo: f64, hi: f64) -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sturm_count(t, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn tridiag_trivial() {
        let e = tridiag_eigen(&Tridiag { alpha: vec![2.0], beta: vec![], beta_next: 0.0 }).unwrap();
        assert_eq!(e.theta, vec![2.0]);
        assert_eq!(e.first[0].abs(), 1.0);
        let r = QuadratureRule::from_tridiag(&Tridiag { alpha: vec![0.0, 0.0], beta: vec![1.0], beta_next: 0.0 }).unwrap();
        assert!((r.theta[0] + 1.0).abs() < 1e-15 && (r.theta[1] - 1.0).abs() < 1e-15);
        for w in &r.weight {
            assert!((w - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn tridiag_matches_sturm_bisection() {
        let mut rng = sample_rng(5, 0);
        let alpha = gaussian_vector(&mut rng, 30);
        let beta: Vec<f64> = gaussian_vector(&mut rng, 29).iter().map(|x| x.abs() + 0.01).collect();
        let t = Tridiag { alpha, beta, beta_next: 0.0 };
        let e = tridiag_eigen(&t).unwrap();
        for k in 0..30 {
            let x = bisect_eig(&t, k, -20.0, 20.0);
            assert!((e.theta[k] - x).abs() < 1e-11, "{k}: {} vs {x}", e.theta[k]);
        }
        // orthogonality
        for i in 0..30 {
            for j in 0..30 {
                let s: f64 = (0..30).map(|k| e.vectors[k * 30 + i] * e.vectors[k * 30 + j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn std_two_by_two() {
        let a = CsrMatrix::diagonal(&[1.0, 2.0]);
        let s = 1.0 / libm::sqrt(2.0);
        let t = lanczos_std(&a, &[s, s], 2).unwrap();
        let e = tridiag_eigen(&t).unwrap();
        assert!((e.theta[0] - 1.0).abs() < 1e-12 && (e.theta[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn std_identity_breaks_down() {
        let t = lanczos_std(&CsrMatrix::identity(5), &[1.0, 2.0, 0.0, 1.0, 1.0], 3).unwrap();
        assert_eq!(t.alpha.len(), 1);
        assert!((t.alpha[0] - 1.0).abs() < 1e-15);
        assert!(t.broke_down());
    }

    #[test]
    fn std_full_run_recovers_spectrum() {
        let d: Vec<f64> = (1..=50).map(|i| i as f64).collect();
        let a = CsrMatrix::diagonal(&d);
        let v = gaussian_vector(&mut sample_rng(3, 0), 50);
        let t = lanczos_std(&a, &v, 50).unwrap();
        let e = tridiag_eigen(&t).unwrap();
        assert_eq!(e.theta.len(), 50);
        for (x, y) in e.theta.iter().zip(&d) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn std_errors() {
        let a = CsrMatrix::identity(3);
        assert_eq!(lanczos_std(&a, &[0.0; 3], 2), Err(Error::ZeroVector));
        assert!(lanczos_std(&a, &[1.0; 3], 4).is_err());
    }

    #[test]
    fn pencil_identity_b_matches_std() {
        let a = synth::random_sparse_symmetric(40, 0.2, 4);
        let p = Pencil::standard(a.clone()).approximate(&Default::default()).unwrap();
        let v = gaussian_vector(&mut sample_rng(9, 0), 40);
        let (tp, _) = lanczos_pencil(&p.ops().unwrap(), &v, 15, false).unwrap();
        let ts = lanczos_std(&a, &v, 15).unwrap();
        for (x, y) in tp.alpha.iter().zip(&ts.alpha) {
            assert!((x - y).abs() < 1e-8);
        }
        for (x, y) in tp.beta.iter().zip(&ts.beta) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn b_orthogonality_and_containment() {
        let (a, b, _) = synth::congruence_pencil(&synth::uniform_spectrum(80, -2.0, 3.0), 21);
        let (ad, bd) = (DenseSym::from_csr(&a), DenseSym::from_csr(&b));
        let ops = ExactPencilOps::new(&ad, &bd, StartMode::Cholesky).unwrap();
        let v = gaussian_vector(&mut sample_rng(1, 1), 80);
        let (t, basis) = lanczos_pencil(&ops, &v, 30, true).unwrap();
        let basis = basis.unwrap();
        for i in 0..30 {
            for j in 0..30 {
                let g = dot(&basis.w[i], &bd.matvec(&basis.w[j]));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() <= 1e-8, "({i},{j}) = {g}");
            }
        }
        let r = QuadratureRule::from_tridiag(&t).unwrap();
        assert!((r.weight.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(r.theta[0] >= -2.0 - 1e-8 && r.theta[29] <= 3.0 + 1e-8);
    }

    #[test]
    fn std_dense_equivalence_sanity() {
        let a = synth::random_sparse_symmetric(30, 0.3, 2);
        let ev = dense_eigs_sym(&DenseSym::from_csr(&a)).unwrap();
        let v = gaussian_vector(&mut sample_rng(0, 0), 30);
        let e = tridiag_eigen(&lanczos_std(&a, &v, 30).unwrap()).unwrap();
        for (x, y) in e.theta.iter().zip(&ev) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn single_element_pencil() {
        let a = CsrMatrix::diagonal(&[3.0]);
        let b = CsrMatrix::diagonal(&[2.0]);
        let p = Pencil::new(a, b).unwrap().approximate(&Default::default()).unwrap();
        let grid = [1.0, 1.5, 2.0];
        let (curve, rules) = lanczos_dos(&p.ops().unwrap(), 30, 3, 0, 0.1, &grid).unwrap();
        assert_eq!(rules[0].theta.len(), 1);
        assert!((rules[0].theta[0] - 1.5).abs() < 1e-3);
        assert!((rules[0].weight[0] - 1.0).abs() < 1e-14);
        assert!(curve.values()[1] > curve.values()[0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn weights_sum_to_one(seed in 0u64..10_000, m in 1usize..25) {
            let a = synth::random_sparse_symmetric(40, 0.15, seed);
            let v = gaussian_vector(&mut sample_rng(seed, 1), 40);
            let r = QuadratureRule::from_tridiag(&lanczos_std(&a, &v, m).unwrap()).unwrap();
            prop_assert!((r.weight.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(r.weight.iter().all(|&w| w >= 0.0));
            prop_assert!(r.theta.windows(2).all(|p| p[0] <= p[1]));
        }
    }
}
