//! Dense reference solvers for validation at small scale.
//!
//! These are deliberately simple (cyclic Jacobi, unblocked Cholesky) and
//! are never used by the estimators themselves.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::cheb::ChebExpansion;
use crate::error::{check_dim, Error, Result};
use crate::op::{LinearOp, PencilOps};
use crate::sparse::CsrMatrix;

/// Largest dimension the dense oracle accepts.
pub const ORACLE_LIMIT: usize = 2000;

const SYMMETRY_RTOL: f64 = 1e-12;
const JACOBI_SWEEPS: usize = 30;

/// Dense symmetric matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym {
    n: usize,
    data: Vec<f64>,
}

impl DenseSym {
    /// Checks symmetry to `1e-12` relative and stores the exact
    /// symmetrization `(M + Mᵀ)/2`.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(n * n, data.len())?;
        let mut m = Self { n, data };
        for j in 0..n {
            for i in 0..j {
                let (x, y) = (m.get(i, j), m.get(j, i));
                if (x - y).abs() > SYMMETRY_RTOL * x.abs().max(y.abs()) {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                let avg = 0.5 * (x + y);
                m.data[j * n + i] = avg;
                m.data[i * n + j] = avg;
            }
        }
        Ok(m)
    }

    /// Symmetrizes without checking.
    fn from_raw_sym(n: usize, mut data: Vec<f64>) -> Self {
        for j in 0..n {
            for i in 0..j {
                let avg = 0.5 * (data[j * n + i] + data[i * n + j]);
                data[j * n + i] = avg;
                data[i * n + j] = avg;
            }
        }
        Self { n, data }
    }

    pub fn from_csr(m: &CsrMatrix) -> Self {
        // CSR dense output is row-major; for a symmetric matrix the two
        // layouts coincide up to rounding in the stored triangles
        Self::from_raw_sym(m.n(), m.to_dense())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, &x) in d.iter().enumerate() {
            data[i * n + i] = x;
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.n + i]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.apply(x, &mut y);
        y
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `U f(Λ) Uᵀ` from an eigen-decomposition.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let (ev, u) = dense_eigh(self)?;
        let n = self.n;
        let fv = ev.iter().map(|&l| f(l)).collect::<Result<Vec<_>>>()?;
        let mut data = vec![0.0; n * n];
        for k in 0..n {
            for j in 0..n {
                let s = fv[k] * u[k * n + j];
                if s == 0.0 {
                    continue;
                }
                for i in 0..n {
                    data[j * n + i] += u[k * n + i] * s;
                }
            }
        }
        Ok(Self::from_raw_sym(n, data))
    }
}

impl LinearOp for DenseSym {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            let col = &self.data[j * n..(j + 1) * n];
            for (yi, &a) in y.iter_mut().zip(col) {
                *yi += a * xj;
            }
        }
    }
}

fn guard(n: usize) -> Result<()> {
    if n > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge { n, limit: ORACLE_LIMIT });
    }
    Ok(())
}

/// Eigenvalues (ascending) and eigenvectors by cyclic Jacobi rotations.
/// Eigenvector `k` occupies `vectors[k*n .. (k+1)*n]`.
pub fn dense_eigh(m: &DenseSym) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = m.n;
    guard(n)?;
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let tol = 1e-12 * m.frobenius();
    let idx = |i: usize, j: usize| j * n + i;
    let mut converged = false;
    for _ in 0..=JACOBI_SWEEPS {
        let off: f64 = (0..n).flat_map(|j| (0..n).filter(move |&i| i != j).map(move |i| (i, j))).map(|(i, j)| a[idx(i, j)] * a[idx(i, j)]).sum();
        if libm::sqrt(off) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[idx(k, p)], a[idx(k, q)]);
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[idx(p, k)], a[idx(q, k)]);
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
                a[idx(p, q)] = 0.0;
                a[idx(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[idx(k, p)], v[idx(k, q)]);
                    v[idx(k, p)] = c * vkp - s * vkq;
                    v[idx(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::JacobiNoConvergence { sweeps: JACOBI_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[idx(x, x)].partial_cmp(&a[idx(y, y)]).unwrap());
    let ev = order.iter().map(|&k| a[idx(k, k)]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        vecs[new * n..(new + 1) * n].copy_from_slice(&v[old * n..(old + 1) * n]);
    }
    Ok((ev, vecs))
}

/// Eigenvalues, ascending.
pub fn dense_eigs_sym(m: &DenseSym) -> Result<Vec<f64>> {
    dense_eigh(m).map(|(ev, _)| ev)
}

/// Lower-triangular Cholesky factor `L` with `LLᵀ = M`, row-major.
pub fn dense_cholesky(m: &DenseSym) -> Result<Vec<f64>> {
    let n = m.n;
    guard(n)?;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return Err(Error::NotSpd { index: j, pivot: d });
        }
        let ljj = libm::sqrt(d);
        l[j * n + j] = ljj;
        for i in j + 1..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L x = b` in place (`L` row-major lower triangular).
pub fn forward_solve(l: &[f64], n: usize, x: &mut [f64]) {
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
}

/// Solves `Lᵀ x = b` in place.
pub fn backward_solve_t(l: &[f64], n: usize, x: &mut [f64]) {
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
}

/// `L⁻¹ A L⁻ᵀ` for `B = LLᵀ`.
pub fn cholesky_transform(a: &DenseSym, l: &[f64]) -> Result<DenseSym> {
    let n = a.n;
    check_dim(n * n, l.len())?;
    // columns of X = L⁻¹ A, then C = L⁻¹ Xᵀ
    let mut x = a.data.clone();
    for j in 0..n {
        forward_solve(l, n, &mut x[j * n..(j + 1) * n]);
    }
    let mut c = vec![0.0; n * n];
    for j in 0..n {
        let col = &mut c[j * n..(j + 1) * n];
        for i in 0..n {
            col[i] = x[i * n + j];
        }
        forward_solve(l, n, col);
    }
    Ok(DenseSym::from_raw_sym(n, c))
}

/// Eigenvalues of the pencil `(A, B)` through `L⁻¹AL⁻ᵀ`.
pub fn dense_pencil_eigs(a: &DenseSym, b: &DenseSym) -> Result<Vec<f64>> {
    check_dim(a.n, b.n)?;
    let l = dense_cholesky(b)?;
    dense_eigs_sym(&cholesky_transform(a, &l)?)
}

/// Symmetric positive square root.
pub fn dense_sqrt_sym(m: &DenseSym) -> Result<DenseSym> {
    m.map_spectrum(|l| if l > 0.0 { Ok(libm::sqrt(l)) } else { Err(Error::NotSpd { index: 0, pivot: l }) })
}

/// `M^{-1/2}`.
pub fn dense_inv_sqrt_sym(m: &DenseSym) -> Result<DenseSym> {
    m.map_spectrum(|l| if l > 0.0 { Ok(1.0 / libm::sqrt(l)) } else { Err(Error::NotSpd { index: 0, pivot: l }) })
}

/// `M⁻¹`.
pub fn dense_inverse_sym(m: &DenseSym) -> Result<DenseSym> {
    m.map_spectrum(|l| if l > 0.0 { Ok(1.0 / l) } else { Err(Error::NotSpd { index: 0, pivot: l }) })
}

/// `P(M) = Σ γ_i T_i((M - cI)/h)` formed densely through the spectrum.
pub fn dense_cheb_apply(m: &DenseSym, e: &ChebExpansion) -> Result<DenseSym> {
    m.map_spectrum(|l| Ok(e.eval(l)))
}

/// `M₁ M₂ M₁` for symmetric factors.
pub fn sandwich(m1: &DenseSym, m2: &DenseSym) -> Result<DenseSym> {
    check_dim(m1.n, m2.n)?;
    let n = m1.n;
    let mut t = vec![0.0; n * n];
    for j in 0..n {
        m1.apply(&m2.data[j * n..(j + 1) * n], &mut t[j * n..(j + 1) * n]);
    }
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        // column j of T M₁ is Σ_k T_{:,k} (M₁)_{k,j}
        let mut col = vec![0.0; n];
        for k in 0..n {
            let w = m1.data[j * n + k];
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                col[i] += t[k * n + i] * w;
            }
        }
        out[j * n..(j + 1) * n].copy_from_slice(&col);
    }
    Ok(DenseSym::from_raw_sym(n, out))
}

/// Eigenvalue perturbation bound when `B⁻¹` is replaced by `g(B)` with
/// absolute accuracy `‖g(B) - B⁻¹‖₂ ≤ τ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbBound {
    pub tau: f64,
    pub b_norm: f64,
    pub b_min: f64,
    /// Bound on `‖ΔB‖₂` where `g(B) = (B + ΔB)⁻¹`.
    pub delta_b: f64,
    /// Exact pencil eigenvalues, ascending.
    pub lambda: Vec<f64>,
    /// `|λ_i| ‖ΔB‖₂ / (λ_min(B) - ‖ΔB‖₂)`
    pub per_eigenvalue: Vec<f64>,
}

/// Evaluates the perturbation bound. Fails when `‖B‖₂ τ ≥ 1` or the
/// resulting `‖ΔB‖₂` reaches `λ_min(B)`.
pub fn weyl_bound(a: &DenseSym, b: &DenseSym, tau: f64) -> Result<PerturbBound> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be nonnegative, got {tau}")));
    }
    let eb = dense_eigs_sym(b)?;
    let (b_min, b_norm) = (eb[0], eb[eb.len() - 1]);
    if b_norm * tau >= 1.0 {
        return Err(Error::VacuousBound(format!("‖B‖₂ τ = {} ≥ 1", b_norm * tau)));
    }
    let delta_b = b_norm * b_norm * tau / (1.0 - b_norm * tau);
    if delta_b >= b_min {
        return Err(Error::VacuousBound(format!("‖ΔB‖₂ ≤ {delta_b:e} is not below λ_min(B) = {b_min:e}")));
    }
    let lambda = dense_pencil_eigs(a, b)?;
    let per_eigenvalue = lambda.iter().map(|l| l.abs() * delta_b / (b_min - delta_b)).collect();
    Ok(PerturbBound { tau, b_norm, b_min, delta_b, lambda, per_eigenvalue })
}

/// Eigenvalues of the approximated problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedEigs {
    /// Of the symmetric surrogate `q(B) A q(B)`.
    pub surrogate: Vec<f64>,
    /// Of `g(B) A` itself, through `g(B)^{1/2} A g(B)^{1/2}`.
    pub product: Vec<f64>,
}

pub fn perturbed_eigs(a: &DenseSym, b: &DenseSym, g: &ChebExpansion, q: &ChebExpansion) -> Result<PerturbedEigs> {
    check_dim(a.n, b.n)?;
    let qb = dense_cheb_apply(b, q)?;
    let surrogate = dense_eigs_sym(&sandwich(&qb, a)?)?;
    let gh = b.map_spectrum(|l| {
        let v = g.eval(l);
        if v > 0.0 { Ok(libm::sqrt(v)) } else { Err(Error::NotSpd { index: 0, pivot: v }) }
    })?;
    let product = dense_eigs_sym(&sandwich(&gh, a)?)?;
    Ok(PerturbedEigs { surrogate, product })
}

/// Which factor `S` (with `B = S Sᵀ`) the start transform inverts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartMode {
    /// `S = L`, start transform `L⁻ᵀ`.
    Cholesky,
    /// `S = B^{1/2}`.
    Sqrt,
}

/// [`PencilOps`] with exact dense `B⁻¹` and `S⁻ᵀ`.
#[derive(Debug, Clone)]
pub struct ExactPencilOps<'a> {
    a: &'a DenseSym,
    b: &'a DenseSym,
    b_inv: DenseSym,
    mode: StartMode,
    chol: Vec<f64>,
    inv_sqrt: Option<DenseSym>,
}

impl<'a> ExactPencilOps<'a> {
    pub fn new(a: &'a DenseSym, b: &'a DenseSym, mode: StartMode) -> Result<Self> {
        check_dim(a.n, b.n)?;
        let chol = dense_cholesky(b)?;
        let b_inv = dense_inverse_sym(b)?;
        let inv_sqrt = match mode {
            StartMode::Sqrt => Some(dense_inv_sqrt_sym(b)?),
            StartMode::Cholesky => None,
        };
        Ok(Self { a, b, b_inv, mode, chol, inv_sqrt })
    }

    pub fn cholesky_factor(&self) -> &[f64] {
        &self.chol
    }

    /// The symmetric standard problem matching the start transform:
    /// `L⁻¹AL⁻ᵀ` or `B^{-1/2}AB^{-1/2}`.
    pub fn symmetrized(&self) -> DenseSym {
        match &self.inv_sqrt {
            Some(s) => sandwich(s, self.a).expect("dimensions checked"),
            None => cholesky_transform(self.a, &self.chol).expect("dimensions checked"),
        }
    }

    /// `Sᵀ x`, mapping a pencil vector back to the symmetrized problem.
    pub fn to_standard(&self, x: &[f64]) -> Vec<f64> {
        let n = self.a.n;
        match self.mode {
            StartMode::Cholesky => (0..n).map(|i| (i..n).map(|k| self.chol[k * n + i] * x[k]).sum()).collect(),
            StartMode::Sqrt => {
                let s = dense_sqrt_sym(self.b).expect("B is SPD");
                s.matvec(x)
            }
        }
    }
}

impl PencilOps for ExactPencilOps<'_> {
    fn dim(&self) -> usize {
        self.a.n
    }
    fn apply_a(&self, x: &[f64], y: &mut [f64]) {
        self.a.apply(x, y)
    }
    fn apply_b(&self, x: &[f64], y: &mut [f64]) {
        self.b.apply(x, y)
    }
    fn solve_b(&self, x: &[f64], y: &mut [f64]) {
        self.b_inv.apply(x, y)
    }
    fn start_transform(&self, x: &[f64], y: &mut [f64]) {
        match &self.inv_sqrt {
            Some(s) => s.apply(x, y),
            None => {
                y.copy_from_slice(x);
                backward_solve_t(&self.chol, self.a.n, y);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::{select_degree_kind, ChebInterval, FnKind};
    use crate::synth;

    fn close(x: &[f64], y: &[f64], tol: f64) -> bool {
        x.len() == y.len() && x.iter().zip(y).all(|(a, b)| (a - b).abs() <= tol)
    }

    #[test]
    fn trivial_eigs() {
        assert_eq!(dense_eigs_sym(&DenseSym::diagonal(&[3.0, -1.0, 2.0])).unwrap(), vec![-1.0, 2.0, 3.0]);
        let m = DenseSym::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(close(&dense_eigs_sym(&m).unwrap(), &[-1.0, 1.0], 1e-14));
        assert!(DenseSym::new(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
    }

    #[test]
    fn trace_and_frobenius_identities() {
        let m = DenseSym::from_csr(&synth::random_sparse_symmetric(50, 0.5, 8));
        let ev = dense_eigs_sym(&m).unwrap();
        let f = m.frobenius();
        assert!((ev.iter().sum::<f64>() - m.trace()).abs() <= 1e-10 * f);
        assert!((ev.iter().map(|x| x * x).sum::<f64>() - f * f).abs() <= 1e-10 * f * f);
    }

    #[test]
    fn cholesky_cases() {
        let l = dense_cholesky(&DenseSym::identity(3)).unwrap();
        assert_eq!(l, DenseSym::identity(3).data().to_vec());
        let l = dense_cholesky(&DenseSym::new(2, vec![4.0, 2.0, 2.0, 5.0]).unwrap()).unwrap();
        assert!(close(&l, &[2.0, 0.0, 1.0, 2.0], 1e-15));
        assert!(matches!(dense_cholesky(&DenseSym::diagonal(&[1.0, -1.0])), Err(Error::NotSpd { index: 1, .. })));
        let m = DenseSym::from_csr(&synth::random_spd(40, 3));
        let l = dense_cholesky(&m).unwrap();
        let n = 40;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| l[i * n + k] * l[j * n + k]).sum();
                worst = worst.max((s - m.get(i, j)).abs());
            }
        }
        assert!(worst <= 1e-12 * m.frobenius());
    }

    #[test]
    fn pencil_eig_cases() {
        let a = DenseSym::from_csr(&synth::random_sparse_symmetric(20, 0.4, 1));
        assert!(close(&dense_pencil_eigs(&a, &DenseSym::identity(20)).unwrap(), &dense_eigs_sym(&a).unwrap(), 1e-12));
        let two = DenseSym::diagonal(&[2.0; 5]);
        let four = DenseSym::diagonal(&[4.0; 5]);
        assert!(close(&dense_pencil_eigs(&two, &four).unwrap(), &[0.5; 5], 1e-15));
    }

    #[test]
    fn known_pencil_spectrum() {
        let spec = synth::uniform_spectrum(60, -1.0, 4.0);
        let (a, b, eig) = synth::congruence_pencil(&spec, 2);
        let got = dense_pencil_eigs(&DenseSym::from_csr(&a), &DenseSym::from_csr(&b)).unwrap();
        assert!(close(&got, &eig, 1e-8), "{:?}", &got[..3]);
    }

    #[test]
    fn sqrt_cases() {
        let s = dense_sqrt_sym(&DenseSym::identity(4)).unwrap();
        assert!(close(s.data(), DenseSym::identity(4).data(), 1e-15));
        let s = dense_sqrt_sym(&DenseSym::diagonal(&[4.0, 9.0])).unwrap();
        assert!(close(s.data(), &[2.0, 0.0, 0.0, 3.0], 1e-14));
        let m = DenseSym::from_csr(&synth::random_spd(30, 4));
        let s = dense_sqrt_sym(&m).unwrap();
        let mut worst = 0.0f64;
        for j in 0..30 {
            let col = s.matvec(&s.data()[j * 30..(j + 1) * 30]);
            for i in 0..30 {
                worst = worst.max((col[i] - m.get(i, j)).abs());
            }
        }
        assert!(worst <= 1e-10 * m.frobenius());
    }

    #[test]
    fn symmetrizations_agree() {
        let (a, b) = synth::random_dense_pencil(40, 6);
        let (a, b) = (DenseSym::from_csr(&a), DenseSym::from_csr(&b));
        let x = dense_pencil_eigs(&a, &b).unwrap();
        let y = dense_eigs_sym(&sandwich(&dense_inv_sqrt_sym(&b).unwrap(), &a).unwrap()).unwrap();
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        assert!(close(&x, &y, 1e-9 * scale));
    }

    #[test]
    fn bound_trivial_cases() {
        let a = DenseSym::diagonal(&[0.0, 1.0, -2.0]);
        let b = DenseSym::diagonal(&[1.0, 2.0, 1.5]);
        let p = weyl_bound(&a, &b, 0.0).unwrap();
        assert!(p.per_eigenvalue.iter().all(|&x| x == 0.0));
        let p = weyl_bound(&a, &b, 1e-3).unwrap();
        let zero = p.lambda.iter().position(|&l| l == 0.0).unwrap();
        assert_eq!(p.per_eigenvalue[zero], 0.0);
        assert!(matches!(weyl_bound(&a, &b, 0.6), Err(Error::VacuousBound(_))));
    }

    #[test]
    fn bound_holds_with_approximant() {
        let spec = synth::uniform_spectrum(50, 0.5, 3.0);
        let (a, b, _) = synth::congruence_pencil(&spec, 9);
        let p = crate::sparse::Pencil::new(a, b).unwrap().diag_scale().unwrap();
        let (ad, bd) = (DenseSym::from_csr(p.a()), DenseSym::from_csr(p.b()));
        let eb = dense_eigs_sym(&bd).unwrap();
        let iv = ChebInterval::new(eb[0] * 0.99, eb[49] * 1.01).unwrap();
        let g = select_degree_kind(FnKind::Inverse, iv, 1e-3, 100).unwrap();
        let q = select_degree_kind(FnKind::InverseSqrt, iv, 1e-3, 100).unwrap();
        let tau_abs = crate::cheb::sup_error_abs(&g, |x| 1.0 / x, 2000).unwrap();
        let bound = weyl_bound(&ad, &bd, tau_abs).unwrap();
        let pe = perturbed_eigs(&ad, &bd, &g, &q).unwrap();
        for i in 0..50 {
            assert!((pe.product[i] - bound.lambda[i]).abs() <= bound.per_eigenvalue[i]);
            assert!((pe.surrogate[i] - bound.lambda[i]).abs() <= 2.0 * bound.per_eigenvalue[i]);
        }
    }

    #[test]
    fn exact_ops_inverse_and_start() {
        let (a, b) = synth::random_dense_pencil(25, 1);
        let (a, b) = (DenseSym::from_csr(&a), DenseSym::from_csr(&b));
        for mode in [StartMode::Cholesky, StartMode::Sqrt] {
            let ops = ExactPencilOps::new(&a, &b, mode).unwrap();
            let x: Vec<f64> = (0..25).map(|i| libm::cos(i as f64)).collect();
            let mut y = vec![0.0; 25];
            ops.solve_b(&x, &mut y);
            assert!(close(&b.matvec(&y), &x, 1e-10));
            // Sᵀ S⁻ᵀ x = x
            ops.start_transform(&x, &mut y);
            assert!(close(&ops.to_standard(&y), &x, 1e-10));
        }
    }

    #[test]
    fn too_large_is_rejected() {
        let m = DenseSym { n: ORACLE_LIMIT + 1, data: Vec::new() };
        assert!(matches!(dense_eigh(&m), Err(Error::OracleTooLarge { .. })));
    }
}
