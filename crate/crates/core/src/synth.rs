//! Synthetic test problems with known spectra.
//!
//! [`congruence_pencil`] builds a sparse banded pencil `(YᵀΛY, YᵀY)`
//! whose eigenvalues are exactly the prescribed `Λ`. `Y` has widely
//! varying column scales, so `B` is badly conditioned until it is
//! diagonally scaled.

use alloc::vec;
use alloc::vec::Vec;

use crate::rng::{gaussian_vector, sample_rng, uniform01};
use crate::sparse::CsrMatrix;

/// `n` cell midpoints of `[lo, hi]`.
pub fn uniform_spectrum(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|i| lo + (i as f64 + 0.5) * (hi - lo) / n as f64).collect()
}

/// Mixture of a narrow Gaussian cluster and an exponential tail on
/// `[0, 1]`. The Gaussian part is not truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    /// Mass of the Gaussian component.
    pub weight: f64,
    pub mu: f64,
    pub sd: f64,
    /// Decay length of the exponential component.
    pub tail: f64,
}

impl Default for Cluster {
    fn default() -> Self {
        Self { weight: 0.7, mu: 0.08, sd: 0.03, tail: 0.4 }
    }
}

impl Cluster {
    pub fn cdf(&self, x: f64) -> f64 {
        let g = 0.5 * (1.0 + libm::erf((x - self.mu) / (self.sd * core::f64::consts::SQRT_2)));
        let t = x.clamp(0.0, 1.0);
        let e = (1.0 - libm::exp(-t / self.tail)) / (1.0 - libm::exp(-1.0 / self.tail));
        self.weight * g + (1.0 - self.weight) * e
    }
}

/// Deterministic spectrum: the `(i + 1/2)/n` quantiles of `c`, ascending.
pub fn clustered_spectrum(n: usize, c: Cluster) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let target = (i as f64 + 0.5) / n as f64;
            let (mut lo, mut hi) = (-1.0, 2.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if c.cdf(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Pencil with eigenvalues exactly `spec`: `A = YᵀΛY`, `B = YᵀY`,
/// `Y = (I + E) D` with `E` random on two superdiagonals and `D` random
/// column scales spanning three decades. `Λ` is a random permutation of
/// `spec`. Returns `(A, B, sorted spec)`.
pub fn congruence_pencil(spec: &[f64], seed: u64) -> (CsrMatrix, CsrMatrix, Vec<f64>) {
    let n = spec.len();
    let mut rng = sample_rng(seed, 0x5EED);
    let d: Vec<f64> = (0..n).map(|_| libm::pow(10.0, 3.0 * uniform01(&mut rng) - 1.5)).collect();
    // Fisher-Yates
    let mut lam = spec.to_vec();
    for i in (1..n).rev() {
        let j = (uniform01(&mut rng) * (i + 1) as f64) as usize;
        lam.swap(i, j.min(i));
    }
    // rows of Y: Y[i][j] for j in i..=i+2
    let mut y = vec![[0.0f64; 3]; n];
    for i in 0..n {
        for k in 0..3 {
            let j = i + k;
            if j >= n {
                continue;
            }
            let e = if k == 0 { 1.0 } else { 0.6 * uniform01(&mut rng) - 0.3 };
            y[i][k] = e * d[j];
        }
    }
    // (YᵀWY)_{jl} = Σ_i Y_ij W_i Y_il over rows i with both j, l in i..=i+2
    let mut ta = Vec::new();
    let mut tb = Vec::new();
    for i in 0..n {
        for a in 0..3 {
            for b in 0..3 {
                let (j, l) = (i + a, i + b);
                if j >= n || l >= n {
                    continue;
                }
                let p = y[i][a] * y[i][b];
                tb.push((j, l, p));
                ta.push((j, l, lam[i] * p));
            }
        }
    }
    let a = CsrMatrix::from_triplets(n, &ta).expect("indices in range");
    let b = CsrMatrix::from_triplets(n, &tb).expect("indices in range");
    let mut sorted = spec.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    (a, b, sorted)
}

/// Random sparse symmetric matrix: each upper entry present with
/// probability `density`, values standard normal, full diagonal.
pub fn random_sparse_symmetric(n: usize, density: f64, seed: u64) -> CsrMatrix {
    let mut rng = sample_rng(seed, 0xA11);
    let mut t = Vec::new();
    for i in 0..n {
        for j in i..n {
            if i == j || uniform01(&mut rng) < density {
                let v = gaussian_vector(&mut rng, 1)[0];
                t.push((i, j, v));
                if i != j {
                    t.push((j, i, v));
                }
            }
        }
    }
    CsrMatrix::from_triplets(n, &t).expect("indices in range")
}

/// Dense SPD matrix `MᵀM / n + I/2` with Gaussian `M`.
pub fn random_spd(n: usize, seed: u64) -> CsrMatrix {
    let mut rng = sample_rng(seed, 0xB0B);
    let m = gaussian_vector(&mut rng, n * n);
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|k| m[k * n + i] * m[k * n + j]).sum();
            d[i * n + j] = s / n as f64 + if i == j { 0.5 } else { 0.0 };
        }
    }
    CsrMatrix::from_dense(n, &d).expect("square")
}

/// Dense random pencil: symmetric Gaussian `A`, SPD `B` with an uneven
/// diagonal.
pub fn random_dense_pencil(n: usize, seed: u64) -> (CsrMatrix, CsrMatrix) {
    let a = random_sparse_symmetric(n, 1.0, seed);
    let b = random_spd(n, seed);
    let s: Vec<f64> = (0..n).map(|i| 1.0 + 4.0 * ((i * 37) % 17) as f64 / 16.0).collect();
    (a, b.congruence_diag(&s).expect("dimensions match"))
}
