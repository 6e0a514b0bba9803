//! Thin wrappers around the dense eigensolvers, plus matrix-free norm
//! estimation (power iteration and Lanczos) for large structured operators.

use crate::error::{Error, Result};
use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense real matrix type used throughout the crate (column-major).
pub type DMat = Mat<f64>;
/// Dense complex matrix type.
pub type CMat = Mat<Complex64>;

/// Default seed for randomized start vectors.
pub const DEFAULT_SEED: u64 = 42;

/// Seed from the `PALEY_SOS_SEED` environment variable, falling back to 42.
pub fn seed_from_env() -> u64 {
    std::env::var("PALEY_SOS_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Eigenvalues of a real symmetric matrix, nondecreasing.
pub fn sym_eigenvalues(m: &DMat) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver: {e:?}")))
}

/// Eigenvalues and orthonormal eigenvectors (columns) of a real symmetric matrix.
pub fn sym_eigen(m: &DMat) -> Result<(Vec<f64>, DMat)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver: {e:?}")))?;
    let s = evd.S().column_vector();
    let vals = (0..m.nrows()).map(|i| s[i]).collect();
    Ok((vals, evd.U().to_owned()))
}

/// Eigenvalues of a complex Hermitian matrix, nondecreasing.
pub fn herm_eigenvalues(m: &CMat) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigensolver: {e:?}")))
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue(m: &DMat) -> Result<f64> {
    if m.nrows() == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    Ok(sym_eigenvalues(m)?[0])
}

/// Largest singular value of a dense matrix.
pub fn dense_spectral_norm(m: &DMat) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let sv = m
        .singular_values()
        .map_err(|e| Error::Numerical(format!("svd: {e:?}")))?;
    Ok(sv.first().copied().unwrap_or(0.0))
}

/// Spectral norm of a real symmetric matrix as max |λ|.
pub fn symmetric_spectral_norm(m: &DMat) -> Result<f64> {
    let ev = sym_eigenvalues(m)?;
    Ok(ev.iter().fold(0.0f64, |a, &x| a.max(x.abs())))
}

/// `a * b`.
pub fn mul(a: &DMat, b: &DMat) -> DMat {
    let mut out = DMat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a.as_ref(), b.as_ref(), 1.0, Par::Seq);
    out
}

/// `a * bᵀ`.
pub fn mul_t(a: &DMat, b: &DMat) -> DMat {
    let mut out = DMat::zeros(a.nrows(), b.nrows());
    matmul(out.as_mut(), Accum::Replace, a.as_ref(), b.as_ref().transpose(), 1.0, Par::Seq);
    out
}

/// `aᵀ * b`.
pub fn t_mul(a: &DMat, b: &DMat) -> DMat {
    let mut out = DMat::zeros(a.ncols(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a.as_ref().transpose(), b.as_ref(), 1.0, Par::Seq);
    out
}

/// Largest absolute entry of `a − b`.
pub fn max_abs_diff(a: &DMat, b: &DMat) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    m
}

/// Largest absolute entry.
pub fn max_abs(a: &DMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].abs());
        }
    }
    m
}

/// Frobenius norm.
pub fn frobenius(a: &DMat) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)] * a[(i, j)];
        }
    }
    s.sqrt()
}

/// Whether `a` is symmetric within `tol` entrywise.
pub fn is_symmetric(a: &DMat, tol: f64) -> bool {
    a.nrows() == a.ncols()
        && (0..a.nrows()).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= tol))
}

/// A linear map given by its action on vectors.
pub trait LinearOperator: Sync {
    /// Number of rows.
    fn nrows(&self) -> usize;
    /// Number of columns.
    fn ncols(&self) -> usize;
    /// y = A x.
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// y = Aᵀ x.
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);
    /// Whether A = Aᵀ (enables symmetric Lanczos).
    fn is_symmetric(&self) -> bool {
        false
    }
}

/// A dense matrix viewed as a [`LinearOperator`].
pub struct DenseOperator<'a> {
    m: &'a DMat,
    symmetric: bool,
}

impl<'a> DenseOperator<'a> {
    /// Wraps a dense matrix; symmetry is detected exactly.
    pub fn new(m: &'a DMat) -> Self {
        let symmetric = is_symmetric(m, 0.0);
        Self { m, symmetric }
    }
}

impl LinearOperator for DenseOperator<'_> {
    fn nrows(&self) -> usize {
        self.m.nrows()
    }
    fn ncols(&self) -> usize {
        self.m.ncols()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.m.ncols() {
            let xj = x[j];
            if xj != 0.0 {
                let col = self.m.col_as_slice(j);
                for (yi, &mij) in y.iter_mut().zip(col) {
                    *yi += mij * xj;
                }
            }
        }
    }
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = self.m.col_as_slice(j).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
    fn is_symmetric(&self) -> bool {
        self.symmetric
    }
}

/// Outcome of an iterative norm estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    /// Estimated largest singular value.
    pub value: f64,
    /// Iterations (matrix–vector products with A and Aᵀ counted as one).
    pub iterations: usize,
    /// Whether the relative tolerance was met before the cap.
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn random_unit(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let s = norm2(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Largest singular value by power iteration on AᵀA.
///
/// The start vector is drawn from a ChaCha8 stream with the given seed; on
/// stagnation (no relative progress for 200 iterations without meeting the
/// tolerance) the vector is re-seeded once.
pub fn power_iteration_norm<O: LinearOperator + ?Sized>(op: &O, tol: f64, max_iter: usize, seed: u64) -> NormEstimate {
    let (m, n) = (op.nrows(), op.ncols());
    if m == 0 || n == 0 {
        return NormEstimate { value: 0.0, iterations: 0, converged: true };
    }
    let mut v = random_unit(n, seed);
    let mut av = vec![0.0; m];
    let mut w = vec![0.0; n];
    let mut prev = 0.0f64;
    let mut best = 0.0f64;
    let mut last_improvement = 0usize;
    let mut reseeded = false;
    for it in 1..=max_iter {
        op.apply(&v, &mut av);
        op.apply_transpose(&av, &mut w);
        let sigma = norm2(&av);
        best = best.max(sigma);
        let wn = norm2(&w);
        if wn == 0.0 {
            return NormEstimate { value: best, iterations: it, converged: true };
        }
        w.iter().zip(v.iter_mut()).for_each(|(a, b)| *b = a / wn);
        if it > 1 && (sigma - prev).abs() <= tol * sigma.max(f64::MIN_POSITIVE) {
            return NormEstimate { value: best, iterations: it, converged: true };
        }
        if sigma > prev * (1.0 + tol) {
            last_improvement = it;
        }
        if !reseeded && it - last_improvement > 200 {
            v = random_unit(n, seed.wrapping_add(1));
            reseeded = true;
            last_improvement = it;
        }
        prev = sigma;
    }
    NormEstimate { value: best, iterations: max_iter, converged: false }
}

/// Extreme eigenvalue magnitude of a symmetric operator (or largest singular
/// value via AᵀA otherwise) by Lanczos with full reorthogonalisation.
pub fn lanczos_norm<O: LinearOperator + ?Sized>(op: &O, tol: f64, max_steps: usize, seed: u64) -> Result<NormEstimate> {
    let (m, n) = (op.nrows(), op.ncols());
    if m == 0 || n == 0 {
        return Ok(NormEstimate { value: 0.0, iterations: 0, converged: true });
    }
    let symmetric = op.is_symmetric() && m == n;
    let mut tmp = vec![0.0; m];
    let apply = |x: &[f64], y: &mut [f64], tmp: &mut Vec<f64>| {
        if symmetric {
            op.apply(x, y);
        } else {
            op.apply(x, tmp);
            op.apply_transpose(tmp, y);
        }
    };
    let steps = max_steps.min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    basis.push(random_unit(n, seed));
    let mut w = vec![0.0; n];
    let mut estimate = 0.0f64;
    for k in 0..steps {
        apply(&basis[k], &mut w, &mut tmp);
        let a = dot(&w, &basis[k]);
        alphas.push(a);
        // Full reorthogonalisation (twice for stability).
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let b = norm2(&w);
        // Ritz values of the current tridiagonal matrix.
        let kk = alphas.len();
        let t = DMat::from_fn(kk, kk, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let (vals, vecs) = sym_eigen(&t)?;
        let (idx, theta) = vals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.abs().partial_cmp(&y.1.abs()).unwrap())
            .map(|(i, v)| (i, *v))
            .unwrap();
        estimate = if symmetric { theta.abs() } else { theta.max(0.0).sqrt() };
        let residual = (b * vecs[(kk - 1, idx)]).abs();
        let converged = residual <= tol * theta.abs().max(f64::MIN_POSITIVE) || b <= 1e-12 * theta.abs().max(1.0);
        if converged || k + 1 == steps {
            return Ok(NormEstimate { value: estimate, iterations: k + 1, converged });
        }
        betas.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    Ok(NormEstimate { value: estimate, iterations: steps, converged: false })
}

/// Hermitian matrix from a real symmetric one (utility for tests and slices).
pub fn to_complex(m: &DMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(m[(i, j)], 0.0))
}
