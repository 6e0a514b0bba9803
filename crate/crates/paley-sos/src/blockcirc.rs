//! Block-circulant reduction of the ordered-pair version T̃ of T441 under the
//! affine group of F_p, the Hermitian slice matrices S^(ψ), and the
//! character-sum matrix whose norm governs ‖T441‖.
//!
//! Ordered pairs (x, y), x ≠ y, are enumerated as (hⁱa, hⁱ(a+1)) for
//! i ∈ 0..p−1 and a ∈ F_p, where h is the smallest primitive root. Because
//! scaling by hⁱ multiplies each factor of a T441 entry by χ(hⁱ) and the
//! entry has four factors, the block between block-rows i and j only depends
//! on j − i (mod p − 1).

use crate::error::{Error, Result};
use crate::field::PrimeContext;
use crate::graphmx::{build_graph_matrix, Shape};
use crate::linalg::{herm_eigenvalues, sym_eigenvalues, CMat, DMat};
use crate::paley::PaleyGraph;
use faer::linalg::matmul::matmul;
use faer::{Accum, Par};
use num_complex::Complex64;
use std::f64::consts::PI;

/// T̃ in block-circulant layout: block (i, j) equals `blocks[(j − i) mod (p−1)]`.
#[derive(Debug, Clone)]
pub struct BlockCirculantForm {
    /// The prime.
    pub p: u64,
    /// Primitive root h used for the ordering.
    pub h: u64,
    /// B^(0), …, B^(p−2), each p × p.
    pub blocks: Vec<DMat>,
    /// Row r = i·p + a ↦ ordered pair (hⁱa, hⁱ(a+1)).
    pub index_map: Vec<(usize, usize)>,
}

/// T441 entry for the 2-subsets {x, y} and {z, w} (zero unless disjoint,
/// which the Legendre symbol enforces automatically).
fn t441_entry(ctx: &PrimeContext, x: usize, y: usize, z: usize, w: usize) -> i8 {
    let p = ctx.n();
    let d = |u: usize, v: usize| ctx.chi((u + p - v) % p);
    d(x, z) * d(x, w) * d(y, z) * d(y, w)
}

/// Builds the blocks B^(k)_{a,c} = T441_{{a,a+1},{hᵏc, hᵏ(c+1)}}.
pub fn reorder_t441(g: &PaleyGraph) -> Result<BlockCirculantForm> {
    let ctx = g.ctx();
    ctx.require_paley()?;
    let p = ctx.n();
    let h = ctx.generator();
    let blocks = (0..p - 1)
        .map(|k| {
            let hk = ctx.gen_pow(k as u64);
            DMat::from_fn(p, p, |a, c| {
                let z = hk * c % p;
                let w = hk * ((c + 1) % p) % p;
                t441_entry(ctx, a, (a + 1) % p, z, w) as f64
            })
        })
        .collect();
    let mut index_map = Vec::with_capacity(p * (p - 1));
    for i in 0..p - 1 {
        let hi = ctx.gen_pow(i as u64);
        for a in 0..p {
            index_map.push((hi * a % p, hi * ((a + 1) % p) % p));
        }
    }
    Ok(BlockCirculantForm { p: g.p(), h, blocks, index_map })
}

impl BlockCirculantForm {
    /// Number of blocks, p − 1.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Dense p(p−1) × p(p−1) matrix in circulant block layout.
    pub fn assemble(&self) -> DMat {
        let p = self.p as usize;
        let d = self.num_blocks();
        DMat::from_fn(p * d, p * d, |r, c| {
            let (i, a) = (r / p, r % p);
            let (j, b) = (c / p, c % p);
            self.blocks[(j + d - i) % d][(a, b)]
        })
    }

    /// max |B^(−i) − (B^(i))ᵀ| over all i.
    pub fn transpose_residual(&self) -> f64 {
        let d = self.num_blocks();
        let p = self.p as usize;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            let bi = &self.blocks[i];
            let bm = &self.blocks[(d - i) % d];
            for a in 0..p {
                for c in 0..p {
                    worst = worst.max((bm[(a, c)] - bi[(c, a)]).abs());
                }
            }
        }
        worst
    }
}

/// T̃ written directly in the ordered-pair order of `index_map`
/// (T̃_{(x,y),(z,w)} = T441_{{x,y},{z,w}}).
pub fn t_tilde_direct(g: &PaleyGraph, form: &BlockCirculantForm) -> DMat {
    let n = form.index_map.len();
    DMat::from_fn(n, n, |r, c| {
        let (x, y) = form.index_map[r];
        let (z, w) = form.index_map[c];
        t441_entry(g.ctx(), x, y, z, w) as f64
    })
}

/// Maximum entrywise discrepancy between the circulant assembly and T̃.
pub fn reassembly_residual(g: &PaleyGraph, form: &BlockCirculantForm) -> f64 {
    crate::linalg::max_abs_diff(&form.assemble(), &t_tilde_direct(g, form))
}

/// Whether `index_map` enumerates each ordered pair of distinct elements once.
pub fn index_map_is_bijective(form: &BlockCirculantForm) -> bool {
    let p = form.p as usize;
    let mut seen = vec![false; p * p];
    for &(x, y) in &form.index_map {
        if x == y || seen[x * p + y] {
            return false;
        }
        seen[x * p + y] = true;
    }
    form.index_map.len() == p * (p - 1)
}

/// The slice S^(ψ_j) = Σ_i ψ_j(i) B^(i) with ψ_j(i) = exp(2πi·ij/(p−1)).
#[derive(Debug, Clone)]
pub struct SpectralSlice {
    /// Character index j.
    pub psi_index: usize,
    /// The p × p Hermitian matrix.
    pub matrix: CMat,
}

impl SpectralSlice {
    /// max |S − S*|.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Rayleigh quotient λ of the all-ones vector and ‖S·1 − λ·1‖.
    pub fn ones_eigenpair(&self) -> (f64, f64) {
        ones_eigenpair(&self.matrix)
    }

    /// Eigenvalues (nondecreasing).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        herm_eigenvalues(&self.matrix)
    }
}

fn ones_eigenpair(m: &CMat) -> (f64, f64) {
    let n = m.nrows();
    let rows: Vec<Complex64> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).sum()).collect();
    let lambda = rows.iter().sum::<Complex64>().re / n as f64;
    let res = rows.iter().map(|r| (r - lambda).norm_sqr()).sum::<f64>().sqrt();
    (lambda, res)
}

/// Computes slices for the character indices in `js` in one batch, via two
/// real matrix products (cosine and sine parts) against the stacked blocks.
fn slice_batch(stack: &DMat, p: usize, js: &[usize]) -> Vec<SpectralSlice> {
    let d = stack.nrows();
    let cos = DMat::from_fn(js.len(), d, |r, i| (2.0 * PI * ((js[r] * i) % d) as f64 / d as f64).cos());
    let sin = DMat::from_fn(js.len(), d, |r, i| (2.0 * PI * ((js[r] * i) % d) as f64 / d as f64).sin());
    let mut re = DMat::zeros(js.len(), p * p);
    let mut im = DMat::zeros(js.len(), p * p);
    matmul(re.as_mut(), Accum::Replace, cos.as_ref(), stack.as_ref(), 1.0, Par::Seq);
    matmul(im.as_mut(), Accum::Replace, sin.as_ref(), stack.as_ref(), 1.0, Par::Seq);
    js.iter()
        .enumerate()
        .map(|(r, &j)| SpectralSlice {
            psi_index: j,
            matrix: CMat::from_fn(p, p, |a, c| Complex64::new(re[(r, a + c * p)], im[(r, a + c * p)])),
        })
        .collect()
}

fn block_stack(form: &BlockCirculantForm) -> DMat {
    let p = form.p as usize;
    DMat::from_fn(form.num_blocks(), p * p, |k, e| form.blocks[k][(e % p, e / p)])
}

const SLICE_BATCH: usize = 16;

/// All p − 1 slices.
pub fn spectral_slices(form: &BlockCirculantForm) -> Vec<SpectralSlice> {
    let p = form.p as usize;
    let stack = block_stack(form);
    let js: Vec<usize> = (0..form.num_blocks()).collect();
    js.chunks(SLICE_BATCH).flat_map(|chunk| slice_batch(&stack, p, chunk)).collect()
}

/// Per-slice spectral data, computed without holding all slices in memory.
#[derive(Debug, Clone)]
pub struct SliceSpectra {
    /// The prime.
    pub p: u64,
    /// Eigenvalues of each slice (nondecreasing).
    pub eigenvalues: Vec<Vec<f64>>,
    /// Eigenvalue of the all-ones vector in each slice.
    pub ones_eigenvalues: Vec<f64>,
    /// ‖S·1 − λ·1‖ per slice.
    pub ones_residuals: Vec<f64>,
    /// Largest Hermitian defect over all slices.
    pub hermitian_residual: f64,
}

/// Eigen-data of every slice of T̃.
pub fn slice_spectra(form: &BlockCirculantForm) -> Result<SliceSpectra> {
    let p = form.p as usize;
    let stack = block_stack(form);
    let js: Vec<usize> = (0..form.num_blocks()).collect();
    let mut out = SliceSpectra {
        p: form.p,
        eigenvalues: Vec::with_capacity(js.len()),
        ones_eigenvalues: Vec::with_capacity(js.len()),
        ones_residuals: Vec::with_capacity(js.len()),
        hermitian_residual: 0.0,
    };
    for chunk in js.chunks(SLICE_BATCH) {
        for s in slice_batch(&stack, p, chunk) {
            out.hermitian_residual = out.hermitian_residual.max(s.hermitian_residual());
            let (l, r) = s.ones_eigenpair();
            out.ones_eigenvalues.push(l);
            out.ones_residuals.push(r);
            out.eigenvalues.push(s.eigenvalues()?);
        }
    }
    Ok(out)
}

impl SliceSpectra {
    /// Multiset union of all slice spectra, sorted.
    pub fn union(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.eigenvalues.iter().flatten().copied().collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// max over slices of ‖S^(ψ)‖ (= ‖T̃‖).
    pub fn max_norm(&self) -> f64 {
        self.eigenvalues.iter().flatten().fold(0.0, |m, &v| m.max(v.abs()))
    }

    /// Spectra with the all-ones eigenvalue removed (one occurrence each).
    pub fn reduced_spectra(&self) -> Vec<Vec<f64>> {
        self.eigenvalues
            .iter()
            .zip(&self.ones_eigenvalues)
            .map(|(ev, &l)| {
                let k = ev
                    .iter()
                    .enumerate()
                    .min_by(|x, y| (x.1 - l).abs().total_cmp(&(y.1 - l).abs()))
                    .map(|(k, _)| k)
                    .unwrap_or(0);
                ev.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &v)| v).collect()
            })
            .collect()
    }

    /// Largest deviation between the reduced spectra of different slices.
    pub fn shared_spectrum_deviation(&self) -> f64 {
        let red = self.reduced_spectra();
        let Some(first) = red.first() else { return 0.0 };
        red.iter().skip(1).map(|r| sorted_spectrum_distance(first, r)).fold(0.0, f64::max)
    }
}

/// max_k |a_k − b_k| after sorting both (∞ when lengths differ).
pub fn sorted_spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    x.iter().zip(&y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

/// Spectrum of T̃ by dense eigendecomposition of the circulant assembly.
pub fn t_tilde_spectrum_dense(form: &BlockCirculantForm) -> Result<Vec<f64>> {
    sym_eigenvalues(&form.assemble())
}

/// Spectrum of T̃ via the ordered/unordered-pair relation
/// T̃ = E·T441·Eᵀ with EᵀE = 2I: spec(T̃) = 2·spec(T441) ∪ {0}^{C(p,2)}.
pub fn t_tilde_spectrum_via_t441(g: &PaleyGraph) -> Result<Vec<f64>> {
    let t = build_graph_matrix(g, Shape::T441)?;
    let mut ev: Vec<f64> = sym_eigenvalues(&t.data)?.into_iter().map(|v| 2.0 * v).collect();
    ev.extend(std::iter::repeat_n(0.0, t.data.nrows()));
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// ‖T441‖ = ‖T̃‖ / 2 through the slices.
pub fn t441_norm_block_circulant(g: &PaleyGraph) -> Result<f64> {
    let form = reorder_t441(g)?;
    Ok(slice_spectra(&form)?.max_norm() / 2.0)
}

/// T_{ij} = Σ_x χ((ix−j)(ix−(j+1))((i+1)x−j)((i+1)x−(j+1))).
pub fn charsum1_matrix(ctx: &PrimeContext) -> DMat {
    let p = ctx.n();
    DMat::from_fn(p, p, |i, j| {
        let i1 = (i + 1) % p;
        let j1 = (j + 1) % p;
        let mut s = 0i64;
        for x in 0..p {
            let f1 = (i * x % p + p - j) % p;
            let f2 = (i * x % p + p - j1) % p;
            let f3 = (i1 * x % p + p - j) % p;
            let f4 = (i1 * x % p + p - j1) % p;
            s += (ctx.chi(f1) * ctx.chi(f2) * ctx.chi(f3) * ctx.chi(f4)) as i64;
        }
        s as f64
    })
}

/// Real part of S^(ψ₀) = Σ_i B^(i).
pub fn slice_zero(form: &BlockCirculantForm) -> DMat {
    let p = form.p as usize;
    let mut s = DMat::zeros(p, p);
    for b in &form.blocks {
        for a in 0..p {
            for c in 0..p {
                s[(a, c)] += b[(a, c)];
            }
        }
    }
    s
}

/// max |T_{ij} − S^(ψ₀)_{ij}| between the character-sum matrix and slice zero.
pub fn charsum1_slice_deviation(ctx: &PrimeContext, form: &BlockCirculantForm) -> Result<f64> {
    if ctx.p() != form.p {
        return Err(Error::InvalidParameter("prime mismatch between context and form".into()));
    }
    Ok(crate::linalg::max_abs_diff(&charsum1_matrix(ctx), &slice_zero(form)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphmx::spectral_norm;

    #[test]
    fn p13_structure() {
        let g = PaleyGraph::from_prime(13).unwrap();
        let form = reorder_t441(&g).unwrap();
        assert_eq!(form.num_blocks(), 12);
        assert!(form.blocks.iter().all(|b| b.nrows() == 13 && b.ncols() == 13));
        assert!(index_map_is_bijective(&form));
        assert_eq!(reassembly_residual(&g, &form), 0.0);
        assert_eq!(form.transpose_residual(), 0.0);
    }

    #[test]
    fn p13_spectra() {
        let g = PaleyGraph::from_prime(13).unwrap();
        let form = reorder_t441(&g).unwrap();
        let slices = spectral_slices(&form);
        assert_eq!(slices.len(), 12);
        for s in &slices {
            assert!(s.hermitian_residual() < 1e-10);
            assert!(s.ones_eigenpair().1 < 1e-8);
        }
        let spec = slice_spectra(&form).unwrap();
        let dense = t_tilde_spectrum_dense(&form).unwrap();
        assert_eq!(dense.len(), 156);
        let scale = spec.max_norm().max(1.0);
        assert!(sorted_spectrum_distance(&dense, &spec.union()) < 1e-6 * scale);
        assert!(spec.shared_spectrum_deviation() < 1e-6 * scale);
        let via = t_tilde_spectrum_via_t441(&g).unwrap();
        assert!(sorted_spectrum_distance(&via, &dense) < 1e-6 * scale);
        let t441 = build_graph_matrix(&g, Shape::T441).unwrap();
        let n441 = spectral_norm(&t441, 1e-10).unwrap().value;
        assert!((spec.max_norm() - 2.0 * n441).abs() < 1e-6 * n441);
        for &l in &spec.ones_eigenvalues {
            assert!(l.abs() <= 2.0 * 13.0);
        }
    }

    #[test]
    fn charsum1_p13() {
        let ctx = PrimeContext::new_paley(13).unwrap();
        let g = PaleyGraph::new(&ctx).unwrap();
        let form = reorder_t441(&g).unwrap();
        assert!(charsum1_slice_deviation(&ctx, &form).unwrap() <= 1.0);
        // The literal sum is not symmetric (boundary terms at x = 0 and
        // i = p − 1), but its transpose is also within 1 of the symmetric S^(ψ₀).
        let t = charsum1_matrix(&ctx);
        assert!(!crate::linalg::is_symmetric(&t, 0.0));
        let s0 = slice_zero(&form);
        assert!(crate::linalg::is_symmetric(&s0, 0.0));
        let tt = DMat::from_fn(13, 13, |i, j| t[(j, i)]);
        assert!(crate::linalg::max_abs_diff(&tt, &s0) <= 1.0);
        assert!(crate::linalg::max_abs_diff(&t, &tt) <= 2.0);
    }
}
