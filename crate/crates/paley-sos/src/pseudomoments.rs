//! Feige–Krauthgamer (FK) pseudomoments on Paley graphs: the clique-indexed
//! moment matrix M, its Schur complement N, the bipartite-indicator matrix
//! H, a translation-invariant block-diagonal PSD oracle, the degree-4 FK
//! optimizer with a certified bracket, and the pseudomoment-sum and u-vector
//! identities.

use crate::charsums::KloostermanTable;
use crate::error::{Error, Result};
use crate::graphmx::{apply_p01, PairIndexing, Shape, ShapeOperator};
use crate::linalg::{max_abs_diff, mul, sym_eigenvalues, DMat, LinearOperator};
use crate::paley::PaleyGraph;
use faer::linalg::solvers::Solve;
use faer::Side;
use std::f64::consts::PI;

/// The four FK parameters (α₀ = 1 is implicit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkParams {
    /// Ẽ[x_i].
    pub a1: f64,
    /// Ẽ[x_i x_j] on edges.
    pub a2: f64,
    /// Ẽ on triangles.
    pub a3: f64,
    /// Ẽ on 4-cliques.
    pub a4: f64,
}

impl FkParams {
    /// Validated constructor (all finite, α₁ > 0).
    pub fn new(a1: f64, a2: f64, a3: f64, a4: f64) -> Result<Self> {
        if ![a1, a2, a3, a4].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("FK parameters must be finite".into()));
        }
        if a1 <= 0.0 {
            return Err(Error::InvalidParameter(format!("α1 must be positive, got {a1}")));
        }
        Ok(Self { a1, a2, a3, a4 })
    }

    /// α_k for k ∈ 0..=4 (α₀ = 1, zero beyond).
    pub fn alpha(&self, k: usize) -> f64 {
        match k {
            0 => 1.0,
            1 => self.a1,
            2 => self.a2,
            3 => self.a3,
            4 => self.a4,
            _ => 0.0,
        }
    }

    /// As an array [α1, α2, α3, α4].
    pub fn to_array(&self) -> [f64; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self { a1: a[0], a2: a[1], a3: a[2], a4: a[3] }
    }
}

/// α₁ = c·p^{−2/3}, α₂ = 4α₁², α₃ = 8α₁³, α₄ = 512α₁⁴.
pub fn theorem_alphas(c: f64, p: u64) -> Result<FkParams> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    let a1 = c * (p as f64).powf(-2.0 / 3.0);
    FkParams::new(a1, 4.0 * a1 * a1, 8.0 * a1.powi(3), 512.0 * a1.powi(4))
}

/// Index sets of the clique-compressed moment matrix: ∅, singletons, edges.
#[derive(Debug, Clone)]
pub struct CliqueIndex {
    p: usize,
    edges: Vec<(usize, usize)>,
}

impl CliqueIndex {
    /// Enumerates ∅, {0},…,{p−1}, then the edges {a<b} lexicographically.
    pub fn new(g: &PaleyGraph) -> Self {
        let p = g.n();
        let mut edges = Vec::with_capacity(p * (p - 1) / 4);
        for a in 0..p {
            for b in (a + 1)..p {
                if g.adjacent(a, b) {
                    edges.push((a, b));
                }
            }
        }
        Self { p, edges }
    }

    /// 1 + p + |E|.
    pub fn dim(&self) -> usize {
        1 + self.p + self.edges.len()
    }

    /// The edge list.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The vertex set indexing row r.
    pub fn set(&self, r: usize) -> Vec<usize> {
        if r == 0 {
            vec![]
        } else if r <= self.p {
            vec![r - 1]
        } else {
            let (a, b) = self.edges[r - 1 - self.p];
            vec![a, b]
        }
    }
}

/// Size of S ∪ T if it is a clique, else `None`.
fn clique_union(g: &PaleyGraph, s: &[usize], t: &[usize]) -> Option<usize> {
    let mut u: Vec<usize> = s.iter().chain(t).copied().collect();
    u.sort_unstable();
    u.dedup();
    if g.graph().is_clique(&u) {
        Some(u.len())
    } else {
        None
    }
}

/// Ẽ[x^{S∪T}] under FK pseudomoments: α_{|S∪T|} on cliques, 0 otherwise.
pub fn fk_entry(g: &PaleyGraph, alpha: &FkParams, s: &[usize], t: &[usize]) -> f64 {
    clique_union(g, s, t).map_or(0.0, |k| alpha.alpha(k))
}

/// The clique-compressed degree-4 moment matrix.
#[derive(Debug, Clone)]
pub struct PseudomomentMatrix {
    /// The prime.
    pub p: u64,
    /// 1 + p + p(p−1)/4.
    pub dim: usize,
    /// Dense symmetric entries.
    pub data: DMat,
    /// Start rows of the singleton block, the edge block, and the end.
    pub block_index: [usize; 3],
}

impl PseudomomentMatrix {
    /// p·α₁, the objective value Σ_i Ẽ[x_i].
    pub fn objective(&self) -> f64 {
        (1..=self.p as usize).map(|i| self.data[(0, i)]).sum()
    }
}

/// Builds M(α) on ∅, singletons and edges.
pub fn assemble_m(g: &PaleyGraph, alpha: &FkParams) -> PseudomomentMatrix {
    let idx = CliqueIndex::new(g);
    let dim = idx.dim();
    let sets: Vec<Vec<usize>> = (0..dim).map(|r| idx.set(r)).collect();
    let mut data = DMat::zeros(dim, dim);
    for r in 0..dim {
        for c in r..dim {
            let v = fk_entry(g, alpha, &sets[r], &sets[c]);
            data[(r, c)] = v;
            data[(c, r)] = v;
        }
    }
    let p = g.n();
    PseudomomentMatrix { p: g.p(), dim, data, block_index: [1, 1 + p, dim] }
}

/// N = Schur complement of the (∅,∅) entry: M[1:,1:] − m mᵀ.
pub fn schur_complement_n(m: &PseudomomentMatrix) -> DMat {
    let n = m.dim - 1;
    DMat::from_fn(n, n, |i, j| m.data[(i + 1, j + 1)] - m.data[(0, i + 1)] * m.data[(0, j + 1)])
}

/// The blocks of H over singletons and all 2-subsets (in [`PairIndexing`] order).
#[derive(Debug, Clone)]
pub struct HBlocks {
    /// p × p.
    pub h11: DMat,
    /// p × C(p,2).
    pub h12: DMat,
    /// C(p,2) × C(p,2).
    pub h22: DMat,
}

/// 1_{ℓ,r}(L, R): every v ∈ L∖R is adjacent to every w ∈ R∖L.
pub fn bipartite_indicator(g: &PaleyGraph, l: &[usize], r: &[usize]) -> bool {
    l.iter().filter(|v| !r.contains(v)).all(|&v| r.iter().filter(|w| !l.contains(w)).all(|&w| g.adjacent(v, w)))
}

/// Builds H¹¹, H¹², H²² from the bipartite indicators.
pub fn assemble_h(g: &PaleyGraph, alpha: &FkParams) -> HBlocks {
    let p = g.n();
    let (a1, a2, a3, a4) = (alpha.a1, alpha.a2, alpha.a3, alpha.a4);
    let ind = |l: &[usize], r: &[usize]| if bipartite_indicator(g, l, r) { 1.0 } else { 0.0 };
    let h11 = DMat::from_fn(p, p, |a, b| if a == b { a1 - a1 * a1 } else { a2 * ind(&[a], &[b]) - a1 * a1 });
    let idx = PairIndexing::new(p);
    let pairs = idx.pairs();
    let h12 = DMat::from_fn(p, pairs.len(), |a, c| {
        let (x, y) = pairs[c];
        if a == x || a == y {
            a2 - a1 * a2
        } else {
            a3 * ind(&[a], &[x, y]) - a1 * a2
        }
    });
    let n = pairs.len();
    let mut h22 = DMat::zeros(n, n);
    for r in 0..n {
        let (a, b) = pairs[r];
        for c in r..n {
            let (x, y) = pairs[c];
            let shared = [x, y].iter().filter(|&&v| v == a || v == b).count();
            let v = match shared {
                2 => a2 - a2 * a2,
                1 => a3 * ind(&[a, b], &[x, y]) - a2 * a2,
                _ => a4 * ind(&[a, b], &[x, y]) - a2 * a2,
            };
            h22[(r, c)] = v;
            h22[(c, r)] = v;
        }
    }
    HBlocks { h11, h12, h22 }
}

/// max |N − H restricted to singletons and edges|.
pub fn n_vs_h_residual(g: &PaleyGraph, alpha: &FkParams) -> f64 {
    let m = assemble_m(g, alpha);
    let n = schur_complement_n(&m);
    let h = assemble_h(g, alpha);
    let p = g.n();
    let cidx = CliqueIndex::new(g);
    let pidx = PairIndexing::new(p);
    // position of each N row inside the (singletons ⊕ all pairs) indexing of H
    let pos: Vec<usize> = (0..n.nrows())
        .map(|r| if r < p { r } else { let (a, b) = cidx.edges()[r - p]; p + pidx.index(a, b) })
        .collect();
    let hval = |i: usize, j: usize| -> f64 {
        match (i < p, j < p) {
            (true, true) => h.h11[(i, j)],
            (true, false) => h.h12[(i, j - p)],
            (false, true) => h.h12[(j, i - p)],
            (false, false) => h.h22[(i - p, j - p)],
        }
    };
    let mut worst: f64 = 0.0;
    for i in 0..n.nrows() {
        for j in 0..n.ncols() {
            worst = worst.max((n[(i, j)] - hval(pos[i], pos[j])).abs());
        }
    }
    worst
}

/// The eigenvalues of H¹¹ = α₁I + α₂A − α₁²J predicted from the adjacency
/// spectrum, with multiplicities (1, (p−1)/2, (p−1)/2).
pub fn h11_expected_spectrum(p: u64, alpha: &FkParams) -> [(f64, usize); 3] {
    let pf = p as f64;
    let half = ((p - 1) / 2) as usize;
    [
        (alpha.a1 + (pf - 1.0) / 2.0 * alpha.a2 - pf * alpha.a1 * alpha.a1, 1),
        (alpha.a1 + (-1.0 + pf.sqrt()) / 2.0 * alpha.a2, half),
        (alpha.a1 + (-1.0 - pf.sqrt()) / 2.0 * alpha.a2, half),
    ]
}

/// Smallest eigenvalue of a symmetric matrix (dense eigensolver).
pub fn min_eigenvalue(m: &DMat) -> Result<f64> {
    crate::linalg::min_eigenvalue(m)
}

/// One real symmetric block of the translation-reduced LMI:
/// F(α) = C + Σ_k α_k A_k.
#[derive(Debug, Clone)]
pub struct LmiBlock {
    /// Constant part.
    pub c: DMat,
    /// Coefficient matrices for α₁..α₄.
    pub a: [DMat; 4],
}

impl LmiBlock {
    /// F(α).
    pub fn eval(&self, alpha: &[f64; 4]) -> DMat {
        let n = self.c.nrows();
        DMat::from_fn(n, n, |i, j| {
            self.c[(i, j)] + (0..4).map(|k| alpha[k] * self.a[k][(i, j)]).sum::<f64>()
        })
    }
}

/// M(α) block-diagonalised by the translation action of F_p.
///
/// Rows are grouped into types: singletons, and edges {a, a+d} for each
/// quadratic residue d ≤ (p−1)/2. For frequency t the block is
/// B_t[τ,τ'] = Σ_c K_{ττ'}(c)·ω^{tc} with K_{ττ'}(c) the entry between (0,τ)
/// and (c,τ'); the t = 0 block also carries the ∅ row (entries √p·α_{|τ|}).
/// Frequencies ±t are merged into one real block [[Re, −Im], [Im, Re]], so
/// the blocks' total dimension equals dim M and their spectra union is spec M.
#[derive(Debug, Clone)]
pub struct FourierBlocks {
    /// The prime.
    pub p: u64,
    /// Block for t = 0 followed by blocks for t = 1..(p−1)/2.
    pub blocks: Vec<LmiBlock>,
    /// Which α_k actually occur in M (α₄ is absent when ω(G_p) = 3).
    pub active: [bool; 4],
}

/// Builds the translation-reduced LMI for G_p.
pub fn fourier_blocks(g: &PaleyGraph) -> FourierBlocks {
    let p = g.n();
    let mut types: Vec<Vec<usize>> = vec![vec![0]];
    for d in 1..=(p - 1) / 2 {
        if g.adjacent(0, d) {
            types.push(vec![0, d]);
        }
    }
    let m = types.len();
    let shift = |t: &[usize], c: usize| -> Vec<usize> { t.iter().map(|&v| (v + c) % p).collect() };
    // kind[τ][τ'][c] ∈ 0..=4: clique size of the union, 0 when not a clique
    let mut kind = vec![0u8; m * m * p];
    let mut active = [false; 4];
    for (ti, t) in types.iter().enumerate() {
        for (ui, u) in types.iter().enumerate() {
            for c in 0..p {
                if let Some(k) = clique_union(g, t, &shift(u, c)) {
                    kind[(ti * m + ui) * p + c] = k as u8;
                    active[k - 1] = true;
                }
            }
        }
    }
    let cos: Vec<f64> = (0..p).map(|k| (2.0 * PI * k as f64 / p as f64).cos()).collect();
    let sin: Vec<f64> = (0..p).map(|k| (2.0 * PI * k as f64 / p as f64).sin()).collect();
    let mut blocks = Vec::with_capacity((p + 1) / 2);
    // t = 0 with the ∅ row
    {
        let n = m + 1;
        let mut c0 = DMat::zeros(n, n);
        c0[(0, 0)] = 1.0;
        let mut a: [DMat; 4] = std::array::from_fn(|_| DMat::zeros(n, n));
        let sp = (p as f64).sqrt();
        for (ti, t) in types.iter().enumerate() {
            let k = t.len();
            a[k - 1][(0, ti + 1)] = sp;
            a[k - 1][(ti + 1, 0)] = sp;
        }
        for ti in 0..m {
            for ui in 0..m {
                for c in 0..p {
                    let k = kind[(ti * m + ui) * p + c];
                    if k > 0 {
                        a[k as usize - 1][(ti + 1, ui + 1)] += 1.0;
                    }
                }
            }
        }
        blocks.push(LmiBlock { c: c0, a });
    }
    for t in 1..=(p - 1) / 2 {
        let n = 2 * m;
        let mut a: [DMat; 4] = std::array::from_fn(|_| DMat::zeros(n, n));
        for ti in 0..m {
            for ui in 0..m {
                let mut re = [0.0; 4];
                let mut im = [0.0; 4];
                for c in 0..p {
                    let k = kind[(ti * m + ui) * p + c];
                    if k > 0 {
                        let ph = t * c % p;
                        re[k as usize - 1] += cos[ph];
                        im[k as usize - 1] += sin[ph];
                    }
                }
                for k in 0..4 {
                    a[k][(ti, ui)] = re[k];
                    a[k][(ti + m, ui + m)] = re[k];
                    a[k][(ti, ui + m)] = -im[k];
                    a[k][(ti + m, ui)] = im[k];
                }
            }
        }
        blocks.push(LmiBlock { c: DMat::zeros(n, n), a });
    }
    FourierBlocks { p: g.p(), blocks, active }
}

impl FourierBlocks {
    /// Representatives of the blocks up to unitary similarity, with their
    /// multiplicities: dilation x ↦ qx by a quadratic residue q is an
    /// automorphism of G_p, so B_t and B_{qt} are unitarily similar. Returns
    /// (block index, weight) for t = 0, t = 1 and the least non-residue.
    pub fn dilation_classes(&self, g: &PaleyGraph) -> Vec<(usize, f64)> {
        let p = g.n();
        if self.blocks.len() < 2 {
            return vec![(0, 1.0)];
        }
        let w = ((p - 1) / 4) as f64;
        let nqr = (2..=(p - 1) / 2).find(|&t| !g.adjacent(0, t)).expect("a non-residue exists below p/2");
        vec![(0, 1.0), (1, w), (nqr, w)]
    }

    /// Smallest eigenvalue of M(α) (minimum over all blocks).
    pub fn min_eigenvalue(&self, alpha: &FkParams) -> Result<f64> {
        let a = alpha.to_array();
        let mut best = f64::INFINITY;
        for b in &self.blocks {
            best = best.min(sym_eigenvalues(&b.eval(&a))?[0]);
        }
        Ok(best)
    }

    /// All eigenvalues of M(α), sorted (each block's spectrum, concatenated).
    /// Merged ±t blocks carry the spectra of both frequencies.
    pub fn spectrum(&self, alpha: &FkParams) -> Result<Vec<f64>> {
        let a = alpha.to_array();
        let mut all = Vec::new();
        for b in &self.blocks {
            all.extend(sym_eigenvalues(&b.eval(&a))?);
        }
        all.sort_by(f64::total_cmp);
        Ok(all)
    }
}

/// Dimension limit for the dense route of [`min_eigenvalue_m`].
pub const DENSE_MOMENT_LIMIT: usize = 2500;

/// Smallest eigenvalue of M(α): dense eigensolver when dim ≤ 2500, the
/// translation-reduced blocks beyond.
pub fn min_eigenvalue_m(g: &PaleyGraph, alpha: &FkParams) -> Result<f64> {
    let dim = 1 + g.n() + g.n() * (g.n() - 1) / 4;
    if dim <= DENSE_MOMENT_LIMIT {
        min_eigenvalue(&assemble_m(g, alpha).data)
    } else {
        fourier_blocks(g).min_eigenvalue(alpha)
    }
}

/// PSD tolerance: min eig ≥ −1e−8·max(1, ‖M‖).
pub fn psd_tolerance(norm: f64) -> f64 {
    1e-8 * norm.max(1.0)
}

/// One row of [`verify_main_construction`].
#[derive(Debug, Clone)]
pub struct ConstructionRow {
    /// The prime.
    pub p: u64,
    /// Requested constant c.
    pub c: f64,
    /// Smallest eigenvalue of M(θ(c, p)).
    pub min_eig: f64,
    /// Whether M is PSD within tolerance.
    pub psd: bool,
    /// Largest c = 0.01·k (k = 1..=grid_max) with M PSD, if any.
    pub frontier_c: Option<f64>,
}

/// Checks the explicit construction for each prime and maps the feasible-c
/// frontier on the grid {0.01·k : 1 ≤ k ≤ grid_max}.
pub fn verify_main_construction(c: f64, primes: &[u64], grid_max: usize) -> Result<Vec<ConstructionRow>> {
    let mut rows = Vec::new();
    for &p in primes {
        let g = PaleyGraph::from_prime(p)?;
        let fb = fourier_blocks(&g);
        let eval = |c: f64| -> Result<(f64, bool)> {
            let alpha = theorem_alphas(c, p)?;
            let ev = fb.spectrum(&alpha)?;
            let norm = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            Ok((ev[0], ev[0] >= -psd_tolerance(norm)))
        };
        let (min_eig, psd) = eval(c)?;
        let mut frontier = None;
        for k in 1..=grid_max {
            let ck = 0.01 * k as f64;
            if eval(ck)?.1 {
                frontier = Some(ck);
            }
        }
        rows.push(ConstructionRow { p, c, min_eig, psd, frontier_c: frontier });
    }
    Ok(rows)
}

/// Certified result of the degree-4 FK optimization.
#[derive(Debug, Clone)]
pub struct Fk4Result {
    /// Value p·α₁ at a strictly feasible point.
    pub lo: f64,
    /// Certified upper bound from the dual matrix.
    pub hi: f64,
    /// The feasible point attaining `lo`.
    pub alpha: FkParams,
    /// Newton steps taken.
    pub newton_steps: usize,
    /// Whether hi − lo < tol was reached.
    pub converged: bool,
}

impl Fk4Result {
    /// Midpoint of the bracket.
    pub fn value(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

struct BarrierEval {
    logdet: f64,
    grad: [f64; 4],
    hess: [[f64; 4]; 4],
    /// (F⁻¹)₀₀ of the t = 0 block (the only block with a constant part).
    inv00: f64,
    /// uᵀA_k u with u = F⁻¹e₀ in the t = 0 block.
    u_a_u: [f64; 4],
}

fn barrier_eval(
    fb: &FourierBlocks,
    classes: &[(usize, f64)],
    alpha: &[f64; 4],
    with_derivs: bool,
) -> Option<BarrierEval> {
    let mut out = BarrierEval { logdet: 0.0, grad: [0.0; 4], hess: [[0.0; 4]; 4], inv00: 0.0, u_a_u: [0.0; 4] };
    for &(bi, w) in classes {
        let b = &fb.blocks[bi];
        let f = b.eval(alpha);
        let llt = f.llt(Side::Lower).ok()?;
        let l = llt.L();
        let n = f.nrows();
        for i in 0..n {
            let d = l[(i, i)];
            if !(d > 0.0) {
                return None;
            }
            out.logdet += w * 2.0 * d.ln();
        }
        if !with_derivs {
            continue;
        }
        let xs: Vec<Option<DMat>> =
            (0..4).map(|k| fb.active[k].then(|| llt.solve(&b.a[k]))).collect();
        for k in 0..4 {
            let Some(xk) = &xs[k] else { continue };
            out.grad[k] += w * (0..n).map(|i| xk[(i, i)]).sum::<f64>();
            for l2 in k..4 {
                let Some(xl) = &xs[l2] else { continue };
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += xk[(i, j)] * xl[(j, i)];
                    }
                }
                out.hess[k][l2] -= w * s;
                if l2 != k {
                    out.hess[l2][k] -= w * s;
                }
            }
        }
        if b.c.nrows() > 0 && b.c[(0, 0)] != 0.0 {
            let e0 = DMat::from_fn(n, 1, |i, _| if i == 0 { 1.0 } else { 0.0 });
            let u = llt.solve(&e0);
            out.inv00 += w * u[(0, 0)];
            for k in 0..4 {
                if !fb.active[k] {
                    continue;
                }
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += u[(i, 0)] * b.a[k][(i, j)] * u[(j, 0)];
                    }
                }
                out.u_a_u[k] += w * s;
            }
        }
    }
    Some(out)
}

/// Solves a small symmetric positive definite system by Cholesky.
fn solve_spd(a: &[[f64; 4]; 4], b: &[f64; 4], active: &[bool; 4]) -> Option<[f64; 4]> {
    let idx: Vec<usize> = (0..4).filter(|&k| active[k]).collect();
    let n = idx.len();
    let m = DMat::from_fn(n, n, |i, j| a[idx[i]][idx[j]]);
    let rhs = DMat::from_fn(n, 1, |i, _| b[idx[i]]);
    let llt = m.llt(Side::Lower).ok()?;
    let x = llt.solve(&rhs);
    let mut out = [0.0; 4];
    for (i, &k) in idx.iter().enumerate() {
        out[k] = x[(i, 0)];
    }
    Some(out)
}

/// Maximizes p·α₁ subject to M(α) ⪰ 0 by a log-det barrier path-following
/// method on the translation-reduced blocks (one representative per
/// dilation class, weighted by its multiplicity).
///
/// Lower end: p·α₁ at a strictly feasible iterate. Upper end: the
/// Newton-corrected dual matrix Z = (F⁻¹ − F⁻¹DF⁻¹)/t, D = Σ_k d_k A_k with
/// d the Newton step, satisfies ⟨Z, A_k⟩ = −c_k exactly and is PSD whenever
/// the Newton decrement is below 1, so every feasible α obeys
/// cᵀα ≤ ⟨Z, C⟩ (weak duality).
pub fn fk4_value(g: &PaleyGraph, tol: f64) -> Result<Fk4Result> {
    fk4_value_with(g, tol, 60)
}

/// [`fk4_value`] with an explicit cap on barrier-parameter updates.
pub fn fk4_value_with(g: &PaleyGraph, tol: f64, max_outer: usize) -> Result<Fk4Result> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let p = g.p();
    let pf = p as f64;
    let fb = fourier_blocks(g);
    let classes = fb.dilation_classes(g);
    let cvec = [pf, 0.0, 0.0, 0.0];
    // strictly feasible start from the explicit construction
    let mut c0 = 0.5;
    let mut alpha = loop {
        let mut a = theorem_alphas(c0, p)?.to_array();
        for k in 0..4 {
            if !fb.active[k] {
                a[k] = 0.0;
            }
        }
        if barrier_eval(&fb, &classes, &a, false).is_some() {
            break a;
        }
        c0 *= 0.5;
        if c0 < 1e-12 {
            return Err(Error::Numerical("no strictly feasible FK starting point found".into()));
        }
    };
    let mut t = 1.0;
    let mut steps = 0usize;
    let mut best: Option<Fk4Result> = None;
    let mut stalled = 0usize;
    for _outer in 0..max_outer {
        // centering: damped Newton for the self-concordant barrier, full
        // steps once inside the quadratic convergence region
        let mut cert: Option<f64> = None;
        let mut prev_dec2 = f64::INFINITY;
        for _ in 0..100 {
            let ev = barrier_eval(&fb, &classes, &alpha, true)
                .ok_or_else(|| Error::Numerical("lost feasibility".into()))?;
            let grad: [f64; 4] = std::array::from_fn(|k| if fb.active[k] { t * cvec[k] + ev.grad[k] } else { 0.0 });
            let neg_h: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| -ev.hess[i][j]));
            let Some(dir) = solve_spd(&neg_h, &grad, &fb.active) else { break };
            let dec2: f64 = (0..4).map(|k| grad[k] * dir[k]).sum();
            steps += 1;
            if dec2 < 0.25 {
                // λ < 1/2: Z = (F⁻¹ − F⁻¹DF⁻¹)/t is a valid dual point
                let udu: f64 = (0..4).map(|k| dir[k] * ev.u_a_u[k]).sum();
                let hi = (ev.inv00 - udu) / t;
                cert = Some(cert.map_or(hi, |c: f64| c.min(hi)));
            }
            if dec2 < 1e-14 || (dec2 < 1e-6 && dec2 > 0.5 * prev_dec2) {
                break;
            }
            prev_dec2 = dec2;
            let lam = dec2.max(0.0).sqrt();
            let mut s = if lam < 0.25 { 1.0 } else { 1.0 / (1.0 + lam) };
            let mut moved = false;
            for _ in 0..40 {
                let cand: [f64; 4] = std::array::from_fn(|k| alpha[k] + s * dir[k]);
                if barrier_eval(&fb, &classes, &cand, false).is_some() {
                    alpha = cand;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let lo = pf * alpha[0];
        let hi = cert.unwrap_or(f64::INFINITY).max(lo);
        let res = Fk4Result { lo, hi, alpha: FkParams::from_array(alpha), newton_steps: steps, converged: hi - lo < tol };
        let improved = best.as_ref().is_none_or(|b| res.hi - res.lo < 0.9 * (b.hi - b.lo));
        if best.as_ref().is_none_or(|b| res.hi - res.lo < b.hi - b.lo) {
            best = Some(res.clone());
        }
        if res.converged {
            return Ok(res);
        }
        // stop once floating point prevents further progress
        stalled = if improved { 0 } else { stalled + 1 };
        if stalled >= 3 {
            break;
        }
        t *= 8.0;
    }
    Ok(best.expect("at least one outer iteration"))
}

/// Report of the pseudomoment-sum identities through the edge {0, 1}.
#[derive(Debug, Clone)]
pub struct PseudomomentSums {
    /// Number of common neighbours of 0 and 1.
    pub triangle_count: usize,
    /// Σ_{i∉{0,1}} Ẽ[x₀x₁xᵢ] and its predicted value ((p−5)/4)α₃.
    pub sum_01i: (f64, f64),
    /// Σ_i Ẽ[x₀xᵢ] and α₁ + ((p−1)/2)α₂.
    pub sum_0i: (f64, f64),
    /// Σ_{i,j} Ẽ[x₀xᵢxⱼ] and α₁ + (3(p−1)/2)α₂ + ((p−1)(p−5)/8)α₃.
    pub sum_0ij: (f64, f64),
    /// Σ_{i,j∉{0,1}} Ẽ[x₀x₁xᵢxⱼ] and its main term ((p−2)(p−3)/32)α₄ + ((p−5)/4)α₃.
    pub sum_01ij: (f64, f64),
    /// |sum − main term| / (p^{3/2} α₄).
    pub fourth_deviation_ratio: f64,
}

impl PseudomomentSums {
    /// Whether the first three identities hold to 1e−9 relative.
    pub fn exact_identities_hold(&self) -> bool {
        [self.sum_01i, self.sum_0i, self.sum_0ij]
            .iter()
            .all(|&(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1e-300) + 1e-15)
    }
}

/// Evaluates the pseudomoment sums by direct enumeration.
pub fn pseudomoment_sum_checks(g: &PaleyGraph, alpha: &FkParams) -> Result<PseudomomentSums> {
    if !g.adjacent(0, 1) {
        return Err(Error::InvalidParameter("0 ~ 1 must be an edge".into()));
    }
    let p = g.n();
    let pf = p as f64;
    let e = |s: &[usize]| fk_entry(g, alpha, s, &[]);
    let triangle_count = (2..p).filter(|&i| g.adjacent(0, i) && g.adjacent(1, i)).count();
    let s1: f64 = (2..p).map(|i| e(&[0, 1, i])).sum();
    let s2: f64 = (0..p).map(|i| e(&[0, i])).sum();
    let mut s3 = 0.0;
    for i in 0..p {
        for j in 0..p {
            s3 += e(&[0, i, j]);
        }
    }
    let mut s4 = 0.0;
    for i in 2..p {
        for j in 2..p {
            s4 += e(&[0, 1, i, j]);
        }
    }
    let main4 = (pf - 2.0) * (pf - 3.0) / 32.0 * alpha.a4 + (pf - 5.0) / 4.0 * alpha.a3;
    Ok(PseudomomentSums {
        triangle_count,
        sum_01i: (s1, (pf - 5.0) / 4.0 * alpha.a3),
        sum_0i: (s2, alpha.a1 + (pf - 1.0) / 2.0 * alpha.a2),
        sum_0ij: (s3, alpha.a1 + 1.5 * (pf - 1.0) * alpha.a2 + (pf - 1.0) * (pf - 5.0) / 8.0 * alpha.a3),
        sum_01ij: (s4, main4),
        fourth_deviation_ratio: (s4 - main4).abs() / (pf.powf(1.5) * alpha.a4),
    })
}

/// u_{ij} = χ(ij)(χ(i−j) + 1) on 2-subsets, in [`PairIndexing`] order.
pub fn u_vector(g: &PaleyGraph) -> Vec<f64> {
    let ctx = g.ctx();
    let p = g.n();
    PairIndexing::new(p)
        .pairs()
        .iter()
        .map(|&(i, j)| (ctx.chi(i * j % p) as f64) * (g.seidel(i, j) as f64 + 1.0))
        .collect()
}

/// Coefficients v with ((P₀+P₁)u)_{ij} = v_i + v_j, using constant term
/// `shift`: v_i = (χ(i)(−1−χ(i)) + shift)/(p−2).
pub fn u_projection_coefficients(g: &PaleyGraph, shift: f64) -> Vec<f64> {
    let p = g.n();
    (0..p)
        .map(|i| {
            let c = g.ctx().chi(i) as f64;
            (c * (-1.0 - c) + shift) / (p as f64 - 2.0)
        })
        .collect()
}

/// The printed constant p/(2p−2) in the projection coefficients.
pub fn u_projection_shift_printed(p: u64) -> f64 {
    p as f64 / (2.0 * p as f64 - 2.0)
}

/// The constant that actually solves the normal equations: since
/// Σ_i Σ_{j≠i} u_{ij} = −(p−1), Σ_j v_j = −1/2.
pub const U_PROJECTION_SHIFT: f64 = 0.5;

/// Σ over ordered 4-tuples of distinct nonzero (a,b,c,d) of
/// χ(abcd)·χ(a−b)χ(a−c)χ(a−d)χ(b−c)χ(b−d)χ(c−d).
pub fn distinct_quadruple_sum(g: &PaleyGraph) -> f64 {
    let p = g.n();
    let chi = |x: usize| g.ctx().chi(x % p) as i64;
    let s = |x: usize, y: usize| g.seidel(x, y) as i64;
    let mut total = 0i64;
    for a in 1..p {
        for b in 1..p {
            if b == a {
                continue;
            }
            let ab = chi(a * b) * s(a, b);
            for c in 1..p {
                if c == a || c == b {
                    continue;
                }
                let abc = ab * chi(c) * s(a, c) * s(b, c);
                for d in 1..p {
                    if d == a || d == b || d == c {
                        continue;
                    }
                    total += abc * chi(d) * s(a, d) * s(b, d) * s(c, d);
                }
            }
        }
    }
    total as f64
}

/// S₁ = (p−1)p^{−3/2}·Σ_d χ(d)|K₃(d)|² and S₂ = 3Σ_{x,y≠−1} χ(xy)χ(x−y)χ(y+1)χ(x+1).
pub fn kloosterman_side(g: &PaleyGraph) -> Result<(f64, f64)> {
    let ctx = g.ctx();
    let p = g.n();
    let pf = p as f64;
    let k3 = KloostermanTable::new(ctx, 3)?;
    let s1 = (pf - 1.0) * pf.powf(-1.5) * (1..p).map(|d| ctx.chi(d) as f64 * k3.get(d).norm_sqr()).sum::<f64>();
    let mut s2 = 0i64;
    let m1 = p - 1;
    for x in 0..p {
        if x == m1 {
            continue;
        }
        for y in 0..p {
            if y == m1 {
                continue;
            }
            s2 += (ctx.chi(x * y % p) * g.seidel(x, y) * ctx.chi((y + 1) % p) * ctx.chi((x + 1) % p)) as i64;
        }
    }
    Ok((s1, 3.0 * s2 as f64))
}

/// Quadratic forms of the u-vector.
#[derive(Debug, Clone)]
pub struct UReport {
    /// The prime.
    pub p: u64,
    /// ‖u‖².
    pub norm_sq: f64,
    /// ‖(P₀+P₁)u‖² (numeric projection).
    pub proj_norm_sq: f64,
    /// max |(v_i + v_j) − ((P₀+P₁)u)_{ij}| with the printed constant p/(2p−2).
    pub closed_form_residual_printed: f64,
    /// Same with the constant 1/2.
    pub closed_form_residual: f64,
    /// u*Tu for T301, T401, T411, T421, T422, T441.
    pub forms: Vec<(Shape, f64)>,
    /// (p−1)(S₁ − S₂).
    pub kloosterman_rhs: f64,
    /// S₁ and S₂.
    pub s1_s2: (f64, f64),
    /// u*T441u.
    pub t441_form: f64,
    /// The distinct-quadruple character sum.
    pub quadruple_sum: f64,
}

impl UReport {
    /// |u*T441u − (p−1)(S₁−S₂)| / max(1, |u*T441u|).
    pub fn literal_identity_error(&self) -> f64 {
        (self.t441_form - self.kloosterman_rhs).abs() / self.t441_form.abs().max(1.0)
    }

    /// |quadruple sum − (p−1)(S₁−S₂)| / max(1, |quadruple sum|).
    pub fn quadruple_identity_error(&self) -> f64 {
        (self.quadruple_sum - self.kloosterman_rhs).abs() / self.quadruple_sum.abs().max(1.0)
    }

    /// u*Tu for a shape, if computed.
    pub fn form(&self, shape: Shape) -> Option<f64> {
        self.forms.iter().find(|(s, _)| *s == shape).map(|&(_, v)| v)
    }
}

/// Shapes whose u-quadratic forms are tracked.
pub const U_FORM_SHAPES: [Shape; 6] = [Shape::T301, Shape::T401, Shape::T411, Shape::T421, Shape::T422, Shape::T441];

/// Computes every quantity of [`UReport`]. The O(p⁴) quadruple sum is only
/// evaluated when `with_quadruple_sum` is set.
pub fn u_quadratic_forms(g: &PaleyGraph, with_quadruple_sum: bool) -> Result<UReport> {
    let p = g.n();
    let u = u_vector(g);
    let idx = PairIndexing::new(p);
    let mut proj = vec![0.0; u.len()];
    apply_p01(&idx, &u, &mut proj);
    let resid = |shift: f64| -> f64 {
        let v = u_projection_coefficients(g, shift);
        idx.pairs().iter().zip(&proj).map(|(&(i, j), &w)| (v[i] + v[j] - w).abs()).fold(0.0, f64::max)
    };
    let mut forms = Vec::new();
    let mut y = vec![0.0; u.len()];
    for shape in U_FORM_SHAPES {
        let op = ShapeOperator::new(g, shape)?;
        op.apply(&u, &mut y);
        forms.push((shape, u.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>()));
    }
    let (s1, s2) = kloosterman_side(g)?;
    let t441_form = forms.iter().find(|(s, _)| *s == Shape::T441).map(|f| f.1).unwrap_or(0.0);
    Ok(UReport {
        p: g.p(),
        norm_sq: u.iter().map(|x| x * x).sum(),
        proj_norm_sq: proj.iter().map(|x| x * x).sum(),
        closed_form_residual_printed: resid(u_projection_shift_printed(g.p())),
        closed_form_residual: resid(U_PROJECTION_SHIFT),
        forms,
        kloosterman_rhs: (p as f64 - 1.0) * (s1 - s2),
        s1_s2: (s1, s2),
        t441_form,
        quadruple_sum: if with_quadruple_sum { distinct_quadruple_sum(g) } else { f64::NAN },
    })
}

/// Data of the Schur-complement chain M ⪰ 0 ⇐ N ⪰ 0 ⇐ H ⪰ 0 ⇐ (H¹¹ ≻ 0 and
/// H²² − H²¹(H¹¹)⁻¹H¹² ⪰ 0).
#[derive(Debug, Clone)]
pub struct SchurChain {
    /// λ_min(H¹¹).
    pub h11_min: f64,
    /// λ_min(H²² − H²¹(H¹¹)⁻¹H¹²) (NaN when H¹¹ is not positive definite).
    pub schur_min: f64,
    /// λ_min(M).
    pub m_min: f64,
}

impl SchurChain {
    /// Whether the premises hold (H¹¹ ≻ 0 and Schur complement ⪰ −1e−8).
    pub fn premise(&self) -> bool {
        self.h11_min > 0.0 && self.schur_min >= -1e-8
    }

    /// Whether the implication premise ⇒ (M ⪰ −1e−7) holds.
    pub fn sound(&self) -> bool {
        !self.premise() || self.m_min >= -1e-7
    }
}

/// Evaluates the Schur chain densely.
pub fn schur_chain(g: &PaleyGraph, alpha: &FkParams) -> Result<SchurChain> {
    let h = assemble_h(g, alpha);
    let h11_min = min_eigenvalue(&h.h11)?;
    let schur_min = if h11_min > 0.0 {
        let llt = h.h11.llt(Side::Lower).map_err(|e| Error::Numerical(format!("{e:?}")))?;
        let x = llt.solve(&h.h12);
        let h21x = crate::linalg::t_mul(&h.h12, &x);
        let n = h.h22.nrows();
        let s = DMat::from_fn(n, n, |i, j| h.h22[(i, j)] - 0.5 * (h21x[(i, j)] + h21x[(j, i)]));
        min_eigenvalue(&s)?
    } else {
        f64::NAN
    };
    let m_min = min_eigenvalue_m(g, alpha)?;
    Ok(SchurChain { h11_min, schur_min, m_min })
}

/// Default ε in the sufficient condition below.
pub const DEFAULT_EPSILON: f64 = 0.5;

/// λ_min of H²² − γ₀⁻¹P₀H²¹H¹²P₀ − ((1−ε)α₁)⁻¹(I−P₀)H²¹H¹²(I−P₀) with
/// γ₀ = α₁ + ((p−1)/2)α₂ − pα₁², together with λ_min of
/// H¹¹ − γ₀Q₀ − (1−ε)α₁Q₁. Both nonnegative certify H ⪰ 0.
pub fn main_condition_margins(g: &PaleyGraph, alpha: &FkParams, epsilon: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("ε must lie in [0, 1), got {epsilon}")));
    }
    let p = g.n();
    let pf = p as f64;
    let h = assemble_h(g, alpha);
    let gamma0 = alpha.a1 + (pf - 1.0) / 2.0 * alpha.a2 - pf * alpha.a1 * alpha.a1;
    let g1 = (1.0 - epsilon) * alpha.a1;
    let q = DMat::from_fn(p, p, |i, j| {
        let q0 = 1.0 / pf;
        let q1 = if i == j { 1.0 } else { 0.0 } - q0;
        h.h11[(i, j)] - gamma0 * q0 - g1 * q1
    });
    let h11_margin = min_eigenvalue(&q)?;
    let hh = crate::linalg::t_mul(&h.h12, &h.h12);
    let n = hh.nrows();
    let p0 = DMat::from_fn(n, n, |_, _| 1.0 / n as f64);
    let ip0 = DMat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64);
    let a = mul(&mul(&p0, &hh), &p0);
    let b = mul(&mul(&ip0, &hh), &ip0);
    let s = DMat::from_fn(n, n, |i, j| h.h22[(i, j)] - a[(i, j)] / gamma0 - b[(i, j)] / g1);
    let sym = DMat::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)]));
    Ok((min_eigenvalue(&sym)?, h11_margin))
}

/// max |M(α) spectrum (dense) − spectrum from the translation blocks|.
pub fn block_route_residual(g: &PaleyGraph, alpha: &FkParams) -> Result<f64> {
    let dense = sym_eigenvalues(&assemble_m(g, alpha).data)?;
    let blocks = fourier_blocks(g).spectrum(alpha)?;
    Ok(crate::blockcirc::sorted_spectrum_distance(&dense, &blocks))
}

/// max |H entry − N entry| style helper kept for symmetric checks.
pub fn symmetric_residual(m: &DMat) -> f64 {
    let t = DMat::from_fn(m.ncols(), m.nrows(), |i, j| m[(j, i)]);
    max_abs_diff(m, &t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u64) -> PaleyGraph {
        PaleyGraph::from_prime(p).unwrap()
    }

    #[test]
    fn theorem_alpha_examples() {
        let a = theorem_alphas(0.05, 13).unwrap();
        assert!((a.a1 - 0.05 * 13f64.powf(-2.0 / 3.0)).abs() < 1e-15);
        assert!((a.a1 - 0.0090436).abs() < 1e-7);
        assert!((a.a2 / (a.a1 * a.a1) - 4.0).abs() < 1e-12);
        assert!((a.a4 / a.a1.powi(4) - 512.0).abs() < 1e-9);
        assert!(theorem_alphas(0.0, 13).is_err());
    }

    #[test]
    fn m_entries_p13() {
        let gr = g(13);
        let alpha = FkParams::new(0.3, 0.2, 0.1, 0.05).unwrap();
        let m = assemble_m(&gr, &alpha);
        assert_eq!(m.dim, 53);
        assert_eq!(m.data[(0, 0)], 1.0);
        for i in 1..=13 {
            assert_eq!(m.data[(i, i)], 0.3);
        }
        for r in 14..53 {
            assert_eq!(m.data[(r, r)], 0.2);
        }
        assert!((m.objective() - 13.0 * 0.3).abs() < 1e-12);
        // exhaustive audit against the direct clique test
        let idx = CliqueIndex::new(&gr);
        for r in 0..53 {
            for c in 0..53 {
                let mut u = idx.set(r);
                u.extend(idx.set(c));
                u.sort_unstable();
                u.dedup();
                let expect = if gr.graph().is_clique(&u) { alpha.alpha(u.len()) } else { 0.0 };
                assert_eq!(m.data[(r, c)], expect);
            }
        }
    }

    #[test]
    fn h_blocks_p13() {
        let gr = g(13);
        let alpha = theorem_alphas(0.05, 13).unwrap();
        let h = assemble_h(&gr, &alpha);
        let a = gr.adjacency_matrix();
        for i in 0..13 {
            for j in 0..13 {
                let expect = alpha.a1 * if i == j { 1.0 } else { 0.0 } + alpha.a2 * a[(i, j)] - alpha.a1 * alpha.a1;
                assert!((h.h11[(i, j)] - expect).abs() < 1e-15);
            }
        }
        assert!(n_vs_h_residual(&gr, &alpha) < 1e-10);
        let mut ev = sym_eigenvalues(&h.h11).unwrap();
        ev.sort_by(f64::total_cmp);
        let mut expect: Vec<f64> = h11_expected_spectrum(13, &alpha)
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
            .collect();
        expect.sort_by(f64::total_cmp);
        assert!(crate::blockcirc::sorted_spectrum_distance(&ev, &expect) < 1e-12);
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert_eq!(min_eigenvalue(&DMat::identity(4, 4)).unwrap(), 1.0);
        let d = DMat::from_fn(3, 3, |i, j| if i == j { [1.0, -2.0, 3.0][i] } else { 0.0 });
        assert!((min_eigenvalue(&d).unwrap() + 2.0).abs() < 1e-12);
        let gr = g(13);
        assert!(min_eigenvalue_m(&gr, &theorem_alphas(0.01, 13).unwrap()).unwrap() >= -1e-8);
        assert!(min_eigenvalue_m(&gr, &theorem_alphas(10.0, 13).unwrap()).unwrap() < -1e-8);
    }

    #[test]
    fn fourier_blocks_match_dense_spectrum() {
        for p in [13u64, 17, 29] {
            let gr = g(p);
            for alpha in [theorem_alphas(0.3, p).unwrap(), FkParams::new(0.25, 0.1, 0.04, 0.01).unwrap()] {
                assert!(block_route_residual(&gr, &alpha).unwrap() < 1e-9, "p={p}");
            }
        }
        assert_eq!(fourier_blocks(&g(13)).active, [true, true, true, false]);
    }

    #[test]
    fn dilation_classes_are_isospectral() {
        for p in [13u64, 29, 37] {
            let gr = g(p);
            let fb = fourier_blocks(&gr);
            let classes = fb.dilation_classes(&gr);
            let total: f64 = classes.iter().map(|c| c.1).sum();
            assert_eq!(total as usize, fb.blocks.len());
            let a = FkParams::new(0.2, 0.05, 0.02, 0.01).unwrap().to_array();
            let spec = |t: usize| crate::linalg::sym_eigenvalues(&fb.blocks[t].eval(&a)).unwrap();
            let (r_qr, r_nqr) = (spec(classes[1].0), spec(classes[2].0));
            for t in 1..fb.blocks.len() {
                let r = if gr.adjacent(0, t) { &r_qr } else { &r_nqr };
                let s = spec(t);
                let d = s.iter().zip(r).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                assert!(d < 1e-9, "p={p} t={t} d={d}");
            }
        }
    }

    #[test]
    fn fk4_brackets_p13() {
        let gr = g(13);
        let r = fk4_value(&gr, 1e-4).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.hi - r.lo < 1e-4);
        assert!(r.lo >= 3.0 - 1e-3 && r.hi <= 13f64.sqrt() + 1e-3, "{r:?}");
        assert!(min_eigenvalue_m(&gr, &r.alpha).unwrap() >= -1e-8);
    }

    #[test]
    fn sums_p13_p17() {
        let alpha = FkParams::new(0.3, 0.2, 0.1, 0.05).unwrap();
        let r13 = pseudomoment_sum_checks(&g(13), &alpha).unwrap();
        assert_eq!(r13.triangle_count, 2);
        assert!(r13.exact_identities_hold());
        assert!(r13.fourth_deviation_ratio <= 10.0);
        let r17 = pseudomoment_sum_checks(&g(17), &alpha).unwrap();
        assert_eq!(r17.triangle_count, 3);
        assert!(r17.exact_identities_hold());
    }

    #[test]
    fn u_vector_p13() {
        let r = u_quadratic_forms(&g(13), true).unwrap();
        assert!(r.proj_norm_sq < 5.0);
        assert!(r.norm_sq <= 4.0 * 78.0);
        assert!(r.closed_form_residual < 1e-8);
        assert!(r.closed_form_residual_printed > 1e-3);
        assert!(r.quadruple_identity_error() < 1e-6, "{r:?}");
    }

    #[test]
    fn schur_chain_is_sound() {
        for c in [0.01, 0.05, 0.2, 1.0] {
            let chain = schur_chain(&g(13), &theorem_alphas(c, 13).unwrap()).unwrap();
            assert!(chain.sound(), "{chain:?}");
        }
    }
}
