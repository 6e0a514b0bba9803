//! Graph matrices indexed by 2-subsets of F_p, the subspace projections
//! P₀/P₁/P₂, norm estimation (dense and matrix-free), and the exact
//! decomposition identities.
//!
//! Every shape is available in two independent realisations:
//! * [`build_graph_matrix`] evaluates the entry formula of each index pair
//!   directly from the Seidel matrix (the reference route, dense);
//! * [`ShapeOperator`] applies the matrix to a vector through low-rank and
//!   sparse factorisations, without materialising it (the fast route used for
//!   large p).

use crate::error::{Error, Result};
use crate::linalg::{
    dense_spectral_norm, lanczos_norm, mul, power_iteration_norm, sym_eigenvalues, symmetric_spectral_norm, DMat,
    LinearOperator, NormEstimate,
};
use crate::paley::PaleyGraph;
use faer::linalg::matmul::matmul;
use faer::{Accum, Par};
use std::fmt;
use std::str::FromStr;

/// Lexicographic enumeration of the 2-subsets {a < b} of F_p.
#[derive(Debug, Clone)]
pub struct PairIndexing {
    p: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairIndexing {
    /// All C(p, 2) pairs in lexicographic order.
    pub fn new(p: usize) -> Self {
        let mut pairs = Vec::with_capacity(p * p.saturating_sub(1) / 2);
        for a in 0..p {
            for b in (a + 1)..p {
                pairs.push((a, b));
            }
        }
        Self { p, pairs }
    }

    /// Number of vertices.
    pub fn p(&self) -> usize {
        self.p
    }

    /// C(p, 2).
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// Whether there are no pairs.
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The ordered list of pairs.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Pair at a row index.
    pub fn pair(&self, idx: usize) -> (usize, usize) {
        self.pairs[idx]
    }

    /// Row index of the 2-subset {a, b} (order of arguments irrelevant).
    pub fn index(&self, a: usize, b: usize) -> usize {
        debug_assert!(a != b);
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        a * self.p - a * (a + 1) / 2 + (b - a - 1)
    }
}

/// The named graph-matrix shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(missing_docs)]
pub enum Shape {
    T311,
    T301,
    T441,
    T431,
    T421,
    T422,
    T423,
    T411,
    T401,
    U321,
    U311,
    U431,
    U421,
    U422,
    U423,
    U411,
    U412,
    U413,
    U541,
    U531,
    U532,
    U521,
    U522,
    U523,
    U511,
    U512,
    Diamond,
}

/// How the row and column 2-subsets of a nonzero entry intersect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Row equals column (diagonal shapes).
    Equal,
    /// Exactly one shared vertex.
    SharedOne,
    /// Disjoint pairs.
    Disjoint,
    /// Vertex-indexed (the diamond matrix).
    Vertex,
}

impl Shape {
    /// Every pair-indexed shape (excludes the vertex-indexed diamond).
    pub const PAIR_SHAPES: [Shape; 26] = [
        Shape::T311,
        Shape::T301,
        Shape::T441,
        Shape::T431,
        Shape::T421,
        Shape::T422,
        Shape::T423,
        Shape::T411,
        Shape::T401,
        Shape::U321,
        Shape::U311,
        Shape::U431,
        Shape::U421,
        Shape::U422,
        Shape::U423,
        Shape::U411,
        Shape::U412,
        Shape::U413,
        Shape::U541,
        Shape::U531,
        Shape::U532,
        Shape::U521,
        Shape::U522,
        Shape::U523,
        Shape::U511,
        Shape::U512,
    ];

    /// Canonical upper-case name, e.g. `"T441"` or `"DIAMOND"`.
    pub fn name(self) -> &'static str {
        use Shape::*;
        match self {
            T311 => "T311",
            T301 => "T301",
            T441 => "T441",
            T431 => "T431",
            T421 => "T421",
            T422 => "T422",
            T423 => "T423",
            T411 => "T411",
            T401 => "T401",
            U321 => "U321",
            U311 => "U311",
            U431 => "U431",
            U421 => "U421",
            U422 => "U422",
            U423 => "U423",
            U411 => "U411",
            U412 => "U412",
            U413 => "U413",
            U541 => "U541",
            U531 => "U531",
            U532 => "U532",
            U521 => "U521",
            U522 => "U522",
            U523 => "U523",
            U511 => "U511",
            U512 => "U512",
            Diamond => "DIAMOND",
        }
    }

    /// Intersection pattern of the nonzero entries.
    pub fn pattern(self) -> Pattern {
        use Shape::*;
        match self {
            U321 | U311 => Pattern::Equal,
            T311 | T301 | U431 | U421 | U422 | U423 | U411 | U412 | U413 => Pattern::SharedOne,
            Diamond => Pattern::Vertex,
            _ => Pattern::Disjoint,
        }
    }

    /// The shape whose matrix is the transpose of this one.
    pub fn transpose(self) -> Shape {
        use Shape::*;
        match self {
            T421 => T422,
            T422 => T421,
            U421 => U422,
            U422 => U421,
            U412 => U413,
            U413 => U412,
            U531 => U532,
            U532 => U531,
            U521 => U522,
            U522 => U521,
            U511 => U512,
            U512 => U511,
            s => s,
        }
    }

    /// Whether the matrix is symmetric.
    pub fn is_symmetric(self) -> bool {
        self.transpose() == self
    }

    /// Exponent b of the stated norm bound O(p^b), where one is stated.
    pub fn norm_exponent_bound(self) -> Option<f64> {
        use Shape::*;
        match self {
            T311 => Some(0.5),
            T431 | T423 => Some(1.0),
            T421 | T422 | T411 => Some(1.5),
            T441 => Some(1.25),
            U431 => Some(1.5),
            U421 | U422 | U423 | U411 | U412 | U413 => Some(1.0),
            U541 | U531 | U532 | U521 | U522 | U523 | U511 | U512 => Some(2.0),
            _ => None,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        if up == "DIAMOND" {
            return Ok(Shape::Diamond);
        }
        Shape::PAIR_SHAPES
            .iter()
            .copied()
            .find(|sh| sh.name() == up)
            .ok_or_else(|| Error::UnknownShape(s.to_string()))
    }
}

/// A graph matrix realised densely.
#[derive(Debug, Clone)]
pub struct GraphMatrix {
    /// Which shape.
    pub shape: Shape,
    /// The prime.
    pub p: u64,
    /// Dense entries (pair-indexed, or vertex-indexed for the diamond).
    pub data: DMat,
}

/// Entry of a pair-indexed shape at row {a,b}, column {c,d}, evaluated
/// directly from the Seidel matrix (reference route).
pub fn shape_entry(g: &PaleyGraph, shape: Shape, row: (usize, usize), col: (usize, usize)) -> f64 {
    let n = g.n();
    let s = |x: usize, y: usize| g.seidel(x, y) as f64;
    let (a, b) = row;
    let (c, d) = col;
    let shared = [c, d].iter().filter(|&&v| v == a || v == b).count();
    let rowset = [a, b];
    match (shape.pattern(), shared) {
        (Pattern::Equal, 2) => {
            let others = (0..n).filter(|i| !rowset.contains(i));
            match shape {
                Shape::U321 => others.map(|i| s(a, i) * s(b, i)).sum(),
                Shape::U311 => others.map(|i| s(a, i) + s(b, i)).sum(),
                _ => unreachable!(),
            }
        }
        (Pattern::SharedOne, 1) => {
            // shared vertex x, row-only vertex y, column-only vertex z
            let x = if a == c || a == d { a } else { b };
            let y = if x == a { b } else { a };
            let z = if x == c { d } else { c };
            let others = || (0..n).filter(move |&i| i != x && i != y && i != z);
            match shape {
                Shape::T311 => s(y, z),
                Shape::T301 => 1.0,
                Shape::U431 => others().map(|i| s(x, i) * s(y, i) * s(z, i)).sum(),
                Shape::U421 => others().map(|i| s(x, i) * s(y, i)).sum(),
                Shape::U422 => others().map(|i| s(x, i) * s(z, i)).sum(),
                Shape::U423 => others().map(|i| s(y, i) * s(z, i)).sum(),
                Shape::U411 => others().map(|i| s(x, i)).sum(),
                Shape::U412 => others().map(|i| s(y, i)).sum(),
                Shape::U413 => others().map(|i| s(z, i)).sum(),
                _ => unreachable!(),
            }
        }
        (Pattern::Disjoint, 0) => {
            let (ac, ad, bc, bd) = (s(a, c), s(a, d), s(b, c), s(b, d));
            let others = || (0..n).filter(move |&i| i != a && i != b && i != c && i != d);
            let u5 = |f: &dyn Fn(f64, f64, f64, f64) -> f64| -> f64 {
                others().map(|i| f(s(a, i), s(b, i), s(c, i), s(d, i))).sum()
            };
            match shape {
                Shape::T441 => ac * ad * bc * bd,
                Shape::T431 => ac * ad * bc + ac * ad * bd + ac * bc * bd + ad * bc * bd,
                Shape::T421 => ac * ad + bc * bd,
                Shape::T422 => ac * bc + ad * bd,
                Shape::T423 => ac * bd + ad * bc,
                Shape::T411 => ac + ad + bc + bd,
                Shape::T401 => 1.0,
                Shape::U541 => u5(&|a, b, c, d| a * b * c * d),
                Shape::U531 => u5(&|a, b, c, d| a * b * c + a * b * d),
                Shape::U532 => u5(&|a, b, c, d| a * c * d + b * c * d),
                Shape::U521 => u5(&|a, b, _, _| a * b),
                Shape::U522 => u5(&|_, _, c, d| c * d),
                Shape::U523 => u5(&|a, b, c, d| a * c + a * d + b * c + b * d),
                Shape::U511 => u5(&|a, b, _, _| a + b),
                Shape::U512 => u5(&|_, _, c, d| c + d),
                _ => unreachable!(),
            }
        }
        _ => 0.0,
    }
}

/// Builds a pair-indexed shape densely from its entry formula.
pub fn build_graph_matrix(g: &PaleyGraph, shape: Shape) -> Result<GraphMatrix> {
    if shape == Shape::Diamond {
        return Ok(diamond_matrix(g));
    }
    let idx = PairIndexing::new(g.n());
    let n = idx.len();
    let mut data = DMat::zeros(n, n);
    for (r, &row) in idx.pairs().iter().enumerate() {
        for (c, &col) in idx.pairs().iter().enumerate() {
            let v = shape_entry(g, shape, row, col);
            if v != 0.0 {
                data[(r, c)] = v;
            }
        }
    }
    Ok(GraphMatrix { shape, p: g.p(), data })
}

/// Diamond matrix M_xy = 1{x≠y}((S²)_xy² − (p − 2)) of a Seidel matrix.
pub fn diamond_from_seidel(s: &DMat) -> DMat {
    let n = s.nrows();
    let s2 = mul(s, s);
    DMat::from_fn(n, n, |x, y| if x == y { 0.0 } else { s2[(x, y)] * s2[(x, y)] - (n as f64 - 2.0) })
}

/// The diamond graph matrix of G_p (vertex-indexed).
pub fn diamond_matrix(g: &PaleyGraph) -> GraphMatrix {
    GraphMatrix { shape: Shape::Diamond, p: g.p(), data: diamond_from_seidel(&g.seidel_matrix()) }
}

/// Random symmetric ±1 Seidel matrix with zero diagonal (Erdős–Rényi, edge probability 1/2).
pub fn random_seidel(n: usize, seed: u64) -> DMat {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut s = DMat::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = if rng.random::<bool>() { 1.0 } else { -1.0 };
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// The projectors onto V₀ (constants), V₁ ({u_i + u_j : Σu = 0}) and V₂.
#[derive(Debug, Clone)]
pub struct SubspaceProjections {
    /// Projector onto constants.
    pub p0: DMat,
    /// Projector onto V₁.
    pub p1: DMat,
    /// Projector onto the orthogonal complement V₂.
    pub p2: DMat,
}

impl SubspaceProjections {
    /// Projector by index 0, 1 or 2.
    pub fn get(&self, i: usize) -> &DMat {
        match i {
            0 => &self.p0,
            1 => &self.p1,
            _ => &self.p2,
        }
    }
}

/// Builds P₀ = J / C(p,2), P₁ by modified Gram–Schmidt on the images
/// (e_k − e_{k+1}) ↦ (u_i + u_j) of a mean-zero basis, and P₂ = I − P₀ − P₁.
pub fn build_projections(p: usize) -> SubspaceProjections {
    let idx = PairIndexing::new(p);
    let n = idx.len();
    let p0 = DMat::from_fn(n, n, |_, _| 1.0 / n as f64);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(p.saturating_sub(1));
    for k in 0..p.saturating_sub(1) {
        let mut u = vec![0.0; p];
        u[k] = 1.0;
        u[k + 1] = -1.0;
        let mut v: Vec<f64> = idx.pairs().iter().map(|&(a, b)| u[a] + u[b]).collect();
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = v.iter().zip(q).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-10 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    let mut q = DMat::zeros(n, basis.len());
    for (j, v) in basis.iter().enumerate() {
        for i in 0..n {
            q[(i, j)] = v[i];
        }
    }
    let p1 = crate::linalg::mul_t(&q, &q);
    let p2 = DMat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - p0[(i, j)] - p1[(i, j)]);
    SubspaceProjections { p0, p1, p2 }
}

/// Applies P₀ + P₁ matrix-free: for v ∈ R^{C(p,2)}, the orthogonal projection
/// onto {u_i + u_j} is B((p−2)I + J)⁻¹Bᵀ with (Bu)_ij = u_i + u_j.
pub fn apply_p01(idx: &PairIndexing, x: &[f64], out: &mut [f64]) {
    let p = idx.p();
    let mut bt = vec![0.0; p];
    for (&(a, b), &v) in idx.pairs().iter().zip(x) {
        bt[a] += v;
        bt[b] += v;
    }
    let total: f64 = bt.iter().sum();
    let pf = p as f64;
    // ((p−2)I + J)⁻¹ = (I − J/(2p−2)) / (p−2)
    let u: Vec<f64> = bt.iter().map(|&t| (t - total / (2.0 * pf - 2.0)) / (pf - 2.0)).collect();
    for (o, &(a, b)) in out.iter_mut().zip(idx.pairs()) {
        *o = u[a] + u[b];
    }
}

/// Applies the projector P_k (k ∈ {0,1,2}) matrix-free.
pub fn apply_projector(idx: &PairIndexing, k: usize, x: &[f64], out: &mut [f64]) {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    match k {
        0 => out.iter_mut().for_each(|o| *o = mean),
        1 => {
            apply_p01(idx, x, out);
            out.iter_mut().for_each(|o| *o -= mean);
        }
        _ => {
            apply_p01(idx, x, out);
            out.iter_mut().zip(x).for_each(|(o, &xi)| *o = xi - *o);
        }
    }
}

/// ‖T − (2(p−2)P₀ + (p−4)P₁ − 2P₂)‖_max for T301, or the analogous
/// ‖T − ((p−2)(p−3)/2 P₀ − (p−3)P₁ + P₂)‖_max for T401.
pub fn exact_decomposition_check(g: &PaleyGraph, shape: Shape) -> Result<f64> {
    let p = g.p() as f64;
    let (c0, c1, c2) = match shape {
        Shape::T301 => (2.0 * (p - 2.0), p - 4.0, -2.0),
        Shape::T401 => ((p - 2.0) * (p - 3.0) / 2.0, -(p - 3.0), 1.0),
        other => {
            return Err(Error::InvalidParameter(format!(
                "exact projector decomposition only known for T301 and T401, not {other}"
            )))
        }
    };
    let m = build_graph_matrix(g, shape)?;
    let pr = build_projections(g.n());
    let n = m.data.nrows();
    let rhs = DMat::from_fn(n, n, |i, j| c0 * pr.p0[(i, j)] + c1 * pr.p1[(i, j)] + c2 * pr.p2[(i, j)]);
    Ok(crate::linalg::max_abs_diff(&m.data, &rhs))
}

/// Entrywise discrepancies between the directly assembled Schur blocks and
/// their graph-matrix expansions.
#[derive(Debug, Clone, Copy)]
pub struct SchurDecompositionResidual {
    /// max |H²² − weighted sum of T-shapes|.
    pub h22: f64,
    /// max |H²¹H¹² − the printed weighted sum of T/U-shapes|.
    pub h21h12_printed: f64,
    /// max |H²¹H¹² − (printed sum + correction)|, where the correction with
    /// q = α₂ − α₁α₂ and σ = diag(S_ab) is
    /// (qα₃/4)[2K + σK + Kσ] − qα₃K − qα₃T401 + (qα₃/4)(T421 + T422),
    /// K = T301 + T311.
    pub h21h12_corrected: f64,
}

impl SchurDecompositionResidual {
    /// Largest of the three residuals for the printed expansions.
    pub fn printed_max(&self) -> f64 {
        self.h22.max(self.h21h12_printed)
    }

    /// Largest residual once the H²¹H¹² correction is applied.
    pub fn corrected_max(&self) -> f64 {
        self.h22.max(self.h21h12_corrected)
    }
}

/// Rebuilds H²² and H²¹H¹² as weighted sums of graph matrices and compares
/// them with direct assembly from the pseudomoments.
pub fn schur_decomposition_residual(
    g: &PaleyGraph,
    alpha: &crate::pseudomoments::FkParams,
) -> Result<SchurDecompositionResidual> {
    use Shape::*;
    let h = crate::pseudomoments::assemble_h(g, alpha);
    let n = h.h22.nrows();
    let pf = g.p() as f64;
    let (a1, a2, a3, a4) = (alpha.a1, alpha.a2, alpha.a3, alpha.a4);
    let mut cache: std::collections::HashMap<Shape, DMat> = std::collections::HashMap::new();
    let mut mat = |s: Shape| -> Result<DMat> {
        if let Some(m) = cache.get(&s) {
            return Ok(m.clone());
        }
        let m = build_graph_matrix(g, s)?.data;
        cache.insert(s, m.clone());
        Ok(m)
    };
    let combine = |terms: &[(f64, DMat)], diag: f64| -> DMat {
        DMat::from_fn(n, n, |i, j| {
            let mut v = if i == j { diag } else { 0.0 };
            for (c, m) in terms {
                v += c * m[(i, j)];
            }
            v
        })
    };

    let h22_terms = vec![
        (a3 / 2.0 - a2 * a2, mat(T301)?),
        (a3 / 2.0, mat(T311)?),
        (a4 / 16.0 - a2 * a2, mat(T401)?),
        (a4 / 16.0, mat(T411)?),
        (a4 / 16.0, mat(T421)?),
        (a4 / 16.0, mat(T422)?),
        (a4 / 16.0, mat(T423)?),
        (a4 / 16.0, mat(T431)?),
        (a4 / 16.0, mat(T441)?),
    ];
    let h22_sum = combine(&h22_terms, a2 - a2 * a2);

    let q = a2 - a1 * a2;
    let m12 = a1 * a2;
    let c_u3 = a3 * a3 / 4.0 - m12 * a3 / 2.0;
    let c_u4a = a3 * a3 / 8.0 - m12 * a3 / 4.0;
    let c_u5a = a3 * a3 / 16.0 - m12 * a3 / 4.0;
    let hh_terms = vec![
        (c_u3, mat(U311)?),
        (c_u3, mat(U321)?),
        (q * (a2 - 3.0 * m12 + a3) + (pf - 3.0) * (m12 * m12 - m12 * a3 / 2.0 + a3 * a3 / 8.0), mat(T301)?),
        (q * a3, mat(T311)?),
        (a3 * a3 / 8.0 - m12 * a3 / 2.0, mat(U411)?),
        (c_u4a, mat(U412)?),
        (c_u4a, mat(U413)?),
        (c_u4a, mat(U421)?),
        (c_u4a, mat(U422)?),
        (a3 * a3 / 8.0, mat(U423)?),
        (a3 * a3 / 8.0, mat(U431)?),
        (2.0 * q * (a3 - 2.0 * m12) + (pf - 4.0) * (m12 - a3 / 4.0).powi(2), mat(T401)?),
        (q * a3 / 2.0, mat(T411)?),
        (c_u5a, mat(U511)?),
        (c_u5a, mat(U512)?),
        (c_u5a, mat(U521)?),
        (c_u5a, mat(U522)?),
        (a3 * a3 / 16.0, mat(U523)?),
        (a3 * a3 / 16.0, mat(U531)?),
        (a3 * a3 / 16.0, mat(U532)?),
        (a3 * a3 / 16.0, mat(U541)?),
    ];
    let hh_diag = 2.0 * q * q + (pf - 2.0) * (m12 * m12 + a3 * a3 / 4.0 - m12 * a3 / 2.0);
    let hh_printed = combine(&hh_terms, hh_diag);

    // correction terms
    let idx = PairIndexing::new(g.n());
    let sigma: Vec<f64> = idx.pairs().iter().map(|&(a, b)| g.seidel(a, b) as f64).collect();
    let k = {
        let (t301, t311) = (mat(T301)?, mat(T311)?);
        DMat::from_fn(n, n, |i, j| t301[(i, j)] + t311[(i, j)])
    };
    let (t401, t421, t422) = (mat(T401)?, mat(T421)?, mat(T422)?);
    let qa = q * a3;
    let hh_corrected = DMat::from_fn(n, n, |i, j| {
        hh_printed[(i, j)] + qa / 4.0 * (2.0 + sigma[i] + sigma[j]) * k[(i, j)] - qa * k[(i, j)] - qa * t401[(i, j)]
            + qa / 4.0 * (t421[(i, j)] + t422[(i, j)])
    });

    let direct_hh = crate::linalg::t_mul(&h.h12, &h.h12);
    let diff = crate::linalg::max_abs_diff;
    Ok(SchurDecompositionResidual {
        h22: diff(&h.h22, &h22_sum),
        h21h12_printed: diff(&direct_hh, &hh_printed),
        h21h12_corrected: diff(&direct_hh, &hh_corrected),
    })
}

/// Threshold on C(p,2) above which norms are computed matrix-free.
pub const DENSE_PAIR_LIMIT: usize = 2000;

/// How a spectral norm was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    /// Full dense eigen/singular value decomposition.
    Dense,
    /// Power iteration on MᵀM.
    PowerIteration,
    /// Lanczos with full reorthogonalisation.
    Lanczos,
}

/// Spectral norm of a dense graph matrix: full decomposition when the
/// dimension is at most [`DENSE_PAIR_LIMIT`], power iteration otherwise.
pub fn spectral_norm(m: &GraphMatrix, tol: f64) -> Result<NormEstimate> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    if m.data.nrows() <= DENSE_PAIR_LIMIT {
        let v = if crate::linalg::is_symmetric(&m.data, 0.0) {
            symmetric_spectral_norm(&m.data)?
        } else {
            dense_spectral_norm(&m.data)?
        };
        return Ok(NormEstimate { value: v, iterations: 0, converged: true });
    }
    let op = crate::linalg::DenseOperator::new(&m.data);
    Ok(power_iteration_norm(&op, tol, 2000, crate::linalg::seed_from_env()))
}

/// ‖Pᵢ M Pⱼ‖ for a dense pair-indexed matrix.
pub fn restricted_norm(m: &GraphMatrix, proj: &SubspaceProjections, i: usize, j: usize) -> Result<f64> {
    if i > 2 || j > 2 {
        return Err(Error::InvalidParameter(format!("projector indices must be in 0..=2, got ({i},{j})")));
    }
    let pm = mul(&mul(proj.get(i), &m.data), proj.get(j));
    dense_spectral_norm(&pm)
}

/// Matrix-free realisation of a pair-indexed shape of G_p.
pub struct ShapeOperator {
    shape: Shape,
    p: usize,
    idx: PairIndexing,
    /// Row-major Seidel table.
    s: Vec<f64>,
    /// For shared-vertex shapes: entry f(x, y, z) with x shared, y in the row,
    /// z in the column; stored as a p³ table.
    shared_table: Vec<f64>,
    /// For disjoint T-shapes: per-pair row vectors (N × p, column-major).
    fam: Families,
    /// For the diagonal shapes.
    diag: Vec<f64>,
}

#[derive(Default)]
struct Families {
    a: Option<DMat>,
    b: Option<DMat>,
    w: Option<DMat>,
    o: Option<DMat>,
    q: Option<DMat>,
}

impl ShapeOperator {
    /// Prepares the factor tables for `shape` on G_p.
    pub fn new(g: &PaleyGraph, shape: Shape) -> Result<Self> {
        if shape == Shape::Diamond {
            return Err(Error::InvalidParameter("the diamond matrix is vertex-indexed; use diamond_matrix".into()));
        }
        let p = g.n();
        let idx = PairIndexing::new(p);
        let s: Vec<f64> = g.seidel_table().iter().map(|&v| v as f64).collect();
        let mut op = Self { shape, p, idx, s, shared_table: Vec::new(), fam: Families::default(), diag: Vec::new() };
        match shape.pattern() {
            Pattern::Equal => op.diag = op.idx.pairs().iter().map(|&(a, b)| shape_entry(g, shape, (a, b), (a, b))).collect(),
            Pattern::SharedOne => op.build_shared_table(),
            Pattern::Disjoint => op.build_families(),
            Pattern::Vertex => unreachable!(),
        }
        Ok(op)
    }

    fn sv(&self, x: usize, y: usize) -> f64 {
        self.s[x * self.p + y]
    }

    fn build_shared_table(&mut self) {
        let p = self.p;
        // All-i sums via matrix products; the i ∈ {x, y, z} terms vanish or are
        // subtracted explicitly.
        let smat = DMat::from_fn(p, p, |i, j| self.sv(i, j));
        let s2 = mul(&smat, &smat);
        let row_sum: Vec<f64> = (0..p).map(|x| (0..p).map(|i| self.sv(x, i)).sum()).collect();
        let triple = if self.shape == Shape::U431 {
            // W[(x,y), i] = S_xi S_yi; triple = W S  (p² × p)
            let w = DMat::from_fn(p * p, p, |r, i| self.sv(r / p, i) * self.sv(r % p, i));
            Some(mul(&w, &smat))
        } else {
            None
        };
        let mut t = vec![0.0; p * p * p];
        for x in 0..p {
            for y in 0..p {
                for z in 0..p {
                    if x == y || y == z || x == z {
                        continue;
                    }
                    let v = match self.shape {
                        Shape::T311 => self.sv(y, z),
                        Shape::T301 => 1.0,
                        Shape::U431 => triple.as_ref().unwrap()[(x * p + y, z)],
                        Shape::U421 => s2[(x, y)] - self.sv(x, z) * self.sv(y, z),
                        Shape::U422 => s2[(x, z)] - self.sv(x, y) * self.sv(z, y),
                        Shape::U423 => s2[(y, z)] - self.sv(y, x) * self.sv(z, x),
                        Shape::U411 => row_sum[x] - self.sv(x, y) - self.sv(x, z),
                        Shape::U412 => row_sum[y] - self.sv(y, x) - self.sv(y, z),
                        Shape::U413 => row_sum[z] - self.sv(z, x) - self.sv(z, y),
                        _ => unreachable!(),
                    };
                    t[(x * p + y) * p + z] = v;
                }
            }
        }
        self.shared_table = t;
    }

    fn build_families(&mut self) {
        let p = self.p;
        let n = self.idx.len();
        let pairs = self.idx.pairs().to_vec();
        let mk = |f: &dyn Fn(usize, usize, usize) -> f64| -> DMat {
            DMat::from_fn(n, p, |r, i| {
                let (a, b) = pairs[r];
                if i == a || i == b {
                    0.0
                } else {
                    f(a, b, i)
                }
            })
        };
        let s = &self.s;
        let sv = |x: usize, y: usize| s[x * p + y];
        use Shape::*;
        let need_a = matches!(self.shape, T431 | T421 | T423 | T411);
        let need_b = need_a;
        let need_w = matches!(self.shape, T441 | T431 | T422 | U541 | U531 | U521);
        let need_o = matches!(self.shape, T422 | T411 | T401 | U521 | U522 | U511 | U512);
        let need_q = matches!(self.shape, U531 | U532 | U523 | U511 | U512);
        let need_w = need_w || matches!(self.shape, U532 | U522);
        self.fam = Families {
            a: need_a.then(|| mk(&|a, _, i| sv(a, i))),
            b: need_b.then(|| mk(&|_, b, i| sv(b, i))),
            w: need_w.then(|| mk(&|a, b, i| sv(a, i) * sv(b, i))),
            o: need_o.then(|| mk(&|_, _, _| 1.0)),
            q: need_q.then(|| mk(&|a, b, i| sv(a, i) + sv(b, i))),
        };
    }

    /// The shape.
    pub fn shape(&self) -> Shape {
        self.shape
    }

    fn apply_shared(&self, x: &[f64], y: &mut [f64], transpose: bool) {
        let p = self.p;
        let t = &self.shared_table;
        for (r, &(a, b)) in self.idx.pairs().iter().enumerate() {
            let mut acc = 0.0;
            for c in 0..p {
                if c == a || c == b {
                    continue;
                }
                // column {a,c}: shared a, row-only b, column-only c
                // column {b,c}: shared b, row-only a, column-only c
                let (e1, e2) = if transpose {
                    (t[(a * p + c) * p + b], t[(b * p + c) * p + a])
                } else {
                    (t[(a * p + b) * p + c], t[(b * p + a) * p + c])
                };
                acc += e1 * x[self.idx.index(a, c)] + e2 * x[self.idx.index(b, c)];
            }
            y[r] = acc;
        }
    }

    /// Symmetric zero-diagonal p×p matrix X with X_cd = x_{cd}.
    fn pair_vector_to_matrix(&self, x: &[f64]) -> DMat {
        let mut m = DMat::zeros(self.p, self.p);
        for (&(c, d), &v) in self.idx.pairs().iter().zip(x) {
            m[(c, d)] = v;
            m[(d, c)] = v;
        }
        m
    }

    /// Rowwise bilinear forms: out_r += coef · Σ_{c,d} F[r,c] X[c,d] G[r,d].
    fn add_bilinear(&self, f: &DMat, xm: &DMat, g: &DMat, coef: f64, out: &mut [f64]) {
        let n = f.nrows();
        let mut fx = DMat::zeros(n, self.p);
        matmul(fx.as_mut(), Accum::Replace, f.as_ref(), xm.as_ref(), 1.0, Par::Seq);
        for j in 0..self.p {
            let fxc = fx.col_as_slice(j);
            let gc = g.col_as_slice(j);
            for r in 0..n {
                out[r] += coef * fxc[r] * gc[r];
            }
        }
    }

    fn apply_disjoint_t(&self, x: &[f64], y: &mut [f64]) {
        let xm = self.pair_vector_to_matrix(x);
        y.iter_mut().for_each(|v| *v = 0.0);
        let f = &self.fam;
        // (Tx)_ab = ½ Σ_{c≠d} entry(c,d) X_cd.
        match self.shape {
            Shape::T441 => self.add_bilinear(f.w.as_ref().unwrap(), &xm, f.w.as_ref().unwrap(), 0.5, y),
            Shape::T431 => {
                let w = f.w.as_ref().unwrap();
                self.add_bilinear(w, &xm, f.a.as_ref().unwrap(), 1.0, y);
                self.add_bilinear(w, &xm, f.b.as_ref().unwrap(), 1.0, y);
            }
            Shape::T421 => {
                self.add_bilinear(f.a.as_ref().unwrap(), &xm, f.a.as_ref().unwrap(), 0.5, y);
                self.add_bilinear(f.b.as_ref().unwrap(), &xm, f.b.as_ref().unwrap(), 0.5, y);
            }
            Shape::T422 => self.add_bilinear(f.w.as_ref().unwrap(), &xm, f.o.as_ref().unwrap(), 1.0, y),
            Shape::T423 => self.add_bilinear(f.a.as_ref().unwrap(), &xm, f.b.as_ref().unwrap(), 1.0, y),
            Shape::T411 => {
                self.add_bilinear(f.a.as_ref().unwrap(), &xm, f.o.as_ref().unwrap(), 1.0, y);
                self.add_bilinear(f.b.as_ref().unwrap(), &xm, f.o.as_ref().unwrap(), 1.0, y);
            }
            Shape::T401 => self.add_bilinear(f.o.as_ref().unwrap(), &xm, f.o.as_ref().unwrap(), 0.5, y),
            _ => unreachable!(),
        }
    }

    /// (Ux)_ab = Σ_i f_ab(i) Σ_{cd ∩ ab = ∅} g_cd(i) x_cd.
    fn apply_u5(&self, x: &[f64], y: &mut [f64], transpose: bool) {
        use Shape::*;
        let fam = &self.fam;
        let shape = if transpose { self.shape.transpose() } else { self.shape };
        let (f, g) = match shape {
            U541 => (fam.w.as_ref(), fam.w.as_ref()),
            U531 => (fam.w.as_ref(), fam.q.as_ref()),
            U532 => (fam.q.as_ref(), fam.w.as_ref()),
            U521 => (fam.w.as_ref(), fam.o.as_ref()),
            U522 => (fam.o.as_ref(), fam.w.as_ref()),
            U523 => (fam.q.as_ref(), fam.q.as_ref()),
            U511 => (fam.q.as_ref(), fam.o.as_ref()),
            U512 => (fam.o.as_ref(), fam.q.as_ref()),
            _ => unreachable!(),
        };
        let (f, g) = (f.unwrap(), g.unwrap());
        let p = self.p;
        let n = self.idx.len();
        let mut h = vec![0.0; p];
        let mut r = DMat::zeros(p, p);
        for i in 0..p {
            let gc = g.col_as_slice(i);
            for (k, &(c, d)) in self.idx.pairs().iter().enumerate() {
                let v = gc[k] * x[k];
                h[i] += v;
                r[(c, i)] += v;
                r[(d, i)] += v;
            }
        }
        for k in 0..n {
            y[k] = 0.0;
        }
        for i in 0..p {
            let fc = f.col_as_slice(i);
            let gc = g.col_as_slice(i);
            for (k, &(a, b)) in self.idx.pairs().iter().enumerate() {
                let inner = h[i] - r[(a, i)] - r[(b, i)] + gc[k] * x[k];
                y[k] += fc[k] * inner;
            }
        }
    }

    fn apply_impl(&self, x: &[f64], y: &mut [f64], transpose: bool) {
        use Shape::*;
        match self.shape.pattern() {
            Pattern::Equal => y.iter_mut().zip(x).zip(&self.diag).for_each(|((o, &xi), &d)| *o = d * xi),
            Pattern::SharedOne => self.apply_shared(x, y, transpose),
            Pattern::Disjoint => match self.shape {
                T441 | T431 | T423 | T411 | T401 => self.apply_disjoint_t(x, y),
                T421 | T422 => {
                    if transpose {
                        // T421ᵀ = T422 and vice versa: swap roles by evaluating the partner.
                        self.apply_disjoint_partner(x, y)
                    } else {
                        self.apply_disjoint_t(x, y)
                    }
                }
                _ => self.apply_u5(x, y, transpose),
            },
            Pattern::Vertex => unreachable!(),
        }
    }

    fn apply_disjoint_partner(&self, x: &[f64], y: &mut [f64]) {
        let xm = self.pair_vector_to_matrix(x);
        y.iter_mut().for_each(|v| *v = 0.0);
        let f = &self.fam;
        match self.shape {
            // transpose of T421 is T422: Σ (ac·bc + ad·bd) = W X O
            Shape::T421 => {
                let w = DMat::from_fn(self.idx.len(), self.p, |r, i| f.a.as_ref().unwrap()[(r, i)] * f.b.as_ref().unwrap()[(r, i)]);
                let o = DMat::from_fn(self.idx.len(), self.p, |r, i| if f.a.as_ref().unwrap()[(r, i)] != 0.0 { 1.0 } else { 0.0 });
                self.add_bilinear(&w, &xm, &o, 1.0, y);
            }
            // transpose of T422 is T421: ac·ad + bc·bd needs the per-vertex rows
            Shape::T422 => {
                let pairs = self.idx.pairs();
                let o = f.o.as_ref().unwrap();
                let a = DMat::from_fn(self.idx.len(), self.p, |r, i| o[(r, i)] * self.sv(pairs[r].0, i));
                let b = DMat::from_fn(self.idx.len(), self.p, |r, i| o[(r, i)] * self.sv(pairs[r].1, i));
                self.add_bilinear(&a, &xm, &a, 0.5, y);
                self.add_bilinear(&b, &xm, &b, 0.5, y);
            }
            _ => unreachable!(),
        }
    }
}

impl LinearOperator for ShapeOperator {
    fn nrows(&self) -> usize {
        self.idx.len()
    }
    fn ncols(&self) -> usize {
        self.idx.len()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_impl(x, y, false)
    }
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        if self.shape.is_symmetric() {
            self.apply_impl(x, y, false)
        } else {
            self.apply_impl(x, y, true)
        }
    }
    fn is_symmetric(&self) -> bool {
        self.shape.is_symmetric()
    }
}

/// Pᵢ · A · Pⱼ as a matrix-free operator (either side optional).
pub struct ProjectedOperator<'a, O: LinearOperator> {
    inner: &'a O,
    idx: PairIndexing,
    left: Option<usize>,
    right: Option<usize>,
}

impl<'a, O: LinearOperator> ProjectedOperator<'a, O> {
    /// Wraps `inner` with optional left and right projectors.
    pub fn new(inner: &'a O, p: usize, left: Option<usize>, right: Option<usize>) -> Self {
        Self { inner, idx: PairIndexing::new(p), left, right }
    }
}

impl<O: LinearOperator> LinearOperator for ProjectedOperator<'_, O> {
    fn nrows(&self) -> usize {
        self.inner.nrows()
    }
    fn ncols(&self) -> usize {
        self.inner.ncols()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut t = x.to_vec();
        if let Some(k) = self.right {
            apply_projector(&self.idx, k, x, &mut t);
        }
        let mut u = vec![0.0; y.len()];
        self.inner.apply(&t, &mut u);
        match self.left {
            Some(k) => apply_projector(&self.idx, k, &u, y),
            None => y.copy_from_slice(&u),
        }
    }
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        let mut t = x.to_vec();
        if let Some(k) = self.left {
            apply_projector(&self.idx, k, x, &mut t);
        }
        let mut u = vec![0.0; y.len()];
        self.inner.apply_transpose(&t, &mut u);
        match self.right {
            Some(k) => apply_projector(&self.idx, k, &u, y),
            None => y.copy_from_slice(&u),
        }
    }
    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric() && self.left == self.right
    }
}

/// ‖Pᵢ M Pⱼ‖ (projectors optional) of a shape on G_p, choosing the dense
/// route for C(p,2) ≤ [`DENSE_PAIR_LIMIT`] and Lanczos on the matrix-free
/// operator beyond.
pub fn shape_norm(g: &PaleyGraph, shape: Shape, left: Option<usize>, right: Option<usize>, tol: f64) -> Result<(NormEstimate, NormMethod)> {
    if shape == Shape::Diamond {
        let m = diamond_matrix(g);
        return Ok((spectral_norm(&m, tol)?, NormMethod::Dense));
    }
    let n = g.n() * (g.n() - 1) / 2;
    if n <= DENSE_PAIR_LIMIT {
        let m = build_graph_matrix(g, shape)?;
        let value = if left.is_none() && right.is_none() {
            spectral_norm(&m, tol)?.value
        } else {
            let pr = build_projections(g.n());
            let l = left.map(|k| pr.get(k).clone()).unwrap_or_else(|| DMat::identity(n, n));
            let r = right.map(|k| pr.get(k).clone()).unwrap_or_else(|| DMat::identity(n, n));
            dense_spectral_norm(&mul(&mul(&l, &m.data), &r))?
        };
        return Ok((NormEstimate { value, iterations: 0, converged: true }, NormMethod::Dense));
    }
    let op = ShapeOperator::new(g, shape)?;
    let seed = crate::linalg::seed_from_env();
    let est = if left.is_none() && right.is_none() {
        lanczos_norm(&op, tol, 300, seed)?
    } else {
        lanczos_norm(&ProjectedOperator::new(&op, g.n(), left, right), tol, 300, seed)?
    };
    Ok((est, NormMethod::Lanczos))
}

/// Eigenvalues of a dense symmetric graph matrix.
pub fn graph_matrix_eigenvalues(m: &GraphMatrix) -> Result<Vec<f64>> {
    sym_eigenvalues(&m.data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, DenseOperator};

    fn g(p: u64) -> PaleyGraph {
        PaleyGraph::from_prime(p).unwrap()
    }

    #[test]
    fn schur_decomposition_h22_and_corrected_product() {
        use crate::pseudomoments::{theorem_alphas, FkParams};
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for p in [5u64, 13, 17] {
            let gr = g(p);
            let mut alphas = vec![theorem_alphas(0.05, p).unwrap()];
            for _ in 0..3 {
                alphas.push(
                    FkParams::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>())
                        .unwrap(),
                );
            }
            for a in alphas {
                let r = schur_decomposition_residual(&gr, &a).unwrap();
                assert!(r.h22 < 1e-8, "p={p} {r:?}");
                assert!(r.h21h12_corrected < 1e-8, "p={p} {r:?}");
            }
        }
        // the printed product expansion misses the correction terms
        let r = schur_decomposition_residual(&g(13), &FkParams::new(0.3, 0.2, 0.1, 0.05).unwrap()).unwrap();
        assert!(r.h21h12_printed > 1e-3, "{r:?}");
    }

    #[test]
    fn pair_indexing_roundtrip() {
        let idx = PairIndexing::new(13);
        assert_eq!(idx.len(), 78);
        for (k, &(a, b)) in idx.pairs().iter().enumerate() {
            assert_eq!(idx.index(a, b), k);
            assert_eq!(idx.index(b, a), k);
        }
    }

    #[test]
    fn shape_names_roundtrip() {
        for s in Shape::PAIR_SHAPES {
            assert_eq!(s.name().parse::<Shape>().unwrap(), s);
        }
        assert_eq!("diamond".parse::<Shape>().unwrap(), Shape::Diamond);
        assert!(matches!("T999".parse::<Shape>(), Err(Error::UnknownShape(_))));
    }

    #[test]
    fn table_entries_at_p13() {
        let gr = g(13);
        let t401 = build_graph_matrix(&gr, Shape::T401).unwrap();
        let t311 = build_graph_matrix(&gr, Shape::T311).unwrap();
        let idx = PairIndexing::new(13);
        for (r, &(a, b)) in idx.pairs().iter().enumerate() {
            for (c, &(cc, d)) in idx.pairs().iter().enumerate() {
                let disjoint = a != cc && a != d && b != cc && b != d;
                assert_eq!(t401.data[(r, c)], if disjoint { 1.0 } else { 0.0 });
            }
        }
        // ({0,1},{0,2}) → S_{1,2}
        let v = t311.data[(idx.index(0, 1), idx.index(0, 2))];
        assert_eq!(v, gr.seidel(1, 2) as f64);
    }

    #[test]
    fn u541_entries_match_direct_summation() {
        let gr = g(13);
        let m = build_graph_matrix(&gr, Shape::U541).unwrap();
        let idx = PairIndexing::new(13);
        let s = |x: usize, y: usize| gr.seidel(x, y) as f64;
        for (r, &(a, b)) in idx.pairs().iter().enumerate().step_by(7) {
            for (c, &(cc, d)) in idx.pairs().iter().enumerate() {
                if [cc, d].contains(&a) || [cc, d].contains(&b) {
                    assert_eq!(m.data[(r, c)], 0.0);
                    continue;
                }
                let mut direct = 0.0;
                for i in 0..13 {
                    if ![a, b, cc, d].contains(&i) {
                        direct += s(a, i) * s(b, i) * s(cc, i) * s(d, i);
                    }
                }
                assert_eq!(m.data[(r, c)], direct);
            }
        }
    }

    #[test]
    fn operators_match_dense_matrices() {
        for p in [13u64, 17] {
            let gr = g(p);
            let n = gr.n() * (gr.n() - 1) / 2;
            let x: Vec<f64> = (0..n).map(|k| ((k * 37 % 11) as f64 - 5.0) / 7.0).collect();
            for shape in Shape::PAIR_SHAPES {
                let dense = build_graph_matrix(&gr, shape).unwrap();
                let op = ShapeOperator::new(&gr, shape).unwrap();
                let dop = DenseOperator::new(&dense.data);
                let (mut y1, mut y2) = (vec![0.0; n], vec![0.0; n]);
                op.apply(&x, &mut y1);
                dop.apply(&x, &mut y2);
                let err = y1.iter().zip(&y2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err < 1e-9, "{shape} apply p={p}: {err}");
                op.apply_transpose(&x, &mut y1);
                dop.apply_transpose(&x, &mut y2);
                let err = y1.iter().zip(&y2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err < 1e-9, "{shape} transpose p={p}: {err}");
                assert_eq!(shape.is_symmetric(), crate::linalg::is_symmetric(&dense.data, 0.0), "{shape}");
            }
        }
    }

    #[test]
    fn projections_p13() {
        let pr = build_projections(13);
        let n = 78;
        let id = DMat::identity(n, n);
        for k in 0..3 {
            let pk = pr.get(k);
            assert!(max_abs_diff(&mul(pk, pk), pk) < 1e-9);
            assert!(crate::linalg::is_symmetric(pk, 1e-12));
        }
        let sum = DMat::from_fn(n, n, |i, j| pr.p0[(i, j)] + pr.p1[(i, j)] + pr.p2[(i, j)]);
        assert!(max_abs_diff(&sum, &id) < 1e-9);
        assert!(crate::linalg::max_abs(&mul(&pr.p0, &pr.p1)) < 1e-9);
        assert!(crate::linalg::max_abs(&mul(&pr.p1, &pr.p2)) < 1e-9);
        let rank = |m: &DMat| sym_eigenvalues(m).unwrap().iter().filter(|&&v| v > 0.5).count();
        assert_eq!((rank(&pr.p0), rank(&pr.p1), rank(&pr.p2)), (1, 12, 65));
        // P₀·1 = 1 and P₂ annihilates u_i + u_j for mean-zero u.
        let ones = DMat::from_fn(n, 1, |_, _| 1.0);
        assert!(max_abs_diff(&mul(&pr.p0, &ones), &ones) < 1e-12);
        let u: Vec<f64> = (0..13).map(|i| i as f64 - 6.0).collect();
        let idx = PairIndexing::new(13);
        let w = DMat::from_fn(n, 1, |r, _| u[idx.pair(r).0] + u[idx.pair(r).1]);
        assert!(crate::linalg::max_abs(&mul(&pr.p2, &w)) < 1e-9);
    }

    #[test]
    fn matrix_free_projectors_match_dense() {
        let pr = build_projections(13);
        let idx = PairIndexing::new(13);
        let x: Vec<f64> = (0..78).map(|k| (k as f64 * 0.37).sin()).collect();
        for k in 0..3 {
            let mut y = vec![0.0; 78];
            apply_projector(&idx, k, &x, &mut y);
            let xd = DMat::from_fn(78, 1, |r, _| x[r]);
            let yd = mul(pr.get(k), &xd);
            for r in 0..78 {
                assert!((y[r] - yd[(r, 0)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn t301_t401_decompositions() {
        for p in [13u64, 17] {
            let gr = g(p);
            assert!(exact_decomposition_check(&gr, Shape::T301).unwrap() < 1e-8);
            assert!(exact_decomposition_check(&gr, Shape::T401).unwrap() < 1e-8);
        }
        let gr = g(13);
        let ev = |s| {
            let mut v = graph_matrix_eigenvalues(&build_graph_matrix(&gr, s).unwrap()).unwrap();
            v.iter_mut().for_each(|x| *x = x.round());
            v
        };
        let e301 = ev(Shape::T301);
        assert_eq!(e301.iter().filter(|&&x| x == 22.0).count(), 1);
        assert_eq!(e301.iter().filter(|&&x| x == 9.0).count(), 12);
        assert_eq!(e301.iter().filter(|&&x| x == -2.0).count(), 65);
        let e401 = ev(Shape::T401);
        assert_eq!(e401.iter().filter(|&&x| x == 55.0).count(), 1);
        assert_eq!(e401.iter().filter(|&&x| x == -10.0).count(), 12);
        assert_eq!(e401.iter().filter(|&&x| x == 1.0).count(), 65);
    }

    #[test]
    fn identity_plus_t301_plus_t401_is_all_ones() {
        let gr = g(13);
        let a = build_graph_matrix(&gr, Shape::T301).unwrap().data;
        let b = build_graph_matrix(&gr, Shape::T401).unwrap().data;
        for i in 0..78 {
            for j in 0..78 {
                let v = a[(i, j)] + b[(i, j)] + if i == j { 1.0 } else { 0.0 };
                assert_eq!(v, 1.0);
            }
        }
    }

    #[test]
    fn diamond_examples() {
        let gr = g(13);
        let m = diamond_matrix(&gr);
        for i in 0..13 {
            for j in 0..13 {
                assert_eq!(m.data[(i, j)], if i == j { 0.0 } else { -10.0 });
            }
        }
        assert!((spectral_norm(&m, 1e-9).unwrap().value - 120.0).abs() < 1e-9);
    }

    #[test]
    fn norm_examples_p13() {
        let gr = g(13);
        let t311 = build_graph_matrix(&gr, Shape::T311).unwrap();
        // Each row draws on two copies of S (one per shared vertex), so the
        // norm is exactly 2√p rather than √p.
        let v311 = spectral_norm(&t311, 1e-9).unwrap().value;
        assert!((v311 - 2.0 * 13f64.sqrt()).abs() < 1e-9);
        let t311_17 = build_graph_matrix(&g(17), Shape::T311).unwrap();
        assert!((spectral_norm(&t311_17, 1e-9).unwrap().value - 2.0 * 17f64.sqrt()).abs() < 1e-9);
        let pr = build_projections(13);
        let t401 = build_graph_matrix(&gr, Shape::T401).unwrap();
        assert!((restricted_norm(&t401, &pr, 2, 2).unwrap() - 1.0).abs() < 1e-8);
        let t301 = build_graph_matrix(&gr, Shape::T301).unwrap();
        assert!(restricted_norm(&t301, &pr, 0, 1).unwrap() < 1e-8);
        let t421 = build_graph_matrix(&gr, Shape::T421).unwrap();
        let p2t = mul(&pr.p2, &t421.data);
        assert!(dense_spectral_norm(&p2t).unwrap() <= 4.0 * 13f64.sqrt());
        // power iteration agrees with the dense route on T401 at p = 5
        let t5 = build_graph_matrix(&g(5), Shape::T401).unwrap();
        let pi = power_iteration_norm(&DenseOperator::new(&t5.data), 1e-10, 2000, 42);
        assert!((pi.value - spectral_norm(&t5, 1e-10).unwrap().value).abs() < 1e-6);
    }

    #[test]
    fn lanczos_route_matches_dense_route() {
        let gr = g(17);
        for shape in [Shape::T441, Shape::T421, Shape::U531, Shape::U431] {
            let dense = build_graph_matrix(&gr, shape).unwrap();
            let exact = spectral_norm(&dense, 1e-10).unwrap().value;
            let op = ShapeOperator::new(&gr, shape).unwrap();
            let lz = lanczos_norm(&op, 1e-10, 136, 42).unwrap();
            assert!((lz.value - exact).abs() < 1e-6 * exact.max(1.0), "{shape}: {} vs {exact}", lz.value);
        }
        let t421 = build_graph_matrix(&gr, Shape::T421).unwrap();
        let pr = build_projections(17);
        let exact = dense_spectral_norm(&mul(&pr.p2, &t421.data)).unwrap();
        let op = ShapeOperator::new(&gr, Shape::T421).unwrap();
        let lz = lanczos_norm(&ProjectedOperator::new(&op, 17, Some(2), None), 1e-10, 136, 42).unwrap();
        assert!((lz.value - exact).abs() < 1e-6 * exact);
    }
}
