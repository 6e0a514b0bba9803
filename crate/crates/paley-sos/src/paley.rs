//! Paley graphs: construction, strong regularity, spectra, exact clique
//! numbers and the classical clique-number bounds.

use crate::error::{Error, Result};
use crate::field::PrimeContext;
use crate::linalg::{sym_eigenvalues, DMat};

/// A simple undirected graph on `0..n` with bitset adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// The empty graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self { n, words, rows: vec![0; n * words] }
    }

    /// Graph from an adjacency predicate evaluated on `i < j`.
    pub fn from_fn(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if adjacent(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// The complete graph K_n.
    pub fn complete(n: usize) -> Self {
        Self::from_fn(n, |_, _| true)
    }

    /// Adds the edge {i, j}.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i != j && i < self.n && j < self.n);
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
        self.rows[j * self.words + i / 64] |= 1 << (i % 64);
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether {i, j} is an edge.
    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        (self.rows[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    /// Degree of vertex i.
    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    /// Edges {i, j} with i < j in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.adjacent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Whether the vertex set is a clique.
    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter().enumerate().all(|(k, &a)| vs[k + 1..].iter().all(|&b| a != b && self.adjacent(a, b)))
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> DMat {
        DMat::from_fn(self.n, self.n, |i, j| if i != j && self.adjacent(i, j) { 1.0 } else { 0.0 })
    }

    /// Exact clique number by Tomita-style branch and bound with greedy
    /// colouring bounds on bitsets.  Vertices are ordered by descending degree,
    /// ties broken by index.
    pub fn clique_number(&self) -> usize {
        if self.n == 0 {
            return 0;
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.degree(v)), v));
        let mut solver = CliqueSearch { g: self, best: 0, order };
        let all = Bits::full(self.n, self.words);
        solver.expand(0, all);
        solver.best
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn full(n: usize, words: usize) -> Self {
        let mut v = vec![0u64; words];
        for i in 0..n {
            v[i / 64] |= 1 << (i % 64);
        }
        Bits(v)
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn contains(&self, i: usize) -> bool {
        (self.0[i / 64] >> (i % 64)) & 1 == 1
    }
    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn and(&self, other: &[u64]) -> Bits {
        Bits(self.0.iter().zip(other).map(|(a, b)| a & b).collect())
    }
}

struct CliqueSearch<'a> {
    g: &'a Graph,
    best: usize,
    order: Vec<usize>,
}

impl CliqueSearch<'_> {
    /// Greedy sequential colouring of the candidate set in the fixed vertex
    /// order; returns vertices with their colour numbers in colour order.
    fn colour(&self, cand: &Bits) -> Vec<(usize, usize)> {
        let mut uncoloured: Vec<usize> = self.order.iter().copied().filter(|&v| cand.contains(v)).collect();
        let mut out = Vec::with_capacity(uncoloured.len());
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut class: Vec<usize> = Vec::new();
            let mut rest = Vec::new();
            for &v in &uncoloured {
                if class.iter().all(|&u| !self.g.adjacent(u, v)) {
                    class.push(v);
                } else {
                    rest.push(v);
                }
            }
            out.extend(class.into_iter().map(|v| (v, colour)));
            uncoloured = rest;
        }
        out
    }

    fn expand(&mut self, size: usize, mut cand: Bits) {
        let coloured = self.colour(&cand);
        for &(v, c) in coloured.iter().rev() {
            if size + c <= self.best {
                return;
            }
            let next = cand.and(self.g.row(v));
            if next.is_empty() {
                self.best = self.best.max(size + 1);
            } else {
                self.expand(size + 1, next);
            }
            cand.remove(v);
        }
    }
}

/// Brute-force clique number by enumerating subsets (test oracle, n ≤ 20).
pub fn clique_number_brute_force(g: &Graph) -> usize {
    assert!(g.n() <= 20);
    let mut best = 0;
    for mask in 0u32..(1 << g.n()) {
        let vs: Vec<usize> = (0..g.n()).filter(|&i| mask >> i & 1 == 1).collect();
        if vs.len() > best && g.is_clique(&vs) {
            best = vs.len();
        }
    }
    best
}

/// The Paley graph G_p on F_p, with a ~ b iff χ(a − b) = +1.
#[derive(Debug, Clone)]
pub struct PaleyGraph {
    ctx: PrimeContext,
    graph: Graph,
}

impl PaleyGraph {
    /// Builds G_p; requires p ≡ 1 (mod 4).
    pub fn new(ctx: &PrimeContext) -> Result<Self> {
        ctx.require_paley()?;
        let graph = Graph::from_fn(ctx.n(), |a, b| ctx.chi(ctx.reduce(a as i64 - b as i64)) == 1);
        Ok(Self { ctx: ctx.clone(), graph })
    }

    /// Builds G_p from the prime directly.
    pub fn from_prime(p: u64) -> Result<Self> {
        Self::new(&PrimeContext::new_paley(p)?)
    }

    /// The field context.
    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    /// The prime p.
    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    /// The number of vertices p.
    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    /// The underlying simple graph.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Whether a ~ b.
    #[inline]
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.graph.adjacent(a, b)
    }

    /// Seidel entry S_ab = χ(a − b).
    #[inline]
    pub fn seidel(&self, a: usize, b: usize) -> i8 {
        let n = self.n();
        self.ctx.chi((a + n - b) % n)
    }

    /// Seidel matrix as a flat row-major table of ±1/0 (fast kernels).
    pub fn seidel_table(&self) -> Vec<i8> {
        let n = self.n();
        let mut t = vec![0i8; n * n];
        for a in 0..n {
            for b in 0..n {
                t[a * n + b] = self.seidel(a, b);
            }
        }
        t
    }

    /// Dense adjacency matrix A.
    pub fn adjacency_matrix(&self) -> DMat {
        self.graph.adjacency_matrix()
    }

    /// Dense Seidel matrix S.
    pub fn seidel_matrix(&self) -> DMat {
        DMat::from_fn(self.n(), self.n(), |a, b| self.seidel(a, b) as f64)
    }

    /// Checks S = 2A − J + I entrywise and S² = pI − J in exact integer arithmetic.
    pub fn seidel_identities_hold(&self) -> bool {
        let n = self.n();
        let s = self.seidel_table();
        let lin = (0..n).all(|a| {
            (0..n).all(|b| {
                let a_ab = if self.adjacent(a, b) { 2 } else { 0 };
                let rhs = a_ab - 1 + if a == b { 1 } else { 0 };
                s[a * n + b] as i64 == rhs
            })
        });
        let sq = (0..n).all(|a| {
            (0..n).all(|b| {
                let v: i64 = (0..n).map(|k| s[a * n + k] as i64 * s[k * n + b] as i64).sum();
                v == if a == b { n as i64 - 1 } else { -1 }
            })
        });
        lin && sq
    }

    /// Verifies strong regularity by direct counting; returns (λ, μ, holds)
    /// where λ, μ are the expected parameters (p−5)/4 and (p−1)/4.
    pub fn strong_regularity(&self) -> (usize, usize, bool) {
        let n = self.n();
        let lambda = (n - 5) / 4;
        let mu = (n - 1) / 4;
        let mut holds = (0..n).all(|v| self.graph.degree(v) == (n - 1) / 2);
        for a in 0..n {
            for b in (a + 1)..n {
                let common = self
                    .graph
                    .row(a)
                    .iter()
                    .zip(self.graph.row(b))
                    .map(|(x, y)| (x & y).count_ones() as usize)
                    .sum::<usize>();
                let expected = if self.adjacent(a, b) { lambda } else { mu };
                holds &= common == expected;
            }
        }
        (lambda, mu, holds)
    }

    /// Computed adjacency and Seidel spectra (nondecreasing).
    pub fn spectra(&self) -> Result<Spectra> {
        Ok(Spectra {
            adjacency: sym_eigenvalues(&self.adjacency_matrix())?,
            seidel: sym_eigenvalues(&self.seidel_matrix())?,
        })
    }

    /// The predicted spectra: adjacency {(p−1)/2, (−1±√p)/2 each ×(p−1)/2},
    /// Seidel {0, ±√p each ×(p−1)/2}, sorted nondecreasing.
    pub fn expected_spectra(&self) -> Spectra {
        let p = self.p() as f64;
        let h = (self.n() - 1) / 2;
        let r = p.sqrt();
        let mut adjacency = vec![(-1.0 - r) / 2.0; h];
        adjacency.extend(std::iter::repeat_n((-1.0 + r) / 2.0, h));
        adjacency.push((p - 1.0) / 2.0);
        let mut seidel = vec![-r; h];
        seidel.push(0.0);
        seidel.extend(std::iter::repeat_n(r, h));
        Spectra { adjacency, seidel }
    }

    /// Exact clique number.  Vertex-transitivity lets the search fix vertex 0,
    /// so ω(G_p) = 1 + ω(G_p[N(0)]).
    pub fn clique_number(&self) -> Result<usize> {
        if self.n() > 1000 {
            return Err(Error::SizeLimit(format!("clique search limited to p ≤ 1000 (p = {})", self.p())));
        }
        let nbrs: Vec<usize> = (1..self.n()).filter(|&v| self.adjacent(0, v)).collect();
        let sub = Graph::from_fn(nbrs.len(), |i, j| self.adjacent(nbrs[i], nbrs[j]));
        Ok(1 + sub.clique_number())
    }

    /// Whether x ↦ a·x + b maps edges to edges.
    pub fn is_automorphism(&self, a: usize, b: usize) -> bool {
        let n = self.n();
        let f = |x: usize| (a * x + b) % n;
        (0..n).all(|x| (x + 1..n).all(|y| self.adjacent(x, y) == self.adjacent(f(x), f(y))))
    }

    /// Whether x ↦ g·x maps G_p onto its complement.
    pub fn maps_to_complement(&self, g: usize) -> bool {
        let n = self.n();
        (0..n).all(|x| (x + 1..n).all(|y| self.adjacent(x, y) != self.adjacent(g * x % n, g * y % n)))
    }
}

/// Adjacency and Seidel eigenvalues, each sorted nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectra {
    /// Adjacency eigenvalues.
    pub adjacency: Vec<f64>,
    /// Seidel eigenvalues.
    pub seidel: Vec<f64>,
}

/// The Hoffman bound √p and the Hansen–Podolskii bound √(2p−1)/2 + 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalBounds {
    /// √p.
    pub hoffman: f64,
    /// √(2p−1)/2 + 1.
    pub hansen_podolskii: f64,
}

/// Classical upper bounds on ω(G_p).
pub fn classical_bounds(p: u64) -> ClassicalBounds {
    let p = p as f64;
    ClassicalBounds { hoffman: p.sqrt(), hansen_podolskii: (2.0 * p - 1.0).sqrt() / 2.0 + 1.0 }
}

/// Maximum relative deviation between two sorted eigenvalue lists.
pub fn max_relative_deviation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / y.abs().max(1.0)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p5_is_the_five_cycle() {
        let g = PaleyGraph::from_prime(5).unwrap();
        let expected = [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)];
        assert_eq!(g.graph().edges(), expected.to_vec());
    }

    #[test]
    fn p7_rejected() {
        assert_eq!(PaleyGraph::from_prime(7).unwrap_err(), Error::NotOneModFour(7));
    }

    #[test]
    fn regularity_and_strong_regularity() {
        for (p, lm) in [(5u64, (0, 1)), (13, (2, 3)), (17, (3, 4))] {
            let g = PaleyGraph::from_prime(p).unwrap();
            assert!((0..g.n()).all(|v| g.graph().degree(v) == (g.n() - 1) / 2));
            let (l, m, holds) = g.strong_regularity();
            assert_eq!((l, m), lm);
            assert!(holds);
        }
    }

    #[test]
    fn seidel_identities() {
        for p in [5u64, 13, 17, 29] {
            assert!(PaleyGraph::from_prime(p).unwrap().seidel_identities_hold());
        }
    }

    #[test]
    fn spectra_p13() {
        let g = PaleyGraph::from_prime(13).unwrap();
        let s = g.spectra().unwrap();
        let e = g.expected_spectra();
        assert!(max_relative_deviation(&s.adjacency, &e.adjacency) < 1e-8);
        assert!(max_relative_deviation(&s.seidel, &e.seidel) < 1e-8);
        assert!((e.adjacency[12] - 6.0).abs() < 1e-12);
        assert!((e.adjacency[6] - 1.302776).abs() < 1e-6);
        assert!((e.adjacency[0] + 2.302776).abs() < 1e-6);
        assert!(s.adjacency.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn clique_numbers() {
        assert_eq!(PaleyGraph::from_prime(5).unwrap().clique_number().unwrap(), 2);
        assert_eq!(PaleyGraph::from_prime(17).unwrap().clique_number().unwrap(), 3);
        assert_eq!(PaleyGraph::from_prime(101).unwrap().clique_number().unwrap(), 5);
    }

    #[test]
    fn clique_search_matches_brute_force() {
        for p in [5u64, 13, 17] {
            let g = PaleyGraph::from_prime(p).unwrap();
            let bf = clique_number_brute_force(g.graph());
            assert_eq!(g.graph().clique_number(), bf);
            assert_eq!(g.clique_number().unwrap(), bf);
        }
        assert_eq!(Graph::complete(4).clique_number(), 4);
        assert_eq!(Graph::empty(3).clique_number(), 1);
    }

    #[test]
    fn classical_bound_values() {
        let b = classical_bounds(101);
        assert!((b.hoffman - 10.0499).abs() < 1e-4);
        assert!((b.hansen_podolskii - (201f64.sqrt() / 2.0 + 1.0)).abs() < 1e-12);
        assert!((b.hansen_podolskii - 8.088723).abs() < 1e-6);
        assert!((classical_bounds(13).hoffman - 3.6056).abs() < 1e-4);
    }

    #[test]
    fn automorphisms_and_self_complementarity() {
        let g = PaleyGraph::from_prime(13).unwrap();
        for a in g.ctx().quadratic_residues() {
            assert!(g.is_automorphism(a, 5));
        }
        assert!(g.maps_to_complement(g.ctx().smallest_nonresidue()));
        assert!(!g.is_automorphism(g.ctx().smallest_nonresidue(), 0));
    }
}
