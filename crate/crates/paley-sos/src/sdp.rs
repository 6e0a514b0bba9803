//! A self-contained dense SDP solver (operator splitting / ADMM) and builders
//! for the degree-2 and degree-4 sum-of-squares relaxations of the clique
//! number, plus the FK-restricted degree-4 program.
//!
//! Problems are stated over entry-equality classes: every upper-triangular
//! entry of the symmetric variable X belongs to exactly one class, and a
//! class is either fixed to a constant or free (all of its entries share one
//! value). The objective is linear in the class values. This covers the
//! pseudomoment programs exactly ("M_{S,T} depends only on S ∪ T", zeros
//! for non-cliques, M_{∅,∅} = 1) and makes the affine projection a per-class
//! average.

use crate::error::{Error, Result};
use crate::linalg::{mul_t, sym_eigen, sym_eigenvalues, DMat};
use crate::paley::Graph;
use faer::linalg::solvers::Solve;
use std::collections::{HashMap, VecDeque};

/// One entry-equality class.
#[derive(Debug, Clone)]
pub struct EntryClass {
    /// Upper-triangular entries (i ≤ j) sharing the class value.
    pub entries: Vec<(usize, usize)>,
    /// `Some(b)` when every entry is fixed to b.
    pub fixed: Option<f64>,
    /// Objective weight on the class value (maximize Σ weight·value).
    pub objective: f64,
}

impl EntryClass {
    /// Frobenius weight ⟨E, E⟩ of the class indicator (off-diagonal entries
    /// count twice).
    fn weight(&self) -> f64 {
        self.entries.iter().map(|&(i, j)| if i == j { 1.0 } else { 2.0 }).sum()
    }
}

/// maximize Σ_k c_k v_k subject to X(v) ⪰ 0, where X(v) places v_k on the
/// entries of free class k and the constant b on fixed classes.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    /// Matrix side.
    pub dim: usize,
    /// Entry classes partitioning the upper triangle.
    pub classes: Vec<EntryClass>,
    /// A priori bound |X_ij| ≤ bound valid for every feasible point, used to
    /// certify the upper bound from an inexact dual (1 for pseudomoment
    /// matrices: 0 ≤ Ẽ[x_S] ≤ 1 and |M_{S,T}| ≤ √(M_SS M_TT)).
    pub entry_bound: f64,
}

impl SdpProblem {
    /// Validates that the classes partition the upper triangle.
    pub fn new(dim: usize, classes: Vec<EntryClass>, entry_bound: f64) -> Result<Self> {
        let mut seen = vec![false; dim * (dim + 1) / 2];
        let tri = |i: usize, j: usize| j * (j + 1) / 2 + i;
        for c in &classes {
            if c.entries.is_empty() {
                return Err(Error::InvalidParameter("empty entry class".into()));
            }
            if c.fixed.is_some() && c.objective != 0.0 {
                return Err(Error::InvalidParameter("fixed class with objective weight".into()));
            }
            for &(i, j) in &c.entries {
                if i > j || j >= dim {
                    return Err(Error::InvalidParameter(format!("entry ({i},{j}) not upper-triangular in dim {dim}")));
                }
                let k = tri(i, j);
                if seen[k] {
                    return Err(Error::InvalidParameter(format!("entry ({i},{j}) in two classes")));
                }
                seen[k] = true;
            }
        }
        if let Some(k) = seen.iter().position(|&s| !s) {
            let j = ((((8 * k + 1) as f64).sqrt() - 1.0) / 2.0).floor() as usize;
            let i = k - j * (j + 1) / 2;
            return Err(Error::InvalidParameter(format!("entry ({i},{j}) belongs to no class")));
        }
        if !(entry_bound > 0.0) {
            return Err(Error::InvalidParameter("entry bound must be positive".into()));
        }
        Ok(SdpProblem { dim, classes, entry_bound })
    }

    /// Number of free classes (scalar variables).
    pub fn num_free(&self) -> usize {
        self.classes.iter().filter(|c| c.fixed.is_none()).count()
    }

    /// The objective as a symmetric matrix C with ⟨C, X(v)⟩ = Σ c_k v_k.
    pub fn objective_matrix(&self) -> DMat {
        let mut c = DMat::zeros(self.dim, self.dim);
        for cl in self.classes.iter().filter(|c| c.objective != 0.0) {
            let per = cl.objective / cl.weight();
            for &(i, j) in &cl.entries {
                c[(i, j)] = per;
                c[(j, i)] = per;
            }
        }
        c
    }

    /// X(v) for class values `values` (one per class; fixed classes ignore
    /// the supplied value).
    pub fn assemble(&self, values: &[f64]) -> DMat {
        let mut x = DMat::zeros(self.dim, self.dim);
        for (cl, &v) in self.classes.iter().zip(values) {
            let v = cl.fixed.unwrap_or(v);
            for &(i, j) in &cl.entries {
                x[(i, j)] = v;
                x[(j, i)] = v;
            }
        }
        x
    }

    /// Σ_k c_k v_k.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.classes.iter().zip(values).map(|(c, v)| c.objective * v).sum()
    }

    /// ⟨M, E_k⟩ for every class.
    fn class_inner(&self, m: &DMat) -> Vec<f64> {
        self.classes
            .iter()
            .map(|c| c.entries.iter().map(|&(i, j)| if i == j { m[(i, i)] } else { 2.0 * m[(i, j)] }).sum())
            .collect()
    }
}

/// Convergence status of a solve. Infeasibility is never declared: every
/// program built here is feasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    /// All residuals and the gap fell below tolerance.
    Optimal,
    /// The iteration cap was reached; the best iterate is returned.
    MaxIter,
}

impl std::fmt::Display for SdpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::MaxIter => "max_iter",
        })
    }
}

/// One row of the solver trace.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TraceRow {
    /// Iteration number (1-based).
    pub iteration: usize,
    /// Relative primal residual ‖Z − X(v)‖_F / max(1, ‖X(v)‖_F).
    pub primal_residual: f64,
    /// Relative dual residual ρ‖X(v) − X(v_prev)‖_F / max(1, ‖Y‖_F).
    pub dual_residual: f64,
    /// Relative gap |⟨Y, F₀⟩ − cᵀv| / (1 + |cᵀv|).
    pub gap: f64,
    /// Primal objective cᵀv.
    pub objective: f64,
    /// Penalty parameter.
    pub rho: f64,
}

/// Result of [`solve`].
#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Primal objective cᵀv at the returned iterate.
    pub value: f64,
    /// Certified upper bound ⟨Y, F₀⟩ + bound·Σ_k |⟨Y, E_k⟩ + c_k| from the
    /// PSD dual iterate Y.
    pub upper_bound: f64,
    /// X(v): satisfies every equality constraint exactly.
    pub x: DMat,
    /// Class values.
    pub values: Vec<f64>,
    /// Convergence status.
    pub status: SdpStatus,
    /// Final relative primal residual.
    pub primal_residual: f64,
    /// Final relative dual residual.
    pub dual_residual: f64,
    /// Final relative gap.
    pub gap: f64,
    /// Iterations performed.
    pub iterations: usize,
    /// Per-iteration trace.
    pub trace: Vec<TraceRow>,
}

impl SdpSolution {
    /// Smallest eigenvalue of the returned X.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(sym_eigenvalues(&self.x)?[0])
    }

    /// Whether max(primal, dual, gap) at iteration 10k is ≤ its value at
    /// iteration k, for every k with 10k in the trace.
    pub fn residual_trend_monotone(&self) -> bool {
        let m = |r: &TraceRow| r.primal_residual.max(r.dual_residual).max(r.gap);
        (1..=self.trace.len() / 10).all(|k| m(&self.trace[10 * k - 1]) <= m(&self.trace[k - 1]))
    }
}

fn frob(m: &DMat) -> f64 {
    m.norm_l2()
}

/// Projection onto the PSD cone by clipping negative eigenvalues.
pub fn project_psd(m: &DMat) -> Result<DMat> {
    let (vals, u) = sym_eigen(m)?;
    let n = m.nrows();
    let pos: Vec<usize> = (0..n).filter(|&k| vals[k] > 0.0).collect();
    if pos.is_empty() {
        return Ok(DMat::zeros(n, n));
    }
    let scaled = DMat::from_fn(n, pos.len(), |i, k| u[(i, pos[k])] * vals[pos[k]]);
    let plain = DMat::from_fn(n, pos.len(), |i, k| u[(i, pos[k])]);
    let mut out = mul_t(&scaled, &plain);
    // exact symmetry
    for j in 0..n {
        for i in 0..j {
            let v = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// ADMM over-relaxation factor (1 = plain ADMM).
pub const OVER_RELAXATION: f64 = 1.6;
/// Memory of the Anderson acceleration (0 disables it).
pub const ANDERSON_MEMORY: usize = 5;

fn dot(a: &DMat, b: &DMat) -> f64 {
    (0..a.ncols()).map(|j| (0..a.nrows()).map(|i| a[(i, j)] * b[(i, j)]).sum::<f64>()).sum()
}

/// Type-II Anderson acceleration of a fixed-point map x ↦ x + g(x).
struct Anderson {
    memory: usize,
    dx: VecDeque<DMat>,
    dg: VecDeque<DMat>,
    last: Option<(DMat, DMat)>,
}

impl Anderson {
    fn new(memory: usize) -> Self {
        Anderson { memory, dx: VecDeque::new(), dg: VecDeque::new(), last: None }
    }

    fn reset(&mut self) {
        self.dx.clear();
        self.dg.clear();
        self.last = None;
    }

    /// Given the current point x and its residual g = F(x) − x, returns the
    /// next point: F(x) when no history is available, otherwise the
    /// extrapolation x + g − Σ γ_i(Δx_i + Δg_i) with γ minimising
    /// ‖g − Σ γ_i Δg_i‖ (lightly regularised normal equations).
    fn step(&mut self, x: &DMat, g: &DMat) -> (DMat, bool) {
        let plain = || x + g;
        if self.memory == 0 {
            return (plain(), false);
        }
        if let Some((xl, gl)) = self.last.take() {
            self.dx.push_back(x - &xl);
            self.dg.push_back(g - &gl);
            if self.dx.len() > self.memory {
                self.dx.pop_front();
                self.dg.pop_front();
            }
        }
        self.last = Some((x.clone(), g.clone()));
        let k = self.dg.len();
        if k == 0 {
            return (plain(), false);
        }
        let mut a = DMat::zeros(k, k);
        let mut b = DMat::zeros(k, 1);
        for i in 0..k {
            for j in 0..=i {
                let v = dot(&self.dg[i], &self.dg[j]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
            b[(i, 0)] = dot(&self.dg[i], g);
        }
        let reg = 1e-10 * (0..k).map(|i| a[(i, i)]).sum::<f64>().max(1e-300);
        for i in 0..k {
            a[(i, i)] += reg;
        }
        let gamma = a.partial_piv_lu().solve(&b);
        if (0..k).any(|i| !gamma[(i, 0)].is_finite()) {
            self.reset();
            return (plain(), false);
        }
        let mut out = plain();
        for i in 0..k {
            let c = gamma[(i, 0)];
            out = &out - (&self.dx[i] + &self.dg[i]) * faer::Scale(c);
        }
        (out, true)
    }
}

/// Solves `prob` by ADMM on the splitting Z = X(v), Z ⪰ 0:
///
/// * v-update: closed-form average per entry-equality class of
///   Z + Y/ρ, shifted by c_k/(ρ‖E_k‖²);
/// * Z-update: PSD projection of X̂ − Y/ρ, where X̂ = βX(v) + (1 − β)Z is
///   the over-relaxed iterate (β = [`OVER_RELAXATION`]);
/// * Y-update: Y += ρ(Z − X̂), which keeps Y ⪰ 0.
///
/// The pair (Z, Y) is a function of M = Z − Y/ρ alone (Z = Π₊(M),
/// Y = −ρΠ₋(M)), so one sweep is a fixed-point map on M; it is accelerated
/// by safeguarded Anderson mixing (an extrapolated step is rejected when it
/// increases the fixed-point residual). Every iterate still yields PSD Z
/// and Y, so the dual certificate stays valid. Starts from Z = I, Y = 0 and
/// adapts ρ by residual balancing. Stops when max(primal, dual, gap) < tol or
/// after `max_iter` iterations.
pub fn solve(prob: &SdpProblem, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be positive".into()));
    }
    let n = prob.dim;
    let weights: Vec<f64> = prob.classes.iter().map(EntryClass::weight).collect();
    let f0 = prob.assemble(&vec![0.0; prob.classes.len()]);
    let mut state = DMat::identity(n, n);
    let mut rho = 1.0;
    let mut values = vec![0.0; prob.classes.len()];
    let mut x_prev: Option<DMat> = None;
    let mut trace = Vec::new();
    let mut status = SdpStatus::MaxIter;
    let mut last = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;
    let mut y_final = DMat::zeros(n, n);
    let mut aa = Anderson::new(ANDERSON_MEMORY);
    // (plain successor of the previous state, its residual norm) for the safeguard
    let mut fallback: Option<(DMat, f64)> = None;
    let mut extrapolated = false;
    for it in 1..=max_iter {
        iterations = it;
        let z = project_psd(&state)?;
        let mut yr = &z - &state; // Y/ρ
        // residual balancing, keeping (Z, Y) fixed
        if it % 20 == 0 {
            let (primal, dual, _) = last;
            let factor = if primal > 10.0 * dual {
                2.0
            } else if dual > 10.0 * primal {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                yr = yr * faer::Scale(1.0 / factor);
                aa.reset();
                fallback = None;
                extrapolated = false;
            }
        }
        // v-update
        let zy = &z + &yr;
        let inner = prob.class_inner(&zy);
        for (k, cl) in prob.classes.iter().enumerate() {
            values[k] = match cl.fixed {
                Some(b) => b,
                None => (inner[k] + cl.objective / rho) / weights[k],
            };
        }
        let x = prob.assemble(&values);

        let obj = prob.objective_value(&values);
        let dual_obj = rho * dot(&yr, &f0);
        let primal = frob(&(&z - &x)) / frob(&x).max(1.0);
        let dual = match &x_prev {
            Some(xp) => rho * frob(&(&x - xp)) / (rho * frob(&yr)).max(1.0),
            None => f64::INFINITY,
        };
        let gap = (dual_obj - obj).abs() / (1.0 + obj.abs());
        trace.push(TraceRow { iteration: it, primal_residual: primal, dual_residual: dual, gap, objective: obj, rho });
        last = (primal, dual, gap);
        y_final = &yr * faer::Scale(rho);
        if primal.max(dual).max(gap) < tol {
            status = SdpStatus::Optimal;
            break;
        }
        // next state: plain ADMM successor, then Anderson extrapolation
        let successor = DMat::from_fn(n, n, |i, j| {
            OVER_RELAXATION * x[(i, j)] + (1.0 - OVER_RELAXATION) * z[(i, j)] - yr[(i, j)]
        });
        let g = &successor - &state;
        let gnorm = frob(&g);
        x_prev = Some(x);
        if extrapolated {
            if let Some((fb, prev_norm)) = fallback.take() {
                if gnorm > prev_norm {
                    // reject the extrapolated point: resume from the plain step
                    aa.reset();
                    state = fb;
                    extrapolated = false;
                    continue;
                }
            }
        }
        let (next, used) = aa.step(&state, &g);
        fallback = Some((successor, gnorm));
        extrapolated = used;
        state = next;
    }
    let x = prob.assemble(&values);
    // certified upper bound: Y ⪰ 0 (up to rounding) and |X_ij| ≤ bound
    let y_psd = project_psd(&y_final)?;
    let yin = prob.class_inner(&y_psd);
    let mut upper = 0.0;
    for (k, cl) in prob.classes.iter().enumerate() {
        match cl.fixed {
            Some(b) => upper += b * yin[k],
            None => upper += prob.entry_bound * (yin[k] + cl.objective).abs(),
        }
    }
    Ok(SdpSolution {
        value: prob.objective_value(&values),
        upper_bound: upper,
        x,
        values,
        status,
        primal_residual: last.0,
        dual_residual: last.1,
        gap: last.2,
        iterations,
        trace,
    })
}

/// Rows of a clique-compressed pseudomoment matrix: ∅, every vertex, and
/// every edge (in `Graph::edges` order).
fn moment_rows(g: &Graph) -> Vec<Vec<usize>> {
    let mut rows: Vec<Vec<usize>> = vec![vec![]];
    rows.extend((0..g.n()).map(|i| vec![i]));
    rows.extend(g.edges().into_iter().map(|(a, b)| vec![a, b]));
    rows
}

fn union_sorted(s: &[usize], t: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = s.iter().chain(t).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

/// Builds a pseudomoment program over `rows`: entries whose union is not a
/// clique are fixed to 0, M_{∅,∅} = 1, and the remaining entries are grouped
/// by `key(union)`. The objective is Σ_i M_{∅,{i}}.
fn moment_program<K: std::hash::Hash + Eq + Clone>(
    g: &Graph,
    rows: &[Vec<usize>],
    key: impl Fn(&[usize]) -> K,
) -> Result<SdpProblem> {
    let dim = rows.len();
    let mut zero = Vec::new();
    let mut one = Vec::new();
    let mut groups: HashMap<K, usize> = HashMap::new();
    let mut classes: Vec<EntryClass> = Vec::new();
    for j in 0..dim {
        for i in 0..=j {
            let u = union_sorted(&rows[i], &rows[j]);
            if u.is_empty() {
                one.push((i, j));
            } else if !g.is_clique(&u) {
                zero.push((i, j));
            } else {
                let k = key(&u);
                let id = *groups.entry(k).or_insert_with(|| {
                    classes.push(EntryClass { entries: Vec::new(), fixed: None, objective: 0.0 });
                    classes.len() - 1
                });
                classes[id].entries.push((i, j));
            }
        }
    }
    // objective: Σ_i M_{∅,i}; each class containing such an entry gains
    // weight equal to the number of singletons it represents
    for j in 1..dim {
        if rows[j].len() == 1 {
            let k = key(&rows[j]);
            let id = groups[&k];
            classes[id].objective += 1.0;
        }
    }
    classes.push(EntryClass { entries: one, fixed: Some(1.0), objective: 0.0 });
    if !zero.is_empty() {
        classes.push(EntryClass { entries: zero, fixed: Some(0.0), objective: 0.0 });
    }
    SdpProblem::new(dim, classes, 1.0)
}

/// The (1 + n)-dimensional degree-2 program: maximize Σ y_i with
/// Y_ii = y_i, Y_ij = 0 for non-adjacent i ≠ j, [[1, yᵀ], [y, Y]] ⪰ 0.
pub fn build_sos2(g: &Graph) -> Result<SdpProblem> {
    let rows: Vec<Vec<usize>> = std::iter::once(vec![]).chain((0..g.n()).map(|i| vec![i])).collect();
    moment_program(g, &rows, |u| u.to_vec())
}

/// Dimension limit of [`build_sos4`] (1 + p + p(p−1)/4 at p = 61).
pub const SOS4_DIM_LIMIT: usize = 977;

/// The clique-compressed degree-4 program: rows ∅, vertices and edges,
/// entries keyed by the union S ∪ T, zero for non-clique unions.
pub fn build_sos4(g: &Graph) -> Result<SdpProblem> {
    let dim = 1 + g.n() + g.edge_count();
    if dim > SOS4_DIM_LIMIT {
        return Err(Error::SizeLimit(format!(
            "degree-4 program of dimension {dim} exceeds the dense limit {SOS4_DIM_LIMIT}"
        )));
    }
    moment_program(g, &moment_rows(g), |u| u.to_vec())
}

/// The degree-4 program restricted to pseudomoments depending only on
/// |S ∪ T| (the FK family), with the same rows as [`build_sos4`].
pub fn build_fk4_sdp(g: &Graph) -> Result<SdpProblem> {
    let dim = 1 + g.n() + g.edge_count();
    if dim > SOS4_DIM_LIMIT {
        return Err(Error::SizeLimit(format!(
            "degree-4 program of dimension {dim} exceeds the dense limit {SOS4_DIM_LIMIT}"
        )));
    }
    moment_program(g, &moment_rows(g), |u| u.len())
}

/// The 2×2 program: maximize X₁₂ subject to X₁₁ = X₂₂ = 1, X ⪰ 0.
pub fn two_by_two_example() -> SdpProblem {
    SdpProblem::new(
        2,
        vec![
            EntryClass { entries: vec![(0, 0), (1, 1)], fixed: Some(1.0), objective: 0.0 },
            EntryClass { entries: vec![(0, 1)], fixed: None, objective: 1.0 },
        ],
        1.0,
    )
    .expect("valid 2x2 problem")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paley::PaleyGraph;

    #[test]
    fn two_by_two() {
        let s = solve(&two_by_two_example(), 1e-6, 5000).unwrap();
        assert!((s.value - 1.0).abs() < 1e-4, "{}", s.value);
        for i in 0..2 {
            for j in 0..2 {
                assert!((s.x[(i, j)] - 1.0).abs() < 1e-4);
            }
        }
        assert!(s.upper_bound >= 1.0 - 1e-9);
    }

    #[test]
    fn partition_is_validated() {
        let bad = SdpProblem::new(2, vec![EntryClass { entries: vec![(0, 0)], fixed: Some(1.0), objective: 0.0 }], 1.0);
        assert!(bad.is_err());
        let dup = SdpProblem::new(
            1,
            vec![
                EntryClass { entries: vec![(0, 0)], fixed: None, objective: 1.0 },
                EntryClass { entries: vec![(0, 0)], fixed: None, objective: 0.0 },
            ],
            1.0,
        );
        assert!(dup.is_err());
    }

    #[test]
    fn complete_graph_k3() {
        let s = solve(&build_sos2(&Graph::complete(3)).unwrap(), 1e-6, 20000).unwrap();
        assert!((s.value - 3.0).abs() < 1e-4, "{}", s.value);
    }

    #[test]
    fn sos2_paley_13() {
        let g = PaleyGraph::from_prime(13).unwrap();
        let prob = build_sos2(g.graph()).unwrap();
        assert_eq!(prob.dim, 14);
        let s = solve(&prob, 1e-6, 20000).unwrap();
        assert!((s.value - 13f64.sqrt()).abs() < 1e-3, "{}", s.value);
        assert!(s.upper_bound >= 13f64.sqrt() - 1e-6 && s.upper_bound < 13f64.sqrt() + 1e-3);
    }

    #[test]
    fn sos4_dimensions_and_limit() {
        let g13 = PaleyGraph::from_prime(13).unwrap();
        assert_eq!(build_sos4(g13.graph()).unwrap().dim, 53);
        let g29 = PaleyGraph::from_prime(29).unwrap();
        assert_eq!(build_sos4(g29.graph()).unwrap().dim, 233);
        let g73 = PaleyGraph::from_prime(73).unwrap();
        assert!(matches!(build_sos4(g73.graph()), Err(Error::SizeLimit(_))));
    }
}
