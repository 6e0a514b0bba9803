//! Graph-matrix constructions, projector identities and norm routes.

use paley_sos::graphmx::*;
use paley_sos::linalg::{dense_spectral_norm, is_symmetric, max_abs_diff, mul, DMat};
use paley_sos::PaleyGraph;

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
fn projectors_are_complete_orthogonal_idempotents() {
    let n = 13;
    let pr = build_projections(n);
    let dim = n * (n - 1) / 2;
    let mut sum = DMat::zeros(dim, dim);
    for k in 0..3 {
        let pk = pr.get(k);
        assert!(max_abs_diff(&mul(pk, pk), pk) < 1e-10);
        for l in 0..3 {
            if l != k {
                assert!(max_abs_diff(&mul(pk, pr.get(l)), &DMat::zeros(dim, dim)) < 1e-10);
            }
        }
        sum = DMat::from_fn(dim, dim, |i, j| sum[(i, j)] + pk[(i, j)]);
    }
    assert!(max_abs_diff(&sum, &DMat::identity(dim, dim)) < 1e-10);
    let trace = |m: &DMat| (0..dim).map(|i| m[(i, i)]).sum::<f64>();
    assert!((trace(pr.get(0)) - 1.0).abs() < 1e-9);
    assert!((trace(pr.get(1)) - (n as f64 - 1.0)).abs() < 1e-9);
}

#[test]
fn transposes_and_symmetry() {
    let g = PaleyGraph::from_prime(13).unwrap();
    for shape in Shape::PAIR_SHAPES {
        let m = build_graph_matrix(&g, shape).unwrap();
        let t = build_graph_matrix(&g, shape.transpose()).unwrap();
        let mt = m.data.transpose().to_owned();
        assert!(max_abs_diff(&mt, &t.data) < 1e-12, "{shape}");
        if shape.is_symmetric() {
            assert!(is_symmetric(&m.data, 1e-12));
        }
        if shape.pattern() == Pattern::Equal {
            let n = m.data.nrows();
            assert!((0..n).all(|i| (0..n).all(|j| i == j || m.data[(i, j)] == 0.0)), "{shape} not diagonal");
        }
    }
    for shape in [Shape::T441, Shape::T401, Shape::T301] {
        assert!(shape.is_symmetric());
    }
}

#[test]
fn matrix_free_matches_dense() {
    let g = PaleyGraph::from_prime(17).unwrap();
    for shape in [Shape::T441, Shape::T421, Shape::U541, Shape::T311] {
        let m = build_graph_matrix(&g, shape).unwrap();
        let dense = dense_spectral_norm(&m.data).unwrap();
        let est = spectral_norm(&m, 1e-8).unwrap();
        assert!((dense - est.value).abs() < 1e-6 * dense.max(1.0), "{shape}: {dense} vs {}", est.value);
    }
}

#[test]
fn norm_examples() {
    for p in [13u64, 17, 29] {
        let g = PaleyGraph::from_prime(p).unwrap();
        let d = dense_spectral_norm(&diamond_matrix(&g).data).unwrap();
        let e = ((p - 1) * (p - 3)) as f64;
        assert!((d - e).abs() < 1e-8 * e);
        let (t311, _) = shape_norm(&g, Shape::T311, None, None, 1e-8).unwrap();
        assert!((t311.value - 2.0 * (p as f64).sqrt()).abs() < 1e-6);
    }
}

#[test]
fn lanczos_route_agrees_with_dense_near_the_limit() {
    // p = 61 is the largest dense size; compare against the matrix-free operator
    let g = PaleyGraph::from_prime(61).unwrap();
    let (dense, m1) = shape_norm(&g, Shape::T441, None, None, 1e-8).unwrap();
    assert_eq!(m1, NormMethod::Dense);
    let op = ShapeOperator::new(&g, Shape::T441).unwrap();
    let lz = paley_sos::linalg::lanczos_norm(&op, 1e-8, 300, 42).unwrap();
    assert!((dense.value - lz.value).abs() < 1e-6 * dense.value);
}

#[test]
fn restricted_norms_small_on_p2() {
    // ‖P₂T421‖ etc. grow like √p; check the ratio stays modest
    for p in [13u64, 29, 53] {
        let g = PaleyGraph::from_prime(p).unwrap();
        for (shape, l, r) in [(Shape::T421, Some(2), None), (Shape::T422, None, Some(2))] {
            let (est, _) = shape_norm(&g, shape, l, r, 1e-6).unwrap();
            let full = shape_norm(&g, shape, None, None, 1e-6).unwrap().0.value;
            assert!(est.value < full);
            assert!(est.value / (p as f64).sqrt() < 10.0, "{shape} p={p}: {}", est.value);
        }
    }
}

#[test]
fn decomposition_identities() {
    for p in [13u64, 17, 29] {
        let g = PaleyGraph::from_prime(p).unwrap();
        assert!(exact_decomposition_check(&g, Shape::T301).unwrap() < 1e-8);
        assert!(exact_decomposition_check(&g, Shape::T401).unwrap() < 1e-8);
    }
}
