//! SDP solver behaviour on small and Paley instances.

use paley_sos::field::primes_one_mod_four;
use paley_sos::paley::Graph;
use paley_sos::pseudomoments::fk4_value;
use paley_sos::sdp::*;
use paley_sos::PaleyGraph;

#[test]
fn correlation_example() {
    let s = solve(&two_by_two_example(), 1e-7, 10000).unwrap();
    assert!((s.value - 1.0).abs() < 1e-4);
    for i in 0..2 {
        for j in 0..2 {
            assert!((s.x[(i, j)] - 1.0).abs() < 1e-3);
        }
    }
    assert!(s.min_eigenvalue().unwrap() > -1e-6);
}

#[test]
fn theta_of_complete_graph() {
    let s = solve(&build_sos2(&Graph::complete(3)).unwrap(), 1e-6, 20000).unwrap();
    assert!((s.value - 3.0).abs() < 1e-4);
}

#[test]
fn sos2_equals_sqrt_p() {
    for p in primes_one_mod_four(5, 61) {
        let g = PaleyGraph::from_prime(p).unwrap();
        let s = solve(&build_sos2(g.graph()).unwrap(), 1e-5, 20000).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.value - (p as f64).sqrt()).abs() < 1e-3, "p={p}: {}", s.value);
        assert!(s.upper_bound >= s.value - 1e-3);
        if !s.residual_trend_monotone() {
            println!("p={p}: residual trend not monotone (logged)");
        }
    }
}

#[test]
fn sos4_p13_sandwich_and_self_consistency() {
    let g = PaleyGraph::from_prime(13).unwrap();
    let prob = build_sos4(g.graph()).unwrap();
    assert_eq!(prob.dim, 53);
    let a = solve(&prob, 1e-4, 20000).unwrap();
    let b = solve(&prob, 1e-4, 40000).unwrap();
    assert!((a.value - b.value).abs() <= 2e-4);
    let fk = fk4_value(&g, 1e-4).unwrap();
    assert!(a.value >= fk.lo - 1e-3 && a.value <= 13f64.sqrt() + 1e-3);
    assert_eq!(build_sos4(PaleyGraph::from_prime(29).unwrap().graph()).unwrap().dim, 233);
}

#[test]
fn fk_sdp_agrees_with_fk4_optimizer() {
    for p in [13u64, 17] {
        let g = PaleyGraph::from_prime(p).unwrap();
        let s = solve(&build_fk4_sdp(g.graph()).unwrap(), 1e-6, 20000).unwrap();
        let fk = fk4_value(&g, 1e-4).unwrap();
        assert!((s.value - fk.value()).abs() < 2e-4, "p={p}: {} vs {}", s.value, fk.value());
    }
}

#[test]
fn size_limit_is_enforced() {
    let g = PaleyGraph::from_prime(73).unwrap();
    assert!(matches!(build_sos4(g.graph()), Err(paley_sos::Error::SizeLimit(_))));
}
