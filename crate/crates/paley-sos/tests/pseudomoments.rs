//! FK pseudomoments: assembly, Schur chain, FK₄ optimizer and u-forms.

use paley_sos::field::primes_one_mod_four;
use paley_sos::harness::fit_points;
use paley_sos::pseudomoments::*;
use paley_sos::PaleyGraph;
use rand::{Rng, SeedableRng};

#[test]
fn theorem_alpha_ratios() {
    for p in [13u64, 29, 101] {
        for c in [0.01, 0.05, 0.2] {
            let a = theorem_alphas(c, p).unwrap();
            assert!((a.a2 / (a.a1 * a.a1) - 4.0).abs() < 1e-9);
            assert!((a.a4 / a.a1.powi(4) - 512.0).abs() < 1e-6);
        }
    }
}

#[test]
fn schur_chain_is_sound_for_random_alpha() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for p in [13u64, 17] {
        let g = PaleyGraph::from_prime(p).unwrap();
        for _ in 0..10 {
            let a1 = rng.random_range(0.01..0.4);
            let a = FkParams::new(a1, a1 * rng.random_range(0.05..0.9), a1 * rng.random_range(0.001..0.3), a1 * rng.random_range(0.0001..0.1)).unwrap();
            assert!(schur_chain(&g, &a).unwrap().sound());
        }
        let a = theorem_alphas(0.01, p).unwrap();
        let ch = schur_chain(&g, &a).unwrap();
        assert!(ch.premise() && ch.sound());
    }
}

#[test]
fn small_c_is_feasible_and_large_c_is_not() {
    let g = PaleyGraph::from_prime(13).unwrap();
    assert!(min_eigenvalue_m(&g, &theorem_alphas(0.01, 13).unwrap()).unwrap() >= -1e-8);
    assert!(theorem_alphas(10.0, 13).is_err() || min_eigenvalue_m(&g, &theorem_alphas(10.0, 13).unwrap()).unwrap() < -1e-8);
    let g61 = PaleyGraph::from_prime(61).unwrap();
    assert!(min_eigenvalue_m(&g61, &theorem_alphas(0.01, 61).unwrap()).unwrap() >= -1e-8);
}

#[test]
fn block_route_agrees_with_dense() {
    for p in [13u64, 17, 29] {
        let g = PaleyGraph::from_prime(p).unwrap();
        let a = theorem_alphas(0.05, p).unwrap();
        assert!(block_route_residual(&g, &a).unwrap() < 1e-9);
        assert!(n_vs_h_residual(&g, &a) < 1e-10);
    }
}

#[test]
fn fk4_brackets_and_trend() {
    let mut pts = Vec::new();
    let mut prev = 0.0;
    for p in primes_one_mod_four(13, 61) {
        let g = PaleyGraph::from_prime(p).unwrap();
        let r = fk4_value(&g, 1e-4).unwrap();
        assert!(r.converged && r.hi - r.lo <= 1e-4 + 1e-12, "p={p}");
        // FK₄ ≤ SOS₄ ≤ √p; the lower end ω only holds at small p (an FK
        // point is symmetric over all cliques, unlike a single max clique)
        assert!(r.lo <= (p as f64).sqrt() + 1e-3);
        if p == 13 {
            assert!(r.hi >= 3.0 - 1e-3);
        }
        // the feasible end really is feasible
        assert!(min_eigenvalue_m(&g, &r.alpha).unwrap() >= -1e-7 * (p as f64));
        // loose monotone trend (values may dip slightly between neighbours)
        assert!(r.value() >= prev - 0.5);
        prev = r.value();
        pts.push((p as f64, r.value()));
    }
    let fit = fit_points(&pts).unwrap();
    println!("fk4 fit over 13..61: b = {:.3}", fit.b);
}

#[test]
fn u_form_exponents() {
    // u*T301u ≈ −2p²(1 − O(1/p)); starting at 29 keeps the slow approach to
    // the limit from inflating the fitted exponent
    let primes = primes_one_mod_four(29, 250);
    let mut series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); U_FORM_SHAPES.len()];
    for &p in &primes {
        let g = PaleyGraph::from_prime(p).unwrap();
        let u = u_quadratic_forms(&g, false).unwrap();
        assert!(u.closed_form_residual < 1e-8);
        assert!(u.proj_norm_sq < 5.0);
        for (k, (_, v)) in u.forms.iter().enumerate() {
            series[k].push((p as f64, v.abs()));
        }
    }
    for (k, shape) in U_FORM_SHAPES.iter().enumerate() {
        let bound = match shape.name() {
            "T411" | "T421" | "T422" => 2.6,
            "T301" | "T401" => 2.1,
            "T441" => 3.1,
            _ => unreachable!(),
        };
        let fit = fit_points(&series[k]).unwrap();
        assert!(fit.b <= bound, "{shape}: exponent {} > {bound}", fit.b);
    }
}

#[test]
fn pseudomoment_sums() {
    for (p, count) in [(13u64, 2usize), (17, 3), (29, 6)] {
        let g = PaleyGraph::from_prime(p).unwrap();
        let s = pseudomoment_sum_checks(&g, &theorem_alphas(0.05, p).unwrap()).unwrap();
        assert_eq!(s.triangle_count, count);
        assert!(s.exact_identities_hold());
        assert!(s.fourth_deviation_ratio <= 10.0);
    }
}
