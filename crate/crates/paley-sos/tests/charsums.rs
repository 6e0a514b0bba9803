//! Character-sum identities and bounds across several primes.

use num_complex::Complex64;
use paley_sos::charsums::*;
use paley_sos::field::{primes_one_mod_four, PrimeContext};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

#[test]
fn kloosterman_rewrite_for_every_a() {
    for p in primes_one_mod_four(5, 61) {
        let ctx = PrimeContext::new_paley(p).unwrap();
        let t = KloostermanTable::new(&ctx, 2).unwrap();
        let n = ctx.n();
        for a in 1..n {
            let d = (kloosterman_rewrite_lhs(&ctx, a) - t.get(a * a % n)).norm();
            assert!(d < 1e-9, "p={p} a={a} dev={d}");
        }
    }
}

#[test]
fn gauss_sum_moduli_up_to_200() {
    for p in primes_one_mod_four(5, 200) {
        let ctx = PrimeContext::new_paley(p).unwrap();
        let r = (p as f64).sqrt();
        for j in 1..ctx.n() - 1 {
            let g = gauss_sum(&ctx, j).unwrap();
            assert!((g.norm() - r).abs() < 1e-8 * r, "p={p} j={j}");
        }
        let g = gauss_sum(&ctx, ctx.quadratic_index()).unwrap();
        assert!((g - Complex64::new(r, 0.0)).norm() < 1e-8);
    }
}

#[test]
fn kloosterman_tables_are_real_and_sum_like_brute_force() {
    for p in [5u64, 13, 17, 29] {
        let ctx = PrimeContext::new_paley(p).unwrap();
        let k2 = KloostermanTable::new(&ctx, 2).unwrap();
        for a in 1..ctx.n() {
            assert!(k2.get(a).im.abs() < 1e-9);
            assert!(k2.get(a).norm() <= 2.0 * (p as f64).sqrt() + 1e-9);
        }
        for k in [2usize, 3] {
            let t = KloostermanTable::new(&ctx, k).unwrap();
            let total: Complex64 = (1..ctx.n()).map(|a| t.get(a)).sum();
            let brute: Complex64 = (1..ctx.n()).map(|a| kloosterman_brute_force(&ctx, k, a)).sum();
            assert!((total - brute).norm() < 1e-8, "p={p} k={k}");
        }
    }
}

#[test]
fn explicit_constant_bounds() {
    for p in primes_one_mod_four(5, 61) {
        let ctx = PrimeContext::new_paley(p).unwrap();
        let pf = p as f64;
        assert!((charsum_pair(&ctx, 0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        for j in 1..ctx.n() - 1 {
            assert!(twisted_moment(&ctx, j).unwrap().norm() <= 2.0 * pf.powf(1.5));
            let a = charsum_pair(&ctx, j).unwrap();
            assert!(a.norm() <= 2.0 * pf);
            assert!((a - charsum_pair_via_kloosterman(&ctx, j).unwrap()).norm() < 1e-6);
        }
        assert!(twisted_moment(&ctx, 0).is_err());
    }
}

#[test]
fn weil_bound_random_polynomials() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for p in [13u64, 29, 53, 97] {
        let ctx = PrimeContext::new(p).unwrap();
        let mut tested = 0;
        for _ in 0..1000 {
            let deg = rng.random_range(1..=6);
            let mut c: Vec<i64> = (0..=deg).map(|_| rng.random_range(0..p as i64)).collect();
            if c[deg] == 0 {
                c[deg] = 1;
            }
            let r = weil_check(&ctx, &c).unwrap();
            if !r.is_square_form {
                tested += 1;
                assert_eq!(r.bound_holds, Some(true), "p={p} f={c:?} sum={}", r.sum);
            }
        }
        assert!(tested > 900);
    }
}

#[test]
fn weil_exhaustive_cubics_p13() {
    let ctx = PrimeContext::new(13).unwrap();
    for c0 in 0..13 {
        for c1 in 0..13 {
            for c2 in 0..13 {
                for lead in 1..13 {
                    let r = weil_check(&ctx, &[c0, c1, c2, lead]).unwrap();
                    if !r.is_square_form {
                        assert!(r.sum.unsigned_abs() as f64 <= 3.0 * 13f64.sqrt());
                    }
                }
            }
        }
    }
}

#[test]
fn kloosterman_correlation_ratios_are_recorded() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for p in [13u64, 29, 53] {
        let ctx = PrimeContext::new_paley(p).unwrap();
        let t = KloostermanTable::new(&ctx, 2).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let a: Vec<usize> = (0..4).map(|_| rng.random_range(1..p as usize)).collect();
            if has_odd_multiplicity(&a) {
                worst = worst.max(kloosterman_correlation(&ctx, &t, &a).norm() / (p as f64).powf(2.5));
            }
        }
        assert!(worst.is_finite());
        println!("p={p} max |sum prod K(a_i x)| / p^2.5 = {worst:.4}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn k2_convolution_matches_direct(pi in 0usize..4, a in 1usize..1000) {
        let p = [5u64, 13, 17, 29][pi];
        let ctx = PrimeContext::new(p).unwrap();
        let a = a % (p as usize - 1) + 1;
        let t = KloostermanTable::new(&ctx, 2).unwrap();
        prop_assert!((t.get(a) - kloosterman(&ctx, 2, a as i64).unwrap()).norm() < 1e-9);
        prop_assert!((t.get(a) - kloosterman_brute_force(&ctx, 2, a)).norm() < 1e-9);
    }
}
