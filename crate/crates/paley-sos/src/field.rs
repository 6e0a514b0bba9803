//! Arithmetic in the prime field F_p: Legendre symbol, primitive roots,
//! additive and multiplicative characters.
//!
//! A [`PrimeContext`] precomputes everything the downstream kernels look up
//! in their inner loops, so that character evaluations are table reads.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Deterministic primality test by trial division (moduli here are small).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// All primes `p` in `[lo, hi]` with `p ≡ 1 (mod 4)`, by the sieve of Eratosthenes.
pub fn primes_one_mod_four(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let n = hi as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    if n >= 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(2) as usize..=n)
        .filter(|&k| sieve[k] && k % 4 == 1)
        .map(|k| k as u64)
        .collect()
}

/// Modular exponentiation `base^exp mod m`.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc = 1u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Immutable precomputed data for F_p.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    one_mod_four: bool,
    legendre: Vec<i8>,
    generator: u64,
    /// `exp_table[k] = h^k mod p` for `k = 0..p-1`.
    exp_table: Vec<u64>,
    /// `log_table[a] = k` with `h^k = a`; entry 0 unused.
    log_table: Vec<u64>,
    inverse: Vec<u64>,
    unity: Vec<Complex64>,
}

impl PrimeContext {
    /// Builds the context for a prime `p ≥ 3`.
    ///
    /// Composite moduli are rejected.  Primes with `p ≢ 1 (mod 4)` are
    /// accepted; the flag [`PrimeContext::is_one_mod_four`] records whether
    /// Paley structure is available.
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let n = p as usize;
        let half = (p - 1) / 2;
        let legendre: Vec<i8> = (0..p)
            .map(|a| match pow_mod(a, half, p) {
                0 => 0,
                1 => 1,
                _ => -1,
            })
            .collect();
        let factors = distinct_prime_factors(p - 1);
        let generator = (2..p)
            .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
            .ok_or_else(|| Error::Numerical(format!("no primitive root found mod {p}")))?;
        let mut exp_table = vec![0u64; n - 1];
        let mut log_table = vec![0u64; n];
        let mut acc = 1u64;
        for (k, slot) in exp_table.iter_mut().enumerate() {
            *slot = acc;
            log_table[acc as usize] = k as u64;
            acc = acc * generator % p;
        }
        let mut inverse = vec![0u64; n];
        for a in 1..p {
            let k = log_table[a as usize];
            inverse[a as usize] = exp_table[((p - 1 - k) % (p - 1)) as usize];
        }
        let unity = (0..p)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / p as f64))
            .collect();
        Ok(Self {
            p,
            one_mod_four: p % 4 == 1,
            legendre,
            generator,
            exp_table,
            log_table,
            inverse,
            unity,
        })
    }

    /// Builds the context and additionally requires `p ≡ 1 (mod 4)`.
    pub fn new_paley(p: u64) -> Result<Self> {
        let ctx = Self::new(p)?;
        ctx.require_paley()?;
        Ok(ctx)
    }

    /// Fails unless `p ≡ 1 (mod 4)`.
    pub fn require_paley(&self) -> Result<()> {
        if self.one_mod_four {
            Ok(())
        } else {
            Err(Error::NotOneModFour(self.p))
        }
    }

    /// The prime modulus.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The prime modulus as an index type.
    pub fn n(&self) -> usize {
        self.p as usize
    }

    /// Whether `p ≡ 1 (mod 4)`.
    pub fn is_one_mod_four(&self) -> bool {
        self.one_mod_four
    }

    /// The smallest primitive root `h` of F_p×.
    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Reduces an arbitrary integer into `0..p`.
    pub fn reduce(&self, a: i64) -> usize {
        a.rem_euclid(self.p as i64) as usize
    }

    /// The full Legendre table indexed by residue.
    pub fn legendre_table(&self) -> &[i8] {
        &self.legendre
    }

    /// Legendre symbol χ(a) ∈ {−1, 0, +1}.
    pub fn legendre(&self, a: i64) -> i8 {
        self.legendre[self.reduce(a)]
    }

    /// Legendre symbol of an already reduced residue.
    #[inline]
    pub fn chi(&self, a: usize) -> i8 {
        self.legendre[a]
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(&self, a: usize) -> Result<usize> {
        if a % self.n() == 0 {
            return Err(Error::ZeroArgument);
        }
        Ok(self.inverse[a % self.n()] as usize)
    }

    /// `h^k mod p`.
    pub fn gen_pow(&self, k: u64) -> usize {
        self.exp_table[(k % (self.p - 1)) as usize] as usize
    }

    /// Discrete logarithm base `h` of a nonzero residue.
    pub fn dlog(&self, a: usize) -> Result<u64> {
        if a % self.n() == 0 {
            return Err(Error::ZeroArgument);
        }
        Ok(self.log_table[a % self.n()])
    }

    /// The additive character e_p(x) = exp(2πi x / p).
    pub fn additive_character(&self, x: i64) -> Complex64 {
        self.unity[self.reduce(x)]
    }

    /// Table lookup of e_p(k) for a reduced residue.
    #[inline]
    pub fn ep(&self, k: usize) -> Complex64 {
        self.unity[k]
    }

    /// The multiplicative character φ_j(h^k) = exp(2πi jk/(p−1)), with φ_j(0) = 0.
    ///
    /// `j = (p−1)/2` gives the Legendre symbol.
    pub fn mult_character(&self, j: usize, a: i64) -> Result<Complex64> {
        self.check_character_index(j)?;
        Ok(self.phi(j, self.reduce(a)))
    }

    /// Unchecked multiplicative character on a reduced residue.
    #[inline]
    pub fn phi(&self, j: usize, a: usize) -> Complex64 {
        if a == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let d = self.p - 1;
        let k = self.log_table[a];
        let e = (j as u64 % d) * k % d;
        Complex64::from_polar(1.0, TAU * e as f64 / d as f64)
    }

    /// Index of the quadratic character χ among the φ_j.
    pub fn quadratic_index(&self) -> usize {
        ((self.p - 1) / 2) as usize
    }

    /// Validates a character index `0 ≤ j ≤ p − 2`.
    pub fn check_character_index(&self, j: usize) -> Result<()> {
        let max = (self.p - 2) as usize;
        if j > max {
            return Err(Error::CharacterIndex { index: j, p: self.p, max });
        }
        Ok(())
    }

    /// Nonzero quadratic residues in increasing order.
    pub fn quadratic_residues(&self) -> Vec<usize> {
        (1..self.n()).filter(|&a| self.legendre[a] == 1).collect()
    }

    /// The smallest quadratic non-residue.
    pub fn smallest_nonresidue(&self) -> usize {
        (1..self.n()).find(|&a| self.legendre[a] == -1).unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues_mod_13_by_enumerating_squares() {
        let ctx = PrimeContext::new(13).unwrap();
        let mut squares: Vec<usize> = (1..13usize).map(|x| x * x % 13).collect();
        squares.sort();
        squares.dedup();
        assert_eq!(squares, vec![1, 3, 4, 9, 10, 12]);
        assert_eq!(ctx.quadratic_residues(), squares);
    }

    #[test]
    fn generator_of_13_is_two_by_brute_force_order() {
        let ctx = PrimeContext::new(13).unwrap();
        assert_eq!(ctx.generator(), 2);
        let order = (1..=12).find(|&k| pow_mod(2, k, 13) == 1).unwrap();
        assert_eq!(order, 12);
    }

    #[test]
    fn composite_and_small_moduli_rejected() {
        assert_eq!(PrimeContext::new(4).unwrap_err(), Error::NotPrime(4));
        assert!(PrimeContext::new(1).is_err());
        assert!(PrimeContext::new(91).is_err());
    }

    #[test]
    fn three_mod_four_is_flagged_not_fatal() {
        let ctx = PrimeContext::new(7).unwrap();
        assert!(!ctx.is_one_mod_four());
        assert_eq!(PrimeContext::new_paley(7).unwrap_err(), Error::NotOneModFour(7));
    }

    #[test]
    fn legendre_examples() {
        let ctx = PrimeContext::new(13).unwrap();
        assert_eq!(ctx.legendre(0), 0);
        assert_eq!(ctx.legendre(1), 1);
        assert_eq!(ctx.legendre(2), -1);
        assert_eq!(ctx.legendre(12), 1);
        assert_eq!(ctx.legendre(-1), 1);
        assert_eq!(ctx.legendre(15), -1);
    }

    #[test]
    fn additive_character_examples() {
        let ctx = PrimeContext::new(13).unwrap();
        let one = ctx.additive_character(0);
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((ctx.additive_character(13) - one).norm() < 1e-15);
        let ctx5 = PrimeContext::new(5).unwrap();
        let z = ctx5.additive_character(1);
        assert!((z.re - 0.309017).abs() < 1e-6 && (z.im - 0.951057).abs() < 1e-6);
    }

    #[test]
    fn mult_character_examples() {
        let ctx = PrimeContext::new(13).unwrap();
        assert!((ctx.mult_character(0, 5).unwrap() - 1.0).norm() < 1e-12);
        let v = ctx.mult_character(6, 2).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(ctx.legendre(2), -1);
        for j in 0..12 {
            assert_eq!(ctx.mult_character(j, 0).unwrap(), Complex64::new(0.0, 0.0));
        }
        assert!(ctx.mult_character(12, 1).is_err());
    }

    #[test]
    fn quadratic_character_is_legendre() {
        for p in [5u64, 13, 17, 29, 37] {
            let ctx = PrimeContext::new(p).unwrap();
            let j = ctx.quadratic_index();
            for a in 0..p as usize {
                let v = ctx.phi(j, a);
                assert!((v.re - ctx.chi(a) as f64).abs() < 1e-12 && v.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sieve_lists_expected_primes() {
        assert_eq!(primes_one_mod_four(1, 61), vec![5, 13, 17, 29, 37, 41, 53, 61]);
        assert!(primes_one_mod_four(4, 4).is_empty());
        assert_eq!(primes_one_mod_four(13, 13), vec![13]);
    }

    #[test]
    fn inverse_and_log_tables_consistent() {
        let ctx = PrimeContext::new(29).unwrap();
        for a in 1..29usize {
            assert_eq!(a * ctx.inv(a).unwrap() % 29, 1);
            assert_eq!(ctx.gen_pow(ctx.dlog(a).unwrap()), a);
        }
        assert!(ctx.inv(0).is_err());
    }
}
