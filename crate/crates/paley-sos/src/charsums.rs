//! Gauss sums, Kloosterman sums, Weil-bound checks and the specific twisted
//! moments and double character sums used in the norm analysis of Paley
//! graph matrices.
//!
//! Exact identities are exposed as pairs of independently computed values so
//! that callers (tests, the `verify` harness) can compare them; bounds stated
//! only up to constants are reported as measured ratios.

use crate::error::{Error, Result};
use crate::field::PrimeContext;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Gauss sum G(φ_j) = Σ_x φ_j(x) e_p(x), by direct summation.
pub fn gauss_sum(ctx: &PrimeContext, j: usize) -> Result<Complex64> {
    ctx.check_character_index(j)?;
    Ok((1..ctx.n()).map(|x| ctx.phi(j, x) * ctx.ep(x)).sum())
}

/// Values K_k(a) for every a ∈ F_p (index 0 holds K_k(0) = 0, the empty sum).
#[derive(Debug, Clone)]
pub struct KloostermanTable {
    p: u64,
    k: usize,
    values: Vec<Complex64>,
}

impl KloostermanTable {
    /// Computes K_k(a) for all a by k−1 multiplicative convolutions of
    /// a ↦ e_p(a) with itself: K_k(a) = Σ_x K_{k−1}(a x⁻¹) e_p(x).
    pub fn new(ctx: &PrimeContext, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("Kloosterman order k = {k} must be ≥ 2")));
        }
        let n = ctx.n();
        let inv: Vec<usize> = (0..n).map(|x| if x == 0 { 0 } else { ctx.inv(x).unwrap() }).collect();
        let mut cur: Vec<Complex64> = (0..n).map(|a| if a == 0 { ZERO } else { ctx.ep(a) }).collect();
        for _ in 1..k {
            let mut next = vec![ZERO; n];
            for (a, slot) in next.iter_mut().enumerate().skip(1) {
                let mut acc = ZERO;
                for x in 1..n {
                    acc += cur[a * inv[x] % n] * ctx.ep(x);
                }
                *slot = acc;
            }
            cur = next;
        }
        Ok(Self { p: ctx.p(), k, values: cur })
    }

    /// The prime.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The order k.
    pub fn order(&self) -> usize {
        self.k
    }

    /// K_k(a) for a residue a (K_k(0) = 0).
    pub fn get(&self, a: usize) -> Complex64 {
        self.values[a % self.values.len()]
    }

    /// All values, indexed by residue.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// K_k(a) for a single nonzero a.
///
/// K_2 is evaluated as Σ_x e_p(x + a x⁻¹) in O(p), K_3 as
/// Σ_{x,y} e_p(x + y + a (xy)⁻¹) in O(p²); higher orders use the
/// convolution table.
pub fn kloosterman(ctx: &PrimeContext, k: usize, a: i64) -> Result<Complex64> {
    let a = ctx.reduce(a);
    if a == 0 {
        return Err(Error::ZeroArgument);
    }
    let n = ctx.n();
    match k {
        0 | 1 => Err(Error::InvalidParameter(format!("Kloosterman order k = {k} must be ≥ 2"))),
        2 => Ok((1..n).map(|x| ctx.ep((x + a * ctx.inv(x).unwrap()) % n)).sum()),
        3 => {
            let mut acc = ZERO;
            for x in 1..n {
                for y in 1..n {
                    let z = a * ctx.inv(x * y % n).unwrap() % n;
                    acc += ctx.ep((x + y + z) % n);
                }
            }
            Ok(acc)
        }
        _ => Ok(KloostermanTable::new(ctx, k)?.get(a)),
    }
}

/// Brute-force K_k(a) by enumerating all (k−1)-tuples; a test oracle for small p.
pub fn kloosterman_brute_force(ctx: &PrimeContext, k: usize, a: usize) -> Complex64 {
    let n = ctx.n();
    let mut acc = ZERO;
    let mut tuple = vec![1usize; k - 1];
    loop {
        let prod = tuple.iter().fold(1usize, |acc, &x| acc * x % n);
        let last = a * ctx.inv(prod).unwrap() % n;
        let sum = tuple.iter().sum::<usize>() + last;
        acc += ctx.ep(sum % n);
        let mut i = 0;
        loop {
            if i == tuple.len() {
                return acc;
            }
            tuple[i] += 1;
            if tuple[i] < n {
                break;
            }
            tuple[i] = 1;
            i += 1;
        }
    }
}

/// Left side Σ_x χ(x² − 1) e_p(2ax) of the Kloosterman rewrite identity
/// (which equals K(a²) for a ≠ 0).
pub fn kloosterman_rewrite_lhs(ctx: &PrimeContext, a: usize) -> Complex64 {
    let n = ctx.n();
    (0..n)
        .map(|x| {
            let c = ctx.chi((x * x + n - 1) % n) as f64;
            ctx.ep(2 * a % n * x % n) * c
        })
        .sum()
}

/// Σ_{a∈F_p×} φ_j(a) K(a²)² for a non-trivial character φ_j.
pub fn twisted_moment(ctx: &PrimeContext, j: usize) -> Result<Complex64> {
    ctx.check_character_index(j)?;
    if j == 0 {
        return Err(Error::TrivialCharacter);
    }
    let table = KloostermanTable::new(ctx, 2)?;
    Ok(twisted_moment_with(ctx, j, &table))
}

fn twisted_moment_with(ctx: &PrimeContext, j: usize, table: &KloostermanTable) -> Complex64 {
    let n = ctx.n();
    (1..n)
        .map(|a| {
            let k = table.get(a * a % n);
            ctx.phi(j, a) * k * k
        })
        .sum()
}

/// Σ_a φ_j(a) K_k(a)^s conj(K_k(a))^t for a non-trivial φ_j.
///
/// `t = 0` is accepted (with `s + t ≥ 1`) so that the plain moments
/// Σ φ(a) K(a)^s can be expressed.
pub fn twisted_moment_general(ctx: &PrimeContext, j: usize, k: usize, s: u32, t: u32) -> Result<Complex64> {
    ctx.check_character_index(j)?;
    if j == 0 {
        return Err(Error::TrivialCharacter);
    }
    if s + t == 0 {
        return Err(Error::InvalidParameter("need s + t ≥ 1".into()));
    }
    let table = KloostermanTable::new(ctx, k)?;
    Ok(twisted_moment_general_with(ctx, j, &table, s, t))
}

/// [`twisted_moment_general`] with a precomputed Kloosterman table.
pub fn twisted_moment_general_with(ctx: &PrimeContext, j: usize, table: &KloostermanTable, s: u32, t: u32) -> Complex64 {
    (1..ctx.n())
        .map(|a| {
            let v = table.get(a);
            ctx.phi(j, a) * v.powu(s) * v.conj().powu(t)
        })
        .sum()
}

/// The normalisation p^{((k−1)(s+t)+1)/2} of the general twisted moment bound.
pub fn twisted_moment_scale(p: u64, k: usize, s: u32, t: u32) -> f64 {
    (p as f64).powf(((k as f64 - 1.0) * (s + t) as f64 + 1.0) / 2.0)
}

/// Σ_{x,y∈F_p} χ(x(x+1)y(y+1)) φ_j(x − y), by direct O(p²) summation.
///
/// For non-trivial φ_j the convention φ_j(0) = 0 applies; for j = 0 the
/// trivial character is 1 everywhere.
pub fn charsum_pair(ctx: &PrimeContext, j: usize) -> Result<Complex64> {
    ctx.check_character_index(j)?;
    let n = ctx.n();
    let w: Vec<i8> = (0..n).map(|x| ctx.chi(x * (x + 1) % n)).collect();
    let mut acc = ZERO;
    for x in 0..n {
        if w[x] == 0 {
            continue;
        }
        for y in 0..n {
            if w[y] == 0 {
                continue;
            }
            // The trivial character is taken to be identically 1 here (also at
            // x = y), so that the j = 0 sum factors as (Σ_x χ(x(x+1)))² = 1.
            let phi = if j == 0 { Complex64::new(1.0, 0.0) } else { ctx.phi(j, (x + n - y) % n) };
            acc += phi * (w[x] * w[y]) as f64;
        }
    }
    Ok(acc)
}

/// The Kloosterman-side expression φ̄_j(4) G(φ_j)/p · Σ_a φ̄_j(a) K(a²)²,
/// which equals [`charsum_pair`] for non-trivial φ_j.
pub fn charsum_pair_via_kloosterman(ctx: &PrimeContext, j: usize) -> Result<Complex64> {
    ctx.check_character_index(j)?;
    if j == 0 {
        return Err(Error::TrivialCharacter);
    }
    let n = ctx.n();
    let table = KloostermanTable::new(ctx, 2)?;
    let g = gauss_sum(ctx, j)?;
    let inner: Complex64 = (1..n)
        .map(|a| {
            let k = table.get(a * a % n);
            ctx.phi(j, a).conj() * k * k
        })
        .sum();
    Ok(ctx.phi(j, 4 % n).conj() * g / ctx.p() as f64 * inner)
}

/// Σ_{x∈F_p} Π_i K_k(a_i x), with the x = 0 term equal to zero.
pub fn kloosterman_correlation(ctx: &PrimeContext, table: &KloostermanTable, a: &[usize]) -> Complex64 {
    let n = ctx.n();
    (1..n)
        .map(|x| a.iter().fold(Complex64::new(1.0, 0.0), |acc, &ai| acc * table.get(ai * x % n)))
        .sum()
}

/// Whether some element of the multiset occurs an odd number of times.
pub fn has_odd_multiplicity(a: &[usize]) -> bool {
    let mut v = a.to_vec();
    v.sort_unstable();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            return true;
        }
        i = j;
    }
    false
}

/// Dense polynomials over F_p, coefficients from the constant term upward.
pub mod poly {
    use crate::field::PrimeContext;

    /// Removes trailing zero coefficients.
    pub fn trim(mut f: Vec<usize>) -> Vec<usize> {
        while f.last() == Some(&0) {
            f.pop();
        }
        f
    }

    /// Degree of a trimmed polynomial (`None` for the zero polynomial).
    pub fn degree(f: &[usize]) -> Option<usize> {
        if f.is_empty() {
            None
        } else {
            Some(f.len() - 1)
        }
    }

    /// Horner evaluation at x.
    pub fn eval(ctx: &PrimeContext, f: &[usize], x: usize) -> usize {
        let n = ctx.n();
        f.iter().rev().fold(0usize, |acc, &c| (acc * x + c) % n)
    }

    /// Formal derivative.
    pub fn derivative(ctx: &PrimeContext, f: &[usize]) -> Vec<usize> {
        let n = ctx.n();
        trim(f.iter().enumerate().skip(1).map(|(i, &c)| i % n * c % n).collect())
    }

    /// Product of two polynomials.
    pub fn mul(ctx: &PrimeContext, f: &[usize], g: &[usize]) -> Vec<usize> {
        if f.is_empty() || g.is_empty() {
            return Vec::new();
        }
        let n = ctx.n();
        let mut out = vec![0usize; f.len() + g.len() - 1];
        for (i, &a) in f.iter().enumerate() {
            for (j, &b) in g.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % n;
            }
        }
        trim(out)
    }

    /// Scales a polynomial to be monic.
    pub fn monic(ctx: &PrimeContext, f: &[usize]) -> Vec<usize> {
        let n = ctx.n();
        match f.last() {
            None => Vec::new(),
            Some(&lc) => {
                let inv = ctx.inv(lc).expect("nonzero leading coefficient");
                f.iter().map(|&c| c * inv % n).collect()
            }
        }
    }

    /// Euclidean division f = q·g + r.
    pub fn divmod(ctx: &PrimeContext, f: &[usize], g: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let n = ctx.n();
        let g = trim(g.to_vec());
        let dg = g.len() - 1;
        let inv_lc = ctx.inv(g[dg]).expect("division by zero polynomial");
        let mut r = trim(f.to_vec());
        if r.len() < g.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![0usize; r.len() - dg];
        while r.len() >= g.len() {
            let shift = r.len() - 1 - dg;
            let c = r[r.len() - 1] * inv_lc % n;
            q[shift] = c;
            for (i, &gi) in g.iter().enumerate() {
                r[shift + i] = (r[shift + i] + n - c * gi % n) % n;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    /// Monic greatest common divisor.
    pub fn gcd(ctx: &PrimeContext, f: &[usize], g: &[usize]) -> Vec<usize> {
        let mut a = trim(f.to_vec());
        let mut b = trim(g.to_vec());
        while !b.is_empty() {
            let (_, r) = divmod(ctx, &a, &b);
            a = b;
            b = r;
        }
        monic(ctx, &a)
    }

    /// Square-free decomposition (Yun) of a monic f with deg f < p:
    /// returns [a_1, a_2, ...] with f = Π a_i^i and each a_i square-free.
    pub fn square_free_decomposition(ctx: &PrimeContext, f: &[usize]) -> Vec<Vec<usize>> {
        let f = monic(ctx, &trim(f.to_vec()));
        let mut out = Vec::new();
        let df = derivative(ctx, &f);
        let mut a = gcd(ctx, &f, &df);
        let mut b = divmod(ctx, &f, &a).0;
        let mut c = divmod(ctx, &df, &a).0;
        let mut d = sub(ctx, &c, &derivative(ctx, &b));
        while b.len() > 1 {
            a = gcd(ctx, &b, &d);
            out.push(a.clone());
            b = divmod(ctx, &b, &a).0;
            c = divmod(ctx, &d, &a).0;
            d = sub(ctx, &c, &derivative(ctx, &b));
        }
        out
    }

    /// f − g.
    pub fn sub(ctx: &PrimeContext, f: &[usize], g: &[usize]) -> Vec<usize> {
        let n = ctx.n();
        let len = f.len().max(g.len());
        trim(
            (0..len)
                .map(|i| (f.get(i).copied().unwrap_or(0) + n - g.get(i).copied().unwrap_or(0)) % n)
                .collect(),
        )
    }

    /// Monic square root of a monic polynomial of even degree, if one exists
    /// (independent route to square detection, valid in odd characteristic).
    pub fn monic_sqrt(ctx: &PrimeContext, f: &[usize]) -> Option<Vec<usize>> {
        let n = ctx.n();
        let f = monic(ctx, &trim(f.to_vec()));
        let d = f.len().checked_sub(1)?;
        if d % 2 == 1 {
            return None;
        }
        let h = d / 2;
        let inv2 = ctx.inv(2).ok()?;
        // g = x^h + g_{h-1} x^{h-1} + ... ; match coefficients from the top.
        let mut g = vec![0usize; h + 1];
        g[h] = 1;
        for k in (0..h).rev() {
            // coefficient of x^{h+k} in g² is 2 g_k + Σ_{i+j=h+k, i,j>k} g_i g_j
            let mut s = 0usize;
            for i in (k + 1)..=h {
                let j = h + k - i;
                if j > k && j <= h {
                    s = (s + g[i] * g[j]) % n;
                }
            }
            g[k] = (f[h + k] + n - s) % n * inv2 % n;
        }
        if mul(ctx, &g, &g) == f {
            Some(g)
        } else {
            None
        }
    }
}

/// Outcome of [`weil_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeilReport {
    /// S = Σ_x χ(f(x)).
    pub sum: i64,
    /// Degree of f.
    pub degree: usize,
    /// Whether f = r·g² for a constant r and polynomial g.
    pub is_square_form: bool,
    /// Whether |S| ≤ d√p; `None` when f is of the excluded form.
    pub bound_holds: Option<bool>,
}

/// Computes Σ_x χ(f(x)) and checks the Weil bound |S| ≤ d√p when f is not of
/// the form r·g².  Coefficients are given from the constant term upward.
pub fn weil_check(ctx: &PrimeContext, coeffs: &[i64]) -> Result<WeilReport> {
    let f = poly::trim(coeffs.iter().map(|&c| ctx.reduce(c)).collect());
    let degree = match poly::degree(&f) {
        None | Some(0) => return Err(Error::DegeneratePolynomial),
        Some(d) => d,
    };
    let sum: i64 = (0..ctx.n()).map(|x| ctx.chi(poly::eval(ctx, &f, x)) as i64).sum();
    let is_square_form = is_square_form(ctx, &f);
    let bound_holds = if is_square_form {
        None
    } else {
        Some((sum.unsigned_abs() as f64) <= degree as f64 * (ctx.p() as f64).sqrt() + 1e-9)
    };
    Ok(WeilReport { sum, degree, is_square_form, bound_holds })
}

/// Whether f = r·g²: every factor of the square-free decomposition with odd
/// multiplicity must be trivial.  Falls back to a direct square root when
/// deg f ≥ p (where the derivative can vanish identically).
pub fn is_square_form(ctx: &PrimeContext, f: &[usize]) -> bool {
    let f = poly::trim(f.to_vec());
    if f.len() <= 1 {
        return true;
    }
    if f.len() - 1 >= ctx.n() {
        return poly::monic_sqrt(ctx, &f).is_some();
    }
    poly::square_free_decomposition(ctx, &f)
        .iter()
        .enumerate()
        .all(|(i, a)| (i + 1) % 2 == 0 || a.len() <= 1)
}
