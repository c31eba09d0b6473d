//! q-integers and Gaussian binomial coefficients, both as exact polynomials
//! and evaluated at a unit of `Z/pZ`.
//!
//! Evaluation at `alpha` of multiplicative order `d` never builds the
//! polynomial. It uses the q-Lucas reduction
//! `[n, m]_alpha = C(n div d, m div d) * [n mod d, m mod d]_alpha (mod p)`,
//! whose second factor only involves q-integers `[j]_alpha` with `j < d`,
//! all of which are units.

mod poly;

use num_bigint::BigInt;

use crate::error::{domain, Error, Result};
use crate::modarith::{binomial_mod, multiplicative_order, Modulus, Residue};

pub use poly::IntPoly;

/// `[n]_q = 1 + q + ... + q^(n-1)`.
pub fn q_integer(n: i64) -> Result<IntPoly> {
    if n <= 0 {
        return domain(format!("q-integer needs n >= 1, got {n}"));
    }
    Ok(IntPoly::from_coeffs(vec![BigInt::from(1); n as usize]))
}

/// `[n]_q! = [n]_q [n-1]_q ... [1]_q`; `[0]_q! = 1`.
pub fn q_factorial(n: u64) -> IntPoly {
    (1..=n as i64).fold(IntPoly::one(), |acc, k| {
        &acc * &q_integer(k).expect("k >= 1")
    })
}

/// Memoized Gaussian binomials built row by row with
/// `[n, m] = [n-1, m-1] + q^m [n-1, m]`.
///
/// Rows are appended on demand and never modified afterwards.
#[derive(Debug, Default)]
pub struct QPascal {
    rows: Vec<Vec<IntPoly>>,
}

impl QPascal {
    pub fn new() -> Self {
        QPascal {
            rows: vec![vec![IntPoly::one()]],
        }
    }

    /// Table with rows `0..=n_max` filled in.
    pub fn with_rows(n_max: usize) -> Self {
        let mut t = QPascal::new();
        t.extend_to(n_max);
        t
    }

    fn extend_to(&mut self, n: usize) {
        while self.rows.len() <= n {
            let prev = self.rows.last().expect("row 0 exists");
            let len = prev.len() + 1;
            let mut row = Vec::with_capacity(len);
            for m in 0..len {
                let mut entry = if m >= 1 {
                    prev[m - 1].clone()
                } else {
                    IntPoly::zero()
                };
                if m < prev.len() {
                    entry.add_shifted(&prev[m], m);
                }
                row.push(entry);
            }
            self.rows.push(row);
        }
    }

    pub fn get(&mut self, n: i64, m: i64) -> IntPoly {
        if n < 0 || m < 0 || m > n {
            return IntPoly::zero();
        }
        self.extend_to(n as usize);
        self.rows[n as usize][m as usize].clone()
    }

    /// Lookup without extending; `None` if row `n` has not been built.
    pub fn peek(&self, n: i64, m: i64) -> Option<&IntPoly> {
        if n < 0 || m < 0 || m > n {
            return None;
        }
        self.rows.get(n as usize).map(|row| &row[m as usize])
    }
}

/// The Gaussian binomial `[n, m]_q` as an exact polynomial; zero outside
/// `0 <= m <= n`.
pub fn q_binomial_poly(n: i64, m: i64) -> IntPoly {
    if n < 0 || m < 0 || m > n {
        return IntPoly::zero();
    }
    // Columns beyond m are never read, so only a trapezoid is built.
    let m = m.min(n - m) as usize;
    let mut row: Vec<IntPoly> = vec![IntPoly::one()];
    for r in 1..=n as usize {
        let width = (r + 1).min(m + 1);
        let mut next = Vec::with_capacity(width);
        for c in 0..width {
            let mut entry = if c >= 1 {
                row[c - 1].clone()
            } else {
                IntPoly::zero()
            };
            if c < row.len() && c < r {
                entry.add_shifted(&row[c], c);
            }
            next.push(entry);
        }
        row = next;
    }
    row.swap_remove(m)
}

/// A unit `alpha` of `Z/pZ` bundled with its multiplicative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QBase {
    alpha: Residue,
    ord: u64,
}

impl QBase {
    pub fn new(alpha: Residue) -> Result<Self> {
        let ord = multiplicative_order(alpha)?;
        Ok(QBase { alpha, ord })
    }

    /// Trusts the caller's order, checking only that `alpha^ord = 1`.
    pub fn with_order(alpha: Residue, ord: u64) -> Result<Self> {
        if ord == 0 || alpha.pow(ord).value() != 1 {
            return Err(Error::InternalInvariantViolation(format!(
                "{ord} is not an order of {alpha}"
            )));
        }
        Ok(QBase { alpha, ord })
    }

    pub fn alpha(self) -> Residue {
        self.alpha
    }

    pub fn ord(self) -> u64 {
        self.ord
    }

    pub fn p(self) -> u64 {
        self.alpha.modulus()
    }
}

/// `[n]_alpha` evaluated in `Z/pZ`. Vanishes exactly when `ord | n`.
pub fn q_integer_mod(n: u64, alpha: Residue) -> Residue {
    let p = alpha.modulus();
    if alpha.value() == 1 {
        return Residue::new(n, p);
    }
    let num = alpha.pow(n) - Residue::one(p);
    let den = alpha - Residue::one(p);
    num * den.inv().expect("alpha != 1")
}

/// `[n0, m0]_alpha` for `m0 <= n0 < ord`: every q-integer involved is a unit.
fn q_binomial_below_order(n0: u64, m0: u64, base: &QBase) -> u64 {
    let m = Modulus::new(base.p());
    let a = base.alpha().value();
    let k = m0.min(n0 - m0);
    let (mut num, mut den) = (1 % m.get(), 1 % m.get());
    for i in 1..=k {
        num = m.mul(num, m.sub(1, m.pow(a, n0 - k + i)));
        den = m.mul(den, m.sub(1, m.pow(a, i)));
    }
    m.mul(num, m.inv(den).expect("1 - alpha^i is a unit for i < ord"))
}

/// The Gaussian binomial `[n, m]_q` at `q = alpha`, via q-Lucas reduction.
pub fn q_binomial_mod(n: u64, m: i64, base: &QBase) -> Residue {
    let p = base.p();
    if m < 0 || m as u64 > n {
        return Residue::zero(p);
    }
    let m = m as u64;
    let d = base.ord();
    let (n1, n0) = (n / d, n % d);
    let (m1, m0) = (m / d, m % d);
    if m0 > n0 {
        return Residue::zero(p);
    }
    let outer = binomial_mod(n1, m1, p);
    if outer == 0 {
        return Residue::zero(p);
    }
    let inner = q_binomial_below_order(n0, m0, base);
    Residue::new(Modulus::new(p).mul(outer, inner), p)
}

/// Precomputed tables for many q-binomial evaluations at one `alpha`.
///
/// Stores `prod_{j<=i} (1 - alpha^j)` for `i < ord` with inverses, and
/// ordinary factorials mod p for the outer binomial.
#[derive(Debug, Clone)]
pub struct QBinomialTable {
    base: QBase,
    m: Modulus,
    qfact: Vec<u64>,
    qfact_inv: Vec<u64>,
    fact: Vec<u64>,
    fact_inv: Vec<u64>,
}

impl QBinomialTable {
    /// Table serving every `n <= n_max`.
    pub fn new(base: QBase, n_max: u64) -> Self {
        let p = base.p();
        let m = Modulus::new(p);
        let d = base.ord();
        let a = base.alpha().value();
        let inner_len = d.min(n_max + 1) as usize;
        let mut qfact = Vec::with_capacity(inner_len);
        let mut acc = 1 % p;
        let mut pw = 1 % p;
        qfact.push(acc);
        for _ in 1..inner_len {
            pw = m.mul(pw, a);
            acc = m.mul(acc, m.sub(1, pw));
            qfact.push(acc);
        }
        let qfact_inv = batch_inverse(&qfact, m);

        let outer_len = ((n_max / d).min(p - 1) + 1) as usize;
        let mut fact = Vec::with_capacity(outer_len);
        let mut acc = 1 % p;
        fact.push(acc);
        for i in 1..outer_len as u64 {
            acc = m.mul(acc, i);
            fact.push(acc);
        }
        let fact_inv = batch_inverse(&fact, m);
        QBinomialTable {
            base,
            m,
            qfact,
            qfact_inv,
            fact,
            fact_inv,
        }
    }

    pub fn base(&self) -> QBase {
        self.base
    }

    fn outer(&self, n1: u64, m1: u64) -> u64 {
        if (n1 as usize) < self.fact.len() {
            let m = self.m;
            m.mul(
                self.fact[n1 as usize],
                m.mul(self.fact_inv[m1 as usize], self.fact_inv[(n1 - m1) as usize]),
            )
        } else {
            binomial_mod(n1, m1, self.m.get())
        }
    }

    pub fn get(&self, n: u64, m: i64) -> Residue {
        let p = self.m.get();
        if m < 0 || m as u64 > n {
            return Residue::zero(p);
        }
        let m = m as u64;
        let d = self.base.ord();
        let (n1, n0) = (n / d, n % d);
        let (m1, m0) = (m / d, m % d);
        if m0 > n0 {
            return Residue::zero(p);
        }
        assert!(
            (n0 as usize) < self.qfact.len(),
            "table built for smaller n"
        );
        let md = self.m;
        let inner = md.mul(
            self.qfact[n0 as usize],
            md.mul(
                self.qfact_inv[m0 as usize],
                self.qfact_inv[(n0 - m0) as usize],
            ),
        );
        Residue::new(md.mul(self.outer(n1, m1), inner), p)
    }
}

fn batch_inverse(xs: &[u64], m: Modulus) -> Vec<u64> {
    let mut prefix = Vec::with_capacity(xs.len());
    let mut acc = 1 % m.get();
    for &x in xs {
        prefix.push(acc);
        acc = m.mul(acc, x);
    }
    let mut inv = m.inv(acc).expect("all entries are units");
    let mut out = vec![0; xs.len()];
    for i in (0..xs.len()).rev() {
        out[i] = m.mul(inv, prefix[i]);
        inv = m.mul(inv, xs[i]);
    }
    out
}

/// Residue of `[k]_alpha / [l]_alpha` for `1 <= l <= p-1`, `k >= 1`,
/// `k = l (mod ord)`.
///
/// When `ord | l` both q-integers vanish mod p; the quotient is then taken
/// after cancelling `(1 - alpha^ord)`, leaving a ratio of geometric sums in
/// `alpha^ord`.
pub fn q_ratio(k: i64, l: i64, base: &QBase) -> Result<Residue> {
    let p = base.p();
    let d = base.ord() as i64;
    if l < 1 || l as u64 > p - 1 || k < 1 || (k - l).rem_euclid(d) != 0 {
        return domain(format!(
            "q_ratio needs 1 <= l <= p-1, k >= 1, k = l mod {d}; got k={k}, l={l}, p={p}"
        ));
    }
    let alpha = base.alpha();
    let ql = q_integer_mod(l as u64, alpha);
    if !ql.is_zero() {
        return Ok(q_integer_mod(k as u64, alpha) * ql.inv()?);
    }
    let step = alpha.pow(d as u64);
    let num = geometric_sum(step, (k / d) as u64);
    let den = geometric_sum(step, (l / d) as u64);
    Ok(num * den.inv()?)
}

/// `1 + r + ... + r^(count-1)` in `Z/pZ`.
fn geometric_sum(r: Residue, count: u64) -> Residue {
    let p = r.modulus();
    if r.value() == 1 {
        return Residue::new(count, p);
    }
    (r.pow(count) - Residue::one(p)) * (r - Residue::one(p)).inv().expect("r != 1")
}

/// Residue of
/// `C_k = ([p-k-1] ... [p-k-ord]) / ([k+ord] ... [k+1])` at `alpha`, for
/// `0 <= k <= p-1-ord`.
///
/// Each denominator factor `[k+i]` is paired with the unique numerator
/// factor `[p-k-j]`, `1 <= j <= ord`, in the same class mod `ord`, and the
/// pairs are evaluated with [`q_ratio`].
pub fn c_k(k: i64, base: &QBase) -> Result<Residue> {
    let p = base.p() as i64;
    let d = base.ord() as i64;
    if k < 0 || k > p - 1 - d {
        return domain(format!("c_k needs 0 <= k <= p-1-ord = {}, got {k}", p - 1 - d));
    }
    let mut acc = Residue::one(p as u64);
    for i in 1..=d {
        // j = p - 2k - i (mod d), taken in 1..=d
        let j = (p - 2 * k - i - 1).rem_euclid(d) + 1;
        acc = acc * q_ratio(p - k - j, k + i, base)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::{prime_sieve, reduce_rational, Rational};
    use num_integer::Integer;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};

    fn base(a: u64, p: u64) -> QBase {
        QBase::new(Residue::new(a, p)).unwrap()
    }

    fn binom(n: u64, k: u64) -> BigInt {
        (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn q_integer_examples() {
        assert_eq!(q_integer(1).unwrap(), IntPoly::one());
        assert_eq!(q_integer(3).unwrap(), IntPoly::from_i64s(&[1, 1, 1]));
        assert!(q_integer(0).is_err());
        assert!(q_integer(-2).is_err());
        for n in 1..=50 {
            assert_eq!(q_integer(n).unwrap().eval_at_one(), BigInt::from(n));
        }
    }

    #[test]
    fn q_binomial_poly_examples() {
        // (1 + q^2)(1 + q + q^2)
        assert_eq!(q_binomial_poly(4, 2), IntPoly::from_i64s(&[1, 1, 2, 1, 1]));
        assert!(q_binomial_poly(3, 4).is_zero());
        assert!(q_binomial_poly(3, -1).is_zero());
        assert!(q_binomial_poly(-1, 0).is_zero());
        for n in 0..10 {
            assert_eq!(q_binomial_poly(n, 0), IntPoly::one());
        }
    }

    #[test]
    fn pascal_variant_matches_product_formula() {
        let mut table = QPascal::new();
        for n in 0..=20u64 {
            for m in 0..=n {
                let num = &q_factorial(n);
                let den = &q_factorial(m) * &q_factorial(n - m);
                let expected = num.div_exact(&den).expect("Gaussian binomial is a polynomial");
                assert_eq!(table.get(n as i64, m as i64), expected, "[{n},{m}]");
                assert_eq!(q_binomial_poly(n as i64, m as i64), expected);
            }
        }
    }

    #[test]
    fn q_one_limit_and_symmetry() {
        let t = QPascal::with_rows(60);
        for n in 0..=60i64 {
            for m in 0..=n {
                let poly = t.peek(n, m).unwrap();
                assert_eq!(poly.eval_at_one(), binom(n as u64, m as u64));
                if n <= 40 {
                    assert_eq!(poly, t.peek(n, n - m).unwrap());
                }
            }
        }
    }

    #[test]
    fn q_binomial_mod_examples() {
        let b = base(2, 7);
        assert_eq!(b.ord(), 3);
        assert_eq!(q_binomial_mod(6, 3, &b).value(), 2);
        assert_eq!(q_binomial_poly(6, 3).eval_mod(Residue::new(2, 7)).value(), 2);
        for n in 0..20 {
            assert_eq!(q_binomial_mod(n, 0, &b).value(), 1);
        }
        assert_eq!(q_binomial_mod(6, 7, &b).value(), 0);
        assert_eq!(q_binomial_mod(6, -1, &b).value(), 0);
    }

    #[test]
    fn q_lucas_against_exact_polynomials_small_primes() {
        let t = QPascal::with_rows(3 * 31);
        for p in prime_sieve(31).into_iter().filter(|&p| p > 2) {
            for a in 2..p - 1 {
                let b = base(a, p);
                let table = QBinomialTable::new(b, 3 * p);
                for n in 0..3 * p {
                    for m in 0..=n {
                        let exact = t.peek(n as i64, m as i64).unwrap().eval_mod(b.alpha());
                        assert_eq!(q_binomial_mod(n, m as i64, &b), exact, "p={p} a={a} [{n},{m}]");
                        assert_eq!(table.get(n, m as i64), exact);
                    }
                }
            }
        }
    }

    #[test]
    fn q_binomial_at_one_is_ordinary_binomial() {
        let b = base(1, 13);
        assert_eq!(b.ord(), 1);
        for n in 0..60u64 {
            for m in 0..=n {
                let expected = binom(n, m).mod_floor(&BigInt::from(13)).to_u64().unwrap();
                assert_eq!(q_binomial_mod(n, m as i64, &b).value(), expected);
            }
        }
    }

    #[test]
    fn q_ratio_examples() {
        let b = base(2, 7);
        assert_eq!(q_ratio(5, 2, &b).unwrap().value(), 1);
        assert_eq!(q_ratio(6, 3, &b).unwrap().value(), 2);
        assert_eq!(q_ratio(4, 4, &b).unwrap().value(), 1);
        assert!(q_ratio(5, 3, &b).is_err());
        assert!(q_ratio(3, 0, &b).is_err());
        assert!(q_ratio(3, 7, &b).is_err());
    }

    fn exact_q_int(n: i64, alpha: &BigRational) -> BigRational {
        (0..n).fold(BigRational::zero(), |acc, i| acc + num_traits::pow(alpha.clone(), i as usize))
    }

    fn reduce(x: &BigRational, p: u64) -> u64 {
        let pb = BigInt::from(p);
        let num = x.numer().mod_floor(&pb).to_u64().unwrap();
        let den = x.denom().mod_floor(&pb).to_u64().unwrap();
        let m = Modulus::new(p);
        m.mul(num, m.inv(den).expect("denominator prime to p"))
    }

    #[test]
    fn q_ratio_matches_exact_rational_quotient() {
        for p in [5u64, 7, 11, 13] {
            for alpha in [
                Rational::integer(2),
                Rational::integer(3),
                Rational::new(1, 2).unwrap(),
                Rational::new(2, 3).unwrap(),
            ] {
                let Ok(a) = reduce_rational(alpha, p) else { continue };
                if a.value() == 1 {
                    continue;
                }
                let b = QBase::new(a).unwrap();
                let exact_alpha = BigRational::new(alpha.numerator().into(), alpha.denominator().into());
                for l in 1..p as i64 {
                    let mut k = l;
                    while k < 3 * p as i64 {
                        let exact = exact_q_int(k, &exact_alpha) / exact_q_int(l, &exact_alpha);
                        assert_eq!(q_ratio(k, l, &b).unwrap().value(), reduce(&exact, p));
                        k += b.ord() as i64;
                    }
                }
            }
        }
    }

    #[test]
    fn c_k_examples() {
        let b = base(2, 7);
        // [6][5][4] / ([3][2][1]) at 2 is 1395
        assert_eq!(c_k(0, &b).unwrap().value(), 1395 % 7);
        assert_eq!(c_k(0, &b).unwrap().value(), 2);
        assert!(c_k(4, &b).is_err());
        assert!(c_k(-1, &b).is_err());
    }

    #[test]
    fn c_k_matches_exact_rational_product() {
        for p in [7u64, 11, 13, 17] {
            for a in 2..p - 1 {
                let b = base(a, p);
                let d = b.ord() as i64;
                let alpha = BigRational::from_integer(BigInt::from(a));
                for k in 0..=(p as i64 - 1 - d) {
                    let mut exact = BigRational::one();
                    for i in 1..=d {
                        exact *= exact_q_int(p as i64 - k - i, &alpha);
                        exact /= exact_q_int(k + i, &alpha);
                    }
                    let r = c_k(k, &b).unwrap();
                    assert_eq!(r.value(), reduce(&exact, p), "p={p} a={a} k={k}");
                    assert!(!r.is_zero());
                }
            }
        }
    }
}
