//! Modular and multiplicative arithmetic over `Z/pZ`.
//!
//! Everything here works on canonical lifts in `[0, p)`. Congruences are
//! compared on lifts, never on signed representatives.

mod factor;
mod sieve;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invariant, Error, Result, ValuationSign};

pub use factor::{euler_phi, factorize, is_prime, moebius, Factorization};
pub use sieve::{prime_count, prime_sieve, primes_in_range, segments};

/// A modulus with a precomputed Barrett constant for the common case
/// `m < 2^32`, where products of two residues fit in a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modulus {
    m: u64,
    barrett: u64,
}

impl Modulus {
    pub fn new(m: u64) -> Self {
        assert!(m >= 1, "modulus must be positive");
        let barrett = if m > 1 && m <= u32::MAX as u64 {
            u64::MAX / m
        } else {
            0
        };
        Modulus { m, barrett }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.m
    }

    #[inline]
    pub fn reduce_u64(self, x: u64) -> u64 {
        if self.barrett == 0 {
            return x % self.m;
        }
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let mut r = x - q * self.m;
        while r >= self.m {
            r -= self.m;
        }
        r
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        if self.barrett != 0 {
            self.reduce_u64(a * b)
        } else {
            ((a as u128 * b as u128) % self.m as u128) as u64
        }
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    pub fn pow(self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.m;
        let mut b = base % self.m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm; `None` when `gcd(a, m) != 1`.
    pub fn inv(self, a: u64) -> Option<u64> {
        let (mut r0, mut r1) = (self.m as i128, (a % self.m) as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        if r0 != 1 {
            return None;
        }
        Some(s0.rem_euclid(self.m as i128) as u64)
    }

    /// Canonical lift of a signed integer.
    pub fn lift(self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.m as i128) as u64
    }
}

/// An element of `Z/pZ` together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    /// Reduces `value` into `[0, modulus)`. The modulus is expected to be prime;
    /// only `modulus >= 2` is checked.
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        Residue {
            value: value % modulus,
            modulus,
        }
    }

    pub fn from_i64(value: i64, modulus: u64) -> Self {
        Residue::new(Modulus::new(modulus).lift(value), modulus)
    }

    pub fn zero(modulus: u64) -> Self {
        Residue::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Self {
        Residue::new(1, modulus)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, exp: u64) -> Residue {
        mod_pow(self, exp)
    }

    /// `self^exp` for a possibly negative exponent.
    pub fn pow_signed(self, exp: i64) -> Result<Residue> {
        if exp >= 0 {
            Ok(self.pow(exp as u64))
        } else {
            Ok(mod_inv(self)?.pow(exp.unsigned_abs()))
        }
    }

    pub fn inv(self) -> Result<Residue> {
        mod_inv(self)
    }

    fn with(self, value: u64) -> Residue {
        Residue {
            value,
            modulus: self.modulus,
        }
    }

    fn m(self) -> Modulus {
        Modulus::new(self.modulus)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        self.with(self.m().add(self.value, rhs.value))
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        self.with(self.m().sub(self.value, rhs.value))
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        self.with(self.m().mul(self.value, rhs.value))
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        self.with(self.m().sub(0, self.value))
    }
}

/// `base^exp`; `exp = 0` gives 1, including for a zero base.
pub fn mod_pow(base: Residue, exp: u64) -> Residue {
    base.with(base.m().pow(base.value, exp))
}

pub fn mod_inv(a: Residue) -> Result<Residue> {
    a.m()
        .inv(a.value)
        .map(|v| a.with(v))
        .ok_or(Error::NotInvertible {
            value: a.value,
            modulus: a.modulus,
        })
}

/// A reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return domain("zero denominator");
        }
        let g = num.gcd(&den);
        let sign = if den < 0 { -1 } else { 1 };
        Ok(Rational {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_one(self) -> bool {
        self.num == 1 && self.den == 1
    }

    /// `self - 1` as an exact fraction.
    pub fn minus_one(self) -> Rational {
        Rational::new(self.num - self.den, self.den).expect("denominator is nonzero")
    }

    /// `p`-adic valuation; `None` for zero (infinite valuation).
    pub fn valuation(self, p: u64) -> Option<i32> {
        if self.num == 0 {
            return None;
        }
        let count = |mut x: u64| {
            let mut v = 0;
            while x % p == 0 {
                x /= p;
                v += 1;
            }
            v
        };
        Some(count(self.num.unsigned_abs()) - count(self.den.unsigned_abs()))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse rational from {s:?}"));
        match s.trim().split_once('/') {
            Some((n, d)) => Rational::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(Rational::integer(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Image of `alpha` under `Z_(p) -> Z/pZ`.
pub fn reduce_rational(alpha: Rational, p: u64) -> Result<Residue> {
    let m = Modulus::new(p);
    if alpha.num.unsigned_abs() % p == 0 {
        return Err(Error::BadValuation {
            what: format!("alpha = {alpha}"),
            p,
            sign: ValuationSign::Positive,
        });
    }
    if alpha.den.unsigned_abs() % p == 0 {
        return Err(Error::BadValuation {
            what: format!("alpha = {alpha}"),
            p,
            sign: ValuationSign::Negative,
        });
    }
    let den_inv = m
        .inv(m.lift(alpha.den))
        .expect("denominator is prime to p");
    Ok(Residue::new(m.mul(m.lift(alpha.num), den_inv), p))
}

/// Legendre symbol `(a/p)` via Euler's criterion, for odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i8 {
    debug_assert!(p % 2 == 1);
    let m = Modulus::new(p);
    let r = m.pow(m.lift(a), (p - 1) / 2);
    match r {
        0 => 0,
        1 => 1,
        _ => {
            debug_assert_eq!(r, p - 1);
            -1
        }
    }
}

/// The Legendre symbol modulo 5 attached to the residual order in the
/// congruence theorem.
pub fn lsym5(m: i64) -> i8 {
    match m.rem_euclid(5) {
        0 => 0,
        1 | 4 => 1,
        _ => -1,
    }
}

/// Kronecker symbol `(a/n)` for `n >= 1`.
pub fn kronecker(a: i64, n: u64) -> i8 {
    assert!(n >= 1);
    let mut a = a as i128;
    let mut n = n as i128;
    let mut result = 1i8;
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    // Jacobi symbol for odd n.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Order of `a` in `(Z/pZ)^x`, found by stripping prime factors of `p - 1`.
pub fn multiplicative_order(a: Residue) -> Result<u64> {
    let p = a.modulus();
    multiplicative_order_with(a, &factorize(p - 1))
}

/// Same as [`multiplicative_order`] with the factorization of `p - 1`
/// supplied by the caller.
pub fn multiplicative_order_with(a: Residue, group_order: &Factorization) -> Result<u64> {
    if a.is_zero() {
        return Err(Error::NotInvertible {
            value: 0,
            modulus: a.modulus(),
        });
    }
    let m = a.m();
    let mut ord = a.modulus() - 1;
    debug_assert_eq!(group_order.value(), ord);
    for &(q, _) in group_order.factors() {
        while ord % q == 0 && m.pow(a.value, ord / q) == 1 {
            ord /= q;
        }
    }
    Ok(ord)
}

/// `I_p = (p - 1) / ord`.
pub fn residual_index(p: u64, ord: u64) -> Result<u64> {
    if ord == 0 || (p - 1) % ord != 0 {
        return invariant(format!("order {ord} does not divide p - 1 = {}", p - 1));
    }
    Ok((p - 1) / ord)
}

/// `C(n, k) mod p` by Lucas' theorem.
pub fn binomial_mod(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let m = Modulus::new(p);
    let (mut n, mut k) = (n, k);
    let mut acc = 1 % p;
    while k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        acc = m.mul(acc, small_binomial(nd, kd, m));
        n /= p;
        k /= p;
    }
    acc
}

/// `C(n, k) mod p` for `k <= n < p`.
fn small_binomial(n: u64, k: u64, m: Modulus) -> u64 {
    let k = k.min(n - k);
    let (mut num, mut den) = (1 % m.get(), 1 % m.get());
    for i in 0..k {
        num = m.mul(num, n - i);
        den = m.mul(den, i + 1);
    }
    m.mul(num, m.inv(den).expect("k! is a unit for k < p"))
}
