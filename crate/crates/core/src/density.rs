//! Kummer field degrees, the entanglement indicator `C_g`, truncations of
//! the density `delta(a,d;t)` with a certified tail, and empirical counts of
//! primes with a prescribed residual index.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, invariant, Result};
use crate::modarith::{
    euler_phi, factorize, is_prime, kronecker, moebius, prime_sieve, primes_in_range, segments,
    Modulus,
};
use crate::parallel::ordered_map;

/// Rejects anything but square-free `g >= 2`.
pub fn check_base(g: i64) -> Result<u64> {
    if g < 2 {
        return domain(format!("g must be a square-free integer >= 2, got {g}"));
    }
    if !factorize(g as u64).is_square_free() {
        return domain(format!("g = {g} is not square-free"));
    }
    Ok(g as u64)
}

/// 2 if `2g | s` and `g = 1 (mod 4)`, else 1.
pub fn epsilon_g(g: i64, s: u64) -> Result<u64> {
    let g = check_base(g)?;
    if s == 0 {
        return domain("s must be positive");
    }
    Ok(if s % (2 * g) == 0 && g % 4 == 1 { 2 } else { 1 })
}

/// `[Q(zeta_s, g^(1/r)) : Q] = r phi(s) / epsilon_g(s)`.
pub fn field_degree(g: i64, s: u64, r: u64) -> Result<u64> {
    if r == 0 || s == 0 || s % r != 0 {
        return domain(format!("need r | s with r, s >= 1, got r = {r}, s = {s}"));
    }
    let eps = epsilon_g(g, s)?;
    let top = r as u128 * euler_phi(s) as u128;
    if top % eps as u128 != 0 {
        return invariant(format!("degree of K_({s},{r}) for g = {g} is not integral"));
    }
    u64::try_from(top / eps as u128)
        .or_else(|_| domain(format!("degree of K_({s},{r}) overflows u64")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeDegree {
    pub upper: u64,
    pub lower: u64,
    #[serde(with = "crate::bigserde::ratio")]
    pub ratio: BigRational,
    #[serde(with = "crate::bigserde::ratio")]
    pub bound: BigRational,
    pub holds: bool,
}

/// Relative degrees in the towers `Q(zeta_a, g^(1/b)) < Q(zeta_ap, g^(1/b))`
/// and `Q(zeta_a, g^(1/b)) < Q(zeta_a, g^(1/bp))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRatios {
    /// Ratio against the lower bound `(p - 1)/2`.
    pub cyclotomic_step: RelativeDegree,
    /// Ratio against the exact value `p`; present when `bp | a`.
    pub kummer_step: Option<RelativeDegree>,
}

pub fn degree_ratio_bounds(g: i64, a: u64, b: u64, p: u64) -> Result<DegreeRatios> {
    check_base(g)?;
    if a < 2 || b < 2 {
        return domain(format!("need a, b >= 2, got a = {a}, b = {b}"));
    }
    if p < 3 || !is_prime(p) {
        return domain(format!("p must be an odd prime, got {p}"));
    }
    if a % b != 0 {
        return domain(format!("need b | a, got a = {a}, b = {b}"));
    }
    let ratio = |upper: u64, lower: u64| BigRational::new(upper.into(), lower.into());
    let base = field_degree(g, a, b)?;
    let up = field_degree(g, a * p, b)?;
    let r = ratio(up, base);
    let bound = BigRational::new((p - 1).into(), 2.into());
    let cyclotomic_step = RelativeDegree {
        upper: up,
        lower: base,
        holds: r >= bound,
        ratio: r,
        bound,
    };
    let kummer_step = if a % (b * p) == 0 {
        let up = field_degree(g, a, b * p)?;
        let r = ratio(up, base);
        let bound = BigRational::from_integer(p.into());
        Some(RelativeDegree {
            upper: up,
            lower: base,
            holds: r == bound,
            ratio: r,
            bound,
        })
    } else {
        None
    };
    Ok(DegreeRatios {
        cyclotomic_step,
        kummer_step,
    })
}

/// Discriminant of `Q(sqrt g)` for square-free `g`.
pub fn quadratic_discriminant(g: u64) -> u64 {
    if g % 4 == 1 {
        g
    } else {
        4 * g
    }
}

/// `C_g(b, f, v)`: whether `sigma_b` fixes `Q(zeta_f) /\ K_(v,v)`.
///
/// The intersection is taken to be `Q(zeta_m)`, `m = gcd(f, v)`, joined with
/// `sqrt g` exactly when `v` is even and the discriminant `D` of `Q(sqrt g)`
/// divides `f`. Then `sigma_b` is trivial iff `b = 1 (mod m)` and, in the
/// joined case, `(D/b) = 1`.
pub fn c_g(g: i64, b: u64, f: u64, v: u64) -> Result<u8> {
    let g = check_base(g)?;
    if f == 0 || v == 0 {
        return domain("f and v must be positive");
    }
    if b.gcd(&f) != 1 {
        return domain(format!("sigma_b needs gcd(b, f) = 1, got b = {b}, f = {f}"));
    }
    let m = f.gcd(&v);
    if b % m != 1 % m {
        return Ok(0);
    }
    let disc = quadratic_discriminant(g);
    if v % 2 == 0 && f % disc == 0 && kronecker(disc as i64, b) != 1 {
        return Ok(0);
    }
    Ok(1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaTerm {
    pub n: u64,
    pub mu: i8,
    pub c_g: u8,
    pub degree: u64,
    #[serde(with = "crate::bigserde::ratio")]
    pub term: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub g: i64,
    pub a: u64,
    pub d: u64,
    pub t: u64,
    pub truncation: u64,
    #[serde(with = "crate::bigserde::ratio")]
    pub partial_sum: BigRational,
    #[serde(with = "crate::bigserde::ratio")]
    pub tail_bound: BigRational,
    pub tail_derivation: String,
    pub terms: Vec<DeltaTerm>,
}

impl DeltaEstimate {
    /// `partial_sum - tail_bound`, a rigorous lower bound for the density.
    pub fn certificate(&self) -> BigRational {
        &self.partial_sum - &self.tail_bound
    }

    pub fn is_certified_positive(&self) -> bool {
        self.certificate().is_positive()
    }

    pub fn upper(&self) -> BigRational {
        &self.partial_sum + &self.tail_bound
    }
}

const EULER_PRIME_LIMIT: u64 = 100_000;
const FIXED_POINT_DIGITS: u32 = 40;

/// A rational upper bound for
/// `sum_{n square-free} 1/(n phi(n)) = prod_p (1 + 1/(p(p-1)))`.
///
/// The product over `p <= P` is rounded up at every step in fixed point;
/// the remaining factors are at most `exp(sum_{n > P} 1/(n(n-1))) = exp(1/P)`,
/// which is below `P/(P-1)`.
pub fn squarefree_reciprocal_upper() -> &'static BigRational {
    static UPPER: OnceLock<BigRational> = OnceLock::new();
    UPPER.get_or_init(|| {
        let scale = BigInt::from(10u32).pow(FIXED_POINT_DIGITS);
        let mut acc = scale.clone();
        for p in prime_sieve(EULER_PRIME_LIMIT) {
            let den = BigInt::from(p) * BigInt::from(p - 1);
            let num = &den + 1u32;
            acc = (acc * num).div_ceil(&den);
        }
        let p = BigInt::from(EULER_PRIME_LIMIT);
        BigRational::new(acc * &p, scale * (p - 1u32))
    })
}

fn tail_derivation(t: u64, phi_t: u64, n: u64) -> String {
    format!(
        "|term(n)| <= 1/[K:Q] and [K:Q] >= n t phi(n) phi(t) / 2, so tail <= \
         2/(t phi(t)) * sum_(n > {n}, square-free) 1/(n phi(n)) with t = {t}, \
         phi(t) = {phi_t}; the remaining sum is bounded by U - S_{n}, where \
         S_{n} is the exact sum up to {n} and U >= prod_p (1 + 1/(p(p-1))) is \
         the product over p <= {EULER_PRIME_LIMIT} rounded up at 10^-{FIXED_POINT_DIGITS} \
         times {EULER_PRIME_LIMIT}/{}",
        EULER_PRIME_LIMIT - 1
    )
}

/// Exact partial sum of `delta(a,d;t)` over square-free `n <= N` with
/// `gcd(n, d) | a`, and a rigorous bound on the omitted tail.
pub fn delta_truncated(g: i64, a: u64, d: u64, t: u64, n_max: u64) -> Result<DeltaEstimate> {
    check_base(g)?;
    if d == 0 || t == 0 || n_max == 0 {
        return domain("d, t and N must be positive");
    }
    let b = 1 + t * a;
    let f = d * t;
    // A progression 1 + ta mod dt sharing a factor with dt holds at most one
    // prime, so every term vanishes.
    let coprime = b.gcd(&f) == 1;

    let mut partial = BigRational::zero();
    let mut squarefree_sum = BigRational::zero();
    let mut terms = Vec::new();
    for n in 1..=n_max {
        let mu = moebius(n);
        if mu == 0 {
            continue;
        }
        let phi_n = euler_phi(n);
        squarefree_sum += BigRational::new(1.into(), BigInt::from(n) * BigInt::from(phi_n));
        if a % n.gcd(&d) != 0 {
            continue;
        }
        let s = d.lcm(&n) * t;
        let degree = field_degree(g, s, n * t)?;
        let c = if coprime { c_g(g, b, f, n * t)? } else { 0 };
        let term = BigRational::new(BigInt::from(mu as i64 * c as i64), degree.into());
        partial += &term;
        terms.push(DeltaTerm {
            n,
            mu,
            c_g: c,
            degree,
            term,
        });
    }
    let phi_t = euler_phi(t);
    let rest = squarefree_reciprocal_upper() - &squarefree_sum;
    if rest.is_negative() {
        return invariant("square-free reciprocal sum exceeds its upper bound");
    }
    let tail_bound = BigRational::new(2.into(), BigInt::from(t) * BigInt::from(phi_t)) * rest;
    Ok(DeltaEstimate {
        g,
        a,
        d,
        t,
        truncation: n_max,
        partial_sum: partial,
        tail_bound,
        tail_derivation: tail_derivation(t, phi_t, n_max),
        terms,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VCount {
    pub g: i64,
    pub a: u64,
    pub d: u64,
    pub t: u64,
    pub x: u64,
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witnesses: Option<Vec<u64>>,
}

/// Whether `g` has residual index exactly `t` modulo the prime `p`, i.e.
/// `g^((p-1)/t) = 1` and no proper divisor of `(p-1)/t` kills `g`.
pub fn has_residual_index(g: u64, p: u64, t: u64) -> bool {
    if g % p == 0 || (p - 1) % t != 0 {
        return false;
    }
    let m = Modulus::new(p);
    let g = g % p;
    let ord = (p - 1) / t;
    if m.pow(g, ord) != 1 {
        return false;
    }
    factorize(ord).primes().all(|q| m.pow(g, ord / q) != 1)
}

const COUNT_CHUNK: u64 = 1 << 18;

/// `#{p <= x : I_p(g) = t, p = 1 + ta (mod dt)}`, sequentially.
pub fn v_count(g: i64, a: u64, d: u64, t: u64, x: u64, collect_witnesses: bool) -> Result<VCount> {
    v_count_par(g, a, d, t, x, collect_witnesses, 1)
}

/// As [`v_count`], splitting the range over `workers` threads.
pub fn v_count_par(
    g: i64,
    a: u64,
    d: u64,
    t: u64,
    x: u64,
    collect_witnesses: bool,
    workers: usize,
) -> Result<VCount> {
    let gu = check_base(g)?;
    if d == 0 || t == 0 {
        return domain("d and t must be positive");
    }
    if x < 2 {
        return domain(format!("x must be at least 2, got {x}"));
    }
    let modulus = d * t;
    let target = (1 + t * a) % modulus;
    let chunks = ordered_map(workers, segments(2, x, COUNT_CHUNK), |range| {
        primes_in_range(*range.start(), *range.end())
            .into_iter()
            .filter(|&p| p % modulus == target && has_residual_index(gu, p, t))
            .collect::<Vec<u64>>()
    });
    let hits: Vec<u64> = chunks.into_iter().flatten().collect();
    Ok(VCount {
        g,
        a,
        d,
        t,
        x,
        count: hits.len() as u64,
        witnesses: collect_witnesses.then_some(hits),
    })
}
