//! Schur's q-Fibonacci polynomials `F_{n+2} = F_{n+1} + q^n F_n`,
//! `F_0 = 0`, `F_1 = 1`, evaluated along independent routes, plus the
//! ordinary Fibonacci numbers and the auxiliary sums `G_{n,m}`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::modarith::{lsym5, Modulus, Residue};
use crate::qanalogue::{IntPoly, QBase, QBinomialTable};

/// `F_n(q)` as an exact polynomial.
pub fn qfib_poly(n: u64) -> IntPoly {
    qfib_polys(n).pop().expect("sequence is nonempty")
}

/// `[F_0(q), ..., F_n(q)]`.
pub fn qfib_polys(n: u64) -> Vec<IntPoly> {
    let mut out = vec![IntPoly::zero(), IntPoly::one()];
    for k in 0..n.saturating_sub(1) as usize {
        let mut next = out[k + 1].clone();
        next.add_shifted(&out[k], k);
        out.push(next);
    }
    out.truncate(n as usize + 1);
    out
}

/// Raw O(n) recurrence on canonical lifts.
#[inline]
pub(crate) fn qfib_recurrence_raw(n: u64, alpha: u64, m: Modulus) -> u64 {
    if n == 0 {
        return 0;
    }
    let (mut f0, mut f1) = (0u64, 1 % m.get());
    let mut pw = 1 % m.get();
    for _ in 1..n {
        let f2 = m.add(f1, m.mul(pw, f0));
        f0 = f1;
        f1 = f2;
        pw = m.mul(pw, alpha);
    }
    f1
}

/// `F_n(alpha) mod p` by running the defining recurrence.
pub fn qfib_mod_recurrence(n: u64, alpha: Residue) -> Residue {
    let p = alpha.modulus();
    Residue::new(qfib_recurrence_raw(n, alpha.value(), Modulus::new(p)), p)
}

/// The summation window for `F_n` via Andrews' formula with `N = n - 1`:
/// every `j` for which `floor((N - 5j)/2)` can land in `[0, N]`, padded by one
/// on each side.
pub fn andrews_j_range(n: u64) -> (i64, i64) {
    let n = n as i64;
    let lo = -((n + 1 + 4) / 5) - 1;
    let hi = (n - 1).div_euclid(5) + 1;
    (lo, hi)
}

fn andrews_sum(n: u64, table: &QBinomialTable, range: (i64, i64)) -> Residue {
    let base = table.base();
    let p = base.p();
    let m = Modulus::new(p);
    let big_n = (n - 1) as i64;
    let mut acc = 0u64;
    for j in range.0..=range.1 {
        let lower = (big_n - 5 * j).div_euclid(2);
        let qb = table.get(big_n as u64, lower);
        if qb.is_zero() {
            continue;
        }
        let twice = j * (5 * j + 1);
        assert!(twice % 2 == 0 && twice >= 0, "j(5j+1) is even and non-negative");
        let exp = (twice / 2) as u64 % base.ord();
        let term = m.mul(m.pow(base.alpha().value(), exp), qb.value());
        acc = if j % 2 == 0 {
            m.add(acc, term)
        } else {
            m.sub(acc, term)
        };
    }
    Residue::new(acc, p)
}

/// `F_n(alpha) mod p` through Andrews' explicit sum
/// `F_{N+1} = sum_j (-1)^j q^{j(5j+1)/2} [N, floor((N-5j)/2)]_q`, with each
/// Gaussian binomial evaluated by q-Lucas reduction. `F_0 = 0`.
pub fn qfib_mod_andrews(n: u64, base: &QBase) -> Residue {
    if n == 0 {
        return Residue::zero(base.p());
    }
    let table = QBinomialTable::new(*base, n - 1);
    andrews_sum(n, &table, andrews_j_range(n))
}

/// Same as [`qfib_mod_andrews`] over an explicit `j` window; used to check
/// that widening the window changes nothing.
pub fn qfib_mod_andrews_window(n: u64, base: &QBase, lo: i64, hi: i64) -> Residue {
    if n == 0 {
        return Residue::zero(base.p());
    }
    let table = QBinomialTable::new(*base, n - 1);
    andrews_sum(n, &table, (lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QFibPathResult {
    pub recurrence: Residue,
    pub andrews: Residue,
    pub agree: bool,
}

pub fn qfib_paths(n: u64, base: &QBase) -> QFibPathResult {
    let recurrence = qfib_mod_recurrence(n, base.alpha());
    let andrews = qfib_mod_andrews(n, base);
    QFibPathResult {
        recurrence,
        andrews,
        agree: recurrence == andrews,
    }
}

/// `(F_n, F_{n+1})` by fast doubling.
fn fib_pair(n: u64) -> (BigUint, BigUint) {
    if n == 0 {
        return (BigUint::zero(), BigUint::one());
    }
    let (a, b) = fib_pair(n / 2);
    // F_2k = F_k (2F_{k+1} - F_k), F_{2k+1} = F_k^2 + F_{k+1}^2
    let c = &a * (&b * 2u32 - &a);
    let d = &a * &a + &b * &b;
    if n % 2 == 0 {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

pub fn fib(n: u64) -> BigUint {
    fib_pair(n).0
}

/// `F_n mod p` by fast doubling, `O(log n)` multiplications.
pub fn fib_mod(n: u64, p: u64) -> Residue {
    let m = Modulus::new(p);
    let (mut a, mut b) = (0u64, 1 % p);
    for bit in (0..64 - n.leading_zeros()).rev() {
        let c = m.mul(a, m.sub(m.add(b, b), a));
        let d = m.add(m.mul(a, a), m.mul(b, b));
        if (n >> bit) & 1 == 0 {
            (a, b) = (c, d);
        } else {
            (a, b) = (d, m.add(c, d));
        }
    }
    Residue::new(a, p)
}

/// `G_{n,m} = (-1)^n sum_{k in 5Z} { C(n, 3n+k) - C(n, 3(n - (m/5) m) + k) }`,
/// where `(m/5)` is the Legendre symbol mod 5. An exact integer.
pub fn g_value(n: u64, m: i64) -> BigInt {
    let class_sum = |residue: i64| -> BigInt {
        let r = residue.rem_euclid(5) as u64;
        let mut sum = BigInt::zero();
        let mut c = BigInt::one();
        for j in 0..=n {
            if j % 5 == r {
                sum += &c;
            }
            c = c * (n - j) / (j + 1);
        }
        sum
    };
    let n_i = n as i64;
    let shifted = 3 * (n_i - lsym5(m) as i64 * m);
    let diff = class_sum(3 * n_i) - class_sum(shifted);
    if n % 2 == 0 {
        diff
    } else {
        -diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::prime_sieve;
    use num_integer::Integer;
    use num_traits::ToPrimitive;

    #[test]
    fn poly_examples() {
        assert!(qfib_poly(0).is_zero());
        assert_eq!(qfib_poly(1), IntPoly::one());
        assert_eq!(qfib_poly(2), IntPoly::one());
        assert_eq!(qfib_poly(3), IntPoly::from_i64s(&[1, 1]));
        assert_eq!(qfib_poly(5), IntPoly::from_i64s(&[1, 1, 1, 1, 1]));
        assert_eq!(qfib_poly(5).to_string(), "1 + q + q^2 + q^3 + q^4");
    }

    #[test]
    fn poly_recurrence_holds() {
        let seq = qfib_polys(122);
        for n in 0..=120 {
            let lhs = &(&seq[n + 2] - &seq[n + 1]) - &seq[n].shift(n);
            assert!(lhs.is_zero(), "n = {n}");
            assert_eq!(BigInt::from(fib(n as u64)), seq[n].eval_at_one());
        }
    }

    #[test]
    fn recurrence_examples() {
        // F_7(2) = 1135
        assert_eq!(qfib_poly(7).eval(&BigInt::from(2)), BigInt::from(1135));
        assert_eq!(qfib_mod_recurrence(7, Residue::new(2, 7)).value(), 1);
        assert_eq!(qfib_mod_recurrence(13, Residue::new(2, 13)).value(), 0);
        assert_eq!(qfib_mod_recurrence(0, Residue::new(2, 13)).value(), 0);
        for p in [7u64, 11, 101] {
            for n in 0..200 {
                assert_eq!(qfib_mod_recurrence(n, Residue::one(p)), fib_mod(n, p));
            }
        }
    }

    #[test]
    fn andrews_examples() {
        let five = qfib_poly(5);
        for p in [7u64, 11, 13] {
            for a in 2..p {
                let b = QBase::new(Residue::new(a, p)).unwrap();
                assert_eq!(qfib_mod_andrews(5, &b), five.eval_mod(b.alpha()));
                assert_eq!(qfib_mod_andrews(1, &b).value(), 1);
                assert_eq!(qfib_mod_andrews(0, &b).value(), 0);
            }
        }
        let b = QBase::new(Residue::new(2, 7)).unwrap();
        assert_eq!(qfib_mod_andrews(7, &b).value(), 1);
    }

    fn horner(coeffs: &[u64], a: u64, m: Modulus) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| m.add(m.mul(acc, a), c))
    }

    #[test]
    fn triple_path_agreement() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        const EXACT_MAX: u64 = 201;
        let polys = qfib_polys(EXACT_MAX);
        for p in prime_sieve(200).into_iter().filter(|&p| p > 2) {
            let m = Modulus::new(p);
            let mut ns = vec![p - 1, p, p + 1];
            ns.extend((0..3).map(|_| rng.gen_range(0..=3 * p)));
            let reduced: Vec<Option<Vec<u64>>> = ns
                .iter()
                .map(|&n| (n <= EXACT_MAX).then(|| polys[n as usize].reduce_mod(p)))
                .collect();
            for a in 2..p {
                let b = QBase::new(Residue::new(a, p)).unwrap();
                for (&n, exact) in ns.iter().zip(&reduced) {
                    let paths = qfib_paths(n, &b);
                    assert!(paths.agree, "p={p} a={a} n={n}: {paths:?}");
                    if let Some(coeffs) = exact {
                        assert_eq!(paths.recurrence.value(), horner(coeffs, a, m), "p={p} a={a} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn widened_window_changes_nothing() {
        for p in [7u64, 13, 31, 97, 401] {
            for a in [2u64, 3, p - 2] {
                let b = QBase::new(Residue::new(a, p)).unwrap();
                for n in (1..=400).step_by(7) {
                    let (lo, hi) = andrews_j_range(n);
                    assert_eq!(
                        qfib_mod_andrews(n, &b),
                        qfib_mod_andrews_window(n, &b, lo - 3, hi + 3),
                        "p={p} a={a} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn fib_examples() {
        assert_eq!(fib(0), BigUint::zero());
        assert_eq!(fib(1), BigUint::one());
        assert_eq!(fib(10), BigUint::from(55u32));
        let f100 = fib(100);
        assert_eq!(f100.to_string(), "354224848179261915075");
        assert_eq!(fib_mod(100, 7).value(), (f100 % 7u32).to_u64().unwrap());
        let (mut a, mut b) = (BigUint::zero(), BigUint::one());
        for n in 0..300u64 {
            assert_eq!(fib(n), a);
            for p in [2u64, 5, 7, 1_000_000_007] {
                assert_eq!(fib_mod(n, p).value(), (&a % p).to_u64().unwrap());
            }
            let c = &a + &b;
            a = b;
            b = c;
        }
    }

    #[test]
    fn g_table_values() {
        assert_eq!(g_value(1, 1), BigInt::from(1));
        assert_eq!(g_value(1, 2), BigInt::from(0));
        assert_eq!(g_value(2, 2), BigInt::from(1));
        assert_eq!(g_value(3, 1), BigInt::from(3));
        // G_{2,1} = F_3 by the identity below; see g_identities.
        assert_eq!(g_value(2, 1), BigInt::from(2));
        for n in 1..=50 {
            assert!(g_value(n, 5).is_zero());
            assert!(g_value(n, 0).is_zero());
        }
    }

    #[test]
    fn g_identities() {
        for m in 1..=25i64 {
            for n in 1..=300u64 {
                assert_eq!(g_value(n, m) + g_value(n + 1, m), g_value(n + 2, m), "n={n} m={m}");
                if m % 5 != 0 {
                    let idx = (n as i64 + lsym5(m) as i64) as u64;
                    assert_eq!(g_value(n, m), BigInt::from(fib(idx)), "n={n} m={m}");
                }
            }
        }
        for n in 1..=100u64 {
            for m in -12..=12i64 {
                for m2 in -12..=12i64 {
                    if (m - m2).rem_euclid(5) == 0 || (m + m2).rem_euclid(5) == 0 {
                        assert_eq!(g_value(n, m), g_value(n, m2));
                    }
                }
            }
        }
    }

    #[test]
    fn g_direct_small_cases_match_definition() {
        // brute-force the k-sum over a wide window of k in 5Z
        let c = |n: i64, k: i64| -> BigInt {
            if k < 0 || k > n {
                BigInt::zero()
            } else {
                (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
            }
        };
        for n in 1..=30i64 {
            for m in -7..=7i64 {
                let s = lsym5(m) as i64;
                let mut total = BigInt::zero();
                for t in -40..=40i64 {
                    let k = 5 * t;
                    total += c(n, 3 * n + k) - c(n, 3 * (n - s * m) + k);
                }
                if n.is_odd() {
                    total = -total;
                }
                assert_eq!(g_value(n as u64, m), total, "n={n} m={m}");
            }
        }
    }
}
