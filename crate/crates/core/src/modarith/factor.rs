use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const TRIAL_LIMIT: u64 = 1_000_000;
const RHO_SEED: u64 = 0x5eed_f1b0;

// Deterministic Miller-Rabin witnesses; correct for every n < 3.3 * 10^24.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Prime factorization as `(prime, exponent)` pairs with strictly
/// increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn value(&self) -> u64 {
        self.0.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn is_square_free(&self) -> bool {
        self.0.iter().all(|&(_, e)| e == 1)
    }

    fn from_primes(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        let mut out: Vec<(u64, u32)> = Vec::new();
        for p in primes {
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        Factorization(out)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of the odd
/// composite `n`, retrying with fresh constants from the seeded stream.
fn rho(n: u64, rng: &mut ChaCha8Rng) -> u64 {
    loop {
        let c = rng.gen_range(1..n);
        let mut y = rng.gen_range(0..n);
        let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // batch overshot; back up one step at a time
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
}

fn split_into(n: u64, out: &mut Vec<u64>, rng: &mut ChaCha8Rng) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho(n, rng);
    split_into(d, out, rng);
    split_into(n / d, out, rng);
}

/// Complete factorization: trial division below 10^6, then Pollard rho
/// driven by a fixed seed so repeated runs are identical.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize expects a positive integer");
    let mut n = n;
    let mut primes = Vec::new();
    while n % 2 == 0 {
        primes.push(2);
        n /= 2;
    }
    let mut d = 3u64;
    while d < TRIAL_LIMIT && d * d <= n {
        while n % d == 0 {
            primes.push(d);
            n /= d;
        }
        d += 2;
    }
    if n > 1 {
        if d * d > n {
            primes.push(n);
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(RHO_SEED);
            split_into(n, &mut primes, &mut rng);
        }
    }
    Factorization::from_primes(primes)
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .factors()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

pub fn moebius(n: u64) -> i8 {
    let f = factorize(n);
    if !f.is_square_free() {
        0
    } else if f.factors().len() % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::{prop_assert, prop_assert_eq, proptest};

    #[test]
    fn small_factorizations() {
        assert_eq!(factorize(1).factors(), &[]);
        assert_eq!(factorize(12).factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(97).factors(), &[(97, 1)]);
        assert_eq!(factorize(1 << 40).factors(), &[(2, 40)]);
    }

    #[test]
    fn cross_multiplied_example() {
        let f = factorize(2_938_415_278);
        assert_eq!(f.value(), 2_938_415_278);
        assert!(f.primes().all(is_prime));
    }

    #[test]
    fn rho_handles_large_semiprimes() {
        let (p, q) = (1_000_003u64, 1_000_033u64);
        assert_eq!(factorize(p * q).factors(), &[(p, 1), (q, 1)]);
        let (p, q) = (4_294_967_291u64, 4_294_967_279u64);
        assert_eq!(factorize(p * q).factors(), &[(q, 1), (p, 1)]);
        let n = 1_000_003u64 * 1_000_003 * 13;
        assert_eq!(factorize(n).factors(), &[(13, 1), (1_000_003, 2)]);
    }

    #[test]
    fn miller_rabin_against_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        // strong pseudoprimes to several small bases
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn phi_and_moebius_examples() {
        assert_eq!(euler_phi(5), 4);
        assert_eq!(euler_phi(55), 40);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(4), 0);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(30), -1);
    }

    #[test]
    fn phi_and_moebius_brute_force() {
        for n in 1..500u64 {
            let phi = (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64;
            assert_eq!(euler_phi(n), phi);
            // sum_{d | n} mu(d) = [n == 1]
            let s: i32 = (1..=n).filter(|d| n % d == 0).map(|d| moebius(d) as i32).sum();
            assert_eq!(s, (n == 1) as i32);
        }
    }

    #[test]
    fn ten_thousand_random_factorizations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=1_000_000_000_000u64);
            let f = factorize(n);
            assert_eq!(f.value(), n);
            assert!(f.primes().all(is_prime));
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(n in 1u64..u64::MAX / 2) {
            let f = factorize(n);
            prop_assert_eq!(f.factors().iter().fold(1u128, |acc, &(p, e)| acc * (p as u128).pow(e)), n as u128);
            prop_assert!(f.primes().all(is_prime));
        }
    }
}
