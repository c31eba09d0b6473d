//! Segmented sieve of Eratosthenes.

use std::ops::RangeInclusive;

const SEGMENT: u64 = 1 << 18;

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit as usize + 1];
    let mut primes = Vec::new();
    for i in 2..=limit as usize {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit as usize {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Primes in `[lo, hi]`, ascending. Memory is `O(sqrt(hi) + segment)`.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    let lo = lo.max(2);
    if hi < lo {
        return Vec::new();
    }
    let base = simple_sieve(isqrt(hi));
    let mut out = Vec::new();
    let mut seg_lo = lo;
    let mut marks = vec![false; SEGMENT as usize];
    loop {
        let seg_hi = hi.min(seg_lo.saturating_add(SEGMENT - 1));
        let len = (seg_hi - seg_lo + 1) as usize;
        marks[..len].iter_mut().for_each(|m| *m = false);
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let mut j = (p * p).max(seg_lo.div_ceil(p) * p);
            while j <= seg_hi {
                marks[(j - seg_lo) as usize] = true;
                j += p;
            }
        }
        out.extend(
            marks[..len]
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| seg_lo + i as u64),
        );
        if seg_hi == hi {
            break;
        }
        seg_lo = seg_hi + 1;
    }
    out
}

/// All primes `<= limit`; empty below 2.
pub fn prime_sieve(limit: u64) -> Vec<u64> {
    primes_in_range(2, limit)
}

pub fn prime_count(limit: u64) -> usize {
    prime_sieve(limit).len()
}

/// Splits `[lo, hi]` into disjoint consecutive chunks of roughly `chunk`
/// integers, for handing to independent workers.
pub fn segments(lo: u64, hi: u64, chunk: u64) -> Vec<RangeInclusive<u64>> {
    let chunk = chunk.max(1);
    let mut out = Vec::new();
    let mut a = lo;
    while a <= hi {
        let b = hi.min(a.saturating_add(chunk - 1));
        out.push(a..=b);
        if b == hi {
            break;
        }
        a = b + 1;
    }
    out
}
