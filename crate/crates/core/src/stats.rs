//! Occurrence tables: for each applicable prime `p <= x`, the Fibonacci index
//! `n*` with `F_p(g) = F_{n*} (mod p)`, bucketed by index and by value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::congruence::{check_congruence, residual_data, Paths, Reason};
use crate::density::{check_base, has_residual_index, v_count};
use crate::error::{domain, invariant, Error, Result};
use crate::modarith::{is_prime, primes_in_range, segments, Rational};
use crate::parallel::ordered_map;
use crate::qfib::fib;

pub const DEFAULT_WITNESS_CAP: usize = 10_000;

/// Indices up to this bound get their exact Fibonacci value as key.
pub const EXACT_VALUE_LIMIT: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceOptions {
    /// Paths used to evaluate `F_p(g)`; all enabled paths must agree.
    pub paths: Paths,
    pub witness_cap: usize,
    pub workers: usize,
}

impl Default for OccurrenceOptions {
    fn default() -> Self {
        OccurrenceOptions {
            paths: Paths::PROPOSITION,
            witness_cap: DEFAULT_WITNESS_CAP,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexBucket {
    pub count: u64,
    /// The smallest primes of the bucket, at most `witness_cap` of them.
    pub primes: Vec<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueBucket {
    pub indices: Vec<u64>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceReport {
    pub g: i64,
    pub x: u64,
    pub paths: Paths,
    pub witness_cap: usize,
    pub by_index: BTreeMap<u64, IndexBucket>,
    /// Keyed by the decimal value of `F_{n*}`, or by `"F_n"` past
    /// [`EXACT_VALUE_LIMIT`].
    pub by_value: BTreeMap<String, ValueBucket>,
    pub skipped: BTreeMap<Reason, u64>,
}

impl OccurrenceReport {
    pub fn bucketed(&self) -> u64 {
        self.by_index.values().map(|b| b.count).sum()
    }

    pub fn skipped_total(&self) -> u64 {
        self.skipped.values().sum()
    }

    /// Values seen at least `min_count` times.
    pub fn frequent_values(&self, min_count: u64) -> Vec<(&str, u64)> {
        self.by_value
            .iter()
            .filter(|(_, b)| b.count >= min_count)
            .map(|(k, b)| (k.as_str(), b.count))
            .collect()
    }
}

pub fn value_key(n: u64) -> String {
    if n <= EXACT_VALUE_LIMIT {
        fib(n).to_string()
    } else {
        format!("F_{n}")
    }
}

pub fn occurrence_histogram(g: i64, x: u64) -> Result<OccurrenceReport> {
    occurrence_histogram_with(g, x, &OccurrenceOptions::default())
}

const STATS_CHUNK: u64 = 1 << 15;

enum Outcome {
    Bucketed(u64, u64),
    Skipped(Reason),
}

/// Buckets every applicable prime in `[3, x]` by its predicted index. Any
/// failed congruence aborts with [`Error::TheoremViolation`].
pub fn occurrence_histogram_with(
    g: i64,
    x: u64,
    opts: &OccurrenceOptions,
) -> Result<OccurrenceReport> {
    check_base(g)?;
    if opts.paths.count() == 0 {
        return domain("no evaluation path enabled");
    }
    let mut report = OccurrenceReport {
        g,
        x,
        paths: opts.paths,
        witness_cap: opts.witness_cap,
        by_index: BTreeMap::new(),
        by_value: BTreeMap::new(),
        skipped: BTreeMap::new(),
    };
    if x < 3 {
        return Ok(report);
    }
    let alpha = Rational::integer(g);
    let paths = opts.paths;
    let chunks = ordered_map(opts.workers, segments(3, x, STATS_CHUNK), |range| {
        let mut out = Vec::new();
        for p in primes_in_range(*range.start(), *range.end()) {
            let rd = residual_data(alpha, p)?;
            if !rd.applicable {
                out.push(Outcome::Skipped(rd.reason));
                continue;
            }
            let rec = check_congruence(&rd, paths)?;
            if !rec.is_clean() {
                return Err(Error::TheoremViolation {
                    p,
                    lhs: rec.lhs,
                    rhs: rec.rhs,
                });
            }
            out.push(Outcome::Bucketed(p, rec.predicted_index));
        }
        Ok(out)
    });
    for chunk in chunks {
        for outcome in chunk? {
            match outcome {
                Outcome::Skipped(r) => *report.skipped.entry(r).or_insert(0) += 1,
                Outcome::Bucketed(p, n) => {
                    let bucket = report.by_index.entry(n).or_default();
                    bucket.count += 1;
                    if bucket.primes.len() < opts.witness_cap {
                        bucket.primes.push(p);
                    }
                }
            }
        }
    }
    for (&n, bucket) in &report.by_index {
        let v = report.by_value.entry(value_key(n)).or_default();
        v.indices.push(n);
        v.count += bucket.count;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub t: u64,
    pub count: u64,
    /// Predicted Fibonacci index for those primes, with multiplicity.
    pub predicted_indices: BTreeMap<u64, u64>,
}

/// For each prime `t = 1 (mod 5)`, the primes `p <= x` with `I_p(g) = t` and
/// `p = 2 (mod 5)`. Cross-checked against [`v_count`] with `a = 1, d = 5`.
pub fn target_index_census(g: i64, x: u64, t_list: &[u64]) -> Result<Vec<CensusEntry>> {
    let gu = check_base(g)?;
    for &t in t_list {
        if !is_prime(t) || t % 5 != 1 {
            return domain(format!("t must be a prime = 1 (mod 5), got {t}"));
        }
    }
    let primes = if x >= 3 { primes_in_range(3, x) } else { Vec::new() };
    let alpha = Rational::integer(g);
    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let mut entry = CensusEntry {
            t,
            count: 0,
            predicted_indices: BTreeMap::new(),
        };
        for &p in primes.iter().filter(|&&p| p % 5 == 2) {
            if !has_residual_index(gu, p, t) {
                continue;
            }
            entry.count += 1;
            let rd = residual_data(alpha, p)?;
            if rd.applicable {
                let n = crate::congruence::predicted_index(&rd)?;
                *entry.predicted_indices.entry(n).or_insert(0) += 1;
            }
        }
        if x >= 2 {
            let expected = v_count(g, 1, 5, t, x, false)?.count;
            if expected != entry.count {
                return invariant(format!(
                    "census for t = {t} found {} primes, v_count found {expected}",
                    entry.count
                ));
            }
        }
        out.push(entry);
    }
    Ok(out)
}
