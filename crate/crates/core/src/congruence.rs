//! The congruence `F_p(alpha) = F_{I_p(alpha) + (ord_p(alpha)/5)} (mod p)`
//! as an executable check.
//!
//! Hypotheses: `v_p(alpha) = v_p(alpha - 1) = 0` and `ord_p(alpha)` prime
//! to 5. The left side can be computed three ways: the recurrence, Andrews'
//! sum, and the binomial sum over the sets
//! `S_{p,i} = { k : 2 k ord = p - i (mod 5) }`, `i = 1, 2`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invariant, Error, Result};
use crate::modarith::{
    factorize, is_prime, legendre, lsym5, multiplicative_order_with, primes_in_range,
    reduce_rational, segments, Modulus, Rational, Residue,
};
use crate::parallel::ordered_map;
use crate::qanalogue::QBase;
use crate::qfib::{fib_mod, qfib_mod_andrews, qfib_recurrence_raw};

/// Why a prime is (not) covered by the theorem. Checked in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Reason {
    #[serde(rename = "OK")]
    Ok,
    BadValuationAlpha,
    BadValuationAlphaMinus1,
    OrdDivisibleBy5,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::Ok => "OK",
            Reason::BadValuationAlpha => "BadValuationAlpha",
            Reason::BadValuationAlphaMinus1 => "BadValuationAlphaMinus1",
            Reason::OrdDivisibleBy5 => "OrdDivisibleBy5",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualData {
    pub alpha: Rational,
    pub p: u64,
    /// `None` when `p` divides the numerator or denominator of alpha.
    pub alpha_res: Option<u64>,
    pub ord: Option<u64>,
    pub index: Option<u64>,
    pub lsym_ord: i8,
    pub applicable: bool,
    pub reason: Reason,
}

impl ResidualData {
    fn base(&self) -> Result<QBase> {
        match (self.alpha_res, self.ord) {
            (Some(a), Some(ord)) if self.reason != Reason::BadValuationAlphaMinus1 => {
                QBase::with_order(Residue::new(a, self.p), ord)
            }
            _ => domain(format!(
                "alpha = {} has nonzero valuation at p = {}",
                self.alpha, self.p
            )),
        }
    }

    fn index_value(&self) -> u64 {
        self.index.expect("index is set once valuations are fine")
    }

    fn ord_value(&self) -> u64 {
        self.ord.expect("order is set once valuations are fine")
    }
}

/// Extracts `alpha mod p`, `ord_p(alpha)`, `I_p(alpha)` and the
/// applicability of the theorem for an odd prime `p`.
pub fn residual_data(alpha: Rational, p: u64) -> Result<ResidualData> {
    if alpha.is_zero() || alpha.is_one() {
        return domain(format!("alpha must not be 0 or 1, got {alpha}"));
    }
    if p < 3 || !is_prime(p) {
        return domain(format!("p must be an odd prime, got {p}"));
    }
    let mut rd = ResidualData {
        alpha,
        p,
        alpha_res: None,
        ord: None,
        index: None,
        lsym_ord: 0,
        applicable: false,
        reason: Reason::BadValuationAlpha,
    };
    let a = match reduce_rational(alpha, p) {
        Ok(a) => a,
        Err(Error::BadValuation { .. }) => return Ok(rd),
        Err(e) => return Err(e),
    };
    rd.alpha_res = Some(a.value());
    let ord = multiplicative_order_with(a, &factorize(p - 1))?;
    let index = crate::modarith::residual_index(p, ord)?;
    rd.ord = Some(ord);
    rd.index = Some(index);
    rd.lsym_ord = lsym5(ord as i64);
    // v_p(alpha - 1) on the exact rational; v_p(alpha) = 0 already holds.
    rd.reason = if alpha.minus_one().valuation(p) != Some(0) {
        Reason::BadValuationAlphaMinus1
    } else if ord % 5 == 0 {
        Reason::OrdDivisibleBy5
    } else {
        Reason::Ok
    };
    rd.applicable = rd.reason == Reason::Ok;
    Ok(rd)
}

/// `I_p(alpha) + (ord_p(alpha)/5)`.
pub fn predicted_index(rd: &ResidualData) -> Result<u64> {
    if !rd.applicable {
        return domain(format!(
            "theorem does not apply at p = {} ({})",
            rd.p, rd.reason
        ));
    }
    let n = rd.index_value() as i64 + rd.lsym_ord as i64;
    if n < 0 {
        return invariant(format!("negative predicted index at p = {}", rd.p));
    }
    Ok(n as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SSets {
    pub s1: Vec<u64>,
    pub s2: Vec<u64>,
}

/// `S_{p,1}` and `S_{p,2}` intersected with `[0, I_p(alpha)]`.
pub fn s_sets(rd: &ResidualData) -> Result<SSets> {
    rd.base()?;
    let (p, ord, index) = (rd.p, rd.ord_value(), rd.index_value());
    let class = |i: u64| -> Vec<u64> {
        (0..=index)
            .filter(|&k| (2 * (k % 5) * (ord % 5)) % 5 == (p + 5 - i) % 5)
            .collect()
    };
    Ok(SSets {
        s1: class(1),
        s2: class(2),
    })
}

/// `F_p(alpha) mod p` via
/// `sum_{k in S1} alpha^{(p-1-2k ord)/10} C(I,k) - (alpha/p) sum_{k in S2} C(I,k)`.
///
/// Valid whenever both valuations vanish, including `5 | ord`.
pub fn qfib_mod_proposition(rd: &ResidualData) -> Result<Residue> {
    let base = rd.base()?;
    let (p, ord, index) = (rd.p, base.ord(), rd.index_value());
    let m = Modulus::new(p);
    let sets = s_sets(rd)?;

    // C(I, k) mod p for 0 <= k <= I < p
    let mut fact = vec![1 % p; index as usize + 1];
    for i in 1..=index as usize {
        fact[i] = m.mul(fact[i - 1], i as u64);
    }
    let inv_top = m.inv(fact[index as usize]).expect("I < p");
    let mut inv_fact = vec![0; index as usize + 1];
    inv_fact[index as usize] = inv_top;
    for i in (1..=index as usize).rev() {
        inv_fact[i - 1] = m.mul(inv_fact[i], i as u64);
    }
    let binom = |k: u64| {
        let k = k as usize;
        m.mul(
            fact[index as usize],
            m.mul(inv_fact[k], inv_fact[index as usize - k]),
        )
    };

    let mut s1 = 0u64;
    for &k in &sets.s1 {
        let num = (p - 1) as i128 - 2 * k as i128 * ord as i128;
        if num % 10 != 0 {
            return invariant(format!(
                "exponent (p-1-2k ord)/10 not integral at p = {p}, k = {k}"
            ));
        }
        let exp = ((num / 10).rem_euclid(ord as i128)) as u64;
        s1 = m.add(s1, m.mul(m.pow(base.alpha().value(), exp), binom(k)));
    }
    let s2 = sets.s2.iter().fold(0u64, |acc, &k| m.add(acc, binom(k)));
    let symbol = legendre(base.alpha().value() as i64, p);
    let s2_signed = match symbol {
        1 => s2,
        -1 => m.sub(0, s2),
        _ => return invariant("alpha vanishes mod p"),
    };
    Ok(Residue::new(m.sub(s1, s2_signed), p))
}

/// Which evaluation routes for `F_p(alpha)` to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paths {
    pub recurrence: bool,
    pub andrews: bool,
    pub proposition: bool,
}

impl Paths {
    pub const RECURRENCE: Paths = Paths {
        recurrence: true,
        andrews: false,
        proposition: false,
    };
    pub const PROPOSITION: Paths = Paths {
        recurrence: false,
        andrews: false,
        proposition: true,
    };
    pub const ALL: Paths = Paths {
        recurrence: true,
        andrews: true,
        proposition: true,
    };

    pub fn count(self) -> usize {
        self.recurrence as usize + self.andrews as usize + self.proposition as usize
    }
}

impl Default for Paths {
    fn default() -> Self {
        Paths::RECURRENCE
    }
}

impl fmt::Display for Paths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.recurrence, "recurrence"),
            (self.andrews, "andrews"),
            (self.proposition, "proposition"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for Paths {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut paths = Paths {
            recurrence: false,
            andrews: false,
            proposition: false,
        };
        for part in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match part {
                "recurrence" => paths.recurrence = true,
                "andrews" => paths.andrews = true,
                "proposition" => paths.proposition = true,
                "all" => paths = Paths::ALL,
                other => return domain(format!("unknown path {other:?}")),
            }
        }
        if paths.count() == 0 {
            return domain("at least one evaluation path is required");
        }
        Ok(paths)
    }
}

/// One prime's outcome. Residues are canonical lifts mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceRecord {
    pub p: u64,
    pub ord: u64,
    pub index: u64,
    pub lsym: i8,
    pub predicted_index: u64,
    pub lhs: u64,
    pub rhs: u64,
    #[serde(rename = "match")]
    pub matched: bool,
    pub paths_agree: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub recurrence: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub andrews: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub proposition: Option<u64>,
}

impl CongruenceRecord {
    pub fn is_clean(&self) -> bool {
        self.matched && self.paths_agree
    }
}

/// Evaluates both sides for an applicable prime. The left side comes from
/// the first enabled path in the order recurrence, proposition, Andrews.
pub fn check_congruence(rd: &ResidualData, paths: Paths) -> Result<CongruenceRecord> {
    let predicted = predicted_index(rd)?;
    if paths.count() == 0 {
        return domain("no evaluation path enabled");
    }
    let base = rd.base()?;
    let p = rd.p;
    let recurrence = paths
        .recurrence
        .then(|| qfib_recurrence_raw(p, base.alpha().value(), Modulus::new(p)));
    let proposition = if paths.proposition {
        Some(qfib_mod_proposition(rd)?.value())
    } else {
        None
    };
    let andrews = paths.andrews.then(|| qfib_mod_andrews(p, &base).value());
    let values: Vec<u64> = [recurrence, proposition, andrews]
        .into_iter()
        .flatten()
        .collect();
    let lhs = values[0];
    let rhs = fib_mod(predicted, p).value();
    Ok(CongruenceRecord {
        p,
        ord: base.ord(),
        index: rd.index_value(),
        lsym: rd.lsym_ord,
        predicted_index: predicted,
        lhs,
        rhs,
        matched: lhs == rhs,
        paths_agree: values.iter().all(|&v| v == lhs),
        recurrence,
        andrews,
        proposition,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verification {
    Record(CongruenceRecord),
    Inapplicable(ResidualData),
}

/// Checks the theorem at one prime with all three paths.
pub fn verify_theorem(alpha: Rational, p: u64) -> Result<Verification> {
    let rd = residual_data(alpha, p)?;
    if !rd.applicable {
        return Ok(Verification::Inapplicable(rd));
    }
    check_congruence(&rd, Paths::ALL).map(Verification::Record)
}

/// A failed record with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub residual: ResidualData,
    pub record: CongruenceRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub alpha: Rational,
    pub p_min: u64,
    pub p_max: u64,
    pub paths: Paths,
    pub records: Vec<CongruenceRecord>,
    pub skipped: BTreeMap<Reason, u64>,
    pub mismatches: Vec<Mismatch>,
}

impl ScanOutcome {
    pub fn primes_examined(&self) -> u64 {
        self.records.len() as u64 + self.skipped.values().sum::<u64>()
    }

    pub fn matched(&self) -> u64 {
        self.records.iter().filter(|r| r.matched).count() as u64
    }
}

const SCAN_CHUNK: u64 = 1 << 15;

struct ChunkResult {
    records: Vec<CongruenceRecord>,
    skipped: Vec<Reason>,
    mismatches: Vec<Mismatch>,
}

/// Checks every prime in `[p_min, p_max]`. Output is sorted by `p` and does
/// not depend on `workers`.
pub fn scan_range(
    alpha: Rational,
    p_min: u64,
    p_max: u64,
    paths: Paths,
    workers: usize,
) -> Result<ScanOutcome> {
    if p_min <= 2 || p_min > p_max {
        return domain(format!("need 2 < p_min <= p_max, got [{p_min}, {p_max}]"));
    }
    if alpha.is_zero() || alpha.is_one() {
        return domain(format!("alpha must not be 0 or 1, got {alpha}"));
    }
    let chunks = segments(p_min, p_max, SCAN_CHUNK);
    let results = ordered_map(workers, chunks, |range| -> Result<ChunkResult> {
        let mut out = ChunkResult {
            records: Vec::new(),
            skipped: Vec::new(),
            mismatches: Vec::new(),
        };
        for p in primes_in_range(*range.start(), *range.end()) {
            let rd = residual_data(alpha, p)?;
            if !rd.applicable {
                out.skipped.push(rd.reason);
                continue;
            }
            let rec = check_congruence(&rd, paths)?;
            if !rec.is_clean() {
                out.mismatches.push(Mismatch {
                    residual: rd,
                    record: rec.clone(),
                });
            }
            out.records.push(rec);
        }
        Ok(out)
    });
    let mut outcome = ScanOutcome {
        alpha,
        p_min,
        p_max,
        paths,
        records: Vec::new(),
        skipped: BTreeMap::new(),
        mismatches: Vec::new(),
    };
    for chunk in results {
        let chunk = chunk?;
        outcome.records.extend(chunk.records);
        outcome.mismatches.extend(chunk.mismatches);
        for r in chunk.skipped {
            *outcome.skipped.entry(r).or_insert(0) += 1;
        }
    }
    outcome.records.sort_by_key(|r| r.p);
    outcome.mismatches.sort_by_key(|m| m.record.p);
    Ok(outcome)
}
