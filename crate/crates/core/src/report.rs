//! JSON report documents and their revalidation.
//!
//! Every report has the shape `{"kind", "tool_version", "run", "body"}`.
//! `run` holds the worker count and wall time; `body` is a pure function of
//! the inputs and is what determinism is judged on.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use crate::congruence::{
    predicted_index, qfib_mod_proposition, residual_data, CongruenceRecord, Mismatch, Paths,
    Reason, ScanOutcome,
};
use crate::density::{delta_truncated, v_count, DeltaEstimate, VCount};
use crate::modarith::{prime_count, primes_in_range, Rational};
use crate::qfib::fib_mod;
use crate::stats::{value_key, OccurrenceReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunInfo {
    pub workers: usize,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<B> {
    pub kind: String,
    pub tool_version: String,
    pub run: RunInfo,
    pub body: B,
}

impl<B: Serialize> Report<B> {
    pub fn new(kind: &str, run: RunInfo, body: B) -> Self {
        Report {
            kind: kind.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            run,
            body,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn body_json(&self) -> String {
        serde_json::to_string(&self.body).expect("reports serialize")
    }
}

fn approx(r: &BigRational) -> String {
    format!("{:.6e}", r.to_f64().unwrap_or(f64::NAN))
}

// ---- scan ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub alpha: Rational,
    pub p_min: u64,
    pub p_max: u64,
    pub paths: Paths,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub applicable: u64,
    pub matched: u64,
    pub mismatched: u64,
    pub path_disagreements: u64,
    pub skipped: BTreeMap<Reason, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanBody {
    pub metadata: ScanMetadata,
    pub summary: ScanSummary,
    pub records: Vec<CongruenceRecord>,
    pub mismatches: Vec<Mismatch>,
}

impl From<ScanOutcome> for ScanBody {
    fn from(out: ScanOutcome) -> Self {
        let matched = out.matched();
        let summary = ScanSummary {
            applicable: out.records.len() as u64,
            matched,
            mismatched: out.records.len() as u64 - matched,
            path_disagreements: out.records.iter().filter(|r| !r.paths_agree).count() as u64,
            skipped: out.skipped,
        };
        ScanBody {
            metadata: ScanMetadata {
                alpha: out.alpha,
                p_min: out.p_min,
                p_max: out.p_max,
                paths: out.paths,
            },
            summary,
            records: out.records,
            mismatches: out.mismatches,
        }
    }
}

impl ScanBody {
    pub fn summary_text(&self) -> String {
        let m = &self.metadata;
        let s = &self.summary;
        let skipped_total: u64 = s.skipped.values().sum();
        let detail: Vec<String> = s.skipped.iter().map(|(r, c)| format!("{r}: {c}")).collect();
        format!(
            "alpha = {}, p in [{}, {}], paths = {}\n\
             applicable: {}\nmatched: {}\nmismatched: {}\npath disagreements: {}\n\
             skipped: {} ({})\n",
            m.alpha,
            m.p_min,
            m.p_max,
            m.paths,
            s.applicable,
            s.matched,
            s.mismatched,
            s.path_disagreements,
            skipped_total,
            detail.join(", ")
        )
    }
}

#[derive(Serialize)]
struct CsvRow {
    p: u64,
    ord: u64,
    index: u64,
    lsym: i8,
    predicted_index: u64,
    lhs: u64,
    rhs: u64,
    #[serde(rename = "match")]
    matched: bool,
}

pub fn records_csv(records: &[CongruenceRecord]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRow {
            p: r.p,
            ord: r.ord,
            index: r.index,
            lsym: r.lsym,
            predicted_index: r.predicted_index,
            lhs: r.lhs,
            rhs: r.rhs,
            matched: r.matched,
        })
        .expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

// ---- density ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consistency {
    pub x: u64,
    pub pi_x: u64,
    pub observed_ratio: String,
    pub partial_sum: String,
    pub within_factor_two: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityBody {
    pub estimate: DeltaEstimate,
    #[serde(with = "crate::bigserde::ratio")]
    pub certificate: BigRational,
    pub certified_positive: bool,
    pub partial_sum_approx: String,
    pub tail_bound_approx: String,
    pub empirical: Option<VCount>,
    pub consistency: Option<Consistency>,
}

impl DensityBody {
    pub fn new(estimate: DeltaEstimate, empirical: Option<VCount>) -> Self {
        let consistency = empirical.as_ref().map(|v| {
            let pi_x = prime_count(v.x) as u64;
            let observed = BigRational::new(v.count.into(), pi_x.max(1).into());
            let ratio = if estimate.partial_sum == BigRational::from_integer(0.into()) {
                None
            } else {
                Some(&observed / &estimate.partial_sum)
            };
            let two = BigRational::from_integer(2.into());
            let half = BigRational::new(1.into(), 2.into());
            Consistency {
                x: v.x,
                pi_x,
                observed_ratio: approx(&observed),
                partial_sum: approx(&estimate.partial_sum),
                within_factor_two: ratio.is_some_and(|r| r >= half && r <= two),
            }
        });
        DensityBody {
            certificate: estimate.certificate(),
            certified_positive: estimate.is_certified_positive(),
            partial_sum_approx: approx(&estimate.partial_sum),
            tail_bound_approx: approx(&estimate.tail_bound),
            estimate,
            empirical,
            consistency,
        }
    }

    pub fn summary_text(&self) -> String {
        let e = &self.estimate;
        let mut s = format!(
            "delta({}, {}; {}) for g = {}, n <= {}\n\
             partial sum: {} ~ {}\ntail bound:  {}\ncertificate: {} ({})\n",
            e.a,
            e.d,
            e.t,
            e.g,
            e.truncation,
            e.partial_sum,
            self.partial_sum_approx,
            self.tail_bound_approx,
            approx(&self.certificate),
            if self.certified_positive {
                "positive"
            } else {
                "not certified"
            }
        );
        if let Some(v) = &self.empirical {
            s += &format!("primes p <= {} with I_p = {} in progression: {}\n", v.x, v.t, v.count);
        }
        if let Some(c) = &self.consistency {
            s += &format!(
                "observed share {} vs partial sum {} (within factor 2: {})\n",
                c.observed_ratio, c.partial_sum, c.within_factor_two
            );
        }
        s
    }
}

// ---- stats ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub bucketed: u64,
    pub skipped: u64,
    pub distinct_indices: u64,
    pub distinct_values: u64,
    /// Values occurring at least 20 times.
    pub frequent_values: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsBody {
    pub summary: StatsSummary,
    pub report: OccurrenceReport,
}

pub const FREQUENT_THRESHOLD: u64 = 20;

impl From<OccurrenceReport> for StatsBody {
    fn from(report: OccurrenceReport) -> Self {
        let summary = StatsSummary {
            bucketed: report.bucketed(),
            skipped: report.skipped_total(),
            distinct_indices: report.by_index.len() as u64,
            distinct_values: report.by_value.len() as u64,
            frequent_values: report
                .frequent_values(FREQUENT_THRESHOLD)
                .into_iter()
                .map(|(k, c)| (k.to_string(), c))
                .collect(),
        };
        StatsBody { summary, report }
    }
}

impl StatsBody {
    pub fn summary_text(&self) -> String {
        let r = &self.report;
        let mut s = format!(
            "g = {}, x = {}: {} primes bucketed, {} skipped\n",
            r.g, r.x, self.summary.bucketed, self.summary.skipped
        );
        for (n, b) in &r.by_index {
            s += &format!("  index {n}: {}\n", b.count);
        }
        for (reason, c) in &r.skipped {
            s += &format!("  skipped {reason}: {c}\n");
        }
        s += &format!(
            "values occurring >= {FREQUENT_THRESHOLD} times: {}\n",
            self.summary.frequent_values.len()
        );
        s
    }
}

// ---- writing ----

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

// ---- revalidation ----

/// Outcome of re-reading a report: the problems found, empty if sound.
#[derive(Debug, Default)]
pub struct CheckOutcome {
    pub kind: String,
    pub items: u64,
    pub problems: Vec<String>,
}

impl CheckOutcome {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }

    fn expect(&mut self, cond: bool, msg: impl FnOnce() -> String) {
        if !cond {
            self.problems.push(msg());
        }
    }
}

fn body_of<B: DeserializeOwned>(v: &Value) -> Result<B, String> {
    let body = v.get("body").ok_or("report has no body")?;
    serde_json::from_value(body.clone()).map_err(|e| format!("malformed body: {e}"))
}

/// Parses a report and recomputes everything it claims. `Err` means the
/// document could not be read as a report at all.
pub fn check_report(text: &str) -> Result<CheckOutcome, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("not JSON: {e}"))?;
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or("report has no kind")?
        .to_string();
    let mut out = CheckOutcome {
        kind: kind.clone(),
        ..CheckOutcome::default()
    };
    match kind.as_str() {
        "scan" => check_scan(&body_of(&v)?, &mut out),
        "density" => check_density(&body_of(&v)?, &mut out),
        "stats" => check_stats(&body_of(&v)?, &mut out),
        other => return Err(format!("unknown report kind {other:?}")),
    }
    Ok(out)
}

fn check_scan(body: &ScanBody, out: &mut CheckOutcome) {
    let m = &body.metadata;
    out.items = body.records.len() as u64;
    out.expect(
        body.records.windows(2).all(|w| w[0].p < w[1].p),
        || "records are not strictly sorted by p".into(),
    );
    let mut skipped: BTreeMap<Reason, u64> = BTreeMap::new();
    let mut applicable = Vec::new();
    if m.p_min > 2 && m.p_min <= m.p_max {
        for p in primes_in_range(m.p_min, m.p_max) {
            match residual_data(m.alpha, p) {
                Ok(rd) if rd.applicable => applicable.push(rd),
                Ok(rd) => *skipped.entry(rd.reason).or_insert(0) += 1,
                Err(e) => out.problems.push(format!("p = {p}: {e}")),
            }
        }
    } else {
        out.problems.push(format!("bad range [{}, {}]", m.p_min, m.p_max));
    }
    out.expect(skipped == body.summary.skipped, || {
        format!("skipped counts {:?} != recomputed {:?}", body.summary.skipped, skipped)
    });
    out.expect(applicable.len() == body.records.len(), || {
        format!(
            "{} records for {} applicable primes",
            body.records.len(),
            applicable.len()
        )
    });
    for (rd, r) in applicable.iter().zip(&body.records) {
        if rd.p != r.p {
            out.problems.push(format!("record for p = {} where {} expected", r.p, rd.p));
            break;
        }
        let pred = predicted_index(rd).ok();
        out.expect(
            rd.ord == Some(r.ord)
                && rd.index == Some(r.index)
                && rd.lsym_ord == r.lsym
                && pred == Some(r.predicted_index),
            || format!("p = {}: residual data differs", r.p),
        );
        out.expect(fib_mod(r.predicted_index, r.p).value() == r.rhs, || {
            format!("p = {}: rhs is not F_{} mod p", r.p, r.predicted_index)
        });
        let lhs = qfib_mod_proposition(rd).map(|v| v.value()).ok();
        out.expect(lhs == Some(r.lhs), || format!("p = {}: lhs does not recompute", r.p));
        out.expect(r.matched == (r.lhs == r.rhs), || {
            format!("p = {}: match flag inconsistent", r.p)
        });
        let agree = [r.recurrence, r.proposition, r.andrews]
            .into_iter()
            .flatten()
            .all(|v| v == r.lhs);
        out.expect(agree == r.paths_agree, || {
            format!("p = {}: paths_agree flag inconsistent", r.p)
        });
    }
    let s = &body.summary;
    let matched = body.records.iter().filter(|r| r.matched).count() as u64;
    out.expect(
        s.applicable == body.records.len() as u64
            && s.matched == matched
            && s.mismatched == s.applicable - matched.min(s.applicable),
        || "summary counts inconsistent with records".into(),
    );
    let unclean: Vec<u64> = body
        .records
        .iter()
        .filter(|r| !r.is_clean())
        .map(|r| r.p)
        .collect();
    let listed: Vec<u64> = body.mismatches.iter().map(|m| m.record.p).collect();
    out.expect(unclean == listed, || "mismatch list inconsistent".into());
}

fn check_density(body: &DensityBody, out: &mut CheckOutcome) {
    let e = &body.estimate;
    out.items = e.terms.len() as u64;
    let sum: BigRational = e.terms.iter().map(|t| t.term.clone()).sum();
    out.expect(sum == e.partial_sum, || "ledger does not sum to partial_sum".into());
    match delta_truncated(e.g, e.a, e.d, e.t, e.truncation) {
        Ok(fresh) => out.expect(&fresh == e, || "estimate does not recompute".into()),
        Err(err) => out.problems.push(format!("estimate parameters rejected: {err}")),
    }
    out.expect(body.certificate == e.certificate(), || "certificate differs".into());
    out.expect(body.certified_positive == e.is_certified_positive(), || {
        "certified flag differs".into()
    });
    if let Some(v) = &body.empirical {
        match v_count(v.g, v.a, v.d, v.t, v.x, v.witnesses.is_some()) {
            Ok(fresh) => out.expect(&fresh == v, || "empirical count does not recompute".into()),
            Err(err) => out.problems.push(format!("empirical parameters rejected: {err}")),
        }
    }
}

fn check_stats(body: &StatsBody, out: &mut CheckOutcome) {
    let r = &body.report;
    out.items = r.bucketed();
    let expected_total = if r.x >= 3 { prime_count(r.x) as u64 - 1 } else { 0 };
    out.expect(r.bucketed() + r.skipped_total() == expected_total, || {
        format!(
            "bucketed + skipped = {} but pi(x) - 1 = {expected_total}",
            r.bucketed() + r.skipped_total()
        )
    });
    let alpha = Rational::integer(r.g);
    for (&n, b) in &r.by_index {
        out.expect(
            b.primes.len() as u64 <= b.count && b.primes.len() <= r.witness_cap,
            || format!("index {n}: witness list longer than count or cap"),
        );
        out.expect(b.primes.windows(2).all(|w| w[0] < w[1]), || {
            format!("index {n}: witnesses not sorted")
        });
        for &p in &b.primes {
            let ok = p <= r.x
                && residual_data(alpha, p)
                    .ok()
                    .filter(|rd| rd.applicable)
                    .and_then(|rd| predicted_index(&rd).ok())
                    == Some(n);
            if !ok {
                out.problems.push(format!("p = {p} does not belong to index {n}"));
            }
        }
    }
    let mut by_value: BTreeMap<String, (Vec<u64>, u64)> = BTreeMap::new();
    for (&n, b) in &r.by_index {
        let e = by_value.entry(value_key(n)).or_default();
        e.0.push(n);
        e.1 += b.count;
    }
    let consistent = by_value.len() == r.by_value.len()
        && by_value
            .iter()
            .all(|(k, (idx, c))| r.by_value.get(k).is_some_and(|v| &v.indices == idx && v.count == *c));
    out.expect(consistent, || "by_value does not aggregate by_index".into());
    out.expect(StatsBody::from(r.clone()).summary == body.summary, || {
        "summary inconsistent with buckets".into()
    });
}
