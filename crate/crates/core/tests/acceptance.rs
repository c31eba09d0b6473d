//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Every criterion runs regardless of earlier failures.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use qfib_congruence::congruence::{scan_range, Paths};
use qfib_congruence::density::{degree_ratio_bounds, delta_truncated, field_degree};
use qfib_congruence::modarith::{
    binomial_mod, lsym5, prime_sieve, reduce_rational, Modulus, Rational, Residue,
};
use qfib_congruence::parallel::default_workers;
use qfib_congruence::qanalogue::{c_k, q_binomial_mod, q_ratio, IntPoly, QBase, QBinomialTable, QPascal};
use qfib_congruence::qfib::{fib, g_value};
use qfib_congruence::stats::{occurrence_histogram, occurrence_histogram_with, OccurrenceOptions};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn odd_primes_upto(n: u64) -> Vec<u64> {
    prime_sieve(n).into_iter().filter(|&p| p > 2).collect()
}

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

// 1. mass verification of the congruence below 10^5
fn mass_verification(workers: usize) -> Verdict {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for g in ["2", "3", "5", "6", "7", "10"] {
        let start = Instant::now();
        let out = scan_range(q(g), 3, 99_999, Paths::ALL, workers).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let bad = out.records.iter().filter(|r| !r.is_clean()).count();
        if bad > 0 || secs > 180.0 {
            failures.push(format!("g={g}: {bad} mismatches, {secs:.1}s"));
        }
        notes.push(format!("g={g}: {} primes {secs:.1}s", out.records.len()));
    }
    verdict(failures.is_empty(), if failures.is_empty() { notes.join(", ") } else { failures.join("; ") })
}

// 2. recurrence, Andrews and the binomial-sum path agree; exact polynomial too
fn triple_path(workers: usize) -> Verdict {
    let alphas = ["2", "3", "5", "1/2", "2/3"];
    let mut checked = 0;
    let mut problems = Vec::new();
    let mut applicable: BTreeMap<&str, Vec<(u64, u64)>> = BTreeMap::new();
    for a in alphas {
        let out = scan_range(q(a), 3, 1999, Paths::ALL, workers).unwrap();
        for r in &out.records {
            checked += 1;
            if !r.paths_agree {
                problems.push(format!("alpha={a} p={}", r.p));
            }
            if r.p < 300 {
                applicable.entry(a).or_default().push((r.p, r.lhs));
            }
        }
    }
    // exact F_n(q), advanced one step at a time
    let mut exact_checked = 0;
    let (mut f0, mut f1) = (IntPoly::zero(), IntPoly::one());
    for n in 1..300u64 {
        for (a, recs) in &applicable {
            for &(p, lhs) in recs.iter().filter(|(p, _)| *p == n) {
                let alpha = reduce_rational(q(a), p).unwrap();
                exact_checked += 1;
                if f1.eval_mod(alpha).value() != lhs {
                    problems.push(format!("exact alpha={a} p={p}"));
                }
            }
        }
        let mut next = f1.clone();
        next.add_shifted(&f0, (n - 1) as usize);
        f0 = std::mem::replace(&mut f1, next);
    }
    verdict(
        problems.is_empty() && exact_checked > 0,
        format!(
            "{checked} (alpha, p) pairs on three paths, {exact_checked} against exact polynomials, {} disagreements {:?}",
            problems.len(),
            problems.iter().take(5).collect::<Vec<_>>()
        ),
    )
}

// 3. G table values and identities
fn g_table() -> Verdict {
    let expected = [((1u64, 1i64), 1i64), ((2, 1), 1), ((1, 2), 0), ((2, 2), 1)];
    let mut wrong = Vec::new();
    for ((n, m), want) in expected {
        let got = g_value(n, m);
        if got != BigInt::from(want) {
            wrong.push(format!("G_{{{n},{m}}} = {got}, table says {want}"));
        }
    }
    let mut identity_failures = 0;
    for m in (1..=25i64).filter(|m| m % 5 != 0) {
        let mut row: Vec<BigInt> = (1..=302u64).map(|n| g_value(n, m)).collect();
        row.insert(0, BigInt::from(0));
        for n in 1..=300usize {
            if &row[n] + &row[n + 1] != row[n + 2] {
                identity_failures += 1;
            }
            let shifted = (n as i64 + lsym5(m) as i64) as u64;
            if row[n] != BigInt::from(fib(shifted)) {
                identity_failures += 1;
            }
        }
    }
    let mut detail = format!("recurrence and G = F identity: {identity_failures} failures");
    if !wrong.is_empty() {
        detail += &format!(
            "; table mismatch: {} (the defining sum gives G_{{2,1}} = F_3 = 2)",
            wrong.join(", ")
        );
    }
    verdict(wrong.is_empty() && identity_failures == 0, detail)
}

// 4. q-ratio branches, C_k, and q-binomials of p - 1, exhaustively
fn lemma_suite() -> Verdict {
    let mut counts = [0u64; 4];
    let mut problems: Vec<String> = Vec::new();
    for p in odd_primes_upto(300) {
        let m = Modulus::new(p);
        for a in 2..p {
            let base = QBase::new(Residue::new(a, p)).unwrap();
            let d = base.ord();
            let index = (p - 1) / d;
            // q_ratio branches
            for l in 1..p {
                let mut k = if l % d == 0 { d } else { l % d };
                while k < p {
                    let r = q_ratio(k as i64, l as i64, &base).unwrap();
                    let want = if k % d == 0 {
                        m.mul(k, m.inv(l).unwrap())
                    } else {
                        1
                    };
                    counts[0] += 1;
                    if r.value() != want || r.is_zero() {
                        problems.push(format!("ratio p={p} a={a} k={k} l={l}"));
                    }
                    k += d;
                }
            }
            let table = QBinomialTable::new(base, p - 1);
            let row = |k: u64| table.get(p - 1, k as i64);
            // C_k relation and closed form on multiples of ord
            for k in 0..=(p - 1).saturating_sub(d) {
                let c = c_k(k as i64, &base).unwrap();
                counts[1] += 1;
                let mut ok = !c.is_zero() && row(k + d) == c * row(k);
                if k % d == 0 {
                    let l = k / d;
                    let closed = m.mul((index + p - l % p) % p, m.inv((l + 1) % p).unwrap());
                    ok &= c.value() == closed;
                }
                if !ok {
                    problems.push(format!("C_k p={p} a={a} k={k}"));
                }
            }
            // below the order, and the general closed form
            for k in 0..p {
                let v = row(k).value();
                if k < d {
                    counts[2] += 1;
                    if v != (k == 0) as u64 {
                        problems.push(format!("small k p={p} a={a} k={k}"));
                    }
                }
                counts[3] += 1;
                let want = if k % d == 0 { binomial_mod(index, k / d, p) } else { 0 };
                if v != want || q_binomial_mod(p - 1, k as i64, &base).value() != want {
                    problems.push(format!("closed form p={p} a={a} k={k}"));
                }
            }
        }
    }
    verdict(
        problems.is_empty(),
        format!(
            "{} ratios, {} C_k, {} small-k, {} closed-form checks; {} failures {:?}",
            counts[0],
            counts[1],
            counts[2],
            counts[3],
            problems.len(),
            problems.iter().take(5).collect::<Vec<_>>()
        ),
    )
}

/// All Gaussian binomials of rows `0..=n_max` with coefficients reduced
/// mod `p`, handed to `visit` one row at a time.
fn pascal_rows_mod(p: u64, n_max: u64, mut visit: impl FnMut(u64, &[Vec<u64>])) {
    let mut row: Vec<Vec<u64>> = vec![vec![1]];
    visit(0, &row);
    for n in 1..=n_max {
        let mut next = Vec::with_capacity(row.len() + 1);
        for mm in 0..=n as usize {
            let deg = mm * (n as usize - mm);
            let mut e = vec![0u64; deg + 1];
            if mm >= 1 {
                for (i, c) in row[mm - 1].iter().enumerate() {
                    e[i] = *c;
                }
            }
            if mm < row.len() {
                for (i, c) in row[mm].iter().enumerate() {
                    e[i + mm] = (e[i + mm] + c) % p;
                }
            }
            next.push(e);
        }
        row = next;
        visit(n, &row);
    }
}

fn horner(coeffs: &[u64], alpha: u64, m: Modulus) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| m.add(m.mul(acc, alpha), c))
}

// 5. q-Lucas against exact polynomials
fn q_lucas_oracle() -> Verdict {
    let mut discrepancies = 0u64;
    let mut exhaustive = 0u64;
    let pascal = QPascal::with_rows(49);
    for p in odd_primes_upto(50) {
        let m = Modulus::new(p);
        let bases: Vec<QBase> = (2..p)
            .map(|a| QBase::new(Residue::new(a, p)).unwrap())
            .collect();
        for n in 0..p {
            for k in 0..=n {
                let poly = pascal.peek(n as i64, k as i64).unwrap().reduce_mod(p);
                for base in &bases {
                    exhaustive += 1;
                    let exact = horner(&poly, base.alpha().value(), m);
                    if q_binomial_mod(n, k as i64, base).value() != exact {
                        discrepancies += 1;
                    }
                }
            }
        }
    }
    let primes = odd_primes_upto(200);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9_1ca5);
    let mut samples: BTreeMap<u64, Vec<(u64, u64, u64)>> = BTreeMap::new();
    for _ in 0..10_000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let a = rng.gen_range(2..p);
        let n = rng.gen_range(0..p);
        let k = rng.gen_range(0..=n);
        samples.entry(p).or_default().push((n, k, a));
    }
    let mut random = 0u64;
    for (&p, list) in &samples {
        let m = Modulus::new(p);
        let n_max = list.iter().map(|s| s.0).max().unwrap();
        pascal_rows_mod(p, n_max, |n, row| {
            for &(_, k, a) in list.iter().filter(|s| s.0 == n) {
                random += 1;
                let base = QBase::new(Residue::new(a, p)).unwrap();
                if q_binomial_mod(n, k as i64, &base).value() != horner(&row[k as usize], a, m) {
                    discrepancies += 1;
                }
            }
        });
    }
    verdict(
        discrepancies == 0 && random == 10_000,
        format!("{exhaustive} exhaustive and {random} random cases, {discrepancies} discrepancies"),
    )
}

// 6. positivity certificate for t = 11
fn density_certificate() -> Verdict {
    let est = delta_truncated(2, 1, 5, 11, 200).unwrap();
    let leading = BigRational::new(1.into(), 440.into());
    let first = delta_truncated(2, 1, 5, 11, 1).unwrap().partial_sum;
    let pass = est.is_certified_positive() && first == leading && est.terms[0].term == leading;
    verdict(
        pass,
        format!(
            "partial sum {:.6e}, tail bound {:.6e}, certificate {:.6e}, leading term {}",
            to_f64(&est.partial_sum),
            to_f64(&est.tail_bound),
            to_f64(&est.certificate()),
            est.terms[0].term
        ),
    )
}

fn to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

// 7. Kummer degrees and relative-degree lemma
fn degree_formulas() -> Verdict {
    let hand = field_degree(2, 5, 5).unwrap() == 20 && field_degree(2, 55, 11).unwrap() == 440;
    let mut rng = ChaCha8Rng::seed_from_u64(0xde9);
    let gs = [2i64, 3, 5, 6, 7, 10, 11, 13, 15, 17, 21, 29, 30];
    let ps = [3u64, 5, 7, 11, 13, 17];
    let mut held = 0;
    for _ in 0..100 {
        let g = gs[rng.gen_range(0..gs.len())];
        let p = ps[rng.gen_range(0..ps.len())];
        let b = rng.gen_range(2..20u64);
        let a = b * p * rng.gen_range(1..12u64);
        let r = degree_ratio_bounds(g, a, b, p).unwrap();
        if r.cyclotomic_step.holds && r.kummer_step.is_some_and(|k| k.holds) {
            held += 1;
        }
    }
    verdict(
        hand && held == 100,
        format!("hand values {}, {held}/100 random tuples satisfy both parts", if hand { "ok" } else { "wrong" }),
    )
}

// 8. occurrence evidence
fn occurrence(workers: usize) -> Verdict {
    let small = occurrence_histogram(2, 20).unwrap();
    let bucket = |n: u64| small.by_index.get(&n).map(|b| b.primes.clone()).unwrap_or_default();
    let table_ok = bucket(0) == [3, 13, 19]
        && bucket(1) == [7, 17]
        && bucket(2) == [5]
        && small.by_index.len() == 3
        && small.skipped.values().sum::<u64>() == 1;
    let opts = OccurrenceOptions {
        workers,
        ..OccurrenceOptions::default()
    };
    let big = occurrence_histogram_with(2, 1_000_000, &opts).unwrap();
    let frequent = big.frequent_values(20);
    let shown: Vec<String> = frequent.iter().take(6).map(|(v, c)| format!("{v}:{c}")).collect();
    verdict(
        table_ok && frequent.len() >= 3,
        format!(
            "x=20 table {}, {} values occur >= 20 times below 10^6 (e.g. {})",
            if table_ok { "matches" } else { "differs" },
            frequent.len(),
            shown.join(", ")
        ),
    )
}

fn report_body(path: &Path) -> String {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    serde_json::to_string(&v["body"]).unwrap()
}

// 9. report bodies do not depend on the worker count
fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_qfibcong");
    let mut problems = Vec::new();
    let jobs: [(&str, Vec<&str>); 2] = [
        ("scan", vec!["scan", "--alpha", "2", "--pmax", "30000", "--paths", "all"]),
        ("stats", vec!["stats", "--g", "2", "--x", "300000"]),
    ];
    for (kind, args) in jobs {
        let mut bodies = Vec::new();
        for w in [1, 2, 8] {
            let out = dir.path().join(format!("{kind}-{w}.json"));
            let status = Command::new(bin)
                .args(&args)
                .args(["--workers", &w.to_string(), "--out", out.to_str().unwrap()])
                .output()
                .unwrap();
            if !status.status.success() {
                problems.push(format!("{kind} with {w} workers exited {:?}", status.status.code()));
                continue;
            }
            bodies.push(report_body(&out));
        }
        if bodies.len() != 3 || bodies.windows(2).any(|w| w[0] != w[1]) {
            problems.push(format!("{kind} bodies differ"));
        }
    }
    verdict(
        problems.is_empty(),
        if problems.is_empty() {
            "scan and stats bodies identical for 1, 2 and 8 workers".to_string()
        } else {
            problems.join("; ")
        },
    )
}

fn main() {
    let workers = default_workers();
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("congruence for six bases, all applicable p < 10^5", Box::new(move || mass_verification(workers))),
        ("three evaluation paths agree, exact polynomial below 300", Box::new(move || triple_path(workers))),
        ("G table values and identities", Box::new(g_table)),
        ("q-integer and q-binomial lemma suite, p <= 300", Box::new(lemma_suite)),
        ("q-Lucas reduction against exact polynomials", Box::new(q_lucas_oracle)),
        ("density positivity certificate for t = 11", Box::new(density_certificate)),
        ("Kummer degree formulas", Box::new(degree_formulas)),
        ("occurrence evidence", Box::new(move || occurrence(workers))),
        ("determinism across worker counts", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {} [{tag}] {name}: {} ({:.1}s)",
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
