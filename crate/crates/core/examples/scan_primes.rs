//! Verifies the congruence at every prime of a range and summarizes.
//!
//!     cargo run --release --example scan_primes -- [alpha] [pmax] [workers]

use qfib_congruence::congruence::{scan_range, Paths};
use qfib_congruence::modarith::Rational;
use qfib_congruence::parallel::default_workers;
use qfib_congruence::report::ScanBody;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let alpha: Rational = args.first().map_or("3", String::as_str).parse().expect("alpha");
    let pmax: u64 = args.get(1).map_or("50000", String::as_str).parse().expect("pmax");
    let workers = args.get(2).map_or_else(default_workers, |w| w.parse().expect("workers"));

    let out = scan_range(alpha, 3, pmax, Paths::default(), workers).expect("scan");
    let body = ScanBody::from(out);
    print!("{}", body.summary_text());
    for r in body.records.iter().rev().take(3) {
        println!("  p = {:>6}: ord {:>6}, index {:>3}, F_p = F_{} = {}", r.p, r.ord, r.index, r.predicted_index, r.lhs);
    }
}
