//! Observed share of primes with index t in 1 + t mod 5t against the
//! truncated density. Informational: convergence is slow and nothing here
//! is asserted.
//!
//!     cargo run --release --example consistency_report -- [g] [t] [x]

use qfib_congruence::density::{delta_truncated, v_count_par};
use qfib_congruence::parallel::default_workers;
use qfib_congruence::report::DensityBody;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let g: i64 = args.first().map_or("2", String::as_str).parse().expect("g");
    let t: u64 = args.get(1).map_or("11", String::as_str).parse().expect("t");
    let x: u64 = args.get(2).map_or("10000000", String::as_str).parse().expect("x");

    let est = delta_truncated(g, 1, 5, t, 400).expect("valid parameters");
    for k in 4..=x.ilog10() {
        let xs = 10u64.pow(k);
        let v = v_count_par(g, 1, 5, t, xs, false, default_workers()).expect("count");
        let body = DensityBody::new(est.clone(), Some(v.clone()));
        let c = body.consistency.unwrap();
        println!("x = 10^{k}: {:>6} primes of {:>8}, share {} vs delta ~ {} (within factor 2: {})", v.count, c.pi_x, c.observed_ratio, c.partial_sum, c.within_factor_two);
    }
}
