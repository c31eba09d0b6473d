//! Which Fibonacci values F_p(g) lands on, prime by prime, and the census of
//! primes with a prescribed index t in the class 2 mod 5.
//!
//!     cargo run --release --example occurrence_census -- [g] [x]

use qfib_congruence::parallel::default_workers;
use qfib_congruence::stats::{occurrence_histogram_with, target_index_census, OccurrenceOptions};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let g: i64 = args.first().map_or("2", String::as_str).parse().expect("g");
    let x: u64 = args.get(1).map_or("1000000", String::as_str).parse().expect("x");
    let opts = OccurrenceOptions { workers: default_workers(), ..OccurrenceOptions::default() };
    let r = occurrence_histogram_with(g, x, &opts).expect("square-free g >= 2");

    println!("g = {g}, x = {x}: {} primes bucketed, skipped {:?}", r.bucketed(), r.skipped);
    let mut values: Vec<_> = r.by_value.iter().collect();
    values.sort_by(|a, b| b.1.count.cmp(&a.1.count).then(a.0.cmp(b.0)));
    println!("most frequent values:");
    for (value, b) in values.iter().take(12) {
        println!("  {value:>24}  x{:<6} indices {:?}", b.count, b.indices);
    }
    println!("\nprimes with I_p(g) = t, p = 2 mod 5:");
    for e in target_index_census(g, x, &[11, 31, 41, 61]).expect("census") {
        println!("  t = {:>2}: {:>5} primes, predicted indices {:?}", e.t, e.count, e.predicted_indices);
    }
}
