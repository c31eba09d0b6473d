//! Checks the congruence at one prime and prints the full record.
//!
//!     cargo run --example verify_prime -- [alpha] [p]

use qfib_congruence::congruence::{verify_theorem, Verification};
use qfib_congruence::modarith::Rational;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let alpha: Rational = args.first().map_or("1/2", String::as_str).parse().expect("alpha");
    let p: u64 = args.get(1).map_or("1009", String::as_str).parse().expect("p");

    match verify_theorem(alpha, p) {
        Ok(Verification::Record(r)) => {
            println!(
                "F_{p}({alpha}) = {} and F_{} = {} (mod {p}): {}",
                r.lhs,
                r.predicted_index,
                r.rhs,
                if r.is_clean() { "match" } else { "MISMATCH" }
            );
            println!("{}", serde_json::to_string_pretty(&r).unwrap());
        }
        Ok(Verification::Inapplicable(rd)) => println!("not covered at p = {p}: {}", rd.reason),
        Err(e) => println!("error: {e}"),
    }
}
