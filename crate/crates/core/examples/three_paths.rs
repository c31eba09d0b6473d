//! F_n(alpha) mod p by the recurrence, Andrews' sum, the binomial sum over
//! the S-sets, and the exact polynomial.
//!
//!     cargo run --example three_paths -- [alpha] [p]

use qfib_congruence::congruence::{qfib_mod_proposition, residual_data};
use qfib_congruence::modarith::{reduce_rational, Rational};
use qfib_congruence::qanalogue::QBase;
use qfib_congruence::qfib::{qfib_mod_andrews, qfib_mod_recurrence, qfib_poly};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let alpha: Rational = args.first().map_or("2", String::as_str).parse().expect("alpha");
    let p: u64 = args.get(1).map_or("31", String::as_str).parse().expect("p");

    let rd = residual_data(alpha, p).expect("valid alpha and prime");
    println!("alpha = {alpha}, p = {p}: ord = {:?}, index = {:?}, {}", rd.ord, rd.index, rd.reason);
    let a = reduce_rational(alpha, p).expect("alpha is a p-adic unit");
    let base = QBase::new(a).expect("alpha != 0 mod p");

    let exact = qfib_poly(p);
    println!("F_{p}(q) has degree {:?}", exact.degree());
    println!("exact polynomial: {}", exact.eval_mod(a).value());
    println!("recurrence:       {}", qfib_mod_recurrence(p, a).value());
    println!("andrews:          {}", qfib_mod_andrews(p, &base).value());
    match qfib_mod_proposition(&rd) {
        Ok(v) => println!("binomial sum:     {}", v.value()),
        Err(e) => println!("binomial sum:     n/a ({e})"),
    }
}
