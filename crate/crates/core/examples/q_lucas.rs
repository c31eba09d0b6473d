//! q-binomials at a root of unity mod p: the base-ord reduction against the
//! exact Gaussian polynomial.
//!
//!     cargo run --example q_lucas -- [alpha] [p] [n]

use qfib_congruence::modarith::Residue;
use qfib_congruence::qanalogue::{q_binomial_mod, q_binomial_poly, QBase};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a: u64 = args.first().map_or("2", String::as_str).parse().expect("alpha");
    let p: u64 = args.get(1).map_or("7", String::as_str).parse().expect("p");
    let n: u64 = args.get(2).map_or("12", String::as_str).parse().expect("n");
    let base = QBase::new(Residue::new(a, p)).expect("alpha != 0 mod p");
    println!("alpha = {a}, p = {p}, ord = {}", base.ord());
    let mut agree = true;
    for m in 0..=n as i64 {
        let fast = q_binomial_mod(n, m, &base).value();
        let poly = q_binomial_poly(n as i64, m);
        let exact = poly.eval_mod(base.alpha()).value();
        agree &= fast == exact;
        println!("  [{n}, {m:>2}]: reduced {fast}, exact {exact} (degree {:?})", poly.degree());
    }
    println!("{}", if agree { "all agree" } else { "DISAGREEMENT" });
}
