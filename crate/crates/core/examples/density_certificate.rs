//! Truncated density of primes with residual index t in 1 + t mod 5t, with
//! a rigorous tail bound, and the degree formulas it rests on.
//!
//!     cargo run --release --example density_certificate -- [g] [t] [N]

use num_traits::ToPrimitive;
use qfib_congruence::density::{degree_ratio_bounds, delta_truncated, field_degree};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let g: i64 = args.first().map_or("2", String::as_str).parse().expect("g");
    let t: u64 = args.get(1).map_or("11", String::as_str).parse().expect("t");
    let n: u64 = args.get(2).map_or("200", String::as_str).parse().expect("N");

    println!("[K_(5,5) : Q] = {}, [K_(55,11) : Q] = {}", field_degree(g, 5, 5).unwrap(), field_degree(g, 55, 11).unwrap());
    let r = degree_ratio_bounds(g, 30, 3, 5).unwrap();
    println!("relative degrees for a = 30, b = 3, p = 5: {} and {:?}", r.cyclotomic_step.ratio, r.kummer_step.map(|k| k.ratio.to_string()));

    let est = delta_truncated(g, 1, 5, t, n).expect("valid parameters");
    println!("\nfirst terms:");
    for term in est.terms.iter().take(8) {
        println!("  n = {:>3}: mu {:>2}, C {}, degree {:>6}, term {}", term.n, term.mu, term.c_g, term.degree, term.term);
    }
    let f = |r: &num_rational::BigRational| r.to_f64().unwrap();
    println!("\npartial sum ({} terms) = {:.6e}", est.terms.len(), f(&est.partial_sum));
    println!("tail bound            = {:.6e}", f(&est.tail_bound));
    println!("certified lower bound = {:.6e} ({})", f(&est.certificate()), if est.is_certified_positive() { "positive" } else { "not positive" });
    println!("tail: {}", est.tail_derivation);
}
