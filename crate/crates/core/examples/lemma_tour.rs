//! The auxiliary congruences for q-integers and the q-binomials of p - 1 at
//! one (alpha, p), plus a few G values.
//!
//!     cargo run --example lemma_tour -- [alpha] [p]

use qfib_congruence::modarith::{binomial_mod, Residue};
use qfib_congruence::qanalogue::{c_k, q_binomial_mod, q_ratio, QBase};
use qfib_congruence::qfib::{fib, g_value};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a: u64 = args.first().map_or("2", String::as_str).parse().expect("alpha");
    let p: u64 = args.get(1).map_or("31", String::as_str).parse().expect("p");
    let base = QBase::new(Residue::new(a, p)).expect("alpha != 0 mod p");
    let d = base.ord();
    let index = (p - 1) / d;
    println!("alpha = {a}, p = {p}, ord = {d}, index = {index}");

    println!("\n[k]/[l] for k = l mod ord:");
    for (k, l) in [(d + 1, 1), (2 * d, d), (3 * d, 2 * d)] {
        if l < p {
            println!("  [{k}]/[{l}] = {}", q_ratio(k as i64, l as i64, &base).unwrap().value());
        }
    }

    println!("\nC_k on multiples of ord against (I - l)/(l + 1):");
    for l in 0..index {
        let c = c_k((l * d) as i64, &base).unwrap();
        let closed = Residue::new(index + p - l, p) * Residue::new(l + 1, p).inv().unwrap();
        println!("  l = {l}: C = {}, closed form = {}", c.value(), closed.value());
    }

    println!("\n[p-1, k] at alpha against C(I, k/ord):");
    for k in 0..p.min(4 * d + 1) {
        let v = q_binomial_mod(p - 1, k as i64, &base).value();
        let want = if k % d == 0 { binomial_mod(index, k / d, p) } else { 0 };
        println!("  k = {k:>3}: {v:>3} (expected {want})");
    }

    println!("\nG_(n,m) for m = 1, 2 next to F_(n +- 1):");
    for n in 1..=6 {
        println!("  n = {n}: G_(n,1) = {}, F_(n+1) = {}, G_(n,2) = {}, F_(n-1) = {}", g_value(n, 1), fib(n + 1), g_value(n, 2), fib(n - 1));
    }
}
