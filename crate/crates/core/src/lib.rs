//! q-Fibonacci polynomials modulo primes: evaluation, the congruence
//! `F_p(alpha) = F_{I_p(alpha) + (ord_p(alpha)/5)} (mod p)`, densities of
//! primes with prescribed residual index, and occurrence statistics.

pub mod bigserde;
pub mod cli;
pub mod congruence;
pub mod density;
pub mod error;
pub mod modarith;
pub mod parallel;
pub mod qanalogue;
pub mod qfib;
pub mod report;
pub mod stats;

pub use error::{Error, Result};
