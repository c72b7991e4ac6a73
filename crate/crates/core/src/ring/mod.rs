//! Modular integer and negacyclic polynomial arithmetic.

mod modulus;
mod ntt;
mod poly;

pub use modulus::{barrett_reduce, montgomery_mul, Modulus};
pub use ntt::{singleton_rows, smallest_primitive_root, TwiddleTable};
pub use poly::{monomial_mul_into, poly_mul_negacyclic, schoolbook_negacyclic, Domain, RingContext, RingElement};
