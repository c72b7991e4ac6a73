//! Negacyclic multiplication through the constant-geometry NTT, checked
//! against the quadratic schoolbook product, and a look at one transform
//! stage by stage.

use std::time::Instant;

use fhew_pim::params::select_modulus;
use fhew_pim::ring::{poly_mul_negacyclic, schoolbook_negacyclic, Domain, RingContext, RingElement};
use fhew_pim::sampler::Sampler;

fn main() -> fhew_pim::Result<()> {
    let n = 1024;
    let q = select_modulus(27, n)?;
    let ring = RingContext::new(n, q)?;
    let mut rng = Sampler::new(3);
    let a = RingElement::from_coeffs(&ring, rng.uniform_vec(n, q), Domain::Coefficient)?;
    let b = RingElement::from_coeffs(&ring, rng.uniform_vec(n, q), Domain::Coefficient)?;

    let t = Instant::now();
    let fast = poly_mul_negacyclic(&a, &b)?;
    let t_fast = t.elapsed();
    let t = Instant::now();
    let slow = schoolbook_negacyclic(a.coeffs(), b.coeffs(), q);
    let t_slow = t.elapsed();
    println!("N = {n}, Q = {q}");
    println!("NTT product {t_fast:.2?}, schoolbook {t_slow:.2?}, equal: {}", fast.coeffs() == slow.as_slice());

    // X^(N-1) * X wraps around to -1
    let x_top = RingElement::monomial(&ring, 1, n - 1);
    let x = RingElement::monomial(&ring, 1, 1);
    let wrap = poly_mul_negacyclic(&x_top, &x)?;
    println!("X^(N-1) * X = {} (Q - 1 = {})", wrap.coeffs()[0], q - 1);

    let small = RingContext::new(16, 97)?;
    let tw = small.twiddles();
    let trace = tw.forward_trace(&(0..16).collect::<Vec<u64>>());
    println!("\nforward transform of 0..16 mod 97, {} stages after the twist:", tw.stage_count());
    for (i, row) in trace.iter().enumerate() {
        println!("  {i:>2}: {row:?}");
    }
    Ok(())
}
