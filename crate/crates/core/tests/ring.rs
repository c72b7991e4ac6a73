use fhew_pim::params::all_param_sets;
use fhew_pim::ring::{
    barrett_reduce, montgomery_mul, poly_mul_negacyclic, schoolbook_negacyclic, Domain, Modulus, RingContext,
    RingElement, TwiddleTable,
};
use fhew_pim::sampler::Sampler;
use fhew_pim::Error;
use proptest::prelude::*;

fn elem(ring: &std::sync::Arc<RingContext>, v: Vec<u64>) -> RingElement {
    RingElement::from_coeffs(ring, v, Domain::Coefficient).unwrap()
}

fn named_moduli() -> Vec<u64> {
    let mut v: Vec<u64> = all_param_sets().iter().map(|p| p.ring_modulus).collect();
    v.dedup();
    v
}

#[test]
fn barrett_and_montgomery_match_wide_oracle() {
    let mut rng = Sampler::new(1);
    for q in named_moduli() {
        let m = Modulus::new(q);
        for _ in 0..100_000 {
            let x = rng.uniform(2 * q);
            assert_eq!(m.barrett_reduce(x), x % q);
            let (a, b) = (rng.uniform(q), rng.uniform(q));
            let want = (a as u128 * b as u128 % q as u128) as u64;
            assert_eq!(m.montgomery_mul(a, b).unwrap(), want);
            assert_eq!(m.mul(a, b), want);
        }
    }
}

#[test]
fn reduction_examples() {
    assert_eq!(barrett_reduce(0, 97), 0);
    assert_eq!(barrett_reduce(97, 97), 0);
    assert_eq!(barrett_reduce(150, 97), 53);
    assert_eq!(montgomery_mul(96, 96, 97).unwrap(), 1);
    assert_eq!(montgomery_mul(1, 42, 134215681).unwrap(), 42);
    assert_eq!(montgomery_mul(0, 42, 134215681).unwrap(), 0);
    let err = montgomery_mul(3, 5, 512).unwrap_err();
    assert!(matches!(err, Error::EvenModulus(512)));
    assert!(err.to_string().contains("odd modulus"));
}

#[test]
fn twiddle_roots_and_determinism() {
    for p in all_param_sets() {
        let tw = TwiddleTable::new(p.ring_dim, p.ring_modulus).unwrap();
        let m = tw.modulus();
        let n = p.ring_dim as u64;
        assert_eq!(m.pow(tw.psi(), 2 * n), 1, "{}", p.name);
        assert_eq!(m.pow(tw.psi(), n), p.ring_modulus - 1, "{}", p.name);
        assert_eq!(m.mul(tw.n_inv(), n), 1);
        assert_eq!(tw, TwiddleTable::new(p.ring_dim, p.ring_modulus).unwrap());
    }
}

#[test]
fn stage_permutation_is_constant() {
    for n in [4, 16, 1024] {
        let tw = TwiddleTable::new(n, 134215681).unwrap();
        let first = tw.stage_permutation(0);
        for s in 1..tw.stage_count() {
            assert_eq!(tw.stage_permutation(s), first);
        }
        let mut sorted = first.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    }
}

/// Each NTT output slot evaluates the input at one odd power of psi. The
/// slot-to-exponent map is read off the transform of X, then checked on
/// arbitrary inputs against direct evaluation.
fn evaluation_oracle(n: usize, q: u64, inputs: &[Vec<u64>]) {
    let ring = RingContext::new(n, q).unwrap();
    let m = ring.modulus();
    let psi = ring.twiddles().psi();
    let x_hat = RingElement::monomial(&ring, 1, 1).ntt_forward().unwrap();
    let points: Vec<u64> = x_hat.coeffs().to_vec();
    let mut exps: Vec<u64> = points
        .iter()
        .map(|&pt| (0..2 * n as u64).find(|&e| m.pow(psi, e) == pt).expect("power of psi"))
        .collect();
    exps.sort_unstable();
    assert_eq!(exps, (0..n as u64).map(|j| 2 * j + 1).collect::<Vec<_>>());
    for a in inputs {
        let spec = elem(&ring, a.clone()).ntt_forward().unwrap();
        for (k, &pt) in points.iter().enumerate() {
            let mut acc = 0;
            let mut pw = 1;
            for &c in a {
                acc = m.add(acc, m.mul(c, pw));
                pw = m.mul(pw, pt);
            }
            assert_eq!(spec.coeffs()[k], acc, "slot {k}");
        }
    }
}

#[test]
fn ntt_constant_polynomial() {
    evaluation_oracle(4, 97, &[vec![5, 0, 0, 0]]);
    let ring = RingContext::new(4, 97).unwrap();
    let c = elem(&ring, vec![5, 0, 0, 0]).ntt_forward().unwrap();
    assert!(c.coeffs().iter().all(|&x| x == 5));
}

#[test]
fn ntt_matches_evaluation_at_odd_powers() {
    let mut rng = Sampler::new(2);
    let inputs: Vec<Vec<u64>> = (0..20).map(|_| rng.uniform_vec(16, 97)).collect();
    evaluation_oracle(16, 97, &inputs);
    let inputs: Vec<Vec<u64>> = (0..3).map(|_| rng.uniform_vec(64, 134215681)).collect();
    evaluation_oracle(64, 134215681, &inputs);
}

#[test]
fn ntt_zero_and_delta() {
    let ring = RingContext::new(16, 97).unwrap();
    let zero = RingElement::zero(&ring, Domain::Coefficient);
    assert!(zero.ntt_forward().unwrap().coeffs().iter().all(|&x| x == 0));
    assert!(RingElement::zero(&ring, Domain::Ntt).ntt_inverse().unwrap().coeffs().iter().all(|&x| x == 0));
    let delta = RingElement::monomial(&ring, 1, 0);
    assert_eq!(delta.ntt_forward().unwrap().ntt_inverse().unwrap(), delta);
}

#[test]
fn ntt_roundtrip_thousand_elements() {
    let mut rng = Sampler::new(3);
    for (n, q) in [(16usize, 97u64), (1024, 134215681), (2048, 1125899906826241)] {
        let ring = RingContext::new(n, q).unwrap();
        let count = if n == 16 { 1000 } else { 100 };
        for _ in 0..count {
            let a = elem(&ring, rng.uniform_vec(n, q));
            assert_eq!(a.ntt_forward().unwrap().ntt_inverse().unwrap(), a);
        }
    }
}

#[test]
fn domain_and_ring_mismatches_rejected() {
    let ring = RingContext::new(16, 97).unwrap();
    let other = RingContext::new(16, 193).unwrap();
    let a = RingElement::monomial(&ring, 3, 2);
    let a_hat = a.ntt_forward().unwrap();
    assert!(matches!(a_hat.ntt_forward(), Err(Error::Domain { .. })));
    assert!(matches!(a.ntt_inverse(), Err(Error::Domain { .. })));
    assert!(matches!(a.add(&a_hat), Err(Error::Domain { .. })));
    assert!(matches!(a.pointwise_mul(&a), Err(Error::Domain { .. })));
    assert!(matches!(a.add(&RingElement::monomial(&other, 1, 0)), Err(Error::RingMismatch(..))));
    assert!(RingElement::from_coeffs(&ring, vec![0; 15], Domain::Coefficient).is_err());
    let reduced = RingElement::from_coeffs(&ring, vec![97 + 5; 16], Domain::Coefficient).unwrap();
    assert!(reduced.coeffs().iter().all(|&c| c == 5));
}

#[test]
fn small_products() {
    let ring = RingContext::new(4, 97).unwrap();
    let one_plus_x = elem(&ring, vec![1, 1, 0, 0]);
    assert_eq!(poly_mul_negacyclic(&one_plus_x, &one_plus_x).unwrap().coeffs(), &[1, 2, 1, 0]);
    for n in [4, 16, 1024] {
        let q = if n == 1024 { 134215681 } else { 97 };
        let ring = RingContext::new(n, q).unwrap();
        let top = RingElement::monomial(&ring, 1, n - 1);
        let x = RingElement::monomial(&ring, 1, 1);
        let mut want = vec![0; n];
        want[0] = q - 1;
        assert_eq!(poly_mul_negacyclic(&top, &x).unwrap().coeffs(), want.as_slice());
    }
}

#[test]
fn schoolbook_oracle_200_pairs() {
    let mut rng = Sampler::new(4);
    for (n, q) in [(16usize, 97u64), (1024, 134215681)] {
        let ring = RingContext::new(n, q).unwrap();
        for _ in 0..200 {
            let (a, b) = (rng.uniform_vec(n, q), rng.uniform_vec(n, q));
            let fast = poly_mul_negacyclic(&elem(&ring, a.clone()), &elem(&ring, b.clone())).unwrap();
            assert_eq!(fast.coeffs(), schoolbook_negacyclic(&a, &b, q).as_slice());
        }
    }
}

#[test]
fn monomial_examples() {
    let ring = RingContext::new(8, 97).unwrap();
    let a = elem(&ring, (1..=8).collect());
    assert_eq!(a.monomial_mul(0).unwrap(), a);
    assert_eq!(a.monomial_mul(8).unwrap(), a.neg());
    assert_eq!(a.monomial_mul(1).unwrap().coeffs(), &[97 - 8, 1, 2, 3, 4, 5, 6, 7]);
    assert!(a.ntt_forward().unwrap().monomial_mul(1).is_err());
}

fn coeffs16() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..97, 16)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roundtrip_any(a in coeffs16()) {
        let ring = RingContext::new(16, 97).unwrap();
        let x = elem(&ring, a);
        prop_assert_eq!(x.ntt_forward().unwrap().ntt_inverse().unwrap(), x);
    }

    #[test]
    fn product_matches_schoolbook(a in coeffs16(), b in coeffs16()) {
        let ring = RingContext::new(16, 97).unwrap();
        let fast = poly_mul_negacyclic(&elem(&ring, a.clone()), &elem(&ring, b.clone())).unwrap();
        let slow = schoolbook_negacyclic(&a, &b, 97);
        prop_assert_eq!(fast.coeffs(), slow.as_slice());
    }

    #[test]
    fn ring_laws(a in coeffs16(), b in coeffs16(), c in coeffs16()) {
        let ring = RingContext::new(16, 97).unwrap();
        let (a, b, c) = (elem(&ring, a), elem(&ring, b), elem(&ring, c));
        let mul = |x: &RingElement, y: &RingElement| poly_mul_negacyclic(x, y).unwrap();
        prop_assert_eq!(mul(&a, &b), mul(&b, &a));
        prop_assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
        prop_assert_eq!(mul(&a, &b.add(&c).unwrap()), mul(&a, &b).add(&mul(&a, &c)).unwrap());
        let zero = RingElement::zero(&ring, Domain::Coefficient);
        prop_assert_eq!(a.add(&zero).unwrap(), a.clone());
        prop_assert_eq!(a.sub(&a).unwrap(), zero);
        prop_assert_eq!(a.scalar_mul(3), a.add(&a).unwrap().add(&a).unwrap());
    }

    #[test]
    fn pointwise_is_the_product(a in coeffs16(), b in coeffs16()) {
        let ring = RingContext::new(16, 97).unwrap();
        let (a, b) = (elem(&ring, a), elem(&ring, b));
        let via_ntt = a.ntt_forward().unwrap().pointwise_mul(&b.ntt_forward().unwrap()).unwrap().ntt_inverse().unwrap();
        prop_assert_eq!(via_ntt, poly_mul_negacyclic(&a, &b).unwrap());
    }

    #[test]
    fn monomials_compose(a in coeffs16(), m1 in 0usize..32, m2 in 0usize..32) {
        let ring = RingContext::new(16, 97).unwrap();
        let a = elem(&ring, a);
        let twice = a.monomial_mul(m1).unwrap().monomial_mul(m2).unwrap();
        prop_assert_eq!(twice, a.monomial_mul((m1 + m2) % 32).unwrap());
        let via_product = poly_mul_negacyclic(&a, &RingElement::monomial(&ring, 1, m1)).unwrap();
        prop_assert_eq!(a.monomial_mul(m1).unwrap(), via_product);
    }

    #[test]
    fn modulus_ops_agree_with_u128(a in 0u64..134215681, b in 0u64..134215681) {
        let m = Modulus::new(134215681);
        let q = 134215681u128;
        prop_assert_eq!(m.add(a, b) as u128, (a as u128 + b as u128) % q);
        prop_assert_eq!(m.sub(a, b) as u128, (a as u128 + q - b as u128) % q);
        prop_assert_eq!(m.mul_shoup(a, b, m.shoup(b)) as u128, a as u128 * b as u128 % q);
        prop_assert_eq!(m.from_signed(m.centered(a)), a);
    }
}
