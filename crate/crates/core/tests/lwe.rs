use fhew_pim::lwe::{
    decode, decrypt, decrypt_bit, encode, encrypt, encrypt_bit, key_switch, keygen, keyswitch_keygen,
    modulus_switch, LweCiphertext, LweSecretKey,
};
use fhew_pim::params::{all_param_sets, load_param_set, SecretDist};
use fhew_pim::sampler::Sampler;
use proptest::prelude::*;

fn centered(x: u64, m: u64) -> i64 {
    if x > m / 2 {
        x as i64 - m as i64
    } else {
        x as i64
    }
}

#[test]
fn keygen_is_deterministic_and_in_distribution() {
    let p = load_param_set("STD128").unwrap();
    for dist in [SecretDist::Binary, SecretDist::Ternary] {
        let a = keygen(&p, dist, &mut Sampler::new(7));
        let b = keygen(&p, dist, &mut Sampler::new(7));
        let c = keygen(&p, dist, &mut Sampler::new(8));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.dim(), 512);
        let allowed: &[i64] = if dist == SecretDist::Binary { &[0, 1] } else { &[-1, 0, 1] };
        assert!(a.signed().iter().all(|s| allowed.contains(s)));
        for v in allowed {
            assert!(a.signed().contains(v), "{dist:?} never drew {v}");
        }
    }
}

#[test]
fn encode_examples() {
    assert_eq!(encode(1, 4, 512).unwrap(), 128);
    assert_eq!(encode(0, 4, 512).unwrap(), 0);
    assert_eq!(encode(3, 4, 1024).unwrap(), 768);
    assert_eq!(encode(5, 4, 512).unwrap(), 128);
    assert!(encode(1, 3, 512).is_err());
    assert!(encode(1, 1024, 512).is_err());
}

#[test]
fn decode_rounds_half_up() {
    // q/8 is the boundary between 0 and 1
    assert_eq!(decode(63, 4, 512), 0);
    assert_eq!(decode(64, 4, 512), 1);
    assert_eq!(decode(511, 4, 512), 0);
    assert_eq!(decode(448, 4, 512), 0);
    assert_eq!(decode(447, 4, 512), 3);
}

#[test]
fn degenerate_encryption_is_trivial() {
    let p = load_param_set("STD128").unwrap();
    let sk = keygen(&p, SecretDist::Ternary, &mut Sampler::new(1));
    let ct = encrypt(&sk, 128, p.error_stddev, &mut Sampler::degenerate());
    assert_eq!(ct, LweCiphertext::trivial(512, 128, 512));
    assert_eq!(decrypt(&sk, &ct), 1);
}

#[test]
fn decrypt_boundaries() {
    let sk = LweSecretKey::from_signed(&[1, -1, 0, 1], 512, SecretDist::Ternary);
    let mut ct = LweCiphertext { a: vec![5, 9, 300, 1], b: 0, modulus: 512 };
    let dot = (5i64 - 9 + 1).rem_euclid(512) as u64;
    for (phase, bit) in [(0u64, 0u64), (63, 0), (64, 1), (128, 1), (191, 1), (192, 2)] {
        ct.b = (dot + phase) % 512;
        assert_eq!(ct.phase(&sk), phase);
        assert_eq!(decrypt(&sk, &ct), bit, "phase {phase}");
    }
}

#[test]
fn fresh_encryptions_decrypt_under_every_set() {
    for p in all_param_sets() {
        if p.name == "TOY" {
            continue;
        }
        let mut s = Sampler::new(99);
        for dist in [SecretDist::Binary, SecretDist::Ternary] {
            let sk = keygen(&p, dist, &mut s);
            for i in 0..1000 {
                let bit = i % 2 == 1;
                let ct = encrypt_bit(&p, &sk, bit, &mut s);
                assert_eq!(decrypt_bit(&sk, &ct), bit, "{} {dist:?} #{i}", p.name);
                let e = centered((ct.phase(&sk) + p.lwe_modulus - encode(bit as u64, 4, p.lwe_modulus).unwrap()) % p.lwe_modulus, p.lwe_modulus);
                assert!(e.abs() < (p.lwe_modulus / 8) as i64);
            }
        }
    }
}

#[test]
fn phase_is_additive() {
    let p = load_param_set("STD128").unwrap();
    let mut s = Sampler::new(3);
    let sk = keygen(&p, SecretDist::Ternary, &mut s);
    for _ in 0..200 {
        let (m1, m2) = (s.uniform(512), s.uniform(512));
        let c1 = encrypt(&sk, m1, 3.19, &mut s);
        let c2 = encrypt(&sk, m2, 3.19, &mut s);
        let (k1, k2) = ((s.next_u64() % 7) as i64 - 3, (s.next_u64() % 7) as i64 - 3);
        let sum = c1.combine(k1, &c2, k2, 11).unwrap();
        let want = (k1 * c1.phase(&sk) as i64 + k2 * c2.phase(&sk) as i64 + 11).rem_euclid(512) as u64;
        assert_eq!(sum.phase(&sk), want);
        assert_eq!(c1.add(&c2).unwrap().phase(&sk), (c1.phase(&sk) + c2.phase(&sk)) % 512);
        assert_eq!(c1.scale_shift(2, 5).phase(&sk), (2 * c1.phase(&sk) + 5) % 512);
    }
    let other = LweCiphertext::trivial(511, 0, 512);
    assert!(LweCiphertext::trivial(512, 0, 512).add(&other).is_err());
}

#[test]
fn modulus_switch_examples() {
    let big = 134215681u64;
    let ct = LweCiphertext { a: vec![0, big - 1, big / 2, big / 4], b: 1, modulus: big };
    let out = modulus_switch(&ct, 512);
    assert_eq!(out.modulus, 512);
    assert_eq!(out.a[0], 0);
    assert_eq!(out.a[1], 0);
    assert_eq!(out.a[2], 256);
    assert_eq!(out.a[3], 128);
    assert_eq!(out.b, 0);
}

proptest! {
    #[test]
    fn modulus_switch_rounds_to_nearest(x in 0u64..1125899906826241, qexp in 4u32..12) {
        let big = 1125899906826241u64;
        let q = 1u64 << qexp;
        let got = modulus_switch(&LweCiphertext { a: vec![x], b: x, modulus: big }, q);
        // quotient plus a half-up remainder test
        let prod = x as u128 * q as u128;
        let (quo, rem) = (prod / big as u128, prod % big as u128);
        let want = ((quo + (2 * rem >= big as u128) as u128) % q as u128) as u64;
        prop_assert_eq!(got.a[0], want);
        prop_assert_eq!(got.b, want);
    }
}

#[test]
fn modulus_switch_preserves_messages() {
    let p = load_param_set("STD128").unwrap();
    let big = p.ring_modulus;
    let mut s = Sampler::new(5);
    let signed: Vec<i64> = (0..p.lwe_dim).map(|_| s.secret(SecretDist::Ternary)).collect();
    let wide = LweSecretKey::from_signed(&signed, big, SecretDist::Ternary);
    let narrow = LweSecretKey::from_signed(&signed, p.lwe_modulus, SecretDist::Ternary);
    for i in 0..100u64 {
        let m = i % 4;
        let ct = encrypt(&wide, encode(m, 4, big - big % 4).unwrap(), 3.19, &mut s);
        assert_eq!(decrypt(&wide, &ct), m);
        assert_eq!(decrypt(&narrow, &modulus_switch(&ct, p.lwe_modulus)), m);
    }
}

#[test]
fn keyswitch_key_shape_and_entries() {
    let p = load_param_set("TOY").unwrap();
    let mut s = Sampler::noiseless(11);
    let source: Vec<i64> = (0..p.ring_dim).map(|_| s.secret(SecretDist::Binary)).collect();
    let target = keygen(&p, SecretDist::Binary, &mut s);
    let ksk = keyswitch_keygen(&source, &target, &p, &mut s);
    assert_eq!(ksk.shape(), (16, p.ks_digits, 4));
    assert_eq!(ksk.target_dim(), 4);
    assert_eq!(ksk.modulus(), 97);
    let q = 97i64;
    for (i, j, v) in [(2usize, 1usize, 3usize), (0, 0, 0), (15, 3, 2)] {
        let e = ksk.entry(i, j, v);
        let want = (v as i64 * source[i] * 4i64.pow(j as u32)).rem_euclid(q) as u64;
        assert_eq!(e.phase(&LweSecretKey::from_signed(&target.signed(), 97, SecretDist::Binary)), want);
    }
}

#[test]
fn key_switch_is_exact_without_noise() {
    let p = load_param_set("TOY").unwrap();
    let mut s = Sampler::noiseless(12);
    let source: Vec<i64> = (0..p.ring_dim).map(|_| s.secret(SecretDist::Binary)).collect();
    let target = keygen(&p, SecretDist::Binary, &mut s);
    let ksk = keyswitch_keygen(&source, &target, &p, &mut s);
    for _ in 0..100 {
        let ct = LweCiphertext { a: s.uniform_vec(16, 97), b: s.uniform(97), modulus: 97 };
        let out = key_switch(&ct, &ksk).unwrap();
        assert_eq!(out.dim(), 4);
        assert_eq!(out.phase_signed(&target.signed()), ct.phase_signed(&source));
        // a second switch is a shape error
        assert!(key_switch(&out, &ksk).is_err());
    }
}

#[test]
fn key_switch_noise_stays_bounded() {
    let p = load_param_set("STD128").unwrap();
    let mut s = Sampler::new(13);
    let source: Vec<i64> = (0..p.ring_dim).map(|_| s.secret(SecretDist::Binary)).collect();
    let target = keygen(&p, SecretDist::Ternary, &mut s);
    let ksk = keyswitch_keygen(&source, &target, &p, &mut s);
    let big = p.ring_modulus;
    let terms = (p.ring_dim * p.ks_digits) as f64;
    let bound = (6.0 * p.error_stddev * terms.sqrt()) as i64;
    for _ in 0..20 {
        let ct = LweCiphertext { a: s.uniform_vec(p.ring_dim, big), b: s.uniform(big), modulus: big };
        let out = key_switch(&ct, &ksk).unwrap();
        let diff = (out.phase_signed(&target.signed()) + big - ct.phase_signed(&source)) % big;
        assert!(centered(diff, big).abs() <= bound, "drift {} > {bound}", centered(diff, big));
    }
}
