//! LWE encryption and decryption of bits, plus the noise that a fresh
//! ciphertext carries.

use fhew_pim::lwe::{decrypt_bit, encrypt_bit, keygen};
use fhew_pim::params::{load_param_set, SecretDist};
use fhew_pim::sampler::Sampler;

fn main() -> fhew_pim::Result<()> {
    let params = load_param_set("STD128")?;
    let mut rng = Sampler::new(42);
    let sk = keygen(&params, SecretDist::Ternary, &mut rng);

    let bits = [true, false, true, true];
    let cts: Vec<_> = bits.iter().map(|&b| encrypt_bit(&params, &sk, b, &mut rng)).collect();
    let back: Vec<bool> = cts.iter().map(|ct| decrypt_bit(&sk, ct)).collect();
    println!("in  {bits:?}\nout {back:?}");

    let q = params.lwe_modulus as i64;
    let quarter = q / 4;
    let mut worst = 0i64;
    for i in 0..1000 {
        let bit = i % 2 == 1;
        let ct = encrypt_bit(&params, &sk, bit, &mut rng);
        let phase = ct.phase(&sk) as i64;
        let expect = if bit { quarter } else { 0 };
        let e = (phase - expect).rem_euclid(q);
        let e = if e > q / 2 { e - q } else { e };
        worst = worst.max(e.abs());
    }
    println!("largest fresh noise over 1000 encryptions: {worst} (decryption fails past {})", q / 8);
    Ok(())
}
