//! LWE encryption on the client side, plus key switching and modulus
//! switching on the server side.

use crate::error::{Error, Result};
use crate::params::{ParamSet, SecretDist};
use crate::ring::Modulus;
use crate::sampler::Sampler;
use crate::storage::WordBuf;

/// LWE secret with coefficients stored mod q (-1 is q-1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LweSecretKey {
    coeffs: Vec<u64>,
    modulus: u64,
    dist: SecretDist,
}

impl LweSecretKey {
    /// Wraps signed coefficients in {-1, 0, 1}.
    pub fn from_signed(signed: &[i64], modulus: u64, dist: SecretDist) -> Self {
        let coeffs = signed.iter().map(|&s| s.rem_euclid(modulus as i64) as u64).collect();
        LweSecretKey { coeffs, modulus, dist }
    }

    /// Wraps coefficients already reduced mod `modulus`.
    pub fn from_residues(coeffs: Vec<u64>, modulus: u64, dist: SecretDist) -> Result<Self> {
        let key = LweSecretKey { coeffs, modulus, dist };
        if key.signed().iter().any(|&s| !(-1..=1).contains(&s)) {
            return Err(Error::Format("secret coefficient outside {-1, 0, 1}".into()));
        }
        Ok(key)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dist(&self) -> SecretDist {
        self.dist
    }

    /// Coefficients as residues mod q.
    pub fn residues(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficients in {-1, 0, 1}.
    pub fn signed(&self) -> Vec<i64> {
        let m = self.modulus;
        self.coeffs.iter().map(|&c| if c > m / 2 { c as i64 - m as i64 } else { c as i64 }).collect()
    }
}

/// An LWE ciphertext `(a, b)` over an explicit modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LweCiphertext {
    pub a: Vec<u64>,
    pub b: u64,
    pub modulus: u64,
}

impl LweCiphertext {
    /// Trivial (noiseless, zero-mask) encryption of `b`.
    pub fn trivial(dim: usize, b: u64, modulus: u64) -> Self {
        LweCiphertext { a: vec![0; dim], b: b % modulus, modulus }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    fn check_pair(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus || self.a.len() != other.a.len() {
            return Err(Error::Shape(format!(
                "ciphertexts (dim {}, mod {}) and (dim {}, mod {})",
                self.a.len(),
                self.modulus,
                other.a.len(),
                other.modulus
            )));
        }
        Ok(())
    }

    /// `c1 * self + c2 * other + (0, c0)` mod the shared modulus.
    pub fn combine(&self, c1: i64, other: &Self, c2: i64, c0: u64) -> Result<Self> {
        self.check_pair(other)?;
        let m = self.modulus as i128;
        let lin = |x: u64, y: u64| ((c1 as i128 * x as i128 + c2 as i128 * y as i128).rem_euclid(m)) as u64;
        let a = self.a.iter().zip(&other.a).map(|(&x, &y)| lin(x, y)).collect();
        let b = ((lin(self.b, other.b) as i128 + c0 as i128) % m) as u64;
        Ok(LweCiphertext { a, b, modulus: self.modulus })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(1, other, 1, 0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1, other, -1, 0)
    }

    /// `c * self + (0, c0)`.
    pub fn scale_shift(&self, c: i64, c0: u64) -> Self {
        let m = self.modulus as i128;
        let f = |x: u64| ((c as i128 * x as i128).rem_euclid(m)) as u64;
        LweCiphertext {
            a: self.a.iter().map(|&x| f(x)).collect(),
            b: ((f(self.b) as i128 + c0 as i128) % m) as u64,
            modulus: self.modulus,
        }
    }

    /// `b - <a, key>` mod the ciphertext modulus, for a signed key.
    pub fn phase_signed(&self, key: &[i64]) -> u64 {
        assert_eq!(key.len(), self.a.len(), "key dimension");
        let m = self.modulus as i128;
        let dot: i128 = self.a.iter().zip(key).map(|(&a, &s)| a as i128 * s as i128).sum();
        ((self.b as i128 - dot).rem_euclid(m)) as u64
    }

    /// Phase under an LWE secret key.
    pub fn phase(&self, sk: &LweSecretKey) -> u64 {
        self.phase_signed(&sk.signed())
    }
}

/// Samples a fresh secret key of dimension n from `dist`.
pub fn keygen(params: &ParamSet, dist: SecretDist, sampler: &mut Sampler) -> LweSecretKey {
    let signed: Vec<i64> = (0..params.lwe_dim).map(|_| sampler.secret(dist)).collect();
    LweSecretKey::from_signed(&signed, params.lwe_modulus, dist)
}

/// Scales `m mod t` to `(m mod t) * q / t`, so bit 1 sits at q/4 for t = 4.
pub fn encode(m: u64, t: u64, q: u64) -> Result<u64> {
    if t == 0 || !t.is_power_of_two() || q % t != 0 {
        return Err(Error::Param(format!("plaintext modulus {t} must be a power of two dividing {q}")));
    }
    Ok((m % t) * (q / t))
}

/// Rounds a phase to the nearest multiple of q/t (half up) and returns it mod t.
pub fn decode(phase: u64, t: u64, q: u64) -> u64 {
    let scaled = (t as u128 * (phase % q) as u128 + (q / 2) as u128) / q as u128;
    (scaled % t as u128) as u64
}

/// LWE encryption `(a, <a, s> + e + m)` mod `sk.modulus()`.
pub fn encrypt(sk: &LweSecretKey, encoded: u64, stddev: f64, sampler: &mut Sampler) -> LweCiphertext {
    let q = sk.modulus;
    let a = sampler.uniform_vec(sk.dim(), q);
    let dot = a.iter().zip(&sk.coeffs).fold(0u128, |acc, (&x, &s)| acc + x as u128 * s as u128);
    let e = sampler.gaussian(stddev);
    let b = ((dot as i128 + e as i128 + encoded as i128).rem_euclid(q as i128)) as u64;
    LweCiphertext { a, b, modulus: q }
}

/// Encrypts one bit under the set's error width.
pub fn encrypt_bit(params: &ParamSet, sk: &LweSecretKey, bit: bool, sampler: &mut Sampler) -> LweCiphertext {
    let m = encode(bit as u64, params.plaintext_modulus, params.lwe_modulus).expect("valid set");
    encrypt(sk, m, params.error_stddev, sampler)
}

/// `round(4 * phase / q) mod 4` with half-up rounding.
pub fn decrypt(sk: &LweSecretKey, ct: &LweCiphertext) -> u64 {
    decode(ct.phase(sk), 4, ct.modulus)
}

/// Decrypts and interprets the result as a bit (1 is true).
pub fn decrypt_bit(sk: &LweSecretKey, ct: &LweCiphertext) -> bool {
    decrypt(sk, ct) == 1
}

/// Rescales every component from modulus Q to `q` as `floor((2xq + Q) / 2Q) mod q`.
pub fn modulus_switch(ct: &LweCiphertext, q: u64) -> LweCiphertext {
    let big = ct.modulus as u128;
    let f = |x: u64| (((2 * x as u128 * q as u128 + big) / (2 * big)) % q as u128) as u64;
    LweCiphertext { a: ct.a.iter().map(|&x| f(x)).collect(), b: f(ct.b), modulus: q }
}

/// Key-switching key: for every source coordinate i, digit position j and
/// digit value v, an LWE encryption of `v * z_i * B^j` under the target key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySwitchKey {
    source_dim: usize,
    digits: usize,
    base: u64,
    target_dim: usize,
    modulus: u64,
    words: WordBuf,
}

impl KeySwitchKey {
    /// `(source dim, digits, base)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.source_dim, self.digits, self.base as usize)
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn words(&self) -> &WordBuf {
        &self.words
    }

    /// Reassembles a key from its shape and flat words.
    pub fn from_words(
        source_dim: usize,
        digits: usize,
        base: u64,
        target_dim: usize,
        modulus: u64,
        words: WordBuf,
    ) -> Result<Self> {
        let expect = source_dim * digits * base as usize * (target_dim + 1);
        if words.len() != expect {
            return Err(Error::Format(format!("key-switch key holds {} words, expected {expect}", words.len())));
        }
        Ok(KeySwitchKey { source_dim, digits, base, target_dim, modulus, words })
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, v: usize) -> usize {
        ((i * self.digits + j) * self.base as usize + v) * (self.target_dim + 1)
    }

    /// Entry `[i][j][v]` as a ciphertext.
    pub fn entry(&self, i: usize, j: usize, v: usize) -> LweCiphertext {
        let mut buf = vec![0; self.target_dim + 1];
        self.words.read(self.offset(i, j, v), &mut buf);
        let b = buf.pop().unwrap();
        LweCiphertext { a: buf, b, modulus: self.modulus }
    }

    /// Size of the stored key in bytes.
    pub fn byte_len(&self) -> usize {
        self.words.byte_len()
    }
}

/// Builds the key that switches ciphertexts under the dimension-N `source`
/// key (signed coefficients) to the target LWE key, both mod Q.
pub fn keyswitch_keygen(
    source: &[i64],
    target: &LweSecretKey,
    params: &ParamSet,
    sampler: &mut Sampler,
) -> KeySwitchKey {
    let q = params.ring_modulus;
    let m = Modulus::new(q);
    let base = params.ks_base;
    let digits = params.ks_digits;
    let n = target.dim();
    let target_signed = target.signed();
    let target_mod: Vec<u64> = target_signed.iter().map(|&s| m.from_signed(s)).collect();
    let entries = source.len() * digits * base as usize;
    let mut words = WordBuf::for_modulus(entries * (n + 1), q);
    let mut row = vec![0u64; n + 1];
    let mut idx = 0;
    for &z in source {
        let z = m.from_signed(z);
        let mut power = 1u64;
        for _ in 0..digits {
            let unit = m.mul(z, power);
            let mut msg = 0u64;
            for _ in 0..base {
                let mut dot = 0u128;
                for (k, &s) in target_mod.iter().enumerate() {
                    let a = sampler.uniform(q);
                    row[k] = a;
                    dot += a as u128 * s as u128;
                }
                let e = m.from_signed(sampler.gaussian(params.error_stddev));
                let dot = (dot % q as u128) as u64;
                row[n] = m.add(m.add(dot, e), msg);
                words.write(idx * (n + 1), &row);
                idx += 1;
                msg = m.add(msg, unit);
            }
            power = m.mul(power, base);
        }
    }
    KeySwitchKey { source_dim: source.len(), digits, base, target_dim: n, modulus: q, words }
}

/// Switches a dimension-N ciphertext mod Q to the key-switch key's target key.
pub fn key_switch(ct: &LweCiphertext, ksk: &KeySwitchKey) -> Result<LweCiphertext> {
    if ct.dim() != ksk.source_dim || ct.modulus != ksk.modulus {
        return Err(Error::Shape(format!(
            "key switch expects dim {} mod {}, got dim {} mod {}",
            ksk.source_dim,
            ksk.modulus,
            ct.dim(),
            ct.modulus
        )));
    }
    let q = ksk.modulus;
    let m = Modulus::new(q);
    let width = ksk.target_dim + 1;
    let mut acc = vec![0u64; width];
    // how many unreduced entries fit in a u64 lane
    let batch = (u64::MAX / q).min(1 << 20) as usize - 1;
    let mut pending = 0usize;
    for (i, &ai) in ct.a.iter().enumerate() {
        let mut rest = ai;
        for j in 0..ksk.digits {
            let v = (rest % ksk.base) as usize;
            rest /= ksk.base;
            ksk.words.add_to(ksk.offset(i, j, v), &mut acc);
            pending += 1;
            if pending == batch {
                acc.iter_mut().for_each(|x| *x = m.reduce(*x));
                pending = 1;
            }
        }
    }
    acc.iter_mut().for_each(|x| *x = m.reduce(*x));
    let b = m.sub(ct.b, acc[width - 1]);
    acc.truncate(width - 1);
    let a = acc.into_iter().map(|x| m.neg(x)).collect();
    Ok(LweCiphertext { a, b, modulus: q })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_levels() {
        assert_eq!(encode(0, 4, 512).unwrap(), 0);
        assert_eq!(encode(1, 4, 512).unwrap(), 128);
        assert_eq!(encode(5, 4, 512).unwrap(), 128);
        assert!(encode(1, 3, 512).is_err());
    }

    #[test]
    fn decode_half_up() {
        assert_eq!(decode(64, 4, 512), 1);
        assert_eq!(decode(63, 4, 512), 0);
        assert_eq!(decode(32, 4, 512), 0);
        assert_eq!(decode(511, 4, 512), 0);
    }

    #[test]
    fn modulus_switch_wraps_top() {
        let ct = LweCiphertext::trivial(1, 134215680, 134215681);
        assert_eq!(modulus_switch(&ct, 512).b, 0);
    }
}
