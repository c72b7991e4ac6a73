//! RGSW ciphertexts, signed digit decomposition and the external product.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{Domain, Modulus, RingContext, RingElement};
use crate::sampler::Sampler;
use crate::storage::WordBuf;

/// Operation counters filled in by the accumulation loops.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub bootstraps: u64,
    pub external_products: u64,
    pub forward_ntts: u64,
    pub inverse_ntts: u64,
    /// Butterfly stages executed across all transforms.
    pub ntt_stages: u64,
}

impl OpCounts {
    pub fn merge(&mut self, other: &OpCounts) {
        self.bootstraps += other.bootstraps;
        self.external_products += other.external_products;
        self.forward_ntts += other.forward_ntts;
        self.inverse_ntts += other.inverse_ntts;
        self.ntt_stages += other.ntt_stages;
    }
}

/// The ring secret behind the RGSW keys, kept in both signed and NTT form.
#[derive(Debug, Clone)]
pub struct RlweSecret {
    signed: Vec<i64>,
    ntt: Vec<u64>,
    ring: Arc<RingContext>,
}

impl RlweSecret {
    pub fn from_signed(ring: &Arc<RingContext>, signed: Vec<i64>) -> Result<Self> {
        if signed.len() != ring.ring_dim() {
            return Err(Error::Shape(format!("ring secret needs {} coefficients", ring.ring_dim())));
        }
        let m = ring.modulus();
        let mut ntt: Vec<u64> = signed.iter().map(|&s| m.from_signed(s)).collect();
        let mut scratch = vec![0; ntt.len()];
        ring.forward(&mut ntt, &mut scratch);
        Ok(RlweSecret { signed, ntt, ring: ring.clone() })
    }

    /// Coefficients as signed integers (the dimension-N LWE key after extraction).
    pub fn signed(&self) -> &[i64] {
        &self.signed
    }

    pub fn ntt(&self) -> &[u64] {
        &self.ntt
    }

    pub fn ring(&self) -> &Arc<RingContext> {
        &self.ring
    }

    /// The secret as a coefficient-domain ring element.
    pub fn to_ring_element(&self) -> RingElement {
        RingElement::from_signed(&self.ring, &self.signed).expect("matching length")
    }
}

/// An RLWE ciphertext `(mask, body)` in coefficient domain; phase is `body - mask * z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accumulator {
    pub mask: Vec<u64>,
    pub body: Vec<u64>,
}

impl Accumulator {
    pub fn zero(ring_dim: usize) -> Self {
        Accumulator { mask: vec![0; ring_dim], body: vec![0; ring_dim] }
    }

    /// Phase `body - mask * z` computed with the NTT.
    pub fn phase(&self, z: &RlweSecret) -> Vec<u64> {
        let ring = z.ring();
        let m = ring.modulus();
        let mut prod = self.mask.clone();
        let mut scratch = vec![0; prod.len()];
        ring.forward(&mut prod, &mut scratch);
        for (p, &s) in prod.iter_mut().zip(z.ntt()) {
            *p = m.mul(*p, s);
        }
        ring.inverse(&mut prod, &mut scratch);
        self.body.iter().zip(&prod).map(|(&b, &p)| m.sub(b, p)).collect()
    }

    /// The pair as typed ring elements.
    pub fn to_ring_elements(&self, ring: &Arc<RingContext>) -> (RingElement, RingElement) {
        (
            RingElement::from_coeffs(ring, self.mask.clone(), Domain::Coefficient).expect("length"),
            RingElement::from_coeffs(ring, self.body.clone(), Domain::Coefficient).expect("length"),
        )
    }
}

/// Gadget decomposition settings shared by keys and accumulators.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub base_log: u32,
    pub digits: usize,
    modulus: Modulus,
}

impl Gadget {
    pub fn new(base: u64, digits: usize, modulus: u64) -> Self {
        assert!(base.is_power_of_two() && base >= 2, "gadget base must be a power of two");
        Gadget { base_log: base.trailing_zeros(), digits, modulus: Modulus::new(modulus) }
    }

    pub fn base(&self) -> u64 {
        1 << self.base_log
    }

    /// Signed digits of one residue: each in `[-B/2, B/2)`, recomposing to
    /// `c mod Q`.
    pub fn decompose(&self, c: u64, out: &mut [i64]) {
        let q = self.modulus.value() as i64;
        let centered = self.modulus.centered(c);
        if !self.try_digits(centered, out) {
            // the top digit overflowed; the other representative fits
            let alt = if centered >= 0 { centered - q } else { centered + q };
            let ok = self.try_digits(alt, out);
            debug_assert!(ok, "no signed representation for {c}");
        }
    }

    #[inline]
    fn try_digits(&self, mut x: i64, out: &mut [i64]) -> bool {
        let b = 1i64 << self.base_log;
        let half = b >> 1;
        let mask = b - 1;
        for d in out.iter_mut().take(self.digits) {
            let mut r = x & mask;
            if r >= half {
                r -= b;
            }
            *d = r;
            x = (x - r) >> self.base_log;
        }
        x == 0
    }

    /// `B^k mod Q`.
    pub fn power(&self, k: usize) -> u64 {
        self.modulus.pow(self.base(), k as u64)
    }
}

/// Splits both accumulator polynomials into `2 * digits` polynomials (mask
/// digits first), each coefficient a signed digit represented mod Q.
pub fn signed_digit_decompose(acc: &Accumulator, gadget: &Gadget) -> Vec<Vec<u64>> {
    let n = acc.mask.len();
    let d = gadget.digits;
    let mut out = vec![vec![0u64; n]; 2 * d];
    decompose_into(acc, gadget, &mut out);
    out
}

fn decompose_into(acc: &Accumulator, gadget: &Gadget, out: &mut [Vec<u64>]) {
    #[cfg(target_arch = "x86_64")]
    if std::is_x86_feature_detected!("avx2") {
        // SAFETY: AVX2 support was just checked.
        return unsafe { decompose_avx2(acc, gadget, out) };
    }
    decompose_body(acc, gadget, out)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn decompose_avx2(acc: &Accumulator, gadget: &Gadget, out: &mut [Vec<u64>]) {
    decompose_body(acc, gadget, out)
}

/// Digit-major form of [`Gadget::decompose`] so the inner loop runs across
/// coefficients; the rare coefficients left with a carry are redone singly.
#[inline(always)]
fn decompose_body(acc: &Accumulator, gadget: &Gadget, out: &mut [Vec<u64>]) {
    let d = gadget.digits;
    let q = gadget.modulus.value();
    let upper = q.div_ceil(2);
    let b = 1i64 << gadget.base_log;
    let (half_b, mask) = (b >> 1, b - 1);
    let mut rest = vec![0i64; acc.mask.len()];
    let mut digits = vec![0i64; d];
    for (h, poly) in [&acc.mask, &acc.body].into_iter().enumerate() {
        for (x, &c) in rest.iter_mut().zip(poly.iter()) {
            *x = if c >= upper { c as i64 - q as i64 } else { c as i64 };
        }
        for row in out[h * d..(h + 1) * d].iter_mut() {
            for (o, x) in row.iter_mut().zip(rest.iter_mut()) {
                let r = *x & mask;
                let r = if r >= half_b { r - b } else { r };
                *x = (*x - r) >> gadget.base_log;
                *o = if r < 0 { (q as i64 + r) as u64 } else { r as u64 };
            }
        }
        for (j, &x) in rest.iter().enumerate() {
            if x != 0 {
                gadget.decompose(poly[j], &mut digits);
                for (k, &dg) in digits.iter().enumerate() {
                    out[h * d + k][j] = if dg < 0 { (q as i64 + dg) as u64 } else { dg as u64 };
                }
            }
        }
    }
}

/// Words per RGSW ciphertext: `2d` rows of (mask, body), N words each.
pub fn rgsw_words(ring_dim: usize, digits: usize) -> usize {
    4 * digits * ring_dim
}

/// Encrypts the coefficient-domain `message` into `out` (length `rgsw_words`)
/// in NTT domain. Rows `k < d` carry `B^k * message` on the mask, rows `d + k`
/// on the body.
pub fn rgsw_encrypt_into(
    message: &[u64],
    z: &RlweSecret,
    gadget: &Gadget,
    stddev: f64,
    sampler: &mut Sampler,
    out: &mut [u64],
) {
    let ring = z.ring();
    let n = ring.ring_dim();
    let m = ring.modulus();
    let q = m.value();
    let d = gadget.digits;
    let mut msg = message.to_vec();
    let mut scratch = vec![0u64; n];
    ring.forward(&mut msg, &mut scratch);
    let mut err = vec![0i64; n];
    let mut err_ntt = vec![0u64; n];
    for row in 0..2 * d {
        let (mask, body) = out[row * 2 * n..(row + 1) * 2 * n].split_at_mut(n);
        for x in mask.iter_mut() {
            *x = sampler.uniform(q);
        }
        sampler.gaussian_fill(stddev, &mut err);
        for (e, &x) in err_ntt.iter_mut().zip(&err) {
            *e = m.from_signed(x);
        }
        ring.forward(&mut err_ntt, &mut scratch);
        for j in 0..n {
            body[j] = m.add(m.mul(mask[j], z.ntt()[j]), err_ntt[j]);
        }
        let g = gadget.power(row % d);
        let target = if row < d { &mut *mask } else { &mut *body };
        for (t, &mh) in target.iter_mut().zip(&msg) {
            *t = m.add(*t, m.mul(g, mh));
        }
    }
}

/// An RGSW ciphertext stored in NTT domain.
#[derive(Debug, Clone)]
pub struct RgswCiphertext {
    words: Vec<u64>,
    ring_dim: usize,
    digits: usize,
}

impl RgswCiphertext {
    pub fn rows(&self) -> usize {
        2 * self.digits
    }

    /// Row `r` as (mask, body) NTT-domain ring elements.
    pub fn row(&self, ring: &Arc<RingContext>, r: usize) -> (RingElement, RingElement) {
        let n = self.ring_dim;
        let base = r * 2 * n;
        (
            RingElement::from_coeffs(ring, self.words[base..base + n].to_vec(), Domain::Ntt).expect("length"),
            RingElement::from_coeffs(ring, self.words[base + n..base + 2 * n].to_vec(), Domain::Ntt).expect("length"),
        )
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// RGSW encryption of `X^exponent` (exponent taken mod 2N).
pub fn rgsw_keygen(
    z: &RlweSecret,
    exponent: usize,
    gadget: &Gadget,
    stddev: f64,
    sampler: &mut Sampler,
) -> RgswCiphertext {
    let ring = z.ring();
    let msg = RingElement::monomial(ring, 1, exponent).into_coeffs();
    let mut words = vec![0; rgsw_words(ring.ring_dim(), gadget.digits)];
    rgsw_encrypt_into(&msg, z, gadget, stddev, sampler, &mut words);
    RgswCiphertext { words, ring_dim: ring.ring_dim(), digits: gadget.digits }
}

/// Scratch buffers for repeated external products.
#[derive(Debug, Clone)]
pub struct Workspace {
    digits: Vec<Vec<u64>>,
    scratch: Vec<u64>,
    out_mask: Vec<u64>,
    out_body: Vec<u64>,
}

impl Workspace {
    pub fn new(ring_dim: usize, gadget_digits: usize) -> Self {
        Workspace {
            digits: vec![vec![0; ring_dim]; 2 * gadget_digits],
            scratch: vec![0; ring_dim],
            out_mask: vec![0; ring_dim],
            out_body: vec![0; ring_dim],
        }
    }
}

/// Reduction of unreduced sums of products, for moduli below 2^31.
#[derive(Clone, Copy)]
struct LazyReducer {
    q: u64,
    // 2^32 mod q, its Shoup companion, and the companion of 1
    c: u64,
    c_shoup: u64,
    one_shoup: u64,
    /// Products of two residues that can be summed without overflow.
    capacity: usize,
}

impl LazyReducer {
    fn new(q: u64) -> Option<Self> {
        if q >= 1 << 31 {
            return None;
        }
        let c = (1u64 << 32) % q;
        let max_prod = (q - 1) * (q - 1);
        let capacity = if max_prod == 0 { usize::MAX } else { (u64::MAX / max_prod) as usize };
        Some(LazyReducer { q, c, c_shoup: (c << 32) / q, one_shoup: (1u64 << 32) / q, capacity })
    }

    #[inline(always)]
    fn shoup(&self, x: u64, w: u64, w_shoup: u64) -> u64 {
        let qhat = (x * w_shoup) >> 32;
        let r = (x * w).wrapping_sub(qhat * self.q);
        if r >= self.q { r - self.q } else { r }
    }

    /// `x mod q` for any 64-bit `x`, using only 32x32-bit products.
    #[inline(always)]
    fn reduce(&self, x: u64) -> u64 {
        let hi = self.shoup(x >> 32, self.c, self.c_shoup);
        let lo = self.shoup(x & 0xffff_ffff, 1, self.one_shoup);
        let s = hi + lo;
        if s >= self.q { s - self.q } else { s }
    }
}

#[inline]
fn mac_row<T: Copy + Into<u64>>(m: &Modulus, dig: &[u64], key: &[T], out: &mut [u64]) {
    for ((o, &d), &k) in out.iter_mut().zip(dig).zip(key) {
        *o = m.add(*o, m.mul(d, k.into()));
    }
}

/// Sums `digit_r * row_r` over all rows into (mask, body), reducing lazily.
#[inline(always)]
fn mac_lazy_body<T: Copy + Into<u64>>(lr: &LazyReducer, digits: &[Vec<u64>], key: &[T], mask: &mut [u64], body: &mut [u64]) {
    let n = mask.len();
    let mut pending = 0;
    for (r, dig) in digits.iter().enumerate() {
        if pending == lr.capacity {
            mask.iter_mut().chain(body.iter_mut()).for_each(|x| *x = lr.reduce(*x));
            pending = 1;
        } else {
            pending += 1;
        }
        let row = &key[r * 2 * n..(r + 1) * 2 * n];
        for ((o, &d), &k) in mask.iter_mut().zip(dig).zip(&row[..n]) {
            *o += d * k.into();
        }
        for ((o, &d), &k) in body.iter_mut().zip(dig).zip(&row[n..]) {
            *o += d * k.into();
        }
    }
    mask.iter_mut().chain(body.iter_mut()).for_each(|x| *x = lr.reduce(*x));
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn mac_lazy_avx2<T: Copy + Into<u64>>(
    lr: &LazyReducer,
    digits: &[Vec<u64>],
    key: &[T],
    mask: &mut [u64],
    body: &mut [u64],
) {
    mac_lazy_body(lr, digits, key, mask, body)
}

fn mac_lazy<T: Copy + Into<u64>>(lr: &LazyReducer, digits: &[Vec<u64>], key: &[T], mask: &mut [u64], body: &mut [u64]) {
    #[cfg(target_arch = "x86_64")]
    if std::is_x86_feature_detected!("avx2") {
        // SAFETY: AVX2 support was just checked.
        return unsafe { mac_lazy_avx2(lr, digits, key, mask, body) };
    }
    mac_lazy_body(lr, digits, key, mask, body)
}

/// Where an RGSW ciphertext's words live.
#[derive(Clone, Copy)]
pub enum RgswRef<'a> {
    Words(&'a WordBuf, usize),
    Slice(&'a [u64]),
}

impl RgswCiphertext {
    pub fn as_ref(&self) -> RgswRef<'_> {
        RgswRef::Slice(&self.words)
    }
}

/// `acc <- acc (x) C`, leaving the result in `acc`.
pub fn external_product_in_place(
    ring: &RingContext,
    gadget: &Gadget,
    acc: &mut Accumulator,
    key: RgswRef<'_>,
    ws: &mut Workspace,
    counts: &mut OpCounts,
) {
    let n = ring.ring_dim();
    let m = ring.modulus();
    let d = gadget.digits;
    let stages = ring.twiddles().stage_count() as u64;
    decompose_into(acc, gadget, &mut ws.digits);
    for dig in ws.digits.iter_mut() {
        ring.forward(dig, &mut ws.scratch);
    }
    counts.forward_ntts += 2 * d as u64;
    ws.out_mask.fill(0);
    ws.out_body.fill(0);
    let words = 4 * d * n;
    if let Some(lr) = LazyReducer::new(m.value()) {
        let (mask, body) = (&mut ws.out_mask, &mut ws.out_body);
        match key {
            RgswRef::Words(WordBuf::U32(v), off) => mac_lazy(&lr, &ws.digits, &v[off..off + words], mask, body),
            RgswRef::Words(WordBuf::U64(v), off) => mac_lazy(&lr, &ws.digits, &v[off..off + words], mask, body),
            RgswRef::Slice(v) => mac_lazy(&lr, &ws.digits, &v[..words], mask, body),
        }
    } else {
        for (r, dig) in ws.digits.iter().enumerate() {
            // digit polynomial r multiplies key row r (mask digits use rows < d)
            let base = r * 2 * n;
            match key {
                RgswRef::Words(WordBuf::U32(v), off) => {
                    let row = &v[off + base..off + base + 2 * n];
                    mac_row(m, dig, &row[..n], &mut ws.out_mask);
                    mac_row(m, dig, &row[n..], &mut ws.out_body);
                }
                RgswRef::Words(WordBuf::U64(v), off) => {
                    let row = &v[off + base..off + base + 2 * n];
                    mac_row(m, dig, &row[..n], &mut ws.out_mask);
                    mac_row(m, dig, &row[n..], &mut ws.out_body);
                }
                RgswRef::Slice(v) => {
                    let row = &v[base..base + 2 * n];
                    mac_row(m, dig, &row[..n], &mut ws.out_mask);
                    mac_row(m, dig, &row[n..], &mut ws.out_body);
                }
            }
        }
    }
    ring.inverse(&mut ws.out_mask, &mut ws.scratch);
    ring.inverse(&mut ws.out_body, &mut ws.scratch);
    counts.inverse_ntts += 2;
    counts.ntt_stages += (2 * d as u64 + 2) * stages;
    counts.external_products += 1;
    acc.mask.copy_from_slice(&ws.out_mask);
    acc.body.copy_from_slice(&ws.out_body);
}

/// Functional form of the external product.
pub fn external_product(
    ring: &Arc<RingContext>,
    gadget: &Gadget,
    acc: &Accumulator,
    key: &RgswCiphertext,
) -> Result<Accumulator> {
    if key.ring_dim != ring.ring_dim() || key.digits != gadget.digits || acc.mask.len() != ring.ring_dim() {
        return Err(Error::Shape("external product operands disagree on N or d_g".into()));
    }
    let mut out = acc.clone();
    let mut ws = Workspace::new(ring.ring_dim(), gadget.digits);
    external_product_in_place(ring, gadget, &mut out, key.as_ref(), &mut ws, &mut OpCounts::default());
    Ok(out)
}
