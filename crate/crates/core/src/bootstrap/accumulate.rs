//! Test-polynomial setup, blind rotation (AP and GINX), and extraction.

use std::sync::Arc;

use rayon::prelude::*;

use super::rgsw::{
    external_product_in_place, rgsw_encrypt_into, rgsw_words, Accumulator, Gadget, OpCounts, RgswRef, RlweSecret,
    Workspace,
};
use crate::error::{Error, Result};
use crate::lwe::{LweCiphertext, LweSecretKey};
use crate::params::{BootstrapMode, ParamSet};
use crate::ring::{monomial_mul_into, RingContext, RingElement};
use crate::sampler::Sampler;
use crate::storage::WordBuf;

/// Half-open phase window `[lower, upper)` mod q; wraps when `upper <= lower`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lower: u64,
    pub upper: u64,
}

impl Window {
    /// Window from endpoints in eighths of q.
    pub fn eighths(lower: u64, upper: u64, q: u64) -> Self {
        Window { lower: (lower % 8) * q / 8, upper: (upper % 8) * q / 8 }
    }

    #[inline]
    pub fn contains(&self, phase: u64, q: u64) -> bool {
        let len = (self.upper + q - self.lower) % q;
        (phase + q - self.lower) % q < len
    }

    /// Rejects windows that are not q/8-aligned or not exactly half of Z_q.
    pub fn validate(&self, q: u64) -> Result<()> {
        let eighth = q / 8;
        if q % 8 != 0 || self.lower % eighth != 0 || self.upper % eighth != 0 {
            return Err(Error::Window(format!(
                "endpoints [{}, {}) must be multiples of q/8 = {eighth}",
                self.lower, self.upper
            )));
        }
        if self.lower >= q || self.upper >= q {
            return Err(Error::Window(format!("endpoints must be below q = {q}")));
        }
        if (self.upper + q - self.lower) % q != q / 2 {
            return Err(Error::Window(format!(
                "window [{}, {}) must cover exactly q/2 for a negacyclic test polynomial",
                self.lower, self.upper
            )));
        }
        Ok(())
    }
}

/// Runtime context for one parameter set.
#[derive(Debug, Clone)]
pub struct BootstrapContext {
    pub params: ParamSet,
    pub ring: Arc<RingContext>,
    pub gadget: Gadget,
}

impl BootstrapContext {
    pub fn new(params: &ParamSet) -> Result<Self> {
        let ring = RingContext::new(params.ring_dim, params.ring_modulus)?;
        let gadget = Gadget::new(params.gadget_base, params.gadget_digits, params.ring_modulus);
        Ok(BootstrapContext { params: params.clone(), ring, gadget })
    }

    /// floor(Q / 8).
    pub fn eighth(&self) -> u64 {
        self.params.ring_modulus / 8
    }
}

/// Builds the noiseless accumulator `(0, T * X^(b * 2N/q))` whose rotated
/// constant term is +Q/8 for phases inside `window` and -Q/8 outside.
pub fn acc_initialize(ctx: &BootstrapContext, ct: &LweCiphertext, window: Window) -> Result<Accumulator> {
    let p = &ctx.params;
    let q = p.lwe_modulus;
    if ct.modulus != q || ct.dim() != p.lwe_dim {
        return Err(Error::Shape(format!("bootstrap input must be dim {} mod {q}", p.lwe_dim)));
    }
    window.validate(q)?;
    let n = p.ring_dim;
    let scale = p.exponent_scale() as usize;
    let m = ctx.ring.modulus();
    let pos = ctx.eighth();
    let neg = m.neg(pos);
    let g = |e: usize| if window.contains((e / scale) as u64, q) { pos } else { neg };
    let mut test = vec![0u64; n];
    test[0] = g(0);
    for (j, t) in test.iter_mut().enumerate().skip(1) {
        *t = m.neg(g(n - j));
    }
    let mut body = vec![0u64; n];
    monomial_mul_into(m, &test, ct.b as usize * scale, &mut body);
    Ok(Accumulator { mask: vec![0; n], body })
}

/// Per-input selector values for the blind rotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selectors {
    /// n x d_r base-B_r digits of `-a_i mod q`, row-major.
    Ap(Vec<u32>),
    /// n rotation amounts `(-a_i mod q) * 2N/q` in `[0, 2N)`.
    Ginx(Vec<u32>),
}

/// Digit selectors (AP) or rotation amounts (GINX) for `ct`.
pub fn prepare_a_dec(ct: &LweCiphertext, params: &ParamSet, mode: BootstrapMode) -> Selectors {
    let q = params.lwe_modulus;
    let neg = ct.a.iter().map(|&a| (q - a % q) % q);
    match mode {
        BootstrapMode::Ap => {
            let base = params.refresh_base;
            let mut out = Vec::with_capacity(ct.dim() * params.refresh_digits);
            for mut x in neg {
                for _ in 0..params.refresh_digits {
                    out.push((x % base) as u32);
                    x /= base;
                }
            }
            Selectors::Ap(out)
        }
        BootstrapMode::Ginx => {
            let scale = params.exponent_scale();
            Selectors::Ginx(neg.map(|x| (x * scale) as u32).collect())
        }
    }
}

/// AP refreshing key: `[i][j][v]` encrypts `X^(v * B_r^j * s_i * 2N/q)`.
#[derive(Debug, Clone)]
pub struct RefreshKeyAp {
    pub lwe_dim: usize,
    pub digits: usize,
    pub base: usize,
    words: WordBuf,
    element_words: usize,
}

/// GINX refreshing key: `[i][c]` encrypts the c-th component of `s_i = s+ - s-`.
#[derive(Debug, Clone)]
pub struct RefreshKeyGinx {
    pub lwe_dim: usize,
    words: WordBuf,
    element_words: usize,
}

/// Either refreshing key.
#[derive(Debug, Clone)]
pub enum RefreshKey {
    Ap(RefreshKeyAp),
    Ginx(RefreshKeyGinx),
}

impl RefreshKey {
    pub fn mode(&self) -> BootstrapMode {
        match self {
            RefreshKey::Ap(_) => BootstrapMode::Ap,
            RefreshKey::Ginx(_) => BootstrapMode::Ginx,
        }
    }

    pub fn words(&self) -> &WordBuf {
        match self {
            RefreshKey::Ap(k) => &k.words,
            RefreshKey::Ginx(k) => &k.words,
        }
    }

    /// Number of RGSW ciphertexts held.
    pub fn element_count(&self) -> usize {
        match self {
            RefreshKey::Ap(k) => k.lwe_dim * k.digits * k.base,
            RefreshKey::Ginx(k) => k.lwe_dim * 2,
        }
    }

    /// `(n, d_r, B_r)` for AP and `(n, 2, 1)` for GINX.
    pub fn shape(&self) -> (usize, usize, usize) {
        match self {
            RefreshKey::Ap(k) => (k.lwe_dim, k.digits, k.base),
            RefreshKey::Ginx(k) => (k.lwe_dim, 2, 1),
        }
    }

    pub fn byte_len(&self) -> usize {
        self.words().byte_len()
    }

    /// Reassembles a key read from storage.
    pub fn from_words(params: &ParamSet, mode: BootstrapMode, words: WordBuf) -> Result<Self> {
        let element_words = rgsw_words(params.ring_dim, params.gadget_digits);
        let n = params.lwe_dim;
        let count = match mode {
            BootstrapMode::Ap => n * params.refresh_digits * params.refresh_base as usize,
            BootstrapMode::Ginx => 2 * n,
        };
        if words.len() != count * element_words {
            return Err(Error::Format(format!(
                "refresh key holds {} words, expected {}",
                words.len(),
                count * element_words
            )));
        }
        Ok(match mode {
            BootstrapMode::Ap => RefreshKey::Ap(RefreshKeyAp {
                lwe_dim: n,
                digits: params.refresh_digits,
                base: params.refresh_base as usize,
                words,
                element_words,
            }),
            BootstrapMode::Ginx => RefreshKey::Ginx(RefreshKeyGinx { lwe_dim: n, words, element_words }),
        })
    }
}

fn fill_keys(
    ctx: &BootstrapContext,
    z: &RlweSecret,
    messages: Vec<(usize, u64)>,
    sampler: &mut Sampler,
) -> WordBuf {
    // (exponent, coefficient) per element; each element draws from its own stream
    let n = ctx.params.ring_dim;
    let ew = rgsw_words(n, ctx.gadget.digits);
    let stddev = ctx.params.error_stddev;
    let seeds: Vec<Sampler> = messages.iter().map(|_| sampler.fork()).collect();
    let mut words = WordBuf::for_modulus(messages.len() * ew, ctx.params.ring_modulus);
    let encrypt = |idx: usize, s: &mut Sampler, buf: &mut [u64]| {
        let (e, c) = messages[idx];
        let msg = RingElement::monomial(&ctx.ring, c, e).into_coeffs();
        rgsw_encrypt_into(&msg, z, &ctx.gadget, stddev, s, buf);
    };
    match &mut words {
        WordBuf::U32(v) => {
            v.par_chunks_mut(ew).zip(seeds).enumerate().for_each(|(idx, (dst, mut s))| {
                let mut buf = vec![0u64; ew];
                encrypt(idx, &mut s, &mut buf);
                for (d, &x) in dst.iter_mut().zip(&buf) {
                    *d = x as u32;
                }
            });
        }
        WordBuf::U64(v) => {
            v.par_chunks_mut(ew)
                .zip(seeds)
                .enumerate()
                .for_each(|(idx, (dst, mut s))| encrypt(idx, &mut s, dst));
        }
    }
    words
}

/// Generates the refreshing key for `mode` from the LWE secret and the ring secret.
pub fn refresh_keygen(
    ctx: &BootstrapContext,
    sk: &LweSecretKey,
    z: &RlweSecret,
    mode: BootstrapMode,
    sampler: &mut Sampler,
) -> Result<RefreshKey> {
    let p = &ctx.params;
    if sk.dim() != p.lwe_dim {
        return Err(Error::Shape(format!("secret has dim {}, expected {}", sk.dim(), p.lwe_dim)));
    }
    let two_n = 2 * p.ring_dim as i64;
    let scale = p.exponent_scale() as i64;
    let signed = sk.signed();
    let messages: Vec<(usize, u64)> = match mode {
        BootstrapMode::Ap => {
            let mut msgs = Vec::with_capacity(p.lwe_dim * p.refresh_digits * p.refresh_base as usize);
            for &s in &signed {
                let mut power = 1i64;
                for _ in 0..p.refresh_digits {
                    for v in 0..p.refresh_base as i64 {
                        let e = (v * power % two_n * s * scale).rem_euclid(two_n);
                        msgs.push((e as usize, 1));
                    }
                    power = power * p.refresh_base as i64 % two_n;
                }
            }
            msgs
        }
        BootstrapMode::Ginx => {
            signed.iter().flat_map(|&s| [(0usize, (s == 1) as u64), (0usize, (s == -1) as u64)]).collect()
        }
    };
    let words = fill_keys(ctx, z, messages, sampler);
    RefreshKey::from_words(p, mode, words)
}

/// AP blind rotation: `acc <- acc (x) EK[i][j][digit_ij]` for every (i, j).
pub fn ap_accumulate(
    ctx: &BootstrapContext,
    acc: &mut Accumulator,
    key: &RefreshKeyAp,
    digits: &[u32],
    ws: &mut Workspace,
    counts: &mut OpCounts,
) -> Result<()> {
    if digits.len() != key.lwe_dim * key.digits {
        return Err(Error::Shape(format!("expected {} AP selectors, got {}", key.lwe_dim * key.digits, digits.len())));
    }
    for (ij, &v) in digits.iter().enumerate() {
        let elem = ij * key.base + v as usize;
        external_product_in_place(
            &ctx.ring,
            &ctx.gadget,
            acc,
            RgswRef::Words(&key.words, elem * key.element_words),
            ws,
            counts,
        );
    }
    Ok(())
}

/// GINX blind rotation: per step `p = acc (x) EK[i][c]`, `acc <- acc + X^m p - p`,
/// with `m` for column 0 and `-m` for column 1.
pub fn ginx_accumulate(
    ctx: &BootstrapContext,
    acc: &mut Accumulator,
    key: &RefreshKeyGinx,
    rotations: &[u32],
    ws: &mut Workspace,
    counts: &mut OpCounts,
) -> Result<()> {
    if rotations.len() != key.lwe_dim {
        return Err(Error::Shape(format!("expected {} GINX rotations, got {}", key.lwe_dim, rotations.len())));
    }
    let n = ctx.params.ring_dim;
    let two_n = 2 * n;
    let m = ctx.ring.modulus();
    let mut prod = Accumulator::zero(n);
    let mut rotated = vec![0u64; n];
    for (i, &rot) in rotations.iter().enumerate() {
        for c in 0..2 {
            let shift = if c == 0 { rot as usize } else { (two_n - rot as usize) % two_n };
            prod.mask.copy_from_slice(&acc.mask);
            prod.body.copy_from_slice(&acc.body);
            external_product_in_place(
                &ctx.ring,
                &ctx.gadget,
                &mut prod,
                RgswRef::Words(&key.words, (2 * i + c) * key.element_words),
                ws,
                counts,
            );
            for (dst, src) in [(&mut acc.mask, &prod.mask), (&mut acc.body, &prod.body)] {
                monomial_mul_into(m, src, shift, &mut rotated);
                for ((a, &r), &p) in dst.iter_mut().zip(&rotated).zip(src.iter()) {
                    *a = m.sub(m.add(*a, r), p);
                }
            }
        }
    }
    Ok(())
}

/// Sample extraction of the constant term plus Q/8.
pub fn extract(ctx: &BootstrapContext, acc: &Accumulator) -> LweCiphertext {
    let m = ctx.ring.modulus();
    let n = acc.mask.len();
    let mut a = Vec::with_capacity(n);
    a.push(acc.mask[0]);
    for k in 1..n {
        a.push(m.neg(acc.mask[n - k]));
    }
    LweCiphertext { a, b: m.add(acc.body[0], ctx.eighth()), modulus: m.value() }
}

/// Runs the blind rotation matching `key` on an initialized accumulator.
pub fn blind_rotate(
    ctx: &BootstrapContext,
    acc: &mut Accumulator,
    ct: &LweCiphertext,
    key: &RefreshKey,
    ws: &mut Workspace,
    counts: &mut OpCounts,
) -> Result<()> {
    match (key, prepare_a_dec(ct, &ctx.params, key.mode())) {
        (RefreshKey::Ap(k), Selectors::Ap(d)) => ap_accumulate(ctx, acc, k, &d, ws, counts),
        (RefreshKey::Ginx(k), Selectors::Ginx(r)) => ginx_accumulate(ctx, acc, k, &r, ws, counts),
        _ => unreachable!("selectors follow the key mode"),
    }
}

/// Full refresh: initialize, rotate, extract. Output is dim N mod Q and
/// encrypts Q/4 when the input phase lies in `window`, 0 otherwise.
pub fn bootstrap_with(
    ctx: &BootstrapContext,
    ct: &LweCiphertext,
    key: &RefreshKey,
    window: Window,
    ws: &mut Workspace,
    counts: &mut OpCounts,
) -> Result<LweCiphertext> {
    let mut acc = acc_initialize(ctx, ct, window)?;
    blind_rotate(ctx, &mut acc, ct, key, ws, counts)?;
    counts.bootstraps += 1;
    Ok(extract(ctx, &acc))
}

/// Convenience form of [`bootstrap_with`] with fresh scratch space.
pub fn bootstrap(ctx: &BootstrapContext, ct: &LweCiphertext, key: &RefreshKey, window: Window) -> Result<LweCiphertext> {
    let mut ws = Workspace::new(ctx.params.ring_dim, ctx.gadget.digits);
    bootstrap_with(ctx, ct, key, window, &mut ws, &mut OpCounts::default())
}
