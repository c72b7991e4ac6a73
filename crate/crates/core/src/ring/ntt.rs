//! Negacyclic NTT in constant-geometry (Singleton/Pease) form.
//!
//! Every stage reads the pair `(2i, 2i+1)` and writes `(i, i + N/2)`, so the
//! data movement between stages is the same permutation at every stage. Input
//! is loaded in bit-reversed order (fused with the psi twist); output comes out
//! in natural order with `A[j] = a(psi^(2j+1))`.

use super::modulus::Modulus;
use crate::error::{Error, Result};

/// Row mapping used by every stage: reads `(2i, 2i+1)`, writes `(i, i+N/2)`.
#[inline(always)]
pub const fn singleton_rows(i: usize, half: usize) -> (usize, usize, usize, usize) {
    (2 * i, 2 * i + 1, i, i + half)
}

/// Per-(N, Q) roots and stage factors.
///
/// Every factor `w` carries a Shoup companion `floor(w * 2^k / Q)`, with
/// `k = 32` when `Q < 2^31` (products then fit in 64 bits and the loops
/// vectorize) and `k = 64` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwiddleTable {
    modulus: Modulus,
    ring_dim: usize,
    log_n: u32,
    psi: u64,
    n_inv: u64,
    narrow: bool,
    bitrev: Vec<u32>,
    // psi^k (resp. psi^-k / N) indexed by k
    twist: Vec<u64>,
    twist_shoup: Vec<u64>,
    untwist: Vec<u64>,
    untwist_shoup: Vec<u64>,
    // stage s, row i at [s * N/2 + i]
    fwd: Vec<u64>,
    fwd_shoup: Vec<u64>,
    inv: Vec<u64>,
    inv_shoup: Vec<u64>,
}

/// `x * w mod q` from a Shoup companion; `NARROW` needs `x < 2^32`, `q < 2^31`.
#[inline(always)]
fn shoup_mul<const NARROW: bool>(x: u64, w: u64, w_shoup: u64, q: u64) -> u64 {
    let qhat = if NARROW { (x * w_shoup) >> 32 } else { ((x as u128 * w_shoup as u128) >> 64) as u64 };
    let r = x.wrapping_mul(w).wrapping_sub(qhat.wrapping_mul(q));
    if r >= q { r - q } else { r }
}

fn distinct_prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Smallest primitive root of the prime `q`.
pub fn smallest_primitive_root(q: u64) -> u64 {
    let m = Modulus::new(q);
    let factors = distinct_prime_factors(q - 1);
    (2..q)
        .find(|&g| factors.iter().all(|&p| m.pow(g, (q - 1) / p) != 1))
        .expect("prime modulus has a primitive root")
}

impl TwiddleTable {
    /// Builds the table; requires `Q` prime with `Q = 1 mod 2N`.
    pub fn new(ring_dim: usize, q: u64) -> Result<Self> {
        if !ring_dim.is_power_of_two() || ring_dim < 2 || (q - 1) % (2 * ring_dim as u64) != 0 {
            return Err(Error::Param(format!("no 2N-th roots of unity for N={ring_dim}, Q={q}")));
        }
        let modulus = Modulus::new(q);
        let g = smallest_primitive_root(q);
        let psi = modulus.pow(g, (q - 1) / (2 * ring_dim as u64));
        let psi_inv = modulus.inv(psi);
        let omega = modulus.mul(psi, psi);
        let omega_inv = modulus.mul(psi_inv, psi_inv);
        let log_n = ring_dim.trailing_zeros();
        let n_inv = modulus.inv(ring_dim as u64 % q);
        let narrow = q < 1 << 31;

        let bitrev: Vec<u32> = (0..ring_dim as u32)
            .map(|i| if log_n == 0 { 0 } else { i.reverse_bits() >> (32 - log_n) })
            .collect();
        let powers = |base: u64| {
            let mut v = Vec::with_capacity(ring_dim);
            let mut acc = 1u64;
            for _ in 0..ring_dim {
                v.push(acc);
                acc = modulus.mul(acc, base);
            }
            v
        };
        let twist = powers(psi);
        let untwist: Vec<u64> = powers(psi_inv).iter().map(|&p| modulus.mul(p, n_inv)).collect();
        let omega_pows = powers(omega);
        let omega_inv_pows = powers(omega_inv);

        let half = ring_dim / 2;
        let mut fwd = Vec::with_capacity(log_n as usize * half);
        let mut inv = Vec::with_capacity(log_n as usize * half);
        for s in 0..log_n {
            for i in 0..half {
                let e = (i >> (log_n - 1 - s)) * (ring_dim >> (s + 1));
                fwd.push(omega_pows[e]);
                inv.push(omega_inv_pows[e]);
            }
        }
        let companion = |v: &[u64]| -> Vec<u64> {
            v.iter().map(|&w| if narrow { (w << 32) / q } else { modulus.shoup(w) }).collect()
        };
        Ok(TwiddleTable {
            twist_shoup: companion(&twist),
            untwist_shoup: companion(&untwist),
            fwd_shoup: companion(&fwd),
            inv_shoup: companion(&inv),
            modulus,
            ring_dim,
            log_n,
            psi,
            n_inv,
            narrow,
            bitrev,
            twist,
            untwist,
            fwd,
            inv,
        })
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn ring_dim(&self) -> usize {
        self.ring_dim
    }

    /// Primitive 2N-th root of unity.
    pub fn psi(&self) -> u64 {
        self.psi
    }

    /// N^-1 mod Q.
    pub fn n_inv(&self) -> u64 {
        self.n_inv
    }

    /// Number of butterfly stages (log2 N).
    pub fn stage_count(&self) -> usize {
        self.log_n as usize
    }

    /// Forward stage factor for row `i` of stage `s`.
    pub fn forward_factor(&self, stage: usize, row: usize) -> u64 {
        self.fwd[stage * self.ring_dim / 2 + row]
    }

    /// Inverse stage factor for row `i` of stage `s`.
    pub fn inverse_factor(&self, stage: usize, row: usize) -> u64 {
        self.inv[stage * self.ring_dim / 2 + row]
    }

    /// Row permutation (source index for each destination index) applied by
    /// stage `s`; identical for every stage.
    pub fn stage_permutation(&self, _stage: usize) -> Vec<usize> {
        let half = self.ring_dim / 2;
        let mut perm = vec![0; self.ring_dim];
        for i in 0..half {
            let (r0, r1, w0, w1) = singleton_rows(i, half);
            perm[w0] = r0;
            perm[w1] = r1;
        }
        perm
    }

    /// Forward transform of `a` (coefficients, natural order) in place.
    pub fn forward_in_place(&self, a: &mut [u64], scratch: &mut [u64]) {
        debug_assert_eq!(a.len(), self.ring_dim);
        if self.narrow {
            #[cfg(target_arch = "x86_64")]
            if std::is_x86_feature_detected!("avx2") {
                // SAFETY: AVX2 support was just checked.
                return unsafe { self.forward_avx2(a, scratch) };
            }
            self.forward_body::<true>(a, scratch)
        } else {
            self.forward_body::<false>(a, scratch)
        }
    }

    /// Inverse transform in place, including the `1/N` and untwist factors.
    pub fn inverse_in_place(&self, a: &mut [u64], scratch: &mut [u64]) {
        debug_assert_eq!(a.len(), self.ring_dim);
        if self.narrow {
            #[cfg(target_arch = "x86_64")]
            if std::is_x86_feature_detected!("avx2") {
                // SAFETY: AVX2 support was just checked.
                return unsafe { self.inverse_avx2(a, scratch) };
            }
            self.inverse_body::<true>(a, scratch)
        } else {
            self.inverse_body::<false>(a, scratch)
        }
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn forward_avx2(&self, a: &mut [u64], scratch: &mut [u64]) {
        self.forward_body::<true>(a, scratch)
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn inverse_avx2(&self, a: &mut [u64], scratch: &mut [u64]) {
        self.inverse_body::<true>(a, scratch)
    }

    #[inline(always)]
    fn forward_body<const NARROW: bool>(&self, a: &mut [u64], scratch: &mut [u64]) {
        let q = self.modulus.value();
        for (i, s) in scratch.iter_mut().enumerate() {
            let k = self.bitrev[i] as usize;
            *s = shoup_mul::<NARROW>(a[k], self.twist[k], self.twist_shoup[k], q);
        }
        a.copy_from_slice(scratch);
        self.run_stages::<NARROW>(a, scratch, &self.fwd, &self.fwd_shoup);
    }

    #[inline(always)]
    fn inverse_body<const NARROW: bool>(&self, a: &mut [u64], scratch: &mut [u64]) {
        for (i, s) in scratch.iter_mut().enumerate() {
            *s = a[self.bitrev[i] as usize];
        }
        a.copy_from_slice(scratch);
        self.run_stages::<NARROW>(a, scratch, &self.inv, &self.inv_shoup);
        let q = self.modulus.value();
        for ((x, &w), &ws) in a.iter_mut().zip(&self.untwist).zip(&self.untwist_shoup) {
            *x = shoup_mul::<NARROW>(*x, w, ws, q);
        }
    }

    #[inline(always)]
    fn run_stages<const NARROW: bool>(&self, buf: &mut [u64], scratch: &mut [u64], fac: &[u64], fac_shoup: &[u64]) {
        let half = self.ring_dim / 2;
        let q = self.modulus.value();
        let (mut src, mut dst) = (buf, scratch);
        for s in 0..self.log_n as usize {
            let w = &fac[s * half..(s + 1) * half];
            let ws = &fac_shoup[s * half..(s + 1) * half];
            // rows (2i, 2i+1) feed outputs (i, i + half); see `singleton_rows`
            let (lo, hi) = dst.split_at_mut(half);
            for ((((pair, o0), o1), &wi), &wsi) in
                src.chunks_exact(2).zip(lo.iter_mut()).zip(hi.iter_mut()).zip(w).zip(ws)
            {
                let u = pair[0];
                let v = shoup_mul::<NARROW>(pair[1], wi, wsi, q);
                let sum = u + v;
                *o0 = if sum >= q { sum - q } else { sum };
                *o1 = if u >= v { u - v } else { u + q - v };
            }
            std::mem::swap(&mut src, &mut dst);
        }
        if self.log_n % 2 == 1 {
            dst.copy_from_slice(src);
        }
    }

    pub fn forward_trace(&self, a: &[u64]) -> Vec<Vec<u64>> {
        let m = &self.modulus;
        let half = self.ring_dim / 2;
        let mut cur: Vec<u64> = (0..self.ring_dim)
            .map(|i| {
                let k = self.bitrev[i] as usize;
                m.mul(a[k], self.twist[k])
            })
            .collect();
        let mut trace = vec![cur.clone()];
        for s in 0..self.log_n as usize {
            let mut next = vec![0; self.ring_dim];
            for i in 0..half {
                let (r0, r1, w0, w1) = singleton_rows(i, half);
                let v = m.mul(cur[r1], self.forward_factor(s, i));
                next[w0] = m.add(cur[r0], v);
                next[w1] = m.sub(cur[r0], v);
            }
            cur = next;
            trace.push(cur.clone());
        }
        trace
    }
}
