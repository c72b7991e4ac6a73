use crate::error::{Error, Result};

/// A word-sized odd modulus with precomputed Barrett, Montgomery and Shoup data.
///
/// Supports moduli below 2^62.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    value: u64,
    bits: u32,
    barrett_mu: u128,
    // -Q^{-1} mod 2^64, zero for even moduli
    mont_neg_inv: u64,
    // 2^128 mod Q
    mont_r2: u64,
}

impl Modulus {
    pub fn new(value: u64) -> Self {
        assert!(value >= 2 && value < (1u64 << 62), "modulus out of range");
        let bits = 64 - value.leading_zeros();
        let barrett_mu = (1u128 << (2 * bits)) / value as u128;
        let (mont_neg_inv, mont_r2) = if value & 1 == 1 {
            // Newton iteration for the inverse mod 2^64
            let mut inv: u64 = 1;
            for _ in 0..6 {
                inv = inv.wrapping_mul(2u64.wrapping_sub(value.wrapping_mul(inv)));
            }
            let r = ((1u128 << 64) % value as u128) as u64;
            let r2 = ((r as u128 * r as u128) % value as u128) as u64;
            (inv.wrapping_neg(), r2)
        } else {
            (0, 0)
        };
        Modulus { value, bits, barrett_mu, mont_neg_inv, mont_r2 }
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Barrett reduction of any `x < 2^(2*bits)` (in particular any product of
    /// two reduced values, or a sum below 2Q).
    #[inline]
    pub fn reduce_wide(&self, x: u128) -> u64 {
        let k = self.bits;
        let q1 = x >> (k - 1);
        let q3 = (q1 * self.barrett_mu) >> (k + 1);
        let mut r = (x - q3 * self.value as u128) as u64;
        if r >= self.value {
            r -= self.value;
        }
        if r >= self.value {
            r -= self.value;
        }
        r
    }

    /// Reduces a post-addition value in `[0, 2Q)`.
    #[inline]
    pub fn barrett_reduce(&self, x: u64) -> u64 {
        self.reduce_wide(x as u128)
    }

    /// Reduces an arbitrary 64-bit value.
    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        if (self.bits as usize) * 2 >= 64 {
            self.reduce_wide(x as u128)
        } else {
            x % self.value
        }
    }

    /// Reduces a signed value into `[0, Q)`.
    #[inline]
    pub fn from_signed(&self, x: i64) -> u64 {
        let r = x.rem_euclid(self.value as i64);
        r as u64
    }

    /// Centered representative in `[-Q/2, Q/2)`.
    #[inline]
    pub fn centered(&self, x: u64) -> i64 {
        if x >= self.value.div_ceil(2) {
            x as i64 - self.value as i64
        } else {
            x as i64
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.value { s - self.value } else { s }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b { a - b } else { a + self.value - b }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 { 0 } else { self.value - a }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce_wide(a as u128 * b as u128)
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.value;
        base = self.reduce(base);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse via Fermat; the modulus must be prime.
    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.value - 2)
    }

    /// Montgomery reduction of `t < Q * 2^64`: returns `t * 2^-64 mod Q`.
    #[inline]
    fn mont_reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.mont_neg_inv);
        let u = ((t + m as u128 * self.value as u128) >> 64) as u64;
        if u >= self.value { u - self.value } else { u }
    }

    /// `a * b mod Q` through two Montgomery reductions.
    pub fn montgomery_mul(&self, a: u64, b: u64) -> Result<u64> {
        if self.value & 1 == 0 {
            return Err(Error::EvenModulus(self.value));
        }
        let t = self.mont_reduce(a as u128 * b as u128);
        Ok(self.mont_reduce(t as u128 * self.mont_r2 as u128))
    }

    /// Precomputed companion `floor(w * 2^64 / Q)` for Shoup multiplication by `w`.
    #[inline]
    pub fn shoup(&self, w: u64) -> u64 {
        (((w as u128) << 64) / self.value as u128) as u64
    }

    /// `x * w mod Q` given `w_shoup = self.shoup(w)`; `x` may be any value below 2^64.
    #[inline]
    pub fn mul_shoup(&self, x: u64, w: u64, w_shoup: u64) -> u64 {
        let qhat = ((x as u128 * w_shoup as u128) >> 64) as u64;
        let r = x.wrapping_mul(w).wrapping_sub(qhat.wrapping_mul(self.value));
        if r >= self.value { r - self.value } else { r }
    }
}

/// Convenience wrapper: Barrett-reduce `x` in `[0, 2Q)`.
pub fn barrett_reduce(x: u64, q: u64) -> u64 {
    Modulus::new(q).barrett_reduce(x)
}

/// Convenience wrapper: `a * b mod q` via Montgomery multiplication.
pub fn montgomery_mul(a: u64, b: u64, q: u64) -> Result<u64> {
    Modulus::new(q).montgomery_mul(a, b)
}
