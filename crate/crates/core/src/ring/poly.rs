use std::sync::Arc;

use super::modulus::Modulus;
use super::ntt::TwiddleTable;
use crate::error::{Error, Result};

/// The ring `Z_Q[X]/(X^N + 1)` with its transform tables.
#[derive(Debug)]
pub struct RingContext {
    twiddles: TwiddleTable,
}

impl RingContext {
    pub fn new(ring_dim: usize, q: u64) -> Result<Arc<Self>> {
        Ok(Arc::new(RingContext { twiddles: TwiddleTable::new(ring_dim, q)? }))
    }

    #[inline]
    pub fn ring_dim(&self) -> usize {
        self.twiddles.ring_dim()
    }

    #[inline]
    pub fn modulus(&self) -> &Modulus {
        self.twiddles.modulus()
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.twiddles.modulus().value()
    }

    #[inline]
    pub fn twiddles(&self) -> &TwiddleTable {
        &self.twiddles
    }

    pub fn forward(&self, a: &mut [u64], scratch: &mut [u64]) {
        self.twiddles.forward_in_place(a, scratch);
    }

    pub fn inverse(&self, a: &mut [u64], scratch: &mut [u64]) {
        self.twiddles.inverse_in_place(a, scratch);
    }
}

/// Representation tag of a [`RingElement`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Coefficient,
    Ntt,
}

impl Domain {
    fn name(self) -> &'static str {
        match self {
            Domain::Coefficient => "coefficient",
            Domain::Ntt => "ntt",
        }
    }
}

/// A polynomial of degree below N with coefficients in `[0, Q)`.
#[derive(Debug, Clone)]
pub struct RingElement {
    coeffs: Vec<u64>,
    domain: Domain,
    ring: Arc<RingContext>,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.ring.ring_dim() == other.ring.ring_dim()
            && self.ring.q() == other.ring.q()
            && self.coeffs == other.coeffs
    }
}

impl Eq for RingElement {}

impl RingElement {
    pub fn zero(ring: &Arc<RingContext>, domain: Domain) -> Self {
        RingElement { coeffs: vec![0; ring.ring_dim()], domain, ring: ring.clone() }
    }

    /// Builds an element, reducing every coefficient mod Q.
    pub fn from_coeffs(ring: &Arc<RingContext>, coeffs: Vec<u64>, domain: Domain) -> Result<Self> {
        if coeffs.len() != ring.ring_dim() {
            return Err(Error::Shape(format!("expected {} coefficients, got {}", ring.ring_dim(), coeffs.len())));
        }
        let m = ring.modulus();
        let coeffs = coeffs.into_iter().map(|c| m.reduce(c)).collect();
        Ok(RingElement { coeffs, domain, ring: ring.clone() })
    }

    pub fn from_signed(ring: &Arc<RingContext>, coeffs: &[i64]) -> Result<Self> {
        let m = ring.modulus();
        Self::from_coeffs(ring, coeffs.iter().map(|&c| m.from_signed(c)).collect(), Domain::Coefficient)
    }

    /// The monomial `c * X^e` for `e` taken mod 2N.
    pub fn monomial(ring: &Arc<RingContext>, c: u64, e: usize) -> Self {
        let n = ring.ring_dim();
        let mut out = Self::zero(ring, Domain::Coefficient);
        let e = e % (2 * n);
        let c = ring.modulus().reduce(c);
        if e < n {
            out.coeffs[e] = c;
        } else {
            out.coeffs[e - n] = ring.modulus().neg(c);
        }
        out
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn ring(&self) -> &Arc<RingContext> {
        &self.ring
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        let (a, b) = (&self.ring, &other.ring);
        if a.ring_dim() != b.ring_dim() || a.q() != b.q() {
            return Err(Error::RingMismatch(a.ring_dim(), a.q(), b.ring_dim(), b.q()));
        }
        if self.domain != other.domain {
            return Err(Error::Domain { expected: self.domain.name() });
        }
        Ok(())
    }

    fn expect(&self, domain: Domain) -> Result<()> {
        if self.domain != domain {
            return Err(Error::Domain { expected: domain.name() });
        }
        Ok(())
    }

    pub fn ntt_forward(&self) -> Result<Self> {
        self.expect(Domain::Coefficient)?;
        let mut out = self.coeffs.clone();
        let mut scratch = vec![0; out.len()];
        self.ring.forward(&mut out, &mut scratch);
        Ok(RingElement { coeffs: out, domain: Domain::Ntt, ring: self.ring.clone() })
    }

    pub fn ntt_inverse(&self) -> Result<Self> {
        self.expect(Domain::Ntt)?;
        let mut out = self.coeffs.clone();
        let mut scratch = vec![0; out.len()];
        self.ring.inverse(&mut out, &mut scratch);
        Ok(RingElement { coeffs: out, domain: Domain::Coefficient, ring: self.ring.clone() })
    }

    fn zip(&self, other: &Self, f: impl Fn(&Modulus, u64, u64) -> u64) -> Result<Self> {
        self.check_same(other)?;
        let m = self.ring.modulus();
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&x, &y)| f(m, x, y)).collect();
        Ok(RingElement { coeffs, domain: self.domain, ring: self.ring.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |m, x, y| m.add(x, y))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |m, x, y| m.sub(x, y))
    }

    pub fn neg(&self) -> Self {
        let m = self.ring.modulus();
        RingElement {
            coeffs: self.coeffs.iter().map(|&x| m.neg(x)).collect(),
            domain: self.domain,
            ring: self.ring.clone(),
        }
    }

    pub fn scalar_mul(&self, c: u64) -> Self {
        let m = self.ring.modulus();
        let c = m.reduce(c);
        RingElement {
            coeffs: self.coeffs.iter().map(|&x| m.mul(x, c)).collect(),
            domain: self.domain,
            ring: self.ring.clone(),
        }
    }

    /// Coefficient-wise product of two NTT-domain elements.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.expect(Domain::Ntt)?;
        self.zip(other, |m, x, y| m.mul(x, y))
    }

    /// Negacyclic product of two coefficient-domain elements through the NTT.
    pub fn mul_negacyclic(&self, other: &Self) -> Result<Self> {
        self.expect(Domain::Coefficient)?;
        self.check_same(other)?;
        self.ntt_forward()?.pointwise_mul(&other.ntt_forward()?)?.ntt_inverse()
    }

    /// `X^m * self` for `m` taken mod 2N (rotation with sign flip on wrap).
    pub fn monomial_mul(&self, m: usize) -> Result<Self> {
        self.expect(Domain::Coefficient)?;
        let mut out = vec![0; self.coeffs.len()];
        monomial_mul_into(self.ring.modulus(), &self.coeffs, m, &mut out);
        Ok(RingElement { coeffs: out, domain: Domain::Coefficient, ring: self.ring.clone() })
    }
}

/// Writes `X^shift * src` into `dst` (both length N, shift taken mod 2N).
pub fn monomial_mul_into(m: &Modulus, src: &[u64], shift: usize, dst: &mut [u64]) {
    let n = src.len();
    let shift = shift % (2 * n);
    let (negate_all, r) = if shift >= n { (true, shift - n) } else { (false, shift) };
    for (k, &c) in src.iter().enumerate() {
        let t = k + r;
        let (idx, flip) = if t >= n { (t - n, !negate_all) } else { (t, negate_all) };
        dst[idx] = if flip { m.neg(c) } else { c };
    }
}

/// Standalone negacyclic product, `a * b mod (X^N + 1, Q)`.
pub fn poly_mul_negacyclic(a: &RingElement, b: &RingElement) -> Result<RingElement> {
    a.mul_negacyclic(b)
}

/// Schoolbook O(N^2) negacyclic product on raw coefficient slices.
pub fn schoolbook_negacyclic(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let n = a.len();
    let mut acc = vec![0i128; n];
    for i in 0..n {
        for j in 0..n {
            let p = a[i] as i128 * b[j] as i128;
            if i + j < n {
                acc[i + j] += p;
            } else {
                acc[i + j - n] -= p;
            }
        }
    }
    acc.into_iter().map(|x| x.rem_euclid(q as i128) as u64).collect()
}
