//! Flat word storage for large key material.
//!
//! Keys are packed into 32-bit words whenever the modulus allows it, halving
//! their footprint at the common parameter sets.

/// A flat buffer of residues stored as `u32` or `u64`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordBuf {
    U32(Vec<u32>),
    U64(Vec<u64>),
}

impl WordBuf {
    /// Zeroed buffer; `wide` selects 64-bit words.
    pub fn zeros(len: usize, wide: bool) -> Self {
        if wide {
            WordBuf::U64(vec![0; len])
        } else {
            WordBuf::U32(vec![0; len])
        }
    }

    /// Word width suited to residues below `modulus`.
    pub fn for_modulus(len: usize, modulus: u64) -> Self {
        Self::zeros(len, modulus > u32::MAX as u64)
    }

    pub fn len(&self) -> usize {
        match self {
            WordBuf::U32(v) => v.len(),
            WordBuf::U64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn word_bits(&self) -> u32 {
        match self {
            WordBuf::U32(_) => 32,
            WordBuf::U64(_) => 64,
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        match self {
            WordBuf::U32(v) => v[i] as u64,
            WordBuf::U64(v) => v[i],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, x: u64) {
        match self {
            WordBuf::U32(v) => v[i] = x as u32,
            WordBuf::U64(v) => v[i] = x,
        }
    }

    /// Copies `src` into positions `start..start + src.len()`.
    pub fn write(&mut self, start: usize, src: &[u64]) {
        match self {
            WordBuf::U32(v) => {
                for (d, &s) in v[start..start + src.len()].iter_mut().zip(src) {
                    *d = s as u32;
                }
            }
            WordBuf::U64(v) => v[start..start + src.len()].copy_from_slice(src),
        }
    }

    /// Copies positions `start..start + out.len()` into `out`.
    pub fn read(&self, start: usize, out: &mut [u64]) {
        match self {
            WordBuf::U32(v) => {
                let len = out.len();
                for (d, &s) in out.iter_mut().zip(&v[start..start + len]) {
                    *d = s as u64;
                }
            }
            WordBuf::U64(v) => out.copy_from_slice(&v[start..start + out.len()]),
        }
    }

    /// Adds positions `start..start + acc.len()` into `acc` without reduction.
    #[inline]
    pub fn add_to(&self, start: usize, acc: &mut [u64]) {
        match self {
            WordBuf::U32(v) => {
                let len = acc.len();
                for (d, &s) in acc.iter_mut().zip(&v[start..start + len]) {
                    *d += s as u64;
                }
            }
            WordBuf::U64(v) => {
                let len = acc.len();
                for (d, &s) in acc.iter_mut().zip(&v[start..start + len]) {
                    *d += s;
                }
            }
        }
    }

    /// Iterates all words widened to `u64`.
    pub fn iter(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match self {
            WordBuf::U32(v) => Box::new(v.iter().map(|&x| x as u64)),
            WordBuf::U64(v) => Box::new(v.iter().copied()),
        }
    }

    /// Size of the stored words in bytes.
    pub fn byte_len(&self) -> usize {
        self.len() * self.word_bits() as usize / 8
    }
}
