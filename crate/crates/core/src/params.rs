//! Named security parameter sets and the quantities derived from them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names accepted by [`load_param_set`], in table order.
pub const PARAM_SET_NAMES: [&str; 7] = [
    "STD128", "STD192", "STD256", "STD128Q", "STD192Q", "STD256Q", "TOY",
];

/// The six named security sets (everything except TOY).
pub const NAMED_SETS: [&str; 6] = ["STD128", "STD192", "STD256", "STD128Q", "STD192Q", "STD256Q"];

/// Blind-rotation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapMode {
    /// Digit-selected RGSW keys, n x d_r x B_r.
    Ap,
    /// Binary/ternary secret keys, n x 2, with monomial-weighted updates.
    Ginx,
}

impl fmt::Display for BootstrapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            BootstrapMode::Ap => "ap",
            BootstrapMode::Ginx => "ginx",
        })
    }
}

impl FromStr for BootstrapMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ap" => Ok(BootstrapMode::Ap),
            "ginx" => Ok(BootstrapMode::Ginx),
            other => Err(Error::Param(format!("unknown bootstrap mode `{other}` (ap|ginx)"))),
        }
    }
}

/// Distribution of secret-key coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SecretDist {
    /// Uniform over {0, 1}.
    Binary,
    /// Uniform over {-1, 0, 1}.
    Ternary,
}

impl FromStr for SecretDist {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "binary" => Ok(SecretDist::Binary),
            "ternary" => Ok(SecretDist::Ternary),
            other => Err(Error::Param(format!("unknown secret distribution `{other}`"))),
        }
    }
}

/// One fully derived parameter set.
///
/// Serialized field names follow the usual notation for these schemes
/// (`n`, `q`, `N`, `log2_Q`, ...), which is also what the config files use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub name: String,
    pub security_bits: u32,
    pub quantum_safe: bool,
    /// LWE dimension.
    #[serde(rename = "n")]
    pub lwe_dim: usize,
    /// LWE ciphertext modulus (power of two).
    #[serde(rename = "q")]
    pub lwe_modulus: u64,
    /// Ring dimension (power of two).
    #[serde(rename = "N")]
    pub ring_dim: usize,
    #[serde(rename = "log2_Q")]
    pub ring_modulus_bits: u32,
    /// Concrete NTT-friendly prime ring modulus.
    #[serde(rename = "Q")]
    pub ring_modulus: u64,
    #[serde(rename = "B_s")]
    pub ks_base: u64,
    #[serde(rename = "B_g")]
    pub gadget_base: u64,
    #[serde(rename = "B_r")]
    pub refresh_base: u64,
    #[serde(rename = "d_s")]
    pub ks_digits: usize,
    #[serde(rename = "d_g")]
    pub gadget_digits: usize,
    #[serde(rename = "d_r")]
    pub refresh_digits: usize,
    /// Plaintext modulus.
    #[serde(rename = "t")]
    pub plaintext_modulus: u64,
    pub error_stddev: f64,
    /// Explicit secret distribution; `None` means "pick by bootstrap mode".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret_dist: Option<SecretDist>,
}

struct RawSet {
    name: &'static str,
    security_bits: u32,
    quantum_safe: bool,
    n: usize,
    q: u64,
    ring_dim: usize,
    log2_q: u32,
    ks_base: u64,
    gadget_log: u32,
    refresh_base: u64,
}

const RAW: [RawSet; 7] = [
    RawSet { name: "STD128", security_bits: 128, quantum_safe: false, n: 512, q: 512, ring_dim: 1024, log2_q: 27, ks_base: 25, gadget_log: 7, refresh_base: 23 },
    RawSet { name: "STD192", security_bits: 192, quantum_safe: false, n: 512, q: 512, ring_dim: 2048, log2_q: 37, ks_base: 25, gadget_log: 13, refresh_base: 23 },
    RawSet { name: "STD256", security_bits: 256, quantum_safe: false, n: 1024, q: 1024, ring_dim: 2048, log2_q: 29, ks_base: 25, gadget_log: 10, refresh_base: 32 },
    RawSet { name: "STD128Q", security_bits: 128, quantum_safe: true, n: 512, q: 512, ring_dim: 2048, log2_q: 50, ks_base: 25, gadget_log: 25, refresh_base: 23 },
    RawSet { name: "STD192Q", security_bits: 192, quantum_safe: true, n: 1024, q: 1024, ring_dim: 2048, log2_q: 35, ks_base: 25, gadget_log: 12, refresh_base: 32 },
    RawSet { name: "STD256Q", security_bits: 256, quantum_safe: true, n: 1024, q: 1024, ring_dim: 2048, log2_q: 27, ks_base: 25, gadget_log: 7, refresh_base: 32 },
    RawSet { name: "TOY", security_bits: 0, quantum_safe: false, n: 4, q: 16, ring_dim: 16, log2_q: 7, ks_base: 4, gadget_log: 2, refresh_base: 4 },
];

/// Looks up a named set and derives the modulus and digit counts.
pub fn load_param_set(name: &str) -> Result<ParamSet> {
    let key = name.trim().to_ascii_uppercase();
    let raw = RAW.iter().find(|r| r.name == key).ok_or_else(|| Error::UnknownParamSet {
        name: name.to_string(),
        valid: PARAM_SET_NAMES.join(", "),
    })?;
    let ring_modulus = select_modulus(raw.log2_q, raw.ring_dim)?;
    let gadget_base = 1u64 << raw.gadget_log;
    let (ks_digits, gadget_digits, refresh_digits) =
        derive_digit_counts(raw.q, ring_modulus, raw.ks_base, gadget_base, raw.refresh_base);
    Ok(ParamSet {
        name: raw.name.to_string(),
        security_bits: raw.security_bits,
        quantum_safe: raw.quantum_safe,
        lwe_dim: raw.n,
        lwe_modulus: raw.q,
        ring_dim: raw.ring_dim,
        ring_modulus_bits: raw.log2_q,
        ring_modulus,
        ks_base: raw.ks_base,
        gadget_base,
        refresh_base: raw.refresh_base,
        ks_digits,
        gadget_digits,
        refresh_digits,
        plaintext_modulus: 4,
        error_stddev: 3.19,
        secret_dist: None,
    })
}

/// All seven sets in table order.
pub fn all_param_sets() -> Vec<ParamSet> {
    PARAM_SET_NAMES.iter().map(|n| load_param_set(n).expect("built-in set")).collect()
}

/// Smallest `d >= 1` with `base^d >= modulus`.
pub fn min_digits(base: u64, modulus: u64) -> usize {
    assert!(base >= 2, "digit base must be at least 2");
    let mut d = 1;
    let mut reach = base as u128;
    while reach < modulus as u128 {
        reach *= base as u128;
        d += 1;
    }
    d
}

/// Returns `(d_s, d_g, d_r)` for the key-switch, gadget and refresh bases.
pub fn derive_digit_counts(
    lwe_modulus: u64,
    ring_modulus: u64,
    ks_base: u64,
    gadget_base: u64,
    refresh_base: u64,
) -> (usize, usize, usize) {
    (
        min_digits(ks_base, ring_modulus),
        min_digits(gadget_base, ring_modulus),
        min_digits(refresh_base, lwe_modulus),
    )
}

/// Largest prime `Q < 2^bits` with `Q = 1 mod 2N`, searching down to `2^(bits-1)`.
pub fn select_modulus(bits: u32, ring_dim: usize) -> Result<u64> {
    let fail = Error::NoNttModulus { bits, ring_dim };
    if !(2..=62).contains(&bits) || !ring_dim.is_power_of_two() {
        return Err(fail);
    }
    let step = 2 * ring_dim as u64;
    let top = 1u64 << bits;
    let floor = 1u64 << (bits - 1);
    if top <= step {
        return Err(fail);
    }
    let mut cand = ((top - 2) / step) * step + 1;
    while cand > floor {
        if is_prime(cand) {
            return Ok(cand);
        }
        cand -= step;
    }
    Err(fail)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl ParamSet {
    /// Secret distribution to use for `mode`: the explicit override, else
    /// binary for GINX and ternary for AP.
    pub fn secret_dist_for(&self, mode: BootstrapMode) -> SecretDist {
        self.secret_dist.unwrap_or(match mode {
            BootstrapMode::Ap => SecretDist::Ternary,
            BootstrapMode::Ginx => SecretDist::Binary,
        })
    }

    /// `2N / q`, the factor that embeds Z_q into the exponent group Z_2N.
    pub fn exponent_scale(&self) -> u64 {
        2 * self.ring_dim as u64 / self.lwe_modulus
    }

    /// True when every ring element fits in 32-bit words.
    pub fn fits_u32(&self) -> bool {
        self.ring_modulus < (1u64 << 32)
    }

    /// Checks the structural invariants; used on sets loaded from config files.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Param(format!("{}: {m}", self.name)));
        if !self.lwe_modulus.is_power_of_two() || !self.ring_dim.is_power_of_two() {
            return bad("q and N must be powers of two".into());
        }
        if self.lwe_modulus > 2 * self.ring_dim as u64 {
            return bad("q must not exceed 2N".into());
        }
        if self.lwe_modulus % (2 * self.plaintext_modulus) != 0 {
            return bad("t must divide q/2".into());
        }
        let q = self.ring_modulus;
        if !is_prime(q) || q % (2 * self.ring_dim as u64) != 1 {
            return bad("Q must be a prime with Q = 1 mod 2N".into());
        }
        let bits = self.ring_modulus_bits;
        if !(bits >= 2 && q > (1u64 << (bits - 1)) && q < (1u64 << bits)) {
            return bad("Q out of range for log2_Q".into());
        }
        if !self.gadget_base.is_power_of_two() {
            return bad("B_g must be a power of two".into());
        }
        let derived = derive_digit_counts(self.lwe_modulus, q, self.ks_base, self.gadget_base, self.refresh_base);
        if derived != (self.ks_digits, self.gadget_digits, self.refresh_digits) {
            return bad(format!("digit counts {derived:?} expected"));
        }
        Ok(())
    }

    /// Renders the set as one TOML record.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("ParamSet serializes")
    }

    /// Parses and validates one TOML record.
    pub fn from_toml(text: &str) -> Result<Self> {
        let p: ParamSet = toml::from_str(text).map_err(|e| Error::Param(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<8} sec={:<3} n={:<4} q={:<4} N={:<4} log2Q={:<2} Q={} B_s={} B_g=2^{} B_r={} d_s={} d_g={} d_r={}",
            self.name,
            self.security_bits,
            self.lwe_dim,
            self.lwe_modulus,
            self.ring_dim,
            self.ring_modulus_bits,
            self.ring_modulus,
            self.ks_base,
            self.gadget_base.trailing_zeros(),
            self.refresh_base,
            self.ks_digits,
            self.gadget_digits,
            self.refresh_digits,
        )
    }
}
