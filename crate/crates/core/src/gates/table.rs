use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_with, OpCounts, Window, Workspace};
use crate::error::{Error, Result};
use crate::keys::ServerKey;
use crate::lwe::{key_switch, modulus_switch, LweCiphertext};

/// The seven supported boolean gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
}

pub const ALL_GATES: [GateKind; 7] =
    [GateKind::And, GateKind::Nand, GateKind::Or, GateKind::Nor, GateKind::Xor, GateKind::Xnor, GateKind::Not];

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
        }
    }

    pub fn arity(self) -> usize {
        if self == GateKind::Not { 1 } else { 2 }
    }

    /// Plaintext semantics.
    pub fn apply(self, x: bool, y: bool) -> bool {
        match self {
            GateKind::And => x && y,
            GateKind::Nand => !(x && y),
            GateKind::Or => x || y,
            GateKind::Nor => !(x || y),
            GateKind::Xor => x ^ y,
            GateKind::Xnor => !(x ^ y),
            GateKind::Not => !x,
        }
    }

    pub fn spec(self) -> GateSpec {
        gate_table().into_iter().find(|g| g.kind == self).expect("every gate has a spec")
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_GATES
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Param(format!("unknown gate `{s}`")))
    }
}

/// How a gate combines its inputs and which phase window maps to true.
///
/// The combined ciphertext is `c1*ct1 + c2*ct2 + (0, c0)`; constants and
/// window endpoints are in eighths of q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub c1: i64,
    pub c2: i64,
    pub c0_eighths: u64,
    /// `(lower, upper)` in eighths; `None` when no bootstrap is needed.
    pub window_eighths: Option<(u64, u64)>,
    pub bootstrap_required: bool,
}

impl GateSpec {
    pub fn window(&self, q: u64) -> Option<Window> {
        self.window_eighths.map(|(l, u)| Window::eighths(l, u, q))
    }

    /// The linear combination step (NOT ignores `ct2`).
    pub fn combine(&self, ct1: &LweCiphertext, ct2: &LweCiphertext) -> Result<LweCiphertext> {
        let c0 = self.c0_eighths * ct1.modulus / 8;
        if self.c2 == 0 {
            Ok(ct1.scale_shift(self.c1, c0))
        } else {
            ct1.combine(self.c1, ct2, self.c2, c0)
        }
    }

    /// Checks every input row on noiseless phases (bit 1 at q/4).
    pub fn validate_noiseless(&self, q: u64) -> bool {
        let quarter = q / 4;
        let rows: &[(bool, bool)] = if self.kind.arity() == 1 {
            &[(false, false), (true, false)]
        } else {
            &[(false, false), (false, true), (true, false), (true, true)]
        };
        rows.iter().all(|&(x, y)| {
            let phase = (self.c1 * (x as i64) * quarter as i64
                + self.c2 * (y as i64) * quarter as i64
                + (self.c0_eighths * q / 8) as i64)
                .rem_euclid(q as i64) as u64;
            let want = self.kind.apply(x, y);
            match self.window(q) {
                Some(w) => w.contains(phase, q) == want,
                None => phase == if want { quarter } else { 0 },
            }
        })
    }
}

/// The gate table. Every bootstrapped window spans exactly q/2.
pub fn gate_table() -> Vec<GateSpec> {
    let boot = |kind, c1, c2, lo, hi| GateSpec {
        kind,
        c1,
        c2,
        c0_eighths: 0,
        window_eighths: Some((lo, hi)),
        bootstrap_required: true,
    };
    vec![
        boot(GateKind::And, 1, 1, 3, 7),
        boot(GateKind::Nand, 1, 1, 7, 3),
        boot(GateKind::Or, 1, 1, 1, 5),
        boot(GateKind::Nor, 1, 1, 5, 1),
        boot(GateKind::Xor, 2, -2, 2, 6),
        boot(GateKind::Xnor, 2, -2, 6, 2),
        GateSpec { kind: GateKind::Not, c1: -1, c2: 0, c0_eighths: 2, window_eighths: None, bootstrap_required: false },
    ]
}

/// Exhaustive search over the eight q/8-aligned half-windows for one that
/// realizes `kind` under the combination `(c1, c2, c0)`.
pub fn search_window(kind: GateKind, c1: i64, c2: i64, c0_eighths: u64, q: u64) -> Option<(u64, u64)> {
    (0..8).map(|lo| (lo, (lo + 4) % 8)).find(|&w| {
        GateSpec { kind, c1, c2, c0_eighths, window_eighths: Some(w), bootstrap_required: true }
            .validate_noiseless(q)
    })
}

/// Evaluates one gate with caller-provided scratch space and counters.
pub fn eval_gate_with(
    spec: &GateSpec,
    ct1: &LweCiphertext,
    ct2: &LweCiphertext,
    key: &ServerKey,
    ws: &mut Workspace,
    counts: &mut OpCounts,
) -> Result<LweCiphertext> {
    let p = key.params();
    for ct in [ct1, ct2] {
        if ct.dim() != p.lwe_dim || ct.modulus != p.lwe_modulus {
            return Err(Error::Shape(format!(
                "gate input must be dim {} mod {} (got dim {} mod {})",
                p.lwe_dim,
                p.lwe_modulus,
                ct.dim(),
                ct.modulus
            )));
        }
    }
    let combined = spec.combine(ct1, ct2)?;
    let Some(window) = spec.window(p.lwe_modulus) else {
        return Ok(combined);
    };
    let refreshed = bootstrap_with(&key.ctx, &combined, &key.refresh, window, ws, counts)?;
    let switched = key_switch(&refreshed, &key.ksk)?;
    Ok(modulus_switch(&switched, p.lwe_modulus))
}

/// Evaluates one gate: combine, bootstrap, key switch, modulus switch.
pub fn eval_gate(kind: GateKind, ct1: &LweCiphertext, ct2: &LweCiphertext, key: &ServerKey) -> Result<LweCiphertext> {
    let mut ws = Workspace::new(key.params().ring_dim, key.params().gadget_digits);
    eval_gate_with(&kind.spec(), ct1, ct2, key, &mut ws, &mut OpCounts::default())
}
