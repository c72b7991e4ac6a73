use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primitive in-memory operations with a cycle cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Add,
    Mul,
    /// Bit-serial associative search.
    Compare,
    /// Row rotation by a monomial shift.
    Rotation,
    /// Moving `b` columns between blocks.
    ColumnTransfer,
    /// One-bit addition.
    BitAdd,
    /// Multiplication by a fixed constant as shift-and-add steps.
    ConstMul,
    Montgomery,
    Barrett,
}

impl OpKind {
    pub const ALL: [OpKind; 9] = [
        OpKind::Add,
        OpKind::Mul,
        OpKind::Compare,
        OpKind::Rotation,
        OpKind::ColumnTransfer,
        OpKind::BitAdd,
        OpKind::ConstMul,
        OpKind::Montgomery,
        OpKind::Barrett,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Add => "add",
            OpKind::Mul => "mul",
            OpKind::Compare => "compare",
            OpKind::Rotation => "rotation",
            OpKind::ColumnTransfer => "column_transfer",
            OpKind::BitAdd => "bit_add",
            OpKind::ConstMul => "const_mul",
            OpKind::Montgomery => "montgomery",
            OpKind::Barrett => "barrett",
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let alias = match s.as_str() {
            "search" => "compare",
            "transfer" => "column_transfer",
            other => other,
        };
        OpKind::ALL.into_iter().find(|k| k.name() == alias).ok_or_else(|| {
            let valid: Vec<&str> = OpKind::ALL.iter().map(|k| k.name()).collect();
            Error::Param(format!("unknown operation `{s}` (valid: {})", valid.join(", ")))
        })
    }
}

/// How modular reductions are charged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ReductionCost {
    /// Products by the fixed constants (mu, Q, -1/Q) are shift-and-add
    /// sequences of `ceil(b / bits_per_step)` additions; each reduction is
    /// two such products and a final addition.
    ShiftAdd { bits_per_step: u32 },
    /// General multiplier: Montgomery = 2 mul + 2 add, Barrett = mul + 2 add.
    Multiplier,
}

/// Cycle formulas for the in-memory primitives. Every coefficient can be
/// overridden from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostFormulaTable {
    /// add(b) = add_per_bit * b + add_const
    pub add_per_bit: u64,
    pub add_const: u64,
    /// mul(b) = mul_quadratic * b^2 + mul_linear * b
    pub mul_quadratic: u64,
    pub mul_linear: u64,
    pub compare_per_bit: u64,
    pub rotation_per_bit: u64,
    pub transfer_per_bit: u64,
    /// Column-transfer phases between consecutive NTT stages.
    pub ntt_transfer_phases: u64,
    pub reduction: ReductionCost,
}

impl Default for CostFormulaTable {
    fn default() -> Self {
        CostFormulaTable {
            add_per_bit: 6,
            add_const: 1,
            mul_quadratic: 7,
            mul_linear: 4,
            compare_per_bit: 1,
            rotation_per_bit: 2,
            transfer_per_bit: 1,
            ntt_transfer_phases: 4,
            reduction: ReductionCost::ShiftAdd { bits_per_step: 3 },
        }
    }
}

impl CostFormulaTable {
    /// Cycles for one `kind` operation on `b`-bit operands.
    pub fn cycles(&self, kind: OpKind, b: u32) -> Result<u64> {
        if b == 0 {
            return Err(Error::Param("operand width must be at least 1 bit".into()));
        }
        Ok(self.cycles_unchecked(kind, b as u64))
    }

    fn cycles_unchecked(&self, kind: OpKind, b: u64) -> u64 {
        let add = self.add_per_bit * b + self.add_const;
        let mul = self.mul_quadratic * b * b + self.mul_linear * b;
        match kind {
            OpKind::Add => add,
            OpKind::Mul => mul,
            OpKind::Compare => self.compare_per_bit * b,
            OpKind::Rotation => self.rotation_per_bit * b,
            OpKind::ColumnTransfer => self.transfer_per_bit * b,
            OpKind::BitAdd => self.add_per_bit + self.add_const,
            OpKind::ConstMul => match self.reduction {
                ReductionCost::ShiftAdd { bits_per_step } => b.div_ceil(bits_per_step.max(1) as u64) * add,
                ReductionCost::Multiplier => mul,
            },
            OpKind::Montgomery => match self.reduction {
                ReductionCost::ShiftAdd { .. } => 2 * self.cycles_unchecked(OpKind::ConstMul, b) + add,
                ReductionCost::Multiplier => 2 * mul + 2 * add,
            },
            OpKind::Barrett => match self.reduction {
                ReductionCost::ShiftAdd { .. } => 2 * self.cycles_unchecked(OpKind::ConstMul, b) + add,
                ReductionCost::Multiplier => mul + 2 * add,
            },
        }
    }

    /// Shorthand used while building pipelines, where `b` is always valid.
    pub(crate) fn c(&self, kind: OpKind, b: u32) -> u64 {
        self.cycles_unchecked(kind, b.max(1) as u64)
    }
}

/// Cycles of `kind` at width `b` under the default formulas.
pub fn op_cycles(kind: OpKind, b: u32) -> Result<u64> {
    CostFormulaTable::default().cycles(kind, b)
}
