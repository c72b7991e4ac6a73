use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cost::{CostFormulaTable, OpKind};
use crate::error::{Error, Result};
use crate::params::{BootstrapMode, ParamSet};

/// Pipeline flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimization {
    /// Every NTT stage split into three substages.
    Throughput,
    /// One pipeline stage per NTT stage.
    Area,
}

impl fmt::Display for Optimization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Optimization::Throughput => "throughput",
            Optimization::Area => "area",
        })
    }
}

impl FromStr for Optimization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "throughput" => Ok(Optimization::Throughput),
            "area" => Ok(Optimization::Area),
            other => Err(Error::Param(format!("unknown optimization `{other}` (valid: throughput, area)"))),
        }
    }
}

/// Hardware and model settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PimConfig {
    /// Rows per memory block.
    pub block_rows: u64,
    /// Bit columns per memory block.
    pub block_cols: u64,
    /// Nanoseconds per memory cycle.
    pub cycle_ns: f64,
    pub optimization: Optimization,
    /// Subtractions per key-switch tree block; derived from the stage period when absent.
    pub keyswitch_fanin: Option<u64>,
    pub costs: CostFormulaTable,
    /// Per-input energy anchors in mJ, keyed by parameter-set name.
    pub energy_anchors_mj: BTreeMap<String, f64>,
}

impl Default for PimConfig {
    fn default() -> Self {
        PimConfig {
            block_rows: 1024,
            block_cols: 1024,
            cycle_ns: 1.1,
            optimization: Optimization::Throughput,
            keyswitch_fanin: None,
            costs: CostFormulaTable::default(),
            energy_anchors_mj: BTreeMap::from([("STD128".to_string(), 34.0)]),
        }
    }
}

impl PimConfig {
    pub fn with_optimization(mut self, opt: Optimization) -> Self {
        self.optimization = opt;
        self
    }

    pub fn block_bytes(&self) -> u64 {
        self.block_rows * self.block_cols / 8
    }

    /// Coefficients one block holds in an NTT stage (two per row).
    pub fn ntt_block_capacity(&self) -> u64 {
        2 * self.block_rows
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_rows == 0 || self.block_cols == 0 || !(self.cycle_ns > 0.0) {
            return Err(Error::Param("block size and cycle time must be positive".into()));
        }
        if self.keyswitch_fanin == Some(0) {
            return Err(Error::Param("key-switch fan-in must be positive".into()));
        }
        Ok(())
    }
}

/// What a pipeline stage does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    Init,
    Decompose,
    NttForward,
    Pointwise,
    Reduce,
    Accumulate,
    NttInverse,
    Rotate,
    KeySwitchDivide,
    KeySwitchTree,
    ModulusSwitch,
}

/// One synchronous pipeline stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub label: String,
    pub kind: StageKind,
    pub cycles: u64,
    /// Memory blocks this stage occupies.
    pub blocks: u64,
    /// Polynomials transformed in parallel (NTT stages only).
    pub transforms: u64,
    /// Substage index within a split NTT stage; 0 marks a logical stage.
    pub substage: u8,
}

impl Stage {
    fn new(label: impl Into<String>, kind: StageKind, cycles: u64, blocks: u64) -> Self {
        Stage { label: label.into(), kind, cycles, blocks, transforms: 0, substage: 0 }
    }
}

/// A full server pipeline: a prologue, `units` copies of the accumulation
/// unit, and the key-switch / modulus-switch epilogue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineModel {
    pub params: String,
    pub mode: BootstrapMode,
    pub optimization: Optimization,
    pub prologue: Vec<Stage>,
    pub unit: Vec<Stage>,
    pub units: u64,
    pub epilogue: Vec<Stage>,
    pub cycle_ns: f64,
    pub block_bytes: u64,
}

/// Logical operation counts of one bootstrap, as the model sees them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelCounts {
    pub external_products: u64,
    pub forward_ntts: u64,
    pub inverse_ntts: u64,
    pub ntt_stages: u64,
}

impl PipelineModel {
    /// Number of pipeline stages an input passes through.
    pub fn depth(&self) -> u64 {
        (self.prologue.len() + self.epilogue.len()) as u64 + self.units * self.unit.len() as u64
    }

    /// All stages in order, with accumulation units expanded.
    pub fn stages(&self) -> impl Iterator<Item = &Stage> + '_ {
        let units = if self.unit.is_empty() { 0 } else { self.units as usize };
        self.prologue
            .iter()
            .chain((0..units).flat_map(move |_| self.unit.iter()))
            .chain(self.epilogue.iter())
    }

    /// The slowest stage, which sets the pipeline period.
    pub fn bottleneck(&self) -> Option<&Stage> {
        // first of the maxima, so reports are stable
        self.prologue
            .iter()
            .chain(&self.unit)
            .chain(&self.epilogue)
            .fold(None, |best: Option<&Stage>, s| match best {
                Some(b) if b.cycles >= s.cycles => Some(b),
                _ => Some(s),
            })
    }

    pub fn period_cycles(&self) -> u64 {
        self.bottleneck().map_or(0, |s| s.cycles)
    }

    pub fn period_ns(&self) -> f64 {
        self.period_cycles() as f64 * self.cycle_ns
    }

    /// Blocks held by the accumulation units.
    pub fn unit_blocks(&self) -> u64 {
        self.units * self.unit.iter().map(|s| s.blocks).sum::<u64>()
    }

    /// Blocks held by the prologue and epilogue.
    pub fn other_blocks(&self) -> u64 {
        self.prologue.iter().chain(&self.epilogue).map(|s| s.blocks).sum()
    }

    /// Sum of cycles times blocks over every stage.
    pub fn activity(&self) -> u64 {
        let edge: u64 = self.prologue.iter().chain(&self.epilogue).map(|s| s.cycles * s.blocks).sum();
        let unit: u64 = self.unit.iter().map(|s| s.cycles * s.blocks).sum();
        edge + self.units * unit
    }

    pub fn counts(&self) -> ModelCounts {
        let logical = |kind| self.unit.iter().filter(move |s: &&Stage| s.kind == kind && s.substage == 0);
        let transforms = |kind| logical(kind).map(|s| s.transforms).max().unwrap_or(0);
        let stage_evals: u64 = logical(StageKind::NttForward).chain(logical(StageKind::NttInverse)).map(|s| s.transforms).sum();
        ModelCounts {
            external_products: self.units,
            forward_ntts: self.units * transforms(StageKind::NttForward),
            inverse_ntts: self.units * transforms(StageKind::NttInverse),
            ntt_stages: self.units * stage_evals,
        }
    }
}

/// Accumulation units per pipeline: one per blind-rotation step.
pub fn accumulation_units(params: &ParamSet, mode: BootstrapMode) -> u64 {
    match mode {
        BootstrapMode::Ap => (params.lwe_dim * params.refresh_digits) as u64,
        BootstrapMode::Ginx => 2 * params.lwe_dim as u64,
    }
}

fn log2_ceil(x: u64) -> u64 {
    if x <= 1 { 0 } else { 64 - (x - 1).leading_zeros() as u64 }
}

/// Builds the stage list of one server pipeline.
pub fn build_server_pipeline(params: &ParamSet, mode: BootstrapMode, config: &PimConfig) -> Result<PipelineModel> {
    config.validate()?;
    let c = &config.costs;
    let b = params.ring_modulus_bits;
    let n = params.lwe_dim as u64;
    let ring = params.ring_dim as u64;
    let dg = params.gadget_digits as u64;
    let ds = params.ks_digits as u64;
    let rows = config.block_rows;
    let poly_blocks = ring.div_ceil(rows);
    let lwe_blocks = (n + 1).div_ceil(rows);
    let log_n = ring.trailing_zeros() as u64;
    let split = config.optimization == Optimization::Throughput;

    let add = c.c(OpKind::Add, b);
    let mul = c.c(OpKind::Mul, b);
    let mont = c.c(OpKind::Montgomery, b);
    let barrett = c.c(OpKind::Barrett, b);
    let handoff = c.ntt_transfer_phases * c.c(OpKind::ColumnTransfer, b);

    let prologue = vec![Stage::new("init", StageKind::Init, c.c(OpKind::Rotation, b) + add, 2 * poly_blocks)];

    // one accumulation unit
    let mut unit = Vec::new();
    unit.push(Stage::new(
        "decompose",
        StageKind::Decompose,
        dg * (c.c(OpKind::Compare, b) + 2 * add + 2),
        2 * dg * poly_blocks,
    ));
    let ntt_stages = |unit: &mut Vec<Stage>, tag: &str, kind: StageKind, polys: u64| {
        let blocks = (polys * ring).div_ceil(config.ntt_block_capacity());
        for s in 0..log_n {
            let parts: Vec<(&str, u64)> = if split {
                vec![("twiddle", mul), ("reduce", mont + 2 * add), ("transfer", barrett + handoff)]
            } else {
                vec![("stage", mul + mont + 2 * add + barrett + handoff)]
            };
            for (k, (part, cycles)) in parts.into_iter().enumerate() {
                let label = if split { format!("{tag}{s}.{part}") } else { format!("{tag}{s}") };
                unit.push(Stage { label, kind, cycles, blocks, transforms: polys, substage: k as u8 });
            }
        }
    };
    ntt_stages(&mut unit, "ntt", StageKind::NttForward, 2 * dg);
    unit.push(Stage::new("pointwise", StageKind::Pointwise, mul, 4 * dg * poly_blocks));
    let tree_adds = log2_ceil(2 * dg) * add + barrett;
    if split {
        unit.push(Stage::new("reduce", StageKind::Reduce, mont, 4 * dg * poly_blocks));
        unit.push(Stage::new("accumulate", StageKind::Accumulate, tree_adds, 2 * (2 * dg - 1) * poly_blocks));
    } else {
        unit.push(Stage::new(
            "reduce+accumulate",
            StageKind::Reduce,
            mont + tree_adds,
            (4 * dg + 2 * (2 * dg - 1)) * poly_blocks,
        ));
    }
    ntt_stages(&mut unit, "intt", StageKind::NttInverse, 2);
    if mode == BootstrapMode::Ginx {
        unit.push(Stage::new("rotate", StageKind::Rotate, c.c(OpKind::Rotation, b) + 3 * add + barrett, 6 * poly_blocks));
    }

    let mut epilogue = Vec::new();
    for j in 1..ds {
        if split {
            epilogue.push(Stage::new(format!("ks-divide{j}.mul"), StageKind::KeySwitchDivide, mul, poly_blocks));
            let mut red = Stage::new(format!("ks-divide{j}.reduce"), StageKind::KeySwitchDivide, mont, poly_blocks);
            red.substage = 1;
            epilogue.push(red);
        } else {
            epilogue.push(Stage::new(format!("ks-divide{j}"), StageKind::KeySwitchDivide, mul + mont, poly_blocks));
        }
    }
    let modswitch: Vec<Stage> = if split {
        let mut second = Stage::new("modswitch.add", StageKind::ModulusSwitch, add, lwe_blocks);
        second.substage = 1;
        vec![Stage::new("modswitch.mul", StageKind::ModulusSwitch, mul, lwe_blocks), second]
    } else {
        vec![Stage::new("modswitch", StageKind::ModulusSwitch, mul + add, lwe_blocks)]
    };

    // the subtraction tree is sized against the period of everything else
    let period = prologue.iter().chain(&unit).chain(&epilogue).chain(&modswitch).map(|s| s.cycles).max().unwrap_or(1);
    let sub = add + barrett;
    let fanin = config.keyswitch_fanin.unwrap_or((period / sub).max(1));
    let selected = ring * ds.saturating_sub(1).max(1);
    let tree_depth = log2_ceil(selected.div_ceil(fanin)).max(1);
    for level in 0..tree_depth {
        let groups = selected.div_ceil(fanin << level);
        let cycles = if level == 0 { fanin * sub } else { sub };
        epilogue.push(Stage::new(format!("ks-tree{level}"), StageKind::KeySwitchTree, cycles, groups * lwe_blocks));
    }
    epilogue.extend(modswitch);

    Ok(PipelineModel {
        params: params.name.clone(),
        mode,
        optimization: config.optimization,
        prologue,
        unit,
        units: accumulation_units(params, mode),
        epilogue,
        cycle_ns: config.cycle_ns,
        block_bytes: config.block_bytes(),
    })
}
