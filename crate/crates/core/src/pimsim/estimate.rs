use serde::{Deserialize, Serialize};

use super::cost::OpKind;
use super::pipeline::{build_server_pipeline, PimConfig, PipelineModel};
use crate::error::{Error, Result};
use crate::gates::CircuitStats;
use crate::params::{load_param_set, BootstrapMode, ParamSet};

const GB: f64 = (1u64 << 30) as f64;
const MB: f64 = (1u64 << 20) as f64;

/// Inputs per millisecond of one pipeline.
pub fn estimate_throughput(model: &PipelineModel) -> f64 {
    let period = model.period_ns();
    if period == 0.0 { 0.0 } else { 1e6 / period }
}

/// Milliseconds from an input entering the pipeline to its result leaving.
pub fn estimate_latency(model: &PipelineModel) -> f64 {
    model.depth() as f64 * model.period_ns() / 1e6
}

/// Memory footprint of one pipeline, in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryBreakdown {
    /// Refreshing key, 2*d_g ring polynomials per RGSW element.
    pub ek_b: u64,
    /// Refreshing key with all 4*d_g polynomials of each RGSW element.
    pub ek_b_full: u64,
    pub ek_s: u64,
    /// Working memory of the accumulation units.
    pub acc_units: u64,
    /// Working memory of the init, key-switch and modulus-switch stages.
    pub other: u64,
}

impl MemoryBreakdown {
    pub fn keys(&self) -> u64 {
        self.ek_b + self.ek_s
    }

    pub fn working(&self) -> u64 {
        self.acc_units + self.other
    }

    pub fn total(&self) -> u64 {
        self.keys() + self.working()
    }
}

/// RGSW elements in the refreshing key.
pub fn refresh_key_elements(params: &ParamSet, mode: BootstrapMode) -> u64 {
    match mode {
        BootstrapMode::Ap => (params.lwe_dim * params.refresh_digits) as u64 * params.refresh_base,
        BootstrapMode::Ginx => 2 * params.lwe_dim as u64,
    }
}

pub fn estimate_memory(model: &PipelineModel, params: &ParamSet, mode: BootstrapMode) -> MemoryBreakdown {
    let bits = params.ring_modulus_bits as u64;
    let poly_bits = params.ring_dim as u64 * bits;
    let elements = refresh_key_elements(params, mode);
    let half_rgsw = 2 * params.gadget_digits as u64 * poly_bits;
    let ek_s_bits = (params.ring_dim * params.ks_digits) as u64 * params.ks_base * (params.lwe_dim as u64 + 1) * bits;
    MemoryBreakdown {
        ek_b: elements * half_rgsw / 8,
        ek_b_full: elements * 2 * half_rgsw / 8,
        ek_s: ek_s_bits / 8,
        acc_units: model.unit_blocks() * model.block_bytes,
        other: model.other_blocks() * model.block_bytes,
    }
}

/// Per-input energy, or a marker when no anchor is configured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Energy {
    Calibrated(f64),
    Uncalibrated(UncalibratedMarker),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UncalibratedMarker {
    Uncalibrated,
}

impl Energy {
    pub fn mj(&self) -> Option<f64> {
        match self {
            Energy::Calibrated(x) => Some(*x),
            Energy::Uncalibrated(_) => None,
        }
    }
}

/// Energy per input: model activity (cycles times blocks) scaled by a
/// constant fitted to the configured anchors under the same mode and
/// optimization.
pub fn estimate_energy(model: &PipelineModel, config: &PimConfig) -> Result<Energy> {
    let mut ratios = Vec::new();
    for (name, &mj) in &config.energy_anchors_mj {
        let p = load_param_set(name)?;
        let anchor = build_server_pipeline(&p, model.mode, &config.clone().with_optimization(model.optimization))?;
        let activity = anchor.activity();
        if activity > 0 {
            ratios.push(mj / activity as f64);
        }
    }
    if ratios.is_empty() {
        return Ok(Energy::Uncalibrated(UncalibratedMarker::Uncalibrated));
    }
    let k = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(Energy::Calibrated(k * model.activity() as f64))
}

/// Stage summary carried in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BottleneckInfo {
    pub label: String,
    pub cycles: u64,
}

/// Memory in GB, split by component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryGb {
    pub ek_b: f64,
    pub ek_b_full: f64,
    pub ek_s: f64,
    pub acc_units: f64,
    pub other: f64,
    pub total: f64,
}

/// Everything `simulate` reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub params: String,
    pub mode: BootstrapMode,
    pub optimization: super::Optimization,
    pub budget_gb: Option<f64>,
    pub throughput_inputs_per_ms: f64,
    pub latency_ms: f64,
    pub memory_gb: MemoryGb,
    pub energy_mj: Energy,
    pub pipeline_count: u64,
    /// How many accumulation units share one set of NTT cores (1 = none).
    pub share_factor: u64,
    pub depth: u64,
    pub period_ns: f64,
    pub bottleneck: BottleneckInfo,
    pub notes: Vec<String>,
}

fn notes() -> Vec<String> {
    vec![
        "XOR and XNOR use one bootstrap on 2*(ct1 - ct2)".into(),
        "ek_b counts 2*d_g ring polynomials per RGSW element; ek_b_full counts all 4*d_g".into(),
        "energy is a one-point calibration, not a measurement".into(),
    ]
}

/// Report for one ideal pipeline.
pub fn cost_report(params: &ParamSet, mode: BootstrapMode, config: &PimConfig) -> Result<CostReport> {
    let model = build_server_pipeline(params, mode, config)?;
    let mem = estimate_memory(&model, params, mode);
    assemble(&model, config, mem, 1, 1, None)
}

fn assemble(
    model: &PipelineModel,
    config: &PimConfig,
    mem: MemoryBreakdown,
    pipelines: u64,
    share: u64,
    budget_gb: Option<f64>,
) -> Result<CostReport> {
    let bottleneck = model.bottleneck().map_or(BottleneckInfo { label: String::new(), cycles: 0 }, |s| {
        BottleneckInfo { label: s.label.clone(), cycles: s.cycles }
    });
    let p = pipelines as f64;
    let gb = |x: u64| x as f64 / GB;
    Ok(CostReport {
        params: model.params.clone(),
        mode: model.mode,
        optimization: model.optimization,
        budget_gb,
        throughput_inputs_per_ms: estimate_throughput(model) * p / share as f64,
        latency_ms: estimate_latency(model) * share as f64,
        memory_gb: MemoryGb {
            ek_b: gb(mem.ek_b) * p,
            ek_b_full: gb(mem.ek_b_full) * p,
            ek_s: gb(mem.ek_s) * p,
            acc_units: gb(mem.acc_units) * p / share as f64,
            other: gb(mem.other) * p,
            total: (gb(mem.keys()) + gb(mem.other) + gb(mem.acc_units) / share as f64) * p,
        },
        energy_mj: estimate_energy(model, config)?,
        pipeline_count: pipelines,
        share_factor: share,
        depth: model.depth(),
        period_ns: model.period_ns() * share as f64,
        bottleneck,
        notes: notes(),
    })
}

/// Fits the design into `budget_gb`: whole pipelines when at least one
/// fits, otherwise one pipeline whose accumulation units share NTT cores.
pub fn scale_to_budget(params: &ParamSet, mode: BootstrapMode, budget_gb: f64, config: &PimConfig) -> Result<CostReport> {
    let model = build_server_pipeline(params, mode, config)?;
    let mem = estimate_memory(&model, params, mode);
    let budget = budget_gb * GB;
    let fixed = (mem.keys() + mem.other) as f64;
    if !(budget > fixed) {
        return Err(Error::InsufficientMemory { budget_gb, floor_gb: fixed / GB });
    }
    let full = mem.total() as f64;
    let (pipelines, share) = if budget >= full {
        ((budget / full).floor() as u64, 1)
    } else {
        (1, (mem.acc_units as f64 / (budget - fixed)).ceil().max(1.0) as u64)
    };
    assemble(&model, config, mem, pipelines, share, Some(budget_gb))
}

/// Client-side encryption cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClientReport {
    pub params: String,
    pub latency_us: f64,
    /// Share of the latency spent in the a.s dot product.
    pub dot_product_fraction: f64,
    /// Blocks one encryption engine needs.
    pub engine_blocks: u64,
    pub engines: u64,
    pub throughput_per_us: f64,
}

/// Models one LWE encryption: row-parallel products a_i*s_i, a column-
/// parallel adder chain over the n products, bit-serial transposes and
/// reduction, then adding the noise and message.
pub fn estimate_client(params: &ParamSet, config: &PimConfig, blocks: u64) -> Result<ClientReport> {
    config.validate()?;
    let c = &config.costs;
    let p = params.lwe_modulus.next_power_of_two().trailing_zeros().max(1);
    let n = params.lwe_dim as u64;
    let log_n = (n.max(2)).next_power_of_two().trailing_zeros() as u64;
    let bit_add = c.c(OpKind::BitAdd, 1);
    let dot = c.c(OpKind::Mul, p)
        + n.saturating_sub(2) * bit_add
        + p as u64 * log_n * c.c(OpKind::ColumnTransfer, 1)
        + p as u64 * log_n * bit_add;
    let total = dot + 2 * c.c(OpKind::Add, p);
    let latency_us = total as f64 * config.cycle_ns / 1e3;
    let engine_blocks = (2 * n).div_ceil(config.block_rows).max(1);
    let engines = blocks / engine_blocks;
    Ok(ClientReport {
        params: params.name.clone(),
        latency_us,
        dot_product_fraction: dot as f64 / total as f64,
        engine_blocks,
        engines,
        throughput_per_us: engines as f64 / latency_us,
    })
}

/// Timing of a circuit run on the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitEstimate {
    pub instances: u64,
    pub depth: usize,
    pub bootstraps: u64,
    pub single_latency_ms: f64,
    pub total_ms: f64,
    pub throughput_per_ms: f64,
}

/// Each bootstrapped level of `instances` copies runs as one batch through
/// the pipeline: the first result after the pipeline latency, the rest one
/// period apart. Levels run back to back.
pub fn estimate_circuit(model: &PipelineModel, stats: &CircuitStats, instances: u64) -> CircuitEstimate {
    let latency = estimate_latency(model);
    let period_ms = model.period_ns() / 1e6;
    let total: f64 = stats
        .gates_per_level
        .iter()
        .filter(|&&g| g > 0)
        .map(|&g| latency + (g as u64 * instances - 1) as f64 * period_ms)
        .sum();
    CircuitEstimate {
        instances,
        depth: stats.depth,
        bootstraps: stats.bootstrapped_gates as u64 * instances,
        single_latency_ms: stats.depth as f64 * latency,
        total_ms: total,
        throughput_per_ms: if total > 0.0 { instances as f64 / total } else { 0.0 },
    }
}

/// A learning workload by its bootstrapped gate count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Workload {
    pub name: &'static str,
    pub gate_ops: u64,
}

pub const WORKLOADS: [Workload; 4] = [
    Workload { name: "MNIST", gate_ops: 856_000 },
    Workload { name: "CIFAR-10", gate_ops: 211_000_000 },
    Workload { name: "ImageNet", gate_ops: 1_100_000_000 },
    Workload { name: "PennTreebank", gate_ops: 24_400_000 },
];

pub fn find_workload(name: &str) -> Result<Workload> {
    WORKLOADS.into_iter().find(|w| w.name.eq_ignore_ascii_case(name)).ok_or_else(|| {
        let valid: Vec<&str> = WORKLOADS.iter().map(|w| w.name).collect();
        Error::Param(format!("unknown workload `{name}` (valid: {})", valid.join(", ")))
    })
}

/// Inferences per second at full pipeline utilization.
pub fn estimate_workload(report: &CostReport, gate_ops: u64) -> Result<f64> {
    if gate_ops == 0 {
        return Err(Error::Param("gate_ops must be positive".into()));
    }
    Ok(report.throughput_inputs_per_ms * 1000.0 / gate_ops as f64)
}

/// Per-key sizes in MB (2^20 bytes), for comparison with published tables.
pub fn key_sizes_mb(params: &ParamSet, mode: BootstrapMode, config: &PimConfig) -> Result<(f64, f64)> {
    let model = build_server_pipeline(params, mode, config)?;
    let mem = estimate_memory(&model, params, mode);
    Ok((mem.ek_b as f64 / MB, mem.ek_s as f64 / MB))
}
