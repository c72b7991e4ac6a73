//! Analytical cost model of a processing-in-memory bootstrapping server.
//!
//! Nothing here runs cryptography. Cycle costs of in-memory primitives
//! ([`CostFormulaTable`]) are composed into a synchronous stage pipeline
//! ([`build_server_pipeline`]) from which throughput, latency, memory,
//! energy and budget-scaled figures are derived.

mod cost;
mod estimate;
mod pipeline;

use std::fmt::Write as _;

pub use cost::{op_cycles, CostFormulaTable, OpKind, ReductionCost};
pub use estimate::{
    cost_report, estimate_circuit, estimate_client, estimate_energy, estimate_latency, estimate_memory,
    estimate_throughput, estimate_workload, find_workload, key_sizes_mb, refresh_key_elements, scale_to_budget,
    BottleneckInfo, CircuitEstimate, ClientReport, CostReport, Energy, MemoryBreakdown, MemoryGb, UncalibratedMarker,
    Workload, WORKLOADS,
};
pub use pipeline::{
    accumulation_units, build_server_pipeline, ModelCounts, Optimization, PimConfig, PipelineModel, Stage, StageKind,
};

/// Human-readable rendering of a report.
pub fn format_table(r: &CostReport) -> String {
    let mut s = String::new();
    let mut row = |k: &str, v: String| {
        let _ = writeln!(s, "{k:<22} {v}");
    };
    row("params", r.params.clone());
    row("mode", r.mode.to_string());
    row("optimization", r.optimization.to_string());
    if let Some(b) = r.budget_gb {
        row("budget", format!("{b} GB"));
    }
    row("throughput", format!("{:.2} inputs/ms", r.throughput_inputs_per_ms));
    row("latency", format!("{:.3} ms", r.latency_ms));
    row("pipelines", r.pipeline_count.to_string());
    row("share factor", r.share_factor.to_string());
    row("depth", format!("{} stages", r.depth));
    row("period", format!("{:.1} ns", r.period_ns));
    row("bottleneck", format!("{} ({} cycles)", r.bottleneck.label, r.bottleneck.cycles));
    let m = &r.memory_gb;
    row("memory total", format!("{:.3} GB", m.total));
    row("  refresh key", format!("{:.3} GB (full RGSW {:.3} GB)", m.ek_b, m.ek_b_full));
    row("  switching key", format!("{:.3} GB", m.ek_s));
    row("  accumulation", format!("{:.3} GB", m.acc_units));
    row("  other stages", format!("{:.3} GB", m.other));
    row(
        "energy",
        match r.energy_mj.mj() {
            Some(e) => format!("{e:.2} mJ"),
            None => "uncalibrated".into(),
        },
    );
    for n in &r.notes {
        row("note", n.clone());
    }
    s
}

/// Full stage table of a pipeline; the accumulation unit is listed once.
pub fn format_explain(model: &PipelineModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "pipeline {} {} {}", model.params, model.mode, model.optimization);
    let _ = writeln!(s, "accumulation units {}", model.units);
    let _ = writeln!(s, "depth {} stages", model.depth());
    let _ = writeln!(s, "period {} cycles ({:.1} ns)", model.period_cycles(), model.period_ns());
    if let Some(b) = model.bottleneck() {
        let _ = writeln!(s, "bottleneck {}", b.label);
    }
    let c = model.counts();
    let _ = writeln!(
        s,
        "per bootstrap: {} external products, {} forward NTTs, {} inverse NTTs, {} NTT stage passes",
        c.external_products, c.forward_ntts, c.inverse_ntts, c.ntt_stages
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<10} {:<24} {:>8} {:>8} {:>12}", "section", "stage", "cycles", "blocks", "memory_kib");
    let kib = model.block_bytes / 1024;
    let mut section = |name: &str, stages: &[Stage]| {
        for st in stages {
            let _ = writeln!(s, "{:<10} {:<24} {:>8} {:>8} {:>12}", name, st.label, st.cycles, st.blocks, st.blocks * kib);
        }
    };
    section("prologue", &model.prologue);
    section(&format!("unit x{}", model.units), &model.unit);
    section("epilogue", &model.epilogue);
    s
}
