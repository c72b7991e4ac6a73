//! Inferences per second for the learning workloads at a given memory
//! budget, plus circuit-level timings for adders.

use fhew_pim::gates::build_kogge_stone_adder;
use fhew_pim::params::{load_param_set, BootstrapMode};
use fhew_pim::pimsim::{
    build_server_pipeline, estimate_circuit, estimate_client, estimate_workload, scale_to_budget, Optimization,
    PimConfig, WORKLOADS,
};

fn main() -> fhew_pim::Result<()> {
    let config = PimConfig::default().with_optimization(Optimization::Area);
    let params = load_param_set("STD128")?;
    let report = scale_to_budget(&params, BootstrapMode::Ginx, 64.0, &config)?;
    println!("STD128 area, 64 GB: {:.1} inputs/ms", report.throughput_inputs_per_ms);
    for w in WORKLOADS {
        println!("  {:<13} {:>13} gates  {:>10.3} inferences/s", w.name, w.gate_ops, estimate_workload(&report, w.gate_ops)?);
    }

    let config = PimConfig::default();
    for name in ["STD128Q", "STD256Q"] {
        let p = load_param_set(name)?;
        let model = build_server_pipeline(&p, BootstrapMode::Ginx, &config)?;
        let client = estimate_client(&p, &config, 1024)?;
        println!("\n{name}: client encryption {:.2} us ({:.0}% dot product)", client.latency_us, 100.0 * client.dot_product_fraction);
        for width in [8, 16, 32, 64] {
            let stats = build_kogge_stone_adder(width).stats();
            let one = estimate_circuit(&model, &stats, 1);
            let many = estimate_circuit(&model, &stats, 1024);
            println!(
                "  {width:>2}-bit add: depth {:>2}, {:>9.1} ms; 1024 adds {:>9.1} ms",
                stats.depth, one.total_ms, many.total_ms
            );
        }
    }
    Ok(())
}
