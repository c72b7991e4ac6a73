//! Cost-model figures for every named parameter set in both pipeline flavours.
//!
//! `cargo run --example simulate_pipeline`

use fhew_pim::params::{load_param_set, BootstrapMode, PARAM_SET_NAMES};
use fhew_pim::pimsim::{cost_report, Optimization, PimConfig};

fn main() -> fhew_pim::Result<()> {
    println!(
        "{:<8} {:<5} {:<10} {:>10} {:>11} {:>9} {:>9} {:>9}",
        "set", "mode", "opt", "inputs/ms", "latency ms", "mem GB", "ek_b MB", "energy mJ"
    );
    for name in PARAM_SET_NAMES.iter().filter(|n| **n != "TOY") {
        let p = load_param_set(name)?;
        for mode in [BootstrapMode::Ginx, BootstrapMode::Ap] {
            for opt in [Optimization::Throughput, Optimization::Area] {
                let r = cost_report(&p, mode, &PimConfig::default().with_optimization(opt))?;
                println!(
                    "{:<8} {:<5} {:<10} {:>10.1} {:>11.1} {:>9.2} {:>9.1} {:>9.1}",
                    name,
                    mode,
                    opt,
                    r.throughput_inputs_per_ms,
                    r.latency_ms,
                    r.memory_gb.total,
                    r.memory_gb.ek_b * 1024.0,
                    r.energy_mj.mj().unwrap_or(f64::NAN)
                );
            }
        }
    }
    Ok(())
}
