//! Throughput as a function of the memory budget: below one pipeline the
//! accumulation units share NTT cores, above it whole pipelines are added.

use fhew_pim::params::{load_param_set, BootstrapMode};
use fhew_pim::pimsim::{scale_to_budget, Optimization, PimConfig};

fn main() -> fhew_pim::Result<()> {
    let budgets = [2.0, 4.0, 8.0, 14.0, 16.0, 20.0, 32.0, 64.0, 128.0];
    for (name, opt) in [("STD128", Optimization::Area), ("STD128Q", Optimization::Area), ("STD256Q", Optimization::Throughput)] {
        let params = load_param_set(name)?;
        let config = PimConfig::default().with_optimization(opt);
        println!("{name} {opt}");
        for gb in budgets {
            match scale_to_budget(&params, BootstrapMode::Ginx, gb, &config) {
                Ok(r) => println!(
                    "  {gb:>6} GB  {:>8.2} inputs/ms  pipelines {}  share {}",
                    r.throughput_inputs_per_ms, r.pipeline_count, r.share_factor
                ),
                Err(e) => println!("  {gb:>6} GB  {e}"),
            }
        }
    }
    Ok(())
}
