//! Prints every named parameter set with its derived modulus and digit
//! counts, plus the key sizes each bootstrapping mode implies.
//!
//! `cargo run --example params_tour`

use fhew_pim::params::{all_param_sets, BootstrapMode};
use fhew_pim::pimsim::{key_sizes_mb, PimConfig};

fn main() -> fhew_pim::Result<()> {
    let config = PimConfig::default();
    for p in all_param_sets() {
        println!("{p}");
        for mode in [BootstrapMode::Ap, BootstrapMode::Ginx] {
            let (ek_b, ek_s) = key_sizes_mb(&p, mode, &config)?;
            println!("  {mode:<5} refresh key {ek_b:>9.1} MB   switching key {ek_s:>8.1} MB");
        }
        println!();
    }
    let p = &all_param_sets()[0];
    println!("as a config record:\n\n{}", p.to_toml());
    Ok(())
}
