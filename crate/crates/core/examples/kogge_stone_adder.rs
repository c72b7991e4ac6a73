//! Builds an 8-bit Kogge-Stone adder, prints its netlist statistics and
//! evaluates one addition on encrypted operands.
//!
//! `cargo run --release --example kogge_stone_adder -- 200 99`

use std::collections::HashMap;
use std::time::Instant;

use fhew_pim::gates::{build_kogge_stone_adder, collect_bits, eval_circuit, operand_bits};
use fhew_pim::keys::generate_keys;
use fhew_pim::params::{load_param_set, BootstrapMode};
use fhew_pim::sampler::Sampler;

fn main() -> fhew_pim::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (x, y) = (args.first().copied().unwrap_or(200) & 0xff, args.get(1).copied().unwrap_or(99) & 0xff);
    let width = 8;
    let circ = build_kogge_stone_adder(width);
    let stats = circ.stats();
    println!(
        "{width}-bit adder: {} bootstrapped gates, {} free, depth {}, per level {:?}",
        stats.bootstrapped_gates, stats.free_gates, stats.depth, stats.gates_per_level
    );

    let params = load_param_set("STD128")?;
    let (client, server) = generate_keys(&params, BootstrapMode::Ginx, 5)?;
    let mut rng = Sampler::new(6);
    let mut inputs = HashMap::new();
    for (wire, bit) in operand_bits("a", x, width).into_iter().chain(operand_bits("b", y, width)) {
        inputs.insert(wire, client.encrypt(bit, &mut rng));
    }
    let t = Instant::now();
    let (out, counts) = eval_circuit(&circ, &inputs, &server, rayon::current_num_threads())?;
    let sum = collect_bits("s", width, |w| client.decrypt(&out[w])) | (client.decrypt(&out["cout"]) as u64) << width;
    println!("{x} + {y} = {sum} (expected {}), {:.2?}, {} external products", x + y, t.elapsed(), counts.external_products);
    Ok(())
}
