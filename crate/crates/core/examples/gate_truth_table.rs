//! Encrypts every input pair and evaluates each gate homomorphically.
//!
//! `cargo run --release --example gate_truth_table -- STD128 ginx`

use std::time::Instant;

use fhew_pim::gates::{eval_gate, ALL_GATES};
use fhew_pim::keys::generate_keys;
use fhew_pim::params::{load_param_set, BootstrapMode};
use fhew_pim::sampler::Sampler;

fn main() -> fhew_pim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let params = load_param_set(args.first().map(String::as_str).unwrap_or("STD128"))?;
    let mode: BootstrapMode = args.get(1).map(String::as_str).unwrap_or("ginx").parse()?;

    let t = Instant::now();
    let (client, server) = generate_keys(&params, mode, 7)?;
    println!("{} {mode}: keys in {:.2?}", params.name, t.elapsed());

    let mut rng = Sampler::new(11);
    for gate in ALL_GATES {
        let t = Instant::now();
        let mut row = Vec::new();
        for (x, y) in [(false, false), (false, true), (true, false), (true, true)] {
            if gate.arity() == 1 && y {
                continue;
            }
            let out = eval_gate(gate, &client.encrypt(x, &mut rng), &client.encrypt(y, &mut rng), &server)?;
            let got = client.decrypt(&out);
            let mark = if got == gate.apply(x, y) { "" } else { "!" };
            row.push(format!("{}{}->{}{mark}", x as u8, y as u8, got as u8));
        }
        println!("{gate:>5}  {}  ({:.2?})", row.join("  "), t.elapsed());
    }
    Ok(())
}
