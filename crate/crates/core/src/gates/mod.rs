//! Homomorphic boolean gates and circuits built from them.

mod arith;
mod circuit;
mod table;

pub use arith::{build_kogge_stone_adder, build_multiplier, collect_bits, operand_bits};
pub use circuit::{eval_circuit, format_netlist, parse_netlist, Circuit, CircuitStats, GateInst};
pub use table::{eval_gate, eval_gate_with, gate_table, search_window, GateKind, GateSpec, ALL_GATES};
