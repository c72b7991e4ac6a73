//! Boolean-gate FHE with FHEW-style bootstrapping and a processing-in-memory
//! cost model.
//!
//! The cryptographic path runs [`params`] to [`ring`] to [`lwe`] to
//! [`bootstrap`] to [`gates`]. [`keys`] bundles client and server material.
//! [`pimsim`] models the same bootstrap as a hardware stage pipeline.
//!
//! ```
//! use fhew_pim::{gates::{eval_gate, GateKind}, keys::generate_keys, params::{load_param_set, BootstrapMode}};
//! use fhew_pim::sampler::Sampler;
//!
//! let p = load_param_set("STD128").unwrap();
//! let (client, server) = generate_keys(&p, BootstrapMode::Ginx, 7).unwrap();
//! let mut s = Sampler::new(1);
//! let (x, y) = (client.encrypt(true, &mut s), client.encrypt(true, &mut s));
//! let out = eval_gate(GateKind::Nand, &x, &y, &server).unwrap();
//! assert!(!client.decrypt(&out));
//! ```
//!
//! Runnable examples: `params_tour`, `ntt_polymul`, `encrypt_decrypt`,
//! `gate_truth_table`, `kogge_stone_adder`, `simulate_pipeline`,
//! `memory_scaling` and `workload_estimate`.

pub mod bootstrap;
pub mod error;
pub mod gates;
pub mod io;
pub mod keys;
pub mod lwe;
pub mod params;
pub mod pimsim;
pub mod ring;
pub mod sampler;
pub mod storage;

pub use error::{Error, Result};
