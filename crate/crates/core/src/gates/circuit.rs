use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::table::{eval_gate_with, GateKind};
use crate::bootstrap::{OpCounts, Workspace};
use crate::error::{Error, Result};
use crate::keys::ServerKey;
use crate::lwe::LweCiphertext;

/// One gate instance: `out = kind(inputs...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateInst {
    pub out: String,
    pub kind: GateKind,
    pub inputs: Vec<String>,
}

/// A boolean circuit over named wires, gates kept in topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    gates: Vec<GateInst>,
}

/// Structural counts consumed by the cost model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircuitStats {
    /// Longest chain of bootstrapped gates.
    pub depth: usize,
    pub bootstrapped_gates: usize,
    pub free_gates: usize,
    /// Bootstrapped gates at each bootstrapped depth (index 0 = first level).
    pub gates_per_level: Vec<usize>,
}

impl Circuit {
    /// Validates and topologically orders a gate list.
    pub fn new(inputs: Vec<String>, outputs: Vec<String>, gates: Vec<GateInst>) -> Result<Self> {
        let mut seen: HashSet<&str> = HashSet::new();
        for w in &inputs {
            if !seen.insert(w) {
                return Err(Error::Circuit(format!("input `{w}` declared twice")));
            }
        }
        let mut driver: HashMap<&str, usize> = HashMap::new();
        for (i, g) in gates.iter().enumerate() {
            if g.inputs.len() != g.kind.arity() {
                return Err(Error::Circuit(format!("{} takes {} input(s)", g.kind, g.kind.arity())));
            }
            if seen.contains(g.out.as_str()) || driver.insert(&g.out, i).is_some() {
                return Err(Error::Circuit(format!("wire `{}` driven more than once", g.out)));
            }
        }
        // Kahn ordering, stable with respect to the given order
        let mut order = Vec::with_capacity(gates.len());
        let mut placed = vec![false; gates.len()];
        let mut ready: HashSet<&str> = inputs.iter().map(String::as_str).collect();
        loop {
            let before = order.len();
            for (i, g) in gates.iter().enumerate() {
                if !placed[i] && g.inputs.iter().all(|w| ready.contains(w.as_str())) {
                    placed[i] = true;
                    order.push(i);
                    ready.insert(&g.out);
                }
            }
            if order.len() == gates.len() {
                break;
            }
            if order.len() == before {
                let stuck = gates.iter().enumerate().find(|(i, _)| !placed[*i]).map(|(_, g)| g).unwrap();
                let missing = stuck.inputs.iter().find(|w| !ready.contains(w.as_str())).unwrap();
                return if driver.contains_key(missing.as_str()) {
                    Err(Error::Circuit(format!("cycle through wire `{missing}`")))
                } else {
                    Err(Error::UnboundWire(missing.clone()))
                };
            }
        }
        for w in &outputs {
            if !ready.contains(w.as_str()) {
                return Err(Error::UnboundWire(w.clone()));
            }
        }
        let gates = order.into_iter().map(|i| gates[i].clone()).collect();
        Ok(Circuit { inputs, outputs, gates })
    }

    /// The circuit with no gates whose outputs are its inputs.
    pub fn identity(inputs: Vec<String>) -> Self {
        Circuit { outputs: inputs.clone(), inputs, gates: Vec::new() }
    }

    pub fn gates(&self) -> &[GateInst] {
        &self.gates
    }

    /// Groups gate indices so that every gate's inputs come from earlier groups.
    pub fn schedule(&self) -> Vec<Vec<usize>> {
        let mut level: HashMap<&str, usize> = self.inputs.iter().map(|w| (w.as_str(), 0)).collect();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            let l = g.inputs.iter().map(|w| level[w.as_str()]).max().unwrap_or(0);
            level.insert(&g.out, l + 1);
            if groups.len() <= l {
                groups.resize(l + 1, Vec::new());
            }
            groups[l].push(i);
        }
        groups
    }

    pub fn stats(&self) -> CircuitStats {
        let mut depth: HashMap<&str, usize> = self.inputs.iter().map(|w| (w.as_str(), 0)).collect();
        let mut per_level: Vec<usize> = Vec::new();
        let mut free = 0;
        for g in &self.gates {
            let d = g.inputs.iter().map(|w| depth[w.as_str()]).max().unwrap_or(0);
            if g.kind.spec().bootstrap_required {
                if per_level.len() <= d {
                    per_level.resize(d + 1, 0);
                }
                per_level[d] += 1;
                depth.insert(&g.out, d + 1);
            } else {
                free += 1;
                depth.insert(&g.out, d);
            }
        }
        CircuitStats {
            depth: per_level.len(),
            bootstrapped_gates: per_level.iter().sum(),
            free_gates: free,
            gates_per_level: per_level,
        }
    }

    /// Plaintext evaluation.
    pub fn eval_plain(&self, inputs: &HashMap<String, bool>) -> Result<HashMap<String, bool>> {
        let mut wires: HashMap<&str, bool> = HashMap::new();
        for w in &self.inputs {
            let v = *inputs.get(w).ok_or_else(|| Error::UnboundWire(w.clone()))?;
            wires.insert(w, v);
        }
        for g in &self.gates {
            let x = wires[g.inputs[0].as_str()];
            let y = g.inputs.get(1).map(|w| wires[w.as_str()]).unwrap_or(false);
            wires.insert(&g.out, g.kind.apply(x, y));
        }
        Ok(self.outputs.iter().map(|w| (w.clone(), wires[w.as_str()])).collect())
    }
}

/// Homomorphic evaluation on `jobs` worker threads. Gates in one schedule
/// group run concurrently; results do not depend on `jobs`.
pub fn eval_circuit(
    circ: &Circuit,
    inputs: &HashMap<String, LweCiphertext>,
    key: &ServerKey,
    jobs: usize,
) -> Result<(HashMap<String, LweCiphertext>, OpCounts)> {
    let mut wires: HashMap<String, LweCiphertext> = HashMap::new();
    for w in &circ.inputs {
        let ct = inputs.get(w).ok_or_else(|| Error::UnboundWire(w.clone()))?;
        wires.insert(w.clone(), ct.clone());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Circuit(e.to_string()))?;
    let p = key.params();
    let mut total = OpCounts::default();
    for group in circ.schedule() {
        let results: Vec<Result<(LweCiphertext, OpCounts)>> = pool.install(|| {
            group
                .par_iter()
                .map_init(
                    || Workspace::new(p.ring_dim, p.gadget_digits),
                    |ws, &gi| {
                        let g = &circ.gates[gi];
                        let x = &wires[&g.inputs[0]];
                        let y = g.inputs.get(1).map(|w| &wires[w]).unwrap_or(x);
                        let mut counts = OpCounts::default();
                        eval_gate_with(&g.kind.spec(), x, y, key, ws, &mut counts).map(|ct| (ct, counts))
                    },
                )
                .collect()
        });
        for (&gi, r) in group.iter().zip(results) {
            let (ct, counts) = r?;
            total.merge(&counts);
            wires.insert(circ.gates[gi].out.clone(), ct);
        }
    }
    let outputs = circ.outputs.iter().map(|w| (w.clone(), wires[w].clone())).collect();
    Ok((outputs, total))
}

/// Parses the line-oriented netlist format:
///
/// ```text
/// # comment
/// INPUT a0 a1
/// OUTPUT s
/// s = XOR(a0, a1)
/// ```
pub fn parse_netlist(text: &str) -> Result<Circuit> {
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut gates = Vec::new();
    let names = |rest: &str| -> Vec<String> {
        rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(String::from).collect()
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        if let Some(rest) = line.strip_prefix("INPUT") {
            inputs.extend(names(rest));
            continue;
        }
        if let Some(rest) = line.strip_prefix("OUTPUT") {
            outputs.extend(names(rest));
            continue;
        }
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("expected `OUT = GATE(IN1, IN2)`".into()))?;
        let out = lhs.trim();
        if out.is_empty() || out.contains(char::is_whitespace) {
            return Err(err(format!("bad output wire `{out}`")));
        }
        let rhs = rhs.trim();
        let (gname, args) = rhs.split_once('(').ok_or_else(|| err("missing `(`".into()))?;
        let args = args.strip_suffix(')').ok_or_else(|| err("missing `)`".into()))?;
        let kind: GateKind = gname.trim().parse().map_err(|_| err(format!("unknown gate `{}`", gname.trim())))?;
        let args = names(args);
        if args.len() != kind.arity() {
            return Err(err(format!("{kind} takes {} argument(s), got {}", kind.arity(), args.len())));
        }
        gates.push(GateInst { out: out.to_string(), kind, inputs: args });
    }
    Circuit::new(inputs, outputs, gates)
}

/// Writes a circuit in the netlist format accepted by [`parse_netlist`].
pub fn format_netlist(circ: &Circuit) -> String {
    let mut s = String::new();
    s.push_str(&format!("INPUT {}\n", circ.inputs.join(" ")));
    s.push_str(&format!("OUTPUT {}\n", circ.outputs.join(" ")));
    for g in &circ.gates {
        s.push_str(&format!("{} = {}({})\n", g.out, g.kind, g.inputs.join(", ")));
    }
    s
}
