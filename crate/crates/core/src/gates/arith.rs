//! Parallel-prefix adders and shift-add multipliers as circuits.

use super::circuit::{Circuit, GateInst};
use super::table::GateKind;

/// A wire that may be the constant 0 (`None`), folded away at build time.
type Bit = Option<String>;

struct Builder {
    gates: Vec<GateInst>,
    next: usize,
}

impl Builder {
    fn new() -> Self {
        Builder { gates: Vec::new(), next: 0 }
    }

    fn emit(&mut self, kind: GateKind, x: &str, y: &str, prefix: &str) -> String {
        let out = format!("{prefix}{}", self.next);
        self.next += 1;
        self.gates.push(GateInst { out: out.clone(), kind, inputs: vec![x.to_string(), y.to_string()] });
        out
    }

    fn and(&mut self, x: &Bit, y: &Bit) -> Bit {
        match (x, y) {
            (Some(x), Some(y)) => Some(self.emit(GateKind::And, x, y, "t")),
            _ => None,
        }
    }

    fn or(&mut self, x: &Bit, y: &Bit) -> Bit {
        match (x, y) {
            (Some(x), Some(y)) => Some(self.emit(GateKind::Or, x, y, "t")),
            (Some(w), None) | (None, Some(w)) => Some(w.clone()),
            (None, None) => None,
        }
    }

    fn xor(&mut self, x: &Bit, y: &Bit) -> Bit {
        match (x, y) {
            (Some(x), Some(y)) => Some(self.emit(GateKind::Xor, x, y, "t")),
            (Some(w), None) | (None, Some(w)) => Some(w.clone()),
            (None, None) => None,
        }
    }

    /// Kogge-Stone sum of two equal-width operands; returns (sum bits, carry out).
    fn kogge_stone(&mut self, x: &[Bit], y: &[Bit]) -> (Vec<Bit>, Bit) {
        let w = x.len();
        let mut gen: Vec<Bit> = Vec::with_capacity(w);
        let mut prop: Vec<Bit> = Vec::with_capacity(w);
        for i in 0..w {
            gen.push(self.and(&x[i], &y[i]));
            prop.push(self.xor(&x[i], &y[i]));
        }
        let (mut g, mut p) = (gen.clone(), prop.clone());
        let mut d = 1;
        while d < w {
            let (mut ng, mut np) = (g.clone(), p.clone());
            for i in d..w {
                let t = self.and(&p[i], &g[i - d]);
                ng[i] = self.or(&g[i], &t);
                if i >= 2 * d {
                    np[i] = self.and(&p[i], &p[i - d]);
                }
            }
            g = ng;
            p = np;
            d *= 2;
        }
        let mut sum = vec![prop[0].clone()];
        for i in 1..w {
            sum.push(self.xor(&prop[i], &g[i - 1]));
        }
        (sum, g[w - 1].clone())
    }

    /// Names the final outputs, renaming internal wires in place.
    fn finish(mut self, inputs: Vec<String>, outputs: Vec<(String, Bit)>) -> Circuit {
        let mut names = Vec::new();
        for (name, bit) in outputs {
            let wire = match bit {
                Some(w) => w,
                None => {
                    // constant zero: x XOR x on the first input
                    let x = inputs[0].clone();
                    self.emit(GateKind::Xor, &x, &x, "t")
                }
            };
            if let Some(g) = self.gates.iter_mut().find(|g| g.out == wire) {
                g.out = name.clone();
                for other in self.gates.iter_mut() {
                    for inp in other.inputs.iter_mut() {
                        if *inp == wire {
                            *inp = name.clone();
                        }
                    }
                }
                names.push(name);
            } else {
                // output is an input wire passed straight through
                self.gates.push(GateInst { out: name.clone(), kind: GateKind::And, inputs: vec![wire.clone(), wire] });
                names.push(name);
            }
        }
        Circuit::new(inputs, names, self.gates).expect("generated circuit is well formed")
    }
}

fn operand(prefix: &str, width: usize) -> Vec<String> {
    (0..width).map(|i| format!("{prefix}{i}")).collect()
}

/// `width`-bit Kogge-Stone adder. Inputs `a0..`, `b0..` (LSB first); outputs
/// `s0..s{width-1}` and carry `cout`.
pub fn build_kogge_stone_adder(width: usize) -> Circuit {
    assert!(width >= 1, "adder width must be at least 1");
    let (a, b) = (operand("a", width), operand("b", width));
    let mut bld = Builder::new();
    let xa: Vec<Bit> = a.iter().cloned().map(Some).collect();
    let xb: Vec<Bit> = b.iter().cloned().map(Some).collect();
    let (sum, carry) = bld.kogge_stone(&xa, &xb);
    let mut outs: Vec<(String, Bit)> = sum.into_iter().enumerate().map(|(i, s)| (format!("s{i}"), s)).collect();
    outs.push(("cout".into(), carry));
    bld.finish([a, b].concat(), outs)
}

/// `width x width` shift-add multiplier: AND partial products accumulated by
/// a chain of Kogge-Stone adders. Outputs `p0..` (2*width bits, or 1 bit
/// when width is 1).
pub fn build_multiplier(width: usize) -> Circuit {
    assert!(width >= 1, "multiplier width must be at least 1");
    let (a, b) = (operand("a", width), operand("b", width));
    let mut bld = Builder::new();
    let row = |bld: &mut Builder, i: usize| -> Vec<Bit> {
        (0..width).map(|j| bld.and(&Some(a[j].clone()), &Some(b[i].clone()))).collect()
    };
    let first = row(&mut bld, 0);
    let mut product: Vec<Bit> = vec![first[0].clone()];
    // running high part: width bits, top one empty until a carry exists
    let mut high: Vec<Bit> = first[1..].to_vec();
    high.push(None);
    for i in 1..width {
        let addend = row(&mut bld, i);
        let (sum, carry) = bld.kogge_stone(&high, &addend);
        product.push(sum[0].clone());
        high = sum[1..].to_vec();
        high.push(carry);
    }
    if width > 1 {
        product.extend(high);
    }
    let outs = product.into_iter().enumerate().map(|(i, p)| (format!("p{i}"), p)).collect();
    bld.finish([a, b].concat(), outs)
}

/// Bits of `value` as plaintext input bindings for operand `prefix`.
pub fn operand_bits(prefix: &str, value: u64, width: usize) -> Vec<(String, bool)> {
    (0..width).map(|i| (format!("{prefix}{i}"), (value >> i) & 1 == 1)).collect()
}

/// Reassembles an integer from output bits named `prefix0..`.
pub fn collect_bits(prefix: &str, width: usize, get: impl Fn(&str) -> bool) -> u64 {
    (0..width).fold(0, |acc, i| acc | ((get(&format!("{prefix}{i}")) as u64) << i))
}
