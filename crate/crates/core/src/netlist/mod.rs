// SPDX-License-Identifier: Apache-2.0

//! Combinational gate-level netlists.
//!
//! A [`Circuit`] is an immutable, validated DAG of gates over named nets.
//! Circuits are built through [`CircuitBuilder`], which resolves names,
//! checks arity and single-driver rules, and rejects cycles. The `.bench`
//! reader and writer live in [`bench`]; synthetic benchmark generators in
//! [`generators`]; the N-modular-redundancy harness in [`nmr`].

pub mod bench;
pub mod generators;
pub mod nmr;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bench::{emit_bench, parse_bench, parse_bench_named};
pub use generators::{gen_array_multiplier, gen_parity, gen_ripple_adder};
pub use nmr::nmr_transform;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("net `{name}` is used but never declared{}", at_line(*.line))]
    UndeclaredNet { name: String, line: Option<usize> },
    #[error("net `{name}` has more than one driver{}", at_line(*.line))]
    DuplicateDriver { name: String, line: Option<usize> },
    #[error("net `{name}` is listed as an output more than once{}", at_line(*.line))]
    DuplicateOutput { name: String, line: Option<usize> },
    #[error("combinational cycle through net `{net}`")]
    Cycle { net: String },
    #[error("{kind} gate driving `{net}` has {got} inputs, expected {expected}{}", at_line(*.line))]
    Arity {
        net: String,
        kind: GateKind,
        got: usize,
        expected: &'static str,
        line: Option<usize>,
    },
    #[error("circuit has no gates")]
    NoGates,
    #[error("circuit has no outputs")]
    NoOutputs,
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

fn at_line(line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" (line {l})"),
        None => String::new(),
    }
}

/// Gate library. `Maj3` is an extension used for majority voters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Maj3,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
        GateKind::Maj3,
    ];

    pub fn accepts(self, arity: usize) -> bool {
        match self {
            GateKind::Not | GateKind::Buf => arity == 1,
            GateKind::Maj3 => arity == 3,
            _ => arity >= 2,
        }
    }

    fn arity_rule(self) -> &'static str {
        match self {
            GateKind::Not | GateKind::Buf => "exactly 1",
            GateKind::Maj3 => "exactly 3",
            _ => "at least 2",
        }
    }

    /// Canonical `.bench` spelling.
    pub fn bench_name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Nand => "NAND",
            GateKind::Or => "OR",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUFF",
            GateKind::Maj3 => "MAJ3",
        }
    }

    /// Evaluates the gate on 64 lanes at once.
    #[inline]
    pub fn eval_word(self, inputs: impl IntoIterator<Item = u64>) -> u64 {
        let mut it = inputs.into_iter();
        match self {
            GateKind::And => it.fold(!0, |acc, x| acc & x),
            GateKind::Nand => !it.fold(!0, |acc, x| acc & x),
            GateKind::Or => it.fold(0, |acc, x| acc | x),
            GateKind::Nor => !it.fold(0, |acc, x| acc | x),
            GateKind::Xor => it.fold(0, |acc, x| acc ^ x),
            GateKind::Xnor => !it.fold(0, |acc, x| acc ^ x),
            GateKind::Not => !it.next().unwrap_or(0),
            GateKind::Buf => it.next().unwrap_or(0),
            GateKind::Maj3 => {
                let a = it.next().unwrap_or(0);
                let b = it.next().unwrap_or(0);
                let c = it.next().unwrap_or(0);
                (a & b) | (a & c) | (b & c)
            }
        }
    }

    /// Scalar reference semantics, kept separate from the word-level path.
    pub fn eval_bits(self, inputs: &[bool]) -> bool {
        let ones = inputs.iter().filter(|&&b| b).count();
        match self {
            GateKind::And => ones == inputs.len(),
            GateKind::Nand => ones != inputs.len(),
            GateKind::Or => ones > 0,
            GateKind::Nor => ones == 0,
            GateKind::Xor => ones % 2 == 1,
            GateKind::Xnor => ones % 2 == 0,
            GateKind::Not => !inputs[0],
            GateKind::Buf => inputs[0],
            GateKind::Maj3 => ones >= 2,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.bench_name())
    }
}

impl FromStr for GateKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "AND" => GateKind::And,
            "NAND" => GateKind::Nand,
            "OR" => GateKind::Or,
            "NOR" => GateKind::Nor,
            "XOR" => GateKind::Xor,
            "XNOR" => GateKind::Xnor,
            "NOT" | "NOT1" => GateKind::Not,
            "BUF" | "BUFF" => GateKind::Buf,
            "MAJ3" => GateKind::Maj3,
            _ => return Err(()),
        })
    }
}

/// Index of a net inside its circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    Input(usize),
    Gate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    pub name: String,
    pub driver: Driver,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub output: NetId,
    pub kind: GateKind,
    pub inputs: Vec<NetId>,
}

/// A validated combinational circuit.
///
/// Nets are ordered primary inputs first (declaration order), then gate
/// outputs in gate declaration order. `topo` is a topological order of
/// gate indices and is derived from the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    nets: Vec<Net>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    gates: Vec<Gate>,
    topo: Vec<usize>,
}

impl Circuit {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn nets(&self) -> &[Net] {
        &self.nets
    }

    pub fn net(&self, id: NetId) -> &Net {
        &self.nets[id.0]
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Gate indices in an order where every gate follows its fan-in.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.nets.iter().position(|n| n.name == name).map(NetId)
    }

    pub fn is_gate_driven(&self, id: NetId) -> bool {
        matches!(self.nets[id.0].driver, Driver::Gate(_))
    }

    /// Equality of everything except the circuit name.
    pub fn structurally_eq(&self, other: &Circuit) -> bool {
        self.nets == other.nets
            && self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.gates == other.gates
    }

    /// Evaluates the circuit on one input vector (bit `i` feeds input `i`).
    ///
    /// Straightforward scalar interpreter; the simulator's word-parallel
    /// evaluation is tested against it.
    pub fn eval(&self, inputs: &[bool]) -> Vec<bool> {
        assert_eq!(inputs.len(), self.inputs.len(), "input vector width");
        let mut values = vec![false; self.nets.len()];
        for (&id, &v) in self.inputs.iter().zip(inputs) {
            values[id.0] = v;
        }
        let mut scratch = Vec::new();
        for &g in &self.topo {
            let gate = &self.gates[g];
            scratch.clear();
            scratch.extend(gate.inputs.iter().map(|i| values[i.0]));
            values[gate.output.0] = gate.kind.eval_bits(&scratch);
        }
        self.outputs.iter().map(|o| values[o.0]).collect()
    }

    /// Convenience wrapper around [`Circuit::eval`] for circuits with at
    /// most 64 inputs and outputs, packing bits little-endian.
    pub fn eval_u64(&self, inputs: u64) -> u64 {
        let bits: Vec<bool> = (0..self.inputs.len())
            .map(|i| inputs >> i & 1 == 1)
            .collect();
        self.eval(&bits)
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
    }

    pub fn structural_metrics(&self) -> StructuralMetrics {
        structural_metrics(self)
    }

    /// Logic level of every net; primary inputs sit at level 0.
    pub fn levels(&self) -> Vec<usize> {
        let mut level = vec![0usize; self.nets.len()];
        for &g in &self.topo {
            let gate = &self.gates[g];
            let l = gate.inputs.iter().map(|i| level[i.0]).max().unwrap_or(0);
            level[gate.output.0] = l + 1;
        }
        level
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralMetrics {
    pub size_s0: usize,
    pub depth_d0: usize,
    pub avg_fanin_k: f64,
    pub max_fanin: usize,
    pub n_inputs: usize,
    pub m_outputs: usize,
}

/// Gate count, depth in gate levels, and fanin statistics.
pub fn structural_metrics(c: &Circuit) -> StructuralMetrics {
    let total_fanin: usize = c.gates.iter().map(|g| g.inputs.len()).sum();
    let levels = c.levels();
    let depth = c
        .gates
        .iter()
        .map(|g| levels[g.output.0])
        .max()
        .unwrap_or(0);
    StructuralMetrics {
        size_s0: c.gates.len(),
        depth_d0: depth,
        avg_fanin_k: total_fanin as f64 / c.gates.len() as f64,
        max_fanin: c.gates.iter().map(|g| g.inputs.len()).max().unwrap_or(0),
        n_inputs: c.inputs.len(),
        m_outputs: c.outputs.len(),
    }
}

#[derive(Debug, Clone)]
struct PendingGate {
    output: String,
    kind: GateKind,
    inputs: Vec<String>,
    line: Option<usize>,
}

/// Name-based circuit construction with deferred resolution, so gates may
/// reference nets declared later (as `.bench` files routinely do).
#[derive(Debug, Clone, Default)]
pub struct CircuitBuilder {
    name: String,
    inputs: Vec<(String, Option<usize>)>,
    outputs: Vec<(String, Option<usize>)>,
    gates: Vec<PendingGate>,
}

impl CircuitBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        CircuitBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn input(&mut self, name: impl Into<String>) -> &mut Self {
        self.inputs.push((name.into(), None));
        self
    }

    pub fn output(&mut self, name: impl Into<String>) -> &mut Self {
        self.outputs.push((name.into(), None));
        self
    }

    pub fn gate<S: Into<String>>(
        &mut self,
        output: impl Into<String>,
        kind: GateKind,
        inputs: impl IntoIterator<Item = S>,
    ) -> &mut Self {
        self.gates.push(PendingGate {
            output: output.into(),
            kind,
            inputs: inputs.into_iter().map(Into::into).collect(),
            line: None,
        });
        self
    }

    /// Renames a net everywhere it appears.
    pub fn rename(&mut self, old: &str, new: impl Into<String>) -> &mut Self {
        let new = new.into();
        let fix = |n: &mut String| {
            if n == old {
                *n = new.clone();
            }
        };
        for (n, _) in self.inputs.iter_mut().chain(self.outputs.iter_mut()) {
            fix(n);
        }
        for g in &mut self.gates {
            fix(&mut g.output);
            g.inputs.iter_mut().for_each(fix);
        }
        self
    }

    pub(crate) fn input_at(&mut self, name: String, line: usize) {
        self.inputs.push((name, Some(line)));
    }

    pub(crate) fn output_at(&mut self, name: String, line: usize) {
        self.outputs.push((name, Some(line)));
    }

    pub(crate) fn gate_at(
        &mut self,
        output: String,
        kind: GateKind,
        inputs: Vec<String>,
        line: usize,
    ) {
        self.gates.push(PendingGate {
            output,
            kind,
            inputs,
            line: Some(line),
        });
    }

    pub fn build(&self) -> Result<Circuit, NetlistError> {
        let mut nets = Vec::with_capacity(self.inputs.len() + self.gates.len());
        let mut by_name: HashMap<&str, NetId> = HashMap::new();

        for (i, (name, line)) in self.inputs.iter().enumerate() {
            if by_name.insert(name, NetId(nets.len())).is_some() {
                return Err(NetlistError::DuplicateDriver {
                    name: name.clone(),
                    line: *line,
                });
            }
            nets.push(Net {
                name: name.clone(),
                driver: Driver::Input(i),
            });
        }
        for (g, pending) in self.gates.iter().enumerate() {
            if by_name.insert(&pending.output, NetId(nets.len())).is_some() {
                return Err(NetlistError::DuplicateDriver {
                    name: pending.output.clone(),
                    line: pending.line,
                });
            }
            nets.push(Net {
                name: pending.output.clone(),
                driver: Driver::Gate(g),
            });
        }

        let mut gates = Vec::with_capacity(self.gates.len());
        for pending in &self.gates {
            if !pending.kind.accepts(pending.inputs.len()) {
                return Err(NetlistError::Arity {
                    net: pending.output.clone(),
                    kind: pending.kind,
                    got: pending.inputs.len(),
                    expected: pending.kind.arity_rule(),
                    line: pending.line,
                });
            }
            let inputs = pending
                .inputs
                .iter()
                .map(|n| {
                    by_name
                        .get(n.as_str())
                        .copied()
                        .ok_or_else(|| NetlistError::UndeclaredNet {
                            name: n.clone(),
                            line: pending.line,
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            gates.push(Gate {
                output: by_name[pending.output.as_str()],
                kind: pending.kind,
                inputs,
            });
        }

        let mut outputs = Vec::with_capacity(self.outputs.len());
        for (name, line) in &self.outputs {
            let id =
                by_name
                    .get(name.as_str())
                    .copied()
                    .ok_or_else(|| NetlistError::UndeclaredNet {
                        name: name.clone(),
                        line: *line,
                    })?;
            if outputs.contains(&id) {
                return Err(NetlistError::DuplicateOutput {
                    name: name.clone(),
                    line: *line,
                });
            }
            outputs.push(id);
        }

        if gates.is_empty() {
            return Err(NetlistError::NoGates);
        }
        if outputs.is_empty() {
            return Err(NetlistError::NoOutputs);
        }

        let topo = topo_sort(&nets, &gates)?;
        Ok(Circuit {
            name: self.name.clone(),
            nets,
            inputs: (0..self.inputs.len()).map(NetId).collect(),
            outputs,
            gates,
            topo,
        })
    }
}

/// Kahn's algorithm, stable in gate declaration order.
fn topo_sort(nets: &[Net], gates: &[Gate]) -> Result<Vec<usize>, NetlistError> {
    let mut pending: Vec<usize> = vec![0; gates.len()];
    let mut fanout: Vec<Vec<usize>> = vec![Vec::new(); nets.len()];
    for (g, gate) in gates.iter().enumerate() {
        for input in &gate.inputs {
            if let Driver::Gate(_) = nets[input.0].driver {
                pending[g] += 1;
                fanout[input.0].push(g);
            }
        }
    }
    let mut ready: std::collections::BTreeSet<usize> =
        (0..gates.len()).filter(|&g| pending[g] == 0).collect();
    let mut order = Vec::with_capacity(gates.len());
    while let Some(g) = ready.pop_first() {
        order.push(g);
        for &succ in &fanout[gates[g].output.0] {
            pending[succ] -= 1;
            if pending[succ] == 0 {
                ready.insert(succ);
            }
        }
    }
    if order.len() != gates.len() {
        let stuck = (0..gates.len()).find(|&g| pending[g] > 0).unwrap();
        return Err(NetlistError::Cycle {
            net: nets[gates[stuck].output.0].name.clone(),
        });
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2() -> Circuit {
        let mut b = CircuitBuilder::new("and2");
        b.input("a")
            .input("b")
            .output("z")
            .gate("z", GateKind::And, ["a", "b"]);
        b.build().unwrap()
    }

    #[test]
    fn builder_accepts_forward_references() {
        let mut b = CircuitBuilder::new("fwd");
        b.input("a").input("b").output("z");
        b.gate("z", GateKind::Not, ["t"]);
        b.gate("t", GateKind::Or, ["a", "b"]);
        let c = b.build().unwrap();
        assert_eq!(c.topo_order(), &[1, 0]);
        assert_eq!(c.eval(&[false, false]), vec![true]);
        assert_eq!(c.eval(&[true, false]), vec![false]);
    }

    #[test]
    fn builder_rejects_cycle() {
        let mut b = CircuitBuilder::new("loop");
        b.input("a").output("x");
        b.gate("x", GateKind::And, ["a", "y"]);
        b.gate("y", GateKind::Buf, ["x"]);
        assert!(matches!(b.build(), Err(NetlistError::Cycle { .. })));
    }

    #[test]
    fn builder_rejects_duplicate_driver() {
        let mut b = CircuitBuilder::new("dup");
        b.input("a").input("b").output("a");
        b.gate("a", GateKind::And, ["a", "b"]);
        assert!(matches!(
            b.build(),
            Err(NetlistError::DuplicateDriver { name, .. }) if name == "a"
        ));
    }

    #[test]
    fn builder_rejects_bad_arity() {
        for (kind, arity) in [
            (GateKind::Not, 2),
            (GateKind::Buf, 0),
            (GateKind::Maj3, 2),
            (GateKind::Maj3, 4),
            (GateKind::Xor, 1),
        ] {
            let mut b = CircuitBuilder::new("bad");
            b.input("a").output("z");
            b.gate("z", kind, std::iter::repeat_n("a", arity));
            assert!(
                matches!(b.build(), Err(NetlistError::Arity { .. })),
                "{kind} with {arity} inputs"
            );
        }
    }

    #[test]
    fn builder_rejects_undeclared_output() {
        let mut b = CircuitBuilder::new("u");
        b.input("a").output("nope");
        b.gate("z", GateKind::Not, ["a"]);
        assert!(matches!(b.build(), Err(NetlistError::UndeclaredNet { .. })));
    }

    #[test]
    fn word_and_scalar_semantics_agree() {
        for kind in GateKind::ALL {
            let arity = match kind {
                GateKind::Not | GateKind::Buf => 1,
                GateKind::Maj3 => 3,
                _ => 3,
            };
            for x in 0u64..(1 << arity) {
                let bits: Vec<bool> = (0..arity).map(|i| x >> i & 1 == 1).collect();
                let words = bits.iter().map(|&b| if b { !0u64 } else { 0 });
                let w = kind.eval_word(words);
                assert_eq!(w == !0, kind.eval_bits(&bits), "{kind} {x:b}");
                assert!(w == 0 || w == !0);
            }
        }
    }

    #[test]
    fn metrics_of_single_not() {
        let mut b = CircuitBuilder::new("inv");
        b.input("a").output("z").gate("z", GateKind::Not, ["a"]);
        let m = b.build().unwrap().structural_metrics();
        assert_eq!(m.size_s0, 1);
        assert_eq!(m.depth_d0, 1);
        assert_eq!(m.avg_fanin_k, 1.0);
        assert_eq!(m.max_fanin, 1);
    }

    #[test]
    fn and2_eval() {
        let c = and2();
        assert_eq!(c.eval_u64(0b11), 1);
        assert_eq!(c.eval_u64(0b01), 0);
        assert_eq!(c.structural_metrics().n_inputs, 2);
    }

    #[test]
    fn kind_parsing_is_case_insensitive_with_aliases() {
        assert_eq!("xor".parse(), Ok(GateKind::Xor));
        assert_eq!("Buff".parse(), Ok(GateKind::Buf));
        assert_eq!("NOT1".parse(), Ok(GateKind::Not));
        assert_eq!("maj3".parse(), Ok(GateKind::Maj3));
        assert!("DFF".parse::<GateKind>().is_err());
    }
}
