// SPDX-License-Identifier: Apache-2.0

//! Synthetic benchmark circuits: parity trees, ripple-carry adders and
//! array multipliers. Arithmetic generators only emit gates with fanin ≤ 3.

use std::collections::VecDeque;

use super::{Circuit, CircuitBuilder, GateKind, NetlistError};

/// Balanced `k`-ary XOR tree over `n` inputs `x0..x{n-1}` with output `parity`.
///
/// Uses `ceil((n-1)/(k-1))` gates and depth `ceil(log_k n)`. At most one
/// gate is narrower than `k`; it sits at the bottom of the tree, which is
/// what keeps the depth minimal.
pub fn gen_parity(n: usize, k: usize) -> Result<Circuit, NetlistError> {
    if n < 2 {
        return Err(NetlistError::InvalidParameter(format!(
            "parity needs at least 2 inputs, got {n}"
        )));
    }
    if k < 2 {
        return Err(NetlistError::InvalidParameter(format!(
            "parity tree arity must be at least 2, got {k}"
        )));
    }
    let mut b = CircuitBuilder::new(format!("parity{n}_k{k}"));
    let mut queue: VecDeque<String> = (0..n).map(|i| format!("x{i}")).collect();
    for name in &queue {
        b.input(name.clone());
    }

    let mut first = (n - 2) % (k - 1) + 2;
    let mut gate_idx = 0;
    while queue.len() > 1 {
        let take = first.min(queue.len());
        first = k;
        let operands: Vec<String> = queue.drain(..take).collect();
        let out = if queue.is_empty() {
            "parity".to_string()
        } else {
            format!("p{gate_idx}")
        };
        b.gate(out.clone(), GateKind::Xor, operands);
        queue.push_back(out);
        gate_idx += 1;
    }
    b.output("parity");
    b.build()
}

/// Emits gates with fresh names into a builder.
struct Emitter<'b> {
    builder: &'b mut CircuitBuilder,
    next: usize,
}

impl Emitter<'_> {
    fn gate(&mut self, kind: GateKind, inputs: &[&str]) -> String {
        let name = format!("n{}", self.next);
        self.next += 1;
        self.builder
            .gate(name.clone(), kind, inputs.iter().copied());
        name
    }

    /// Half adder; returns (sum, carry).
    fn half_add(&mut self, a: &str, b: &str) -> (String, String) {
        let s = self.gate(GateKind::Xor, &[a, b]);
        let c = self.gate(GateKind::And, &[a, b]);
        (s, c)
    }

    /// Full adder built from 2 XOR, 2 AND and 1 OR; returns (sum, carry).
    fn full_add(&mut self, a: &str, b: &str, cin: &str) -> (String, String) {
        let p = self.gate(GateKind::Xor, &[a, b]);
        let s = self.gate(GateKind::Xor, &[&p, cin]);
        let g1 = self.gate(GateKind::And, &[a, b]);
        let g2 = self.gate(GateKind::And, &[&p, cin]);
        let c = self.gate(GateKind::Or, &[&g1, &g2]);
        (s, c)
    }
}

/// `width`-bit ripple-carry adder.
///
/// Inputs `a0..`, `b0..`, `cin` (2·width+1 total); outputs `s0..` then
/// `cout` (width+1 total). Bit 0 is least significant.
pub fn gen_ripple_adder(width: usize) -> Result<Circuit, NetlistError> {
    if width == 0 {
        return Err(NetlistError::InvalidParameter(
            "adder width must be at least 1".into(),
        ));
    }
    let mut b = CircuitBuilder::new(format!("adder{width}"));
    for i in 0..width {
        b.input(format!("a{i}"));
    }
    for i in 0..width {
        b.input(format!("b{i}"));
    }
    b.input("cin");

    let mut sums = Vec::with_capacity(width);
    let mut carry = "cin".to_string();
    {
        let mut e = Emitter {
            builder: &mut b,
            next: 0,
        };
        for i in 0..width {
            let (s, c) = e.full_add(&format!("a{i}"), &format!("b{i}"), &carry);
            sums.push(s);
            carry = c;
        }
    }
    for (i, s) in sums.iter().enumerate() {
        b.rename(s, format!("s{i}"));
    }
    b.rename(&carry, "cout");
    for i in 0..width {
        b.output(format!("s{i}"));
    }
    b.output("cout");
    b.build()
}

/// `width`×`width` unsigned array multiplier.
///
/// Inputs `a0..`, `b0..`; outputs `p0..p{2w-1}`. Each partial-product row
/// is accumulated with a ripple of half/full adders. For `width == 1` the
/// product is a single AND gate and only `p0` exists (the upper bit would
/// be constant zero, which the gate library cannot drive).
pub fn gen_array_multiplier(width: usize) -> Result<Circuit, NetlistError> {
    if width == 0 {
        return Err(NetlistError::InvalidParameter(
            "multiplier width must be at least 1".into(),
        ));
    }
    let mut b = CircuitBuilder::new(format!("mult{width}"));
    for i in 0..width {
        b.input(format!("a{i}"));
    }
    for i in 0..width {
        b.input(format!("b{i}"));
    }
    if width == 1 {
        b.gate("p0", GateKind::And, ["a0", "b0"]).output("p0");
        return b.build();
    }

    let mut acc: Vec<Option<String>> = vec![None; 2 * width];
    {
        let mut e = Emitter {
            builder: &mut b,
            next: 0,
        };
        let pp = |e: &mut Emitter, row: usize, col: usize| {
            e.gate(GateKind::And, &[&format!("a{col}"), &format!("b{row}")])
        };
        for (j, slot) in acc.iter_mut().enumerate().take(width) {
            *slot = Some(pp(&mut e, 0, j));
        }
        for i in 1..width {
            let mut carry: Option<String> = None;
            for j in 0..width {
                let x = pp(&mut e, i, j);
                let (s, c) = match (acc[i + j].take(), carry.take()) {
                    (Some(y), Some(c)) => e.full_add(&x, &y, &c),
                    (Some(y), None) | (None, Some(y)) => e.half_add(&x, &y),
                    (None, None) => unreachable!("row {i} column {j} has a partner"),
                };
                acc[i + j] = Some(s);
                carry = Some(c);
            }
            acc[i + width] = carry;
        }
    }
    for (bit, net) in acc.iter().enumerate() {
        let net = net.as_ref().expect("every product bit is driven");
        b.rename(net, format!("p{bit}"));
    }
    for bit in 0..2 * width {
        b.output(format!("p{bit}"));
    }
    b.build()
}
