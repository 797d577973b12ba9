// SPDX-License-Identifier: Apache-2.0

//! N-modular redundancy harness.

use std::collections::VecDeque;

use super::{Circuit, CircuitBuilder, Driver, GateKind, NetlistError};

/// Replicates `c` `copies` times over shared primary inputs and votes each
/// output through a tree of MAJ3 gates.
///
/// Replica `r` renames every gate-driven net `x` to `x__r{r}`. The voted
/// outputs keep the original output names, so the transformed circuit has
/// the same ports as `c`. Each output needs `(copies - 1) / 2` voters.
pub fn nmr_transform(c: &Circuit, copies: usize) -> Result<Circuit, NetlistError> {
    if copies < 3 || copies.is_multiple_of(2) {
        return Err(NetlistError::InvalidParameter(format!(
            "NMR needs an odd replica count of at least 3, got {copies}"
        )));
    }
    let replica_name = |net: usize, r: usize| -> String {
        let n = &c.nets()[net];
        match n.driver {
            Driver::Input(_) => n.name.clone(),
            Driver::Gate(_) => format!("{}__r{r}", n.name),
        }
    };

    let mut b = CircuitBuilder::new(format!("{}_nmr{copies}", c.name()));
    for &id in c.inputs() {
        b.input(c.net(id).name.clone());
    }
    for r in 0..copies {
        for gate in c.gates() {
            b.gate(
                replica_name(gate.output.0, r),
                gate.kind,
                gate.inputs.iter().map(|i| replica_name(i.0, r)),
            );
        }
    }

    for (o, &out) in c.outputs().iter().enumerate() {
        let port = &c.net(out).name;
        if !c.is_gate_driven(out) {
            // Pass-through input: nothing to vote on.
            b.output(port.clone());
            continue;
        }
        let mut queue: VecDeque<String> = (0..copies).map(|r| replica_name(out.0, r)).collect();
        let mut voter = 0;
        while queue.len() > 1 {
            let operands: Vec<String> = queue.drain(..3).collect();
            let name = if queue.is_empty() {
                port.clone()
            } else {
                format!("vote{o}_{voter}")
            };
            b.gate(name.clone(), GateKind::Maj3, operands);
            queue.push_back(name);
            voter += 1;
        }
        b.output(port.clone());
    }
    b.build()
}
