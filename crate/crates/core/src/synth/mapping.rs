// SPDX-License-Identifier: Apache-2.0

//! Structural mapping of next-state functions onto the NOR/NOT basis.
//!
//! An AND node `a & b` becomes `NOR(!a, !b)`; complemented edges become NOT gates, shared
//! through a cache so every literal is realized at most once.

use std::collections::HashMap;

use super::aig::{Lit, Node};
use super::elaborate::FunctionTable;
use super::netlist::{GateKind, GateNetlist, NetId, LATCH_D};

struct Mapper<'a> {
    table: &'a FunctionTable,
    nl: GateNetlist,
    nets: HashMap<Lit, NetId>,
}

impl Mapper<'_> {
    fn net(&mut self, lit: Lit) -> NetId {
        if let Some(&n) = self.nets.get(&lit) {
            return n;
        }
        let n = if lit == Lit::FALSE {
            self.nl.add_gate(GateKind::Const0, vec![])
        } else if lit == Lit::TRUE {
            self.nl.add_gate(GateKind::Const1, vec![])
        } else if lit.is_complemented() {
            // Complements live on edges, so double negations never reach this point.
            let inner = self.net(!lit);
            self.nl.add_gate(GateKind::Not, vec![inner])
        } else {
            match self.table.aig.node(lit.node()) {
                Node::And(a, b) => {
                    let x = self.net(!a);
                    let y = self.net(!b);
                    self.nl.add_gate(GateKind::Nor2, vec![x, y])
                }
                Node::Input(_) => unreachable!("variables are bound before mapping"),
                Node::Const => unreachable!("constants handled above"),
            }
        };
        self.nets.insert(lit, n);
        n
    }
}

/// Maps a function table to a netlist with one DLATCH per state bit. Output ports are read
/// from their latches.
pub fn map_to_basis(table: &FunctionTable) -> GateNetlist {
    let mut m = Mapper {
        table,
        nl: GateNetlist::new(),
        nets: HashMap::new(),
    };
    for (bit, lit) in &table.inputs {
        let n = m.nl.add_input(bit.clone());
        m.nets.insert(*lit, n);
    }
    let mut latch_gates = Vec::new();
    if !table.state.is_empty() {
        let clk = m.nl.add_clock();
        for s in &table.state {
            let q = m.nl.add_gate(GateKind::Dlatch, vec![clk, clk]);
            let g = m.nl.gates.len() - 1;
            m.nets.insert(s.current, q);
            m.nl.state.push((s.reg.clone(), g));
            latch_gates.push(g);
        }
    }
    for (s, &g) in table.state.iter().zip(&latch_gates) {
        let d = m.net(s.next);
        m.nl.gates[g].inputs[LATCH_D] = d;
    }
    for out in &table.outputs {
        let k = table.state_index(out).expect("output bits are state bits");
        let q = m.nl.gates[latch_gates[k]].output;
        m.nl.outputs.push((out.clone(), q));
    }
    m.nl
}
