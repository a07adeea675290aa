// SPDX-License-Identifier: Apache-2.0

//! Clocked gate netlist over {NOR2, NOT, BUF, DLATCH, CONST0, CONST1}.

use serde::{Deserialize, Serialize};

use super::elaborate::BitRef;
use super::SynthError;

pub type NetId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Nor2,
    Not,
    Buf,
    Dlatch,
    Const0,
    Const1,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Nor2 | GateKind::Dlatch => 2,
            GateKind::Not | GateKind::Buf => 1,
            GateKind::Const0 | GateKind::Const1 => 0,
        }
    }

    pub fn is_combinational(self) -> bool {
        self != GateKind::Dlatch
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Nor2 => "NOR2",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
            GateKind::Dlatch => "DLATCH",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
        }
    }

    pub const ALL: [GateKind; 6] = [
        GateKind::Nor2,
        GateKind::Not,
        GateKind::Buf,
        GateKind::Dlatch,
        GateKind::Const0,
        GateKind::Const1,
    ];
}

/// Latch pin order.
pub const LATCH_D: usize = 0;
pub const LATCH_C: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<NetId>,
    pub output: NetId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetOrigin {
    Input(BitRef),
    Clock,
    Gate(usize),
}

/// A gate input pin: (gate index, pin index).
pub type Pin = (usize, usize);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GateNetlist {
    pub origins: Vec<NetOrigin>,
    pub gates: Vec<Gate>,
    pub inputs: Vec<(BitRef, NetId)>,
    pub outputs: Vec<(BitRef, NetId)>,
    pub clock: Option<NetId>,
    /// Register bit to the DLATCH gate storing it.
    pub state: Vec<(BitRef, usize)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub nor2: usize,
    pub not: usize,
    pub buf: usize,
    pub dlatch: usize,
    pub const0: usize,
    pub const1: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.nor2 + self.not + self.buf + self.dlatch + self.const0 + self.const1
    }

    pub fn get(&self, kind: GateKind) -> usize {
        match kind {
            GateKind::Nor2 => self.nor2,
            GateKind::Not => self.not,
            GateKind::Buf => self.buf,
            GateKind::Dlatch => self.dlatch,
            GateKind::Const0 => self.const0,
            GateKind::Const1 => self.const1,
        }
    }
}

impl GateNetlist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn net_count(&self) -> usize {
        self.origins.len()
    }

    pub fn add_input(&mut self, bit: BitRef) -> NetId {
        let id = self.origins.len();
        self.origins.push(NetOrigin::Input(bit.clone()));
        self.inputs.push((bit, id));
        id
    }

    pub fn add_clock(&mut self) -> NetId {
        if let Some(c) = self.clock {
            return c;
        }
        let id = self.origins.len();
        self.origins.push(NetOrigin::Clock);
        self.clock = Some(id);
        id
    }

    /// Adds a gate and its fresh output net.
    pub fn add_gate(&mut self, kind: GateKind, inputs: Vec<NetId>) -> NetId {
        debug_assert_eq!(inputs.len(), kind.arity());
        let out = self.origins.len();
        self.origins.push(NetOrigin::Gate(self.gates.len()));
        self.gates.push(Gate {
            kind,
            inputs,
            output: out,
        });
        out
    }

    pub fn driver(&self, net: NetId) -> Option<usize> {
        match self.origins[net] {
            NetOrigin::Gate(g) => Some(g),
            _ => None,
        }
    }

    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for g in &self.gates {
            match g.kind {
                GateKind::Nor2 => c.nor2 += 1,
                GateKind::Not => c.not += 1,
                GateKind::Buf => c.buf += 1,
                GateKind::Dlatch => c.dlatch += 1,
                GateKind::Const0 => c.const0 += 1,
                GateKind::Const1 => c.const1 += 1,
            }
        }
        c
    }

    /// Input pins fed by each net.
    pub fn sinks(&self) -> Vec<Vec<Pin>> {
        let mut s = vec![Vec::new(); self.origins.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            for (pin, &n) in gate.inputs.iter().enumerate() {
                s[n].push((g, pin));
            }
        }
        s
    }

    pub fn max_fanout(&self) -> usize {
        self.sinks().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn latches(&self) -> Vec<usize> {
        (0..self.gates.len())
            .filter(|&g| self.gates[g].kind == GateKind::Dlatch)
            .collect()
    }

    /// Combinational gates in topological order; latch outputs, inputs and the clock are sources.
    pub fn comb_order(&self) -> Result<Vec<usize>, SynthError> {
        let sinks = self.sinks();
        let mut pending: Vec<usize> = self
            .gates
            .iter()
            .map(|g| {
                if !g.kind.is_combinational() {
                    return 0;
                }
                g.inputs
                    .iter()
                    .filter(
                        |&&n| matches!(self.origins[n], NetOrigin::Gate(d) if self.gates[d].kind.is_combinational()),
                    )
                    .count()
            })
            .collect();
        let mut ready: Vec<usize> = (0..self.gates.len())
            .filter(|&g| self.gates[g].kind.is_combinational() && pending[g] == 0)
            .collect();
        ready.reverse();
        let mut order = Vec::new();
        while let Some(g) = ready.pop() {
            order.push(g);
            for &(s, _) in &sinks[self.gates[g].output] {
                if self.gates[s].kind.is_combinational() {
                    pending[s] -= 1;
                    if pending[s] == 0 {
                        ready.push(s);
                    }
                }
            }
        }
        let comb = self.gates.iter().filter(|g| g.kind.is_combinational()).count();
        if order.len() != comb {
            return Err(SynthError::CombinationalLoop);
        }
        Ok(order)
    }

    /// Longest combinational path, counted in gates, from any source to any net.
    pub fn depth(&self) -> Result<usize, SynthError> {
        let mut arrival = vec![0usize; self.origins.len()];
        let mut depth = 0;
        for g in self.comb_order()? {
            let gate = &self.gates[g];
            let a = gate.inputs.iter().map(|&n| arrival[n]).max().unwrap_or(0) + 1;
            arrival[gate.output] = a;
            depth = depth.max(a);
        }
        Ok(depth)
    }

    /// Evaluates every net for the given primary input bits (`self.inputs` order) and latch
    /// contents (`self.latches()` order). The clock net reads 0.
    pub fn eval(&self, inputs: &[bool], latches: &[bool]) -> Result<Vec<bool>, SynthError> {
        let order = self.comb_order()?;
        Ok(self.eval_ordered(&order, inputs, latches))
    }

    pub fn eval_ordered(&self, order: &[usize], inputs: &[bool], latches: &[bool]) -> Vec<bool> {
        let mut v = vec![false; self.origins.len()];
        for ((_, n), &x) in self.inputs.iter().zip(inputs) {
            v[*n] = x;
        }
        for (g, &x) in self.latches().into_iter().zip(latches) {
            v[self.gates[g].output] = x;
        }
        for &g in order {
            let gate = &self.gates[g];
            v[gate.output] = match gate.kind {
                GateKind::Nor2 => !(v[gate.inputs[0]] || v[gate.inputs[1]]),
                GateKind::Not => !v[gate.inputs[0]],
                GateKind::Buf => v[gate.inputs[0]],
                GateKind::Const0 => false,
                GateKind::Const1 => true,
                GateKind::Dlatch => unreachable!("latches are not in the combinational order"),
            };
        }
        v
    }

    /// True for the clock net and for nets reached from it through BUF gates only.
    pub fn is_clock_net(&self, mut net: NetId) -> bool {
        for _ in 0..=self.gates.len() {
            if Some(net) == self.clock {
                return true;
            }
            match self.driver(net).map(|g| &self.gates[g]) {
                Some(g) if g.kind == GateKind::Buf => net = g.inputs[0],
                _ => return false,
            }
        }
        false
    }

    /// Structural checks: arities, net references, single drivers, clocked latches, acyclicity.
    pub fn check(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Malformed(m));
        for (g, gate) in self.gates.iter().enumerate() {
            if gate.inputs.len() != gate.kind.arity() {
                return bad(format!(
                    "gate {g} ({}) has {} inputs",
                    gate.kind.name(),
                    gate.inputs.len()
                ));
            }
            if gate.inputs.iter().any(|&n| n >= self.origins.len()) {
                return bad(format!("gate {g} reads an unknown net"));
            }
            if self.origins.get(gate.output) != Some(&NetOrigin::Gate(g)) {
                return bad(format!("gate {g} output net is not owned by it"));
            }
            if gate.kind == GateKind::Dlatch && !self.is_clock_net(gate.inputs[LATCH_C]) {
                return bad(format!("latch {g} is not clocked by the clock net"));
            }
        }
        for (n, o) in self.origins.iter().enumerate() {
            match o {
                NetOrigin::Gate(g) if self.gates.get(*g).map(|x| x.output) != Some(n) => {
                    return bad(format!("net {n} claims driver {g}"));
                }
                NetOrigin::Clock if self.clock != Some(n) => return bad(format!("stray clock net {n}")),
                _ => {}
            }
        }
        for (b, n) in &self.inputs {
            if self.origins.get(*n) != Some(&NetOrigin::Input(b.clone())) {
                return bad(format!("input {b} is not bound to its net"));
            }
        }
        for (b, n) in &self.outputs {
            if *n >= self.origins.len() {
                return bad(format!("output {b} refers to an unknown net"));
            }
        }
        for (b, g) in &self.state {
            if self.gates.get(*g).map(|x| x.kind) != Some(GateKind::Dlatch) {
                return bad(format!("state bit {b} is not stored in a latch"));
            }
        }
        self.comb_order().map(|_| ())
    }
}
