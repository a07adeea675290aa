// SPDX-License-Identifier: Apache-2.0

//! Standard cells. Each takes existing in-phase input masses and an existing in-phase
//! output mass and adds the out-of-phase intermediate mass plus its couplings.

use super::{CouplingKind, MassSpringNetwork, MassTag, Phase};
use crate::synth::GateKind;

fn intermediate(n: &mut MassSpringNetwork) -> usize {
    n.add_mass(Phase::OutOfPhase, MassTag::Intermediate)
}

/// NOR2: both inputs repel the biased intermediate; the intermediate copies to the output.
/// The bias breaks the tie toward 0 when the inputs disagree.
pub fn cell_nor(n: &mut MassSpringNetwork, a: usize, b: usize, out: usize) -> usize {
    let i = intermediate(n);
    n.masses[i].bias = 1;
    n.couple(a, i, CouplingKind::LinearNeg);
    n.couple(b, i, CouplingKind::LinearNeg);
    n.couple(i, out, CouplingKind::LinearPos);
    i
}

pub fn cell_not(n: &mut MassSpringNetwork, a: usize, out: usize) -> usize {
    let i = intermediate(n);
    n.couple(a, i, CouplingKind::LinearNeg);
    n.couple(i, out, CouplingKind::LinearPos);
    i
}

pub fn cell_buf(n: &mut MassSpringNetwork, a: usize, out: usize) -> usize {
    let i = intermediate(n);
    n.couple(a, i, CouplingKind::LinearPos);
    n.couple(i, out, CouplingKind::LinearPos);
    i
}

/// D-latch: the intermediate follows D, but its double well only deepens enough to flip
/// while the clock mass is positive. Intermediate and Q start at logic 0.
pub fn cell_dlatch(n: &mut MassSpringNetwork, d: usize, c: usize, q: usize) -> usize {
    let l = intermediate(n);
    n.masses[l].x0 = -1.0;
    n.masses[q].x0 = -1.0;
    n.couple(d, l, CouplingKind::LinearPos);
    n.couple(c, l, CouplingKind::NonlinearGate);
    n.couple(l, q, CouplingKind::LinearPos);
    l
}

/// Constant: the net mass itself, held by a permanent bias.
pub fn cell_const(n: &mut MassSpringNetwork, out: usize, value: bool) {
    let m = &mut n.masses[out];
    m.tag = MassTag::Constant;
    m.bias = if value { -1 } else { 1 };
    m.x0 = if value { 1.0 } else { -1.0 };
}

/// (masses, couplings) added per gate, not counting the shared output mass.
pub fn cell_cost(kind: GateKind) -> (usize, usize) {
    match kind {
        GateKind::Nor2 => (1, 3),
        GateKind::Not | GateKind::Buf => (1, 2),
        GateKind::Dlatch => (1, 3),
        GateKind::Const0 | GateKind::Const1 => (0, 0),
    }
}
