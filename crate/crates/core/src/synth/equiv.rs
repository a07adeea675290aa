// SPDX-License-Identifier: Apache-2.0

//! Exhaustive equivalence between a netlist and a function table.

use rayon::prelude::*;

use super::elaborate::FunctionTable;
use super::netlist::{GateNetlist, LATCH_D};
use super::SynthError;

/// Largest number of free bits (inputs + state) checked exhaustively.
pub const MAX_EQUIV_BITS: usize = 24;

/// True iff, for every assignment of input and state bits, every latch D input equals the
/// corresponding next-state function and every output net equals its state bit.
pub fn check_equivalence(nl: &GateNetlist, table: &FunctionTable) -> Result<bool, SynthError> {
    let bits = table.total_bits();
    if bits > MAX_EQUIV_BITS {
        return Err(SynthError::TooLarge {
            bits,
            limit: MAX_EQUIV_BITS,
        });
    }
    // Netlist input position for each table input, and latch position for each state bit.
    let latches = nl.latches();
    let mut input_pos = Vec::with_capacity(table.inputs.len());
    for (b, _) in &table.inputs {
        match nl.inputs.iter().position(|(x, _)| x == b) {
            Some(p) => input_pos.push(p),
            None => return Ok(false),
        }
    }
    if nl.inputs.len() != table.inputs.len() || nl.state.len() != table.state.len() {
        return Ok(false);
    }
    let mut latch_pos = Vec::with_capacity(table.state.len());
    for s in &table.state {
        let Some((_, g)) = nl.state.iter().find(|(r, _)| *r == s.reg) else {
            return Ok(false);
        };
        latch_pos.push(latches.iter().position(|x| x == g).expect("state gates are latches"));
    }
    let mut out_state = Vec::with_capacity(table.outputs.len());
    for o in &table.outputs {
        let Some((_, net)) = nl.outputs.iter().find(|(b, _)| b == o) else {
            return Ok(false);
        };
        out_state.push((*net, table.state_index(o).expect("outputs are state bits")));
    }
    if nl.outputs.len() != table.outputs.len() {
        return Ok(false);
    }
    let order = nl.comb_order()?;
    let n_in = table.inputs.len();
    let ok = (0u64..1u64 << bits).into_par_iter().all(|a| {
        let bit = |k: usize| (a >> k) & 1 == 1;
        let tin: Vec<bool> = (0..n_in).map(bit).collect();
        let tstate: Vec<bool> = (0..table.state.len()).map(|k| bit(n_in + k)).collect();
        let mut nin = vec![false; nl.inputs.len()];
        for (k, &p) in input_pos.iter().enumerate() {
            nin[p] = tin[k];
        }
        let mut nlatch = vec![false; latches.len()];
        for (k, &p) in latch_pos.iter().enumerate() {
            nlatch[p] = tstate[k];
        }
        let nets = nl.eval_ordered(&order, &nin, &nlatch);
        let want = table.step(&tin, &tstate);
        let next_ok = latch_pos
            .iter()
            .zip(&want)
            .all(|(&p, &w)| nets[nl.gates[latches[p]].inputs[LATCH_D]] == w);
        next_ok && out_state.iter().all(|&(net, s)| nets[net] == tstate[s])
    });
    Ok(ok)
}
