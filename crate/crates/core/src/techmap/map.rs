// SPDX-License-Identifier: Apache-2.0

//! Netlist to mass-spring network.

use super::cells::{cell_buf, cell_const, cell_dlatch, cell_nor, cell_not};
use super::clock::{plan_clock, MAX_RING_PERIOD};
use super::{IoBinding, MassSpringNetwork, MassTag, Phase, TechmapError};
use crate::synth::{clock_skew, GateKind, GateNetlist, NetOrigin, LATCH_C, LATCH_D};

#[derive(Debug, Clone, PartialEq)]
pub struct TechmapOptions {
    /// Requested power-clock cycles per FSM tick.
    pub fsm_period: usize,
    pub auto_clock: bool,
    pub max_ring_period: usize,
}

impl Default for TechmapOptions {
    fn default() -> Self {
        TechmapOptions {
            fsm_period: 60,
            auto_clock: true,
            max_ring_period: MAX_RING_PERIOD,
        }
    }
}

/// Propagation figures of a netlist, in gates (one gate = one power-clock cycle).
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct Timing {
    /// Longest path from a sensor to a latch D pin.
    pub input_depth: usize,
    /// Longest path from a latch output or constant to a latch D pin.
    pub state_depth: usize,
    /// Longest data path ending at a latch D pin or an actuator.
    pub data_depth: usize,
    /// BUF levels between the clock net and the latch clock pins.
    pub clock_tree_depth: usize,
    /// Samples from a latch tick until every actuator shows the new state.
    pub output_latency: usize,
}

impl Timing {
    pub fn analyze(nl: &GateNetlist) -> Result<Self, TechmapError> {
        let order = nl.comb_order()?;
        let arrival = |from_inputs: bool| {
            let mut a: Vec<Option<usize>> = nl
                .origins
                .iter()
                .map(|o| match o {
                    NetOrigin::Input(_) if from_inputs => Some(0),
                    NetOrigin::Gate(g) if !from_inputs && nl.gates[*g].kind == GateKind::Dlatch => Some(0),
                    _ => None,
                })
                .collect();
            for &g in &order {
                let gate = &nl.gates[g];
                let best = gate.inputs.iter().filter_map(|&n| a[n]).max();
                a[gate.output] = match gate.kind {
                    GateKind::Const0 | GateKind::Const1 if !from_inputs => Some(0),
                    _ => best.map(|x| x + 1),
                };
            }
            a
        };
        let from_in = arrival(true);
        let from_state = arrival(false);
        let d_pins: Vec<usize> = nl.latches().iter().map(|&g| nl.gates[g].inputs[LATCH_D]).collect();
        let max_at =
            |a: &[Option<usize>], nets: &mut dyn Iterator<Item = usize>| nets.filter_map(|n| a[n]).max().unwrap_or(0);
        let input_depth = max_at(&from_in, &mut d_pins.iter().copied());
        let state_depth = max_at(&from_state, &mut d_pins.iter().copied());
        let out_nets: Vec<usize> = nl.outputs.iter().map(|(_, n)| *n).collect();
        let data_depth = input_depth
            .max(state_depth)
            .max(max_at(&from_in, &mut out_nets.iter().copied()))
            .max(max_at(&from_state, &mut out_nets.iter().copied()));
        let clock_tree_depth = clock_skew(nl).map(|(_, hi)| hi).unwrap_or(0);
        let output_latency = if nl.latches().is_empty() {
            max_at(&from_in, &mut out_nets.iter().copied())
        } else {
            1 + max_at(&from_state, &mut out_nets.iter().copied())
        };
        Ok(Timing {
            input_depth,
            state_depth,
            data_depth,
            clock_tree_depth,
            output_latency,
        })
    }

    /// Shortest FSM period this netlist tolerates: two samples per gate of data depth plus
    /// two, and enough room to present new sensor values after the actuators settle.
    pub fn min_period(&self) -> usize {
        (2 * self.data_depth + 2).max(self.output_latency + self.input_depth + 2)
    }
}

/// Maps every net to one in-phase mass (mass id = net id), every gate to its cell, and
/// drives the clock net from a generated ring clock.
pub fn map_netlist(nl: &GateNetlist, opts: &TechmapOptions) -> Result<MassSpringNetwork, TechmapError> {
    nl.check()?;
    let timing = Timing::analyze(nl)?;
    let has_latches = !nl.latches().is_empty();
    if has_latches && !opts.auto_clock {
        return Err(TechmapError::ClockRequired);
    }
    let plan = if has_latches {
        Some(plan_clock(opts.fsm_period, opts.max_ring_period)?)
    } else {
        None
    };
    let period = plan.as_ref().map_or(opts.fsm_period, |p| p.period);
    let need = timing.min_period();
    if has_latches && period < need {
        return Err(TechmapError::PeriodTooShort {
            period,
            depth: timing.data_depth,
            need,
        });
    }

    let mut n = MassSpringNetwork::new();
    for (net, origin) in nl.origins.iter().enumerate() {
        let tag = match origin {
            NetOrigin::Input(_) => MassTag::Sensor,
            _ => MassTag::Output,
        };
        let m = n.add_mass(Phase::InPhase, tag);
        n.masses[m].net = Some(net);
    }
    for gate in &nl.gates {
        let out = gate.output;
        match gate.kind {
            GateKind::Nor2 => {
                cell_nor(&mut n, gate.inputs[0], gate.inputs[1], out);
            }
            GateKind::Not => {
                cell_not(&mut n, gate.inputs[0], out);
            }
            GateKind::Buf => {
                cell_buf(&mut n, gate.inputs[0], out);
            }
            GateKind::Dlatch => {
                cell_dlatch(&mut n, gate.inputs[LATCH_D], gate.inputs[LATCH_C], out);
            }
            GateKind::Const0 => cell_const(&mut n, out, false),
            GateKind::Const1 => cell_const(&mut n, out, true),
        }
    }
    for (b, net) in &nl.inputs {
        n.sensors.push(IoBinding {
            name: b.name.clone(),
            bit: b.bit,
            mass: *net,
        });
    }
    for (b, net) in &nl.outputs {
        if n.masses[*net].tag == MassTag::Output {
            n.masses[*net].tag = MassTag::Actuator;
        }
        n.actuators.push(IoBinding {
            name: b.name.clone(),
            bit: b.bit,
            mass: *net,
        });
    }
    for (b, g) in &nl.state {
        n.state.push(IoBinding {
            name: b.name.clone(),
            bit: b.bit,
            mass: nl.gates[*g].output,
        });
    }
    n.fsm_period = period;
    n.output_latency = timing.output_latency;
    if let (Some(plan), Some(clk)) = (plan, nl.clock) {
        let at_clock_net =
            (timing.input_depth + 2).max(plan.delay() + timing.clock_tree_depth) - timing.clock_tree_depth;
        plan.build(&mut n, clk, at_clock_net)?;
        n.clock_mass = Some(clk);
        n.first_tick = at_clock_net + timing.clock_tree_depth;
    }
    debug_assert!(n.phase_violations().is_empty());
    Ok(n)
}
