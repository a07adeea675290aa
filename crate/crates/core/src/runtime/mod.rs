// SPDX-License-Identifier: Apache-2.0

//! Closed-loop runtimes: a device abstraction with physical, gate-level and behavioral
//! backends, plus the maze world and scripted scenarios.

mod maze;
mod scenario;

pub use maze::{
    generate_maze, reference_maze_run, reference_next, run_maze, Dir, MazeBindings, MazeRun, MazeStep, MazeWorld,
    WallSensors,
};
pub use scenario::{
    parse_scenario, run_scenario, Expectation, ExpectationResult, ScenarioIo, ScenarioPhase, ScenarioReport,
    ScenarioScript, ScenarioValue, TickRecord,
};

use std::collections::BTreeMap;

use crate::dynamics::{DynamicsError, SimParams, Simulator};
use crate::mdl::BehaviorAst;
use crate::synth::{GateNetlist, Interpreter, SynthError, Values};
use crate::techmap::MassSpringNetwork;

#[derive(Debug, thiserror::Error)]
pub enum RuntimeError {
    #[error("maze: {0}")]
    Maze(String),
    #[error("scenario line {line}: {message}")]
    Scenario { line: usize, message: String },
    #[error("unknown input `{0}`")]
    UnknownInput(String),
    #[error("value {value} does not fit `{name}`")]
    Width { name: String, value: u64 },
    #[error("device: {0}")]
    Device(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

/// Register values after one FSM tick.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TickOutput {
    /// Actuator ports.
    pub outputs: Values,
    /// Register bits realized by the device, by register name.
    pub state: Values,
}

/// A clocked device stepped one FSM tick at a time. Inputs are held for the whole tick.
pub trait Device {
    fn tick(&mut self, inputs: &Values) -> Result<TickOutput, RuntimeError>;
}

fn bit_of(values: &Values, name: &str, bit: u32) -> Result<bool, RuntimeError> {
    values
        .get(name)
        .map(|v| (v >> bit) & 1 == 1)
        .ok_or_else(|| RuntimeError::UnknownInput(name.to_string()))
}

fn set_bit(values: &mut Values, name: &str, bit: u32, on: bool) {
    let v = values.entry(name.to_string()).or_default();
    if on {
        *v |= 1 << bit;
    }
}

/// The compiled network under full ODE integration. Sensor bits become forces of +-q;
/// outputs are read at the readout phase `output_latency` cycles after each latch tick.
pub struct PhysicalDevice<'a> {
    net: &'a MassSpringNetwork,
    sim: Simulator,
    ticks: u64,
}

impl<'a> PhysicalDevice<'a> {
    pub fn new(net: &'a MassSpringNetwork, params: &SimParams) -> Result<Self, RuntimeError> {
        Ok(PhysicalDevice {
            net,
            sim: Simulator::new(net, params)?,
            ticks: 0,
        })
    }

    pub fn simulator(&self) -> &Simulator {
        &self.sim
    }

    /// Readout cycle of FSM tick `k`.
    pub fn readout_cycle(&self, k: u64) -> u64 {
        let n = self.net;
        (n.first_tick + n.output_latency) as u64 + k * n.fsm_period as u64
    }
}

impl Device for PhysicalDevice<'_> {
    fn tick(&mut self, inputs: &Values) -> Result<TickOutput, RuntimeError> {
        let q = self.sim.params().q;
        for b in &self.net.sensors {
            let on = bit_of(inputs, &b.name, b.bit)?;
            self.sim.set_force(b.mass, if on { q } else { -q });
        }
        let k = self.readout_cycle(self.ticks);
        self.sim.run_to_sample(k)?;
        self.ticks += 1;
        let mut out = TickOutput::default();
        for b in &self.net.actuators {
            set_bit(&mut out.outputs, &b.name, b.bit, self.sim.logic(b.mass));
        }
        for b in &self.net.state {
            set_bit(&mut out.state, &b.name, b.bit, self.sim.logic(b.mass));
        }
        Ok(out)
    }
}

/// Zero-delay evaluation of the gate netlist, latching every D pin once per tick.
pub struct NetlistDevice<'a> {
    nl: &'a GateNetlist,
    order: Vec<usize>,
    latches: Vec<usize>,
    q: Vec<bool>,
}

impl<'a> NetlistDevice<'a> {
    pub fn new(nl: &'a GateNetlist) -> Result<Self, RuntimeError> {
        let latches = nl.latches();
        Ok(NetlistDevice {
            order: nl.comb_order()?,
            q: vec![false; latches.len()],
            latches,
            nl,
        })
    }
}

impl Device for NetlistDevice<'_> {
    fn tick(&mut self, inputs: &Values) -> Result<TickOutput, RuntimeError> {
        let bits = self
            .nl
            .inputs
            .iter()
            .map(|(b, _)| bit_of(inputs, &b.name, b.bit))
            .collect::<Result<Vec<_>, _>>()?;
        let nets = self.nl.eval_ordered(&self.order, &bits, &self.q);
        self.q = self
            .latches
            .iter()
            .map(|&g| nets[self.nl.gates[g].inputs[crate::synth::LATCH_D]])
            .collect();
        let nets = self.nl.eval_ordered(&self.order, &bits, &self.q);
        let mut out = TickOutput::default();
        for (b, n) in &self.nl.outputs {
            set_bit(&mut out.outputs, &b.name, b.bit, nets[*n]);
        }
        for (b, g) in &self.nl.state {
            set_bit(&mut out.state, &b.name, b.bit, nets[self.nl.gates[*g].output]);
        }
        Ok(out)
    }
}

/// Reference semantics straight from the behavioral AST.
pub struct BehaviorDevice<'a> {
    ast: &'a BehaviorAst,
    interp: Interpreter<'a>,
    regs: Values,
}

impl<'a> BehaviorDevice<'a> {
    pub fn new(ast: &'a BehaviorAst) -> Self {
        let interp = Interpreter::new(ast);
        BehaviorDevice {
            regs: interp.reset_state(),
            interp,
            ast,
        }
    }
}

impl Device for BehaviorDevice<'_> {
    fn tick(&mut self, inputs: &Values) -> Result<TickOutput, RuntimeError> {
        self.regs = self.interp.step(&self.regs, inputs);
        let outputs: BTreeMap<String, u64> = self
            .ast
            .ports
            .iter()
            .filter(|p| p.direction == crate::mdl::Direction::Output)
            .map(|p| (p.name.clone(), self.regs[&p.name]))
            .collect();
        Ok(TickOutput {
            outputs,
            state: self.regs.clone(),
        })
    }
}
