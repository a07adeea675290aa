// SPDX-License-Identifier: Apache-2.0

//! Technology mapping onto mass-spring standard cells.
//!
//! Every netlist net is one in-phase mass; each gate adds one out-of-phase intermediate
//! mass between its inputs and its output. Information advances one mass per half
//! power-clock cycle, so a gate costs one cycle of latency.

mod cells;
mod clock;
mod map;

pub use cells::{cell_buf, cell_const, cell_cost, cell_dlatch, cell_nor, cell_not};
pub use clock::{compose_coprime_clocks, generate_clock, plan_clock, ClockPlan, MAX_RING_PERIOD};
pub use map::{map_netlist, TechmapOptions, Timing};

use serde::{Deserialize, Serialize};

use crate::synth::{NetId, SynthError};

pub const NETWORK_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    InPhase,
    OutOfPhase,
}

impl Phase {
    /// (a0, a1) for on-site terms, equal to (d0, d1) for couplings.
    pub fn coefficients(self) -> (f64, f64) {
        match self {
            Phase::InPhase => (0.0, 1.0),
            Phase::OutOfPhase => (2.0, -1.0),
        }
    }

    pub fn flip(self) -> Phase {
        match self {
            Phase::InPhase => Phase::OutOfPhase,
            Phase::OutOfPhase => Phase::InPhase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassTag {
    Sensor,
    Actuator,
    /// Net mass driven by a gate.
    Output,
    Intermediate,
    ClockLoop,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassSpec {
    pub id: usize,
    pub phase: Phase,
    /// Multiple of q in the on-site `q x` term: +1 pushes toward 0, -1 toward 1.
    pub bias: i8,
    pub x0: f64,
    pub v0: f64,
    pub tag: MassTag,
    /// Netlist net realized by this mass, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub net: Option<NetId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    LinearPos,
    LinearNeg,
    /// `+|c| d x_i x_j^2`: `i` gates the bistability of `j`.
    NonlinearGate,
}

impl CouplingKind {
    /// Coupling constant c.
    pub fn strength(self, c: f64) -> f64 {
        match self {
            CouplingKind::LinearPos => c,
            CouplingKind::LinearNeg | CouplingKind::NonlinearGate => -c,
        }
    }

    /// Exponent n on `x_j`.
    pub fn exponent(self) -> u32 {
        match self {
            CouplingKind::NonlinearGate => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub i: usize,
    pub j: usize,
    pub kind: CouplingKind,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IoBinding {
    pub name: String,
    pub bit: u32,
    pub mass: usize,
}

/// Labels of an I/O's binary codes, copied from the source document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueMap {
    pub name: String,
    pub entries: Vec<(u64, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassSpringNetwork {
    pub format_version: u32,
    pub name: String,
    /// Power-clock cycles per FSM tick.
    pub fsm_period: usize,
    /// Sample index at which latch clock pins first read 1.
    pub first_tick: usize,
    /// Samples from a tick until every actuator shows the new state.
    pub output_latency: usize,
    /// Periods of the ring oscillators, empty for combinational designs.
    pub rings: Vec<usize>,
    pub clock_mass: Option<usize>,
    pub sensors: Vec<IoBinding>,
    pub actuators: Vec<IoBinding>,
    /// Register bit to latch output mass.
    pub state: Vec<IoBinding>,
    #[serde(default)]
    pub value_maps: Vec<ValueMap>,
    pub masses: Vec<MassSpec>,
    pub couplings: Vec<CouplingSpec>,
}

impl Default for MassSpringNetwork {
    fn default() -> Self {
        MassSpringNetwork {
            format_version: NETWORK_FORMAT_VERSION,
            name: String::new(),
            fsm_period: 1,
            first_tick: 0,
            output_latency: 0,
            rings: Vec::new(),
            clock_mass: None,
            sensors: Vec::new(),
            actuators: Vec::new(),
            state: Vec::new(),
            value_maps: Vec::new(),
            masses: Vec::new(),
            couplings: Vec::new(),
        }
    }
}

impl MassSpringNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_mass(&mut self, phase: Phase, tag: MassTag) -> usize {
        let id = self.masses.len();
        self.masses.push(MassSpec {
            id,
            phase,
            bias: 0,
            x0: 0.0,
            v0: 0.0,
            tag,
            net: None,
        });
        id
    }

    /// Adds a coupling whose stiffness follows the phase of mass `i`.
    pub fn couple(&mut self, i: usize, j: usize, kind: CouplingKind) {
        let phase = self.masses[i].phase;
        self.couplings.push(CouplingSpec { i, j, kind, phase });
    }

    pub fn mass_count(&self) -> usize {
        self.masses.len()
    }

    pub fn sensor(&self, name: &str, bit: u32) -> Option<usize> {
        find(&self.sensors, name, bit)
    }

    pub fn actuator(&self, name: &str, bit: u32) -> Option<usize> {
        find(&self.actuators, name, bit)
    }

    pub fn state_mass(&self, name: &str, bit: u32) -> Option<usize> {
        find(&self.state, name, bit)
    }

    /// Linear couplings joining masses of equal phase (should be empty).
    pub fn phase_violations(&self) -> Vec<&CouplingSpec> {
        self.couplings
            .iter()
            .filter(|c| c.kind != CouplingKind::NonlinearGate && self.masses[c.i].phase == self.masses[c.j].phase)
            .collect()
    }

    pub fn label(&self, io: &str, code: u64) -> Option<&str> {
        let map = self.value_maps.iter().find(|m| m.name == io)?;
        map.entries.iter().find(|(c, _)| *c == code).map(|(_, l)| l.as_str())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, TechmapError> {
        let n: MassSpringNetwork = serde_json::from_str(text).map_err(|e| TechmapError::Schema(e.to_string()))?;
        if n.format_version != NETWORK_FORMAT_VERSION {
            return Err(TechmapError::Schema(format!(
                "unsupported format_version {} (expected {NETWORK_FORMAT_VERSION})",
                n.format_version
            )));
        }
        n.check()?;
        Ok(n)
    }

    /// Referential checks: dense ids and in-range endpoints and bindings.
    pub fn check(&self) -> Result<(), TechmapError> {
        let bad = |m: String| Err(TechmapError::Schema(m));
        for (k, m) in self.masses.iter().enumerate() {
            if m.id != k {
                return bad(format!("mass ids must be dense; found {} at position {k}", m.id));
            }
            if !m.x0.is_finite() || !m.v0.is_finite() {
                return bad(format!("mass {k} has a non-finite initial state"));
            }
        }
        let n = self.masses.len();
        for c in &self.couplings {
            if c.i >= n || c.j >= n {
                return bad(format!("coupling ({}, {}) refers to an unknown mass", c.i, c.j));
            }
        }
        for b in self.sensors.iter().chain(&self.actuators).chain(&self.state) {
            if b.mass >= n {
                return bad(format!("binding {}[{}] refers to an unknown mass", b.name, b.bit));
            }
        }
        if matches!(self.clock_mass, Some(m) if m >= n) {
            return bad("clock mass is out of range".into());
        }
        if self.fsm_period == 0 {
            return bad("fsm_period must be positive".into());
        }
        Ok(())
    }
}

fn find(list: &[IoBinding], name: &str, bit: u32) -> Option<usize> {
    list.iter().find(|b| b.name == name && b.bit == bit).map(|b| b.mass)
}

#[derive(Debug, thiserror::Error)]
pub enum TechmapError {
    #[error("design requires clock")]
    ClockRequired,
    #[error("fsm_period {period} is too short for combinational depth {depth} (need at least {need})")]
    PeriodTooShort { period: usize, depth: usize, need: usize },
    #[error("invalid clock: {0}")]
    Clock(String),
    #[error("network JSON: {0}")]
    Schema(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
}
