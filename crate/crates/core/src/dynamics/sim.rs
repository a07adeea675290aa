// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::{power_clock, DynamicsError, SimParams, System};
use crate::techmap::MassSpringNetwork;

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// Integration steps taken since t = 0; time is `step * dt`.
    pub step: u64,
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl SimState {
    pub fn initial(net: &MassSpringNetwork) -> Self {
        SimState {
            step: 0,
            t: 0.0,
            x: net.masses.iter().map(|m| m.x0).collect(),
            v: net.masses.iter().map(|m| m.v0).collect(),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    g: Vec<f64>,
    xt: Vec<f64>,
    vt: Vec<f64>,
    kx: [Vec<f64>; 4],
    kv: [Vec<f64>; 4],
}

impl Scratch {
    fn new(n: usize) -> Self {
        let z = || vec![0.0; n];
        Scratch {
            g: z(),
            xt: z(),
            vt: z(),
            kx: [z(), z(), z(), z()],
            kv: [z(), z(), z(), z()],
        }
    }
}

fn accel(sys: &System, p: &SimParams, x: &[f64], v: &[f64], xp: f64, ext: &[f64], g: &mut [f64], kv: &mut [f64]) {
    sys.gradient_into(x, xp, g);
    for k in 0..x.len() {
        kv[k] = (ext[k] - p.b * v[k] - g[k]) / p.m;
    }
}

fn rk4_into(
    sys: &System,
    p: &SimParams,
    s: &mut SimState,
    dt: f64,
    ext: &[f64],
    xp: &dyn Fn(f64) -> f64,
    w: &mut Scratch,
) {
    let n = s.x.len();
    let t = s.t;
    let Scratch { g, xt, vt, kx, kv } = w;
    kx[0].copy_from_slice(&s.v);
    accel(sys, p, &s.x, &s.v, xp(t), ext, g, &mut kv[0]);
    for stage in 1..4 {
        let h = if stage == 3 { dt } else { dt / 2.0 };
        for k in 0..n {
            xt[k] = s.x[k] + h * kx[stage - 1][k];
            vt[k] = s.v[k] + h * kv[stage - 1][k];
        }
        kx[stage].copy_from_slice(vt);
        accel(sys, p, xt, vt, xp(t + h), ext, g, &mut kv[stage]);
    }
    for k in 0..n {
        s.x[k] += dt / 6.0 * (kx[0][k] + 2.0 * kx[1][k] + 2.0 * kx[2][k] + kx[3][k]);
        s.v[k] += dt / 6.0 * (kv[0][k] + 2.0 * kv[1][k] + 2.0 * kv[2][k] + kv[3][k]);
    }
    s.t = t + dt;
}

/// One classical RK4 step of `m x'' = F - b x' - dV/dx`, with the power clock evaluated at
/// the substep times and the external force held constant over the step.
pub fn rk4_step(sys: &System, p: &SimParams, state: &mut SimState, dt: f64, ext: &[f64], xp: &dyn Fn(f64) -> f64) {
    let mut w = Scratch::new(state.x.len());
    rk4_into(sys, p, state, dt, ext, xp, &mut w);
}

/// Piecewise-constant external force on one mass over `[from, to)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceSegment {
    pub mass: usize,
    pub from: f64,
    pub to: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ForceSchedule {
    pub segments: Vec<ForceSegment>,
}

impl ForceSchedule {
    pub fn validate(&self, masses: usize) -> Result<(), DynamicsError> {
        let mut by_mass: Vec<Vec<(f64, f64)>> = vec![Vec::new(); masses];
        for s in &self.segments {
            if s.mass >= masses {
                return Err(DynamicsError::Params(format!("force on unknown mass {}", s.mass)));
            }
            if !(s.from < s.to) || !s.value.is_finite() {
                return Err(DynamicsError::Params(format!("bad force interval on mass {}", s.mass)));
            }
            by_mass[s.mass].push((s.from, s.to));
        }
        for (m, iv) in by_mass.iter_mut().enumerate() {
            iv.sort_by(|a, b| a.0.total_cmp(&b.0));
            if iv.windows(2).any(|w| w[1].0 < w[0].1) {
                return Err(DynamicsError::Params(format!(
                    "overlapping force intervals on mass {m}"
                )));
            }
        }
        Ok(())
    }

    pub fn forces_at(&self, t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|f| *f = 0.0);
        for s in &self.segments {
            if s.from <= t && t < s.to {
                out[s.mass] += s.value;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub name: String,
    pub mass: usize,
}

/// Displacements of the probed masses at recorded times.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub probes: Vec<Probe>,
    pub rows: Vec<(f64, f64, Vec<f64>)>,
}

impl Trace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x_p");
        for p in &self.probes {
            s.push_str(&format!(",{}", p.name));
        }
        for p in &self.probes {
            s.push_str(&format!(",{}_logic", p.name));
        }
        s.push('\n');
        for (t, xp, xs) in &self.rows {
            s.push_str(&format!("{t:.6},{xp:.6}"));
            for x in xs {
                s.push_str(&format!(",{x:.6}"));
            }
            for x in xs {
                s.push_str(if *x > 0.0 { ",1" } else { ",0" });
            }
            s.push('\n');
        }
        s
    }

    /// Logic readout of probe `k` in every row.
    pub fn bits(&self, k: usize) -> Vec<bool> {
        self.rows.iter().map(|r| r.2[k] > 0.0).collect()
    }
}

/// Stateful integrator for one network.
#[derive(Debug, Clone)]
pub struct Simulator {
    sys: System,
    params: SimParams,
    state: SimState,
    ext: Vec<f64>,
    frozen: Option<f64>,
    scratch: Scratch,
}

impl Simulator {
    pub fn new(net: &MassSpringNetwork, params: &SimParams) -> Result<Self, DynamicsError> {
        Self::with_state(net, params, SimState::initial(net))
    }

    pub fn with_state(net: &MassSpringNetwork, params: &SimParams, state: SimState) -> Result<Self, DynamicsError> {
        params.validate()?;
        let n = net.masses.len();
        if state.x.len() != n || state.v.len() != n {
            return Err(DynamicsError::Dimension {
                got: state.x.len(),
                want: n,
            });
        }
        Ok(Simulator {
            sys: System::new(net, params),
            params: params.clone(),
            state,
            ext: vec![0.0; n],
            frozen: None,
            scratch: Scratch::new(n),
        })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn system(&self) -> &System {
        &self.sys
    }

    pub fn set_force(&mut self, mass: usize, value: f64) {
        self.ext[mass] = value;
    }

    pub fn forces_mut(&mut self) -> &mut [f64] {
        &mut self.ext
    }

    /// Holds the power clock at a fixed value (None restores the sinusoid).
    pub fn freeze_clock(&mut self, xp: Option<f64>) {
        self.frozen = xp;
    }

    pub fn xp(&self, t: f64) -> f64 {
        self.frozen.unwrap_or_else(|| power_clock(t, self.params.omega))
    }

    pub fn step(&mut self) -> Result<(), DynamicsError> {
        let dt = self.params.dt();
        let omega = self.params.omega;
        let frozen = self.frozen;
        let xp = move |t: f64| frozen.unwrap_or_else(|| power_clock(t, omega));
        rk4_into(
            &self.sys,
            &self.params,
            &mut self.state,
            dt,
            &self.ext,
            &xp,
            &mut self.scratch,
        );
        self.state.step += 1;
        self.state.t = self.state.step as f64 * dt;
        let lim = self.params.divergence_limit;
        if let Some((mass, &value)) = self
            .state
            .x
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || x.abs() > lim)
        {
            return Err(DynamicsError::Divergence {
                t: self.state.t,
                mass,
                value,
            });
        }
        Ok(())
    }

    pub fn advance(&mut self, steps: u64) -> Result<(), DynamicsError> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    /// Step index of the readout for power-clock cycle `k` (power clock at its maximum).
    pub fn sample_step(&self, k: u64) -> u64 {
        let spp = self.params.steps_per_period as u64;
        k * spp + spp / 4
    }

    /// Integrates up to the readout of cycle `k`.
    pub fn run_to_sample(&mut self, k: u64) -> Result<(), DynamicsError> {
        let target = self.sample_step(k);
        let now = self.state.step;
        if target < now {
            return Err(DynamicsError::Params(format!("sample {k} lies in the past")));
        }
        self.advance(target - now)
    }

    pub fn x(&self, mass: usize) -> f64 {
        self.state.x[mass]
    }

    pub fn logic(&self, mass: usize) -> bool {
        self.state.x[mass] > 0.0
    }

    /// Kinetic plus potential energy at the current power-clock value.
    pub fn energy(&self) -> f64 {
        let ke: f64 = self.state.v.iter().map(|v| 0.5 * self.params.m * v * v).sum();
        ke + self
            .sys
            .potential(&self.state.x, self.xp(self.state.t))
            .expect("state matches system")
    }

    /// Runs `periods` power-clock cycles under `schedule`, recording probes once per cycle at
    /// the readout phase, or every `stride` steps when given.
    pub fn record(
        &mut self,
        periods: u64,
        schedule: &ForceSchedule,
        probes: &[Probe],
        stride: Option<u64>,
    ) -> Result<Trace, DynamicsError> {
        schedule.validate(self.ext.len())?;
        if let Some(p) = probes.iter().find(|p| p.mass >= self.ext.len()) {
            return Err(DynamicsError::UnknownProbe(p.name.clone()));
        }
        let spp = self.params.steps_per_period as u64;
        let end = self.state.step + periods * spp;
        let mut trace = Trace {
            probes: probes.to_vec(),
            rows: Vec::new(),
        };
        while self.state.step < end {
            let t = self.state.t;
            schedule.forces_at(t, &mut self.ext);
            self.step()?;
            let s = self.state.step;
            let take = match stride {
                Some(k) => s % k.max(1) == 0,
                None => s % spp == spp / 4,
            };
            if take {
                let t = self.state.t;
                trace
                    .rows
                    .push((t, self.xp(t), probes.iter().map(|p| self.state.x[p.mass]).collect()));
            }
        }
        Ok(trace)
    }
}
