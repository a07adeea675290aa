// SPDX-License-Identifier: Apache-2.0

//! Time integration of the mass-spring network under the power clock.
//!
//! ```text
//! V = sum_i [ lam/4 x_i^4 + k_l/2 x_i^2 + gam/2 x_i^2 (a0_i + a1_i xp) + q_i x_i ]
//!   - sum_ij n c_ij (d0_ij + d1_ij xp) / 2 * x_i x_j^n
//! m x_i'' = F_i(t) - b x_i' - dV/dx_i
//! ```
//! Linear couplings are symmetric (n = 1, c_ij = c_ji); the gate coupling is one-sided
//! (n = 2, only c_ij = -c).

mod checkpoint;
mod sim;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_VERSION};
pub use sim::{rk4_step, ForceSchedule, ForceSegment, Probe, SimState, Simulator, Trace};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::techmap::{CouplingKind, MassSpringNetwork};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    pub lambda: f64,
    pub k_l: f64,
    pub gamma: f64,
    pub c: f64,
    pub m: f64,
    pub b: f64,
    pub q: f64,
    pub omega: f64,
    pub steps_per_period: usize,
    /// |x| above this aborts the run.
    pub divergence_limit: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            lambda: 1.0,
            k_l: 1.5,
            gamma: -2.0,
            c: 0.5,
            m: 0.05,
            b: 0.25,
            q: 1.0,
            omega: 2.0 * PI,
            steps_per_period: 400,
            divergence_limit: 100.0,
        }
    }
}

impl SimParams {
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn dt(&self) -> f64 {
        self.period() / self.steps_per_period as f64
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.m > 0.0) || !(self.b >= 0.0) || self.steps_per_period < 2 || !(self.omega > 0.0) {
            return Err(DynamicsError::Params(
                "need m > 0, b >= 0, omega > 0 and steps_per_period >= 2".into(),
            ));
        }
        Ok(())
    }
}

pub fn power_clock(t: f64, omega: f64) -> f64 {
    1.0 + (omega * t).sin()
}

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("state has {got} entries, network has {want} masses")]
    Dimension { got: usize, want: usize },
    #[error("divergence at t = {t:.4}: mass {mass} reached {value}")]
    Divergence { t: f64, mass: usize, value: f64 },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("unknown probe `{0}`")]
    UnknownProbe(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Link {
    i: usize,
    j: usize,
    /// Signed coupling constant c_ij.
    c: f64,
    d0: f64,
    d1: f64,
    quadratic: bool,
}

/// Flattened coefficients of a network for fast evaluation.
#[derive(Debug, Clone)]
pub struct System {
    a0: Vec<f64>,
    a1: Vec<f64>,
    q: Vec<f64>,
    links: Vec<Link>,
    lambda: f64,
    k_l: f64,
    gamma: f64,
}

impl System {
    pub fn new(net: &MassSpringNetwork, p: &SimParams) -> Self {
        let (mut a0, mut a1, mut q) = (Vec::new(), Vec::new(), Vec::new());
        for m in &net.masses {
            let (x, y) = m.phase.coefficients();
            a0.push(x);
            a1.push(y);
            q.push(f64::from(m.bias) * p.q);
        }
        let links = net
            .couplings
            .iter()
            .map(|c| {
                let (d0, d1) = c.phase.coefficients();
                Link {
                    i: c.i,
                    j: c.j,
                    c: c.kind.strength(p.c),
                    d0,
                    d1,
                    quadratic: c.kind == CouplingKind::NonlinearGate,
                }
            })
            .collect();
        System {
            a0,
            a1,
            q,
            links,
            lambda: p.lambda,
            k_l: p.k_l,
            gamma: p.gamma,
        }
    }

    pub fn len(&self) -> usize {
        self.a0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a0.is_empty()
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), DynamicsError> {
        if x.len() != self.len() {
            return Err(DynamicsError::Dimension {
                got: x.len(),
                want: self.len(),
            });
        }
        Ok(())
    }

    pub fn potential(&self, x: &[f64], xp: f64) -> Result<f64, DynamicsError> {
        self.check_dim(x)?;
        let mut v = 0.0;
        for (k, &xi) in x.iter().enumerate() {
            let x2 = xi * xi;
            v += self.lambda / 4.0 * x2 * x2
                + self.k_l / 2.0 * x2
                + self.gamma / 2.0 * x2 * (self.a0[k] + self.a1[k] * xp)
                + self.q[k] * xi;
        }
        for l in &self.links {
            let d = l.d0 + l.d1 * xp;
            v -= if l.quadratic {
                l.c * d * x[l.i] * x[l.j] * x[l.j]
            } else {
                l.c * d * x[l.i] * x[l.j]
            };
        }
        Ok(v)
    }

    /// dV/dx written into `out`.
    pub fn gradient_into(&self, x: &[f64], xp: f64, out: &mut [f64]) {
        for (k, g) in out.iter_mut().enumerate() {
            let xi = x[k];
            *g = self.lambda * xi * xi * xi
                + self.k_l * xi
                + self.gamma * xi * (self.a0[k] + self.a1[k] * xp)
                + self.q[k];
        }
        for l in &self.links {
            let cd = l.c * (l.d0 + l.d1 * xp);
            if l.quadratic {
                out[l.i] -= cd * x[l.j] * x[l.j];
                out[l.j] -= 2.0 * cd * x[l.i] * x[l.j];
            } else {
                out[l.i] -= cd * x[l.j];
                out[l.j] -= cd * x[l.i];
            }
        }
    }

    pub fn gradient(&self, x: &[f64], xp: f64) -> Result<Vec<f64>, DynamicsError> {
        self.check_dim(x)?;
        let mut g = vec![0.0; x.len()];
        self.gradient_into(x, xp, &mut g);
        Ok(g)
    }

    /// Force vector -dV/dx.
    pub fn force(&self, x: &[f64], xp: f64) -> Result<Vec<f64>, DynamicsError> {
        Ok(self.gradient(x, xp)?.into_iter().map(|g| -g).collect())
    }
}

pub fn potential(net: &MassSpringNetwork, x: &[f64], xp: f64, p: &SimParams) -> Result<f64, DynamicsError> {
    System::new(net, p).potential(x, xp)
}

/// dV/dx of the network potential.
pub fn gradient(net: &MassSpringNetwork, x: &[f64], xp: f64, p: &SimParams) -> Result<Vec<f64>, DynamicsError> {
    System::new(net, p).gradient(x, xp)
}
