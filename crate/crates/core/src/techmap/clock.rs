// SPDX-License-Identifier: Apache-2.0

//! Ring oscillators and their co-prime composition.
//!
//! A ring of 2P masses with alternating phases carries one logic 1 around the loop. The
//! 1 advances one mass per half cycle, so mass 0 reads 1 once every P power-clock cycles.

use super::cells::{cell_buf, cell_nor, cell_not};
use super::{CouplingKind, MassSpringNetwork, MassTag, Phase, TechmapError};

/// Longest single ring the planner uses before composing two.
pub const MAX_RING_PERIOD: usize = 20;

/// Builds a ring with period `period` whose output mass first reads 1 at sample `offset`
/// (mod period). Returns the output mass.
pub fn generate_clock(n: &mut MassSpringNetwork, period: usize, offset: usize) -> Result<usize, TechmapError> {
    if period < 2 {
        return Err(TechmapError::Clock(format!("ring period {period} is below 2")));
    }
    let len = 2 * period;
    let seed = 2 * ((period - offset % period) % period);
    let first = n.masses.len();
    for k in 0..len {
        let phase = if k % 2 == 0 { Phase::InPhase } else { Phase::OutOfPhase };
        let m = n.add_mass(phase, MassTag::ClockLoop);
        n.masses[m].x0 = if k == seed { 1.0 } else { -1.0 };
    }
    for k in 0..len {
        n.couple(first + k, first + (k + 1) % len, CouplingKind::LinearPos);
    }
    n.rings.push(period);
    Ok(first)
}

/// Builds two rings and ANDs their outputs as NOR(NOT a, NOT b). Returns the AND output
/// mass and the combined period, which is the lcm of the two ring periods. The AND output
/// reads 1 two samples after the rings coincide.
pub fn compose_coprime_clocks(
    n: &mut MassSpringNetwork,
    p1: usize,
    p2: usize,
    offset: usize,
) -> Result<(usize, usize), TechmapError> {
    let a = generate_clock(n, p1, offset)?;
    let b = generate_clock(n, p2, offset)?;
    let na = n.add_mass(Phase::InPhase, MassTag::Output);
    cell_not(n, a, na);
    let nb = n.add_mass(Phase::InPhase, MassTag::Output);
    cell_not(n, b, nb);
    let out = n.add_mass(Phase::InPhase, MassTag::Output);
    cell_nor(n, na, nb, out);
    Ok((out, lcm(p1, p2)))
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClockPlan {
    pub rings: Vec<usize>,
    pub period: usize,
}

impl ClockPlan {
    /// Samples from a ring tick to a tick on the plan's output mass.
    pub fn delay(&self) -> usize {
        match self.rings.len() {
            1 => 1,
            _ => 3,
        }
    }

    /// Builds the clock generator driving `out`, an existing in-phase mass, so that `out`
    /// first reads 1 at sample `first` (which must be at least [`ClockPlan::delay`]).
    pub fn build(&self, n: &mut MassSpringNetwork, out: usize, first: usize) -> Result<(), TechmapError> {
        let offset = first
            .checked_sub(self.delay())
            .ok_or_else(|| TechmapError::Clock(format!("first tick {first} is earlier than the generator delay")))?;
        let src = match self.rings.as_slice() {
            [p] => generate_clock(n, *p, offset)?,
            [p1, p2] => compose_coprime_clocks(n, *p1, *p2, offset)?.0,
            _ => return Err(TechmapError::Clock("a plan has one or two rings".into())),
        };
        // Isolation buffer so the ring mass never carries the clock tree load.
        cell_buf(n, src, out);
        Ok(())
    }
}

/// Picks the rings for an FSM period: one ring when it fits within `max_ring`, otherwise
/// the co-prime factor pair with the fewest masses. Periods with no such pair get a single
/// long ring.
pub fn plan_clock(period: usize, max_ring: usize) -> Result<ClockPlan, TechmapError> {
    if period < 2 {
        return Err(TechmapError::Clock(format!("fsm_period {period} is below 2")));
    }
    if period <= max_ring {
        return Ok(ClockPlan {
            rings: vec![period],
            period,
        });
    }
    let best = (2..=max_ring)
        .filter(|&a| period % a == 0)
        .map(|a| (a, period / a))
        .filter(|&(a, b)| a < b && b <= max_ring && gcd(a, b) == 1)
        .min_by_key(|&(a, b)| (a + b, a));
    let rings = match best {
        Some((a, b)) => vec![a, b],
        None => vec![period],
    };
    Ok(ClockPlan { rings, period })
}
