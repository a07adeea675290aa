// SPDX-License-Identifier: Apache-2.0

//! Compiler from mechanical description language (MDL) sources to nonlinear mass-spring
//! networks, with placement, ODE simulation and closed-loop runtimes.

pub mod compile;
pub mod dynamics;
pub mod mdl;
pub mod place;
pub mod runtime;
pub mod synth;
pub mod techmap;
