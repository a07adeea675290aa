// SPDX-License-Identifier: Apache-2.0

//! Scripted scenarios. One phase per line, statements separated by `;`:
//!
//! ```text
//! // lock with code 1001
//! set pass_in=1001 action_btn=1 key=1; ticks 2; expect door=1
//! ```
//!
//! Values are binary digits, most significant bit first, or a label from the I/O's value
//! map. Inputs keep their value until set again and start at 0. Expectations are checked
//! after the phase's last tick.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Device, RuntimeError};
use crate::mdl::{BehaviorAst, Direction};
use crate::synth::Values;
use crate::techmap::{MassSpringNetwork, ValueMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioValue {
    Bits(u64),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub name: String,
    pub value: ScenarioValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioPhase {
    pub line: usize,
    pub set: Vec<(String, ScenarioValue)>,
    pub ticks: usize,
    pub expect: Vec<Expectation>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScenarioScript {
    pub phases: Vec<ScenarioPhase>,
}

fn parse_value(line: usize, text: &str) -> Result<ScenarioValue, RuntimeError> {
    let err = |m: String| RuntimeError::Scenario { line, message: m };
    if text.is_empty() {
        return Err(err("missing value".into()));
    }
    let digits = text.strip_prefix("0b").unwrap_or(text);
    if !digits.is_empty() && digits.chars().all(|c| c == '0' || c == '1' || c == '_') {
        let digits: String = digits.chars().filter(|&c| c != '_').collect();
        if digits.len() > 64 {
            return Err(err(format!("value `{text}` is wider than 64 bits")));
        }
        return Ok(ScenarioValue::Bits(
            u64::from_str_radix(&digits, 2).expect("binary digits"),
        ));
    }
    if text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Ok(ScenarioValue::Label(text.to_string()));
    }
    Err(err(format!("bad value `{text}`")))
}

fn parse_assignments(line: usize, text: &str) -> Result<Vec<(String, ScenarioValue)>, RuntimeError> {
    text.split_whitespace()
        .map(|item| {
            let (name, value) = item.split_once('=').ok_or_else(|| RuntimeError::Scenario {
                line,
                message: format!("expected name=value, found `{item}`"),
            })?;
            Ok((name.to_string(), parse_value(line, value)?))
        })
        .collect()
}

pub fn parse_scenario(text: &str) -> Result<ScenarioScript, RuntimeError> {
    let mut script = ScenarioScript::default();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw
            .split("//")
            .next()
            .unwrap_or("")
            .split('#')
            .next()
            .unwrap_or("")
            .trim();
        if body.is_empty() {
            continue;
        }
        let mut phase = ScenarioPhase {
            line,
            set: Vec::new(),
            ticks: 1,
            expect: Vec::new(),
        };
        for stmt in body.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (word, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
            match word {
                "set" => phase.set.extend(parse_assignments(line, rest)?),
                "ticks" => {
                    phase.ticks = rest.trim().parse().map_err(|_| RuntimeError::Scenario {
                        line,
                        message: format!("bad tick count `{}`", rest.trim()),
                    })?
                }
                "expect" => phase.expect.extend(
                    parse_assignments(line, rest)?
                        .into_iter()
                        .map(|(name, value)| Expectation { name, value }),
                ),
                other => {
                    return Err(RuntimeError::Scenario {
                        line,
                        message: format!("unknown statement `{other}`"),
                    })
                }
            }
        }
        script.phases.push(phase);
    }
    Ok(script)
}

/// Port widths and value maps a script is resolved against.
#[derive(Debug, Clone, Default)]
pub struct ScenarioIo {
    pub inputs: Vec<(String, u32)>,
    pub outputs: Vec<(String, u32)>,
    pub value_maps: Vec<ValueMap>,
}

impl ScenarioIo {
    pub fn from_network(net: &MassSpringNetwork) -> Self {
        let widths = |list: &[crate::techmap::IoBinding]| {
            let mut out: Vec<(String, u32)> = Vec::new();
            for b in list {
                match out.iter_mut().find(|(n, _)| *n == b.name) {
                    Some((_, w)) => *w = (*w).max(b.bit + 1),
                    None => out.push((b.name.clone(), b.bit + 1)),
                }
            }
            out
        };
        ScenarioIo {
            inputs: widths(&net.sensors),
            outputs: widths(&net.actuators),
            value_maps: net.value_maps.clone(),
        }
    }

    pub fn from_ast(ast: &BehaviorAst, value_maps: Vec<ValueMap>) -> Self {
        let clock = ast.process().map_or("clk", |p| p.clock.as_str());
        let ports = |d: Direction| {
            ast.ports
                .iter()
                .filter(|p| p.direction == d && p.name != clock)
                .map(|p| (p.name.clone(), p.width()))
                .collect()
        };
        ScenarioIo {
            inputs: ports(Direction::Input),
            outputs: ports(Direction::Output),
            value_maps,
        }
    }

    fn resolve(&self, line: usize, name: &str, value: &ScenarioValue, width: u32) -> Result<u64, RuntimeError> {
        let v = match value {
            ScenarioValue::Bits(v) => *v,
            ScenarioValue::Label(l) => self
                .value_maps
                .iter()
                .find(|m| m.name == name)
                .and_then(|m| m.entries.iter().find(|(_, e)| e.eq_ignore_ascii_case(l)))
                .map(|(c, _)| *c)
                .ok_or_else(|| RuntimeError::Scenario {
                    line,
                    message: format!("`{name}` has no value labelled `{l}`"),
                })?,
        };
        if width < 64 && v >> width != 0 {
            return Err(RuntimeError::Width {
                name: name.to_string(),
                value: v,
            });
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TickRecord {
    pub phase: usize,
    pub tick: usize,
    pub inputs: Values,
    pub outputs: Values,
    pub state: Values,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectationResult {
    pub phase: usize,
    pub line: usize,
    pub name: String,
    pub expected: u64,
    pub actual: Option<u64>,
}

impl ExpectationResult {
    pub fn passed(&self) -> bool {
        self.actual == Some(self.expected)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScenarioReport {
    pub ticks: Vec<TickRecord>,
    pub results: Vec<ExpectationResult>,
    /// Port widths used to print values.
    pub widths: BTreeMap<String, u32>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(ExpectationResult::passed)
    }

    pub fn transcript(&self) -> String {
        let bin = |name: &str, v: u64| {
            let w = self.widths.get(name).copied().unwrap_or(1) as usize;
            format!("{v:0w$b}")
        };
        let fmt = |v: &Values| {
            v.iter()
                .map(|(k, v)| format!("{k}={}", bin(k, *v)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut s = String::new();
        for t in &self.ticks {
            let _ = writeln!(
                s,
                "phase {} tick {}: in [{}] out [{}]",
                t.phase,
                t.tick,
                fmt(&t.inputs),
                fmt(&t.outputs)
            );
        }
        for r in &self.results {
            let actual = r.actual.map_or("missing".to_string(), |a| bin(&r.name, a));
            let _ = writeln!(
                s,
                "{} phase {} (line {}): {} expected {} got {}",
                if r.passed() { "PASS" } else { "FAIL" },
                r.phase,
                r.line,
                r.name,
                bin(&r.name, r.expected),
                actual
            );
        }
        s
    }
}

/// Runs every phase on `device`. Expectation mismatches are reported, not raised.
pub fn run_scenario(
    device: &mut dyn Device,
    io: &ScenarioIo,
    script: &ScenarioScript,
) -> Result<ScenarioReport, RuntimeError> {
    let mut inputs: Values = io.inputs.iter().map(|(n, _)| (n.clone(), 0)).collect();
    let mut report = ScenarioReport {
        widths: io.inputs.iter().chain(&io.outputs).cloned().collect(),
        ..ScenarioReport::default()
    };
    let mut tick = 0;
    for (p, phase) in script.phases.iter().enumerate() {
        for (name, value) in &phase.set {
            let &(_, w) = io
                .inputs
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| RuntimeError::UnknownInput(name.clone()))?;
            inputs.insert(name.clone(), io.resolve(phase.line, name, value, w)?);
        }
        let mut last = None;
        for _ in 0..phase.ticks {
            let out = device.tick(&inputs)?;
            report.ticks.push(TickRecord {
                phase: p,
                tick,
                inputs: inputs.clone(),
                outputs: out.outputs.clone(),
                state: out.state.clone(),
            });
            tick += 1;
            last = Some(out);
        }
        for e in &phase.expect {
            let width = io
                .outputs
                .iter()
                .find(|(n, _)| *n == e.name)
                .map(|(_, w)| *w)
                .ok_or_else(|| RuntimeError::Scenario {
                    line: phase.line,
                    message: format!("unknown output `{}`", e.name),
                })?;
            let expected = io.resolve(phase.line, &e.name, &e.value, width)?;
            let actual = last.as_ref().and_then(|o| o.outputs.get(&e.name).copied());
            report.results.push(ExpectationResult {
                phase: p,
                line: phase.line,
                name: e.name.clone(),
                expected,
                actual,
            });
        }
    }
    Ok(report)
}
