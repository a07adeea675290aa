// SPDX-License-Identifier: Apache-2.0

//! Gate-netlist JSON: the native schema, and import/export of Yosys-style module JSON.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::elaborate::BitRef;
use super::netlist::{Gate, GateKind, GateNetlist, NetId, NetOrigin, LATCH_C};
use super::SynthError;

pub const NETLIST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct PortBit {
    name: String,
    bit: u32,
    net: NetId,
}

#[derive(Debug, Serialize, Deserialize)]
struct StateEntry {
    name: String,
    bit: u32,
    gate: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct GateEntry {
    id: usize,
    kind: GateKind,
    #[serde(rename = "in")]
    inputs: Vec<NetId>,
    out: NetId,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetlistDoc {
    format_version: u32,
    inputs: Vec<PortBit>,
    outputs: Vec<PortBit>,
    clock: Option<NetId>,
    gates: Vec<GateEntry>,
    #[serde(default)]
    state: Vec<StateEntry>,
}

pub fn netlist_to_json(nl: &GateNetlist) -> String {
    let port = |(b, n): &(BitRef, NetId)| PortBit {
        name: b.name.clone(),
        bit: b.bit,
        net: *n,
    };
    let doc = NetlistDoc {
        format_version: NETLIST_FORMAT_VERSION,
        inputs: nl.inputs.iter().map(port).collect(),
        outputs: nl.outputs.iter().map(port).collect(),
        clock: nl.clock,
        gates: nl
            .gates
            .iter()
            .enumerate()
            .map(|(id, g)| GateEntry {
                id,
                kind: g.kind,
                inputs: g.inputs.clone(),
                out: g.output,
            })
            .collect(),
        state: nl
            .state
            .iter()
            .map(|(b, g)| StateEntry {
                name: b.name.clone(),
                bit: b.bit,
                gate: *g,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("netlist serializes")
}

/// Reads either the native schema (`gates` key) or Yosys module JSON (`modules` key) with
/// the default cell map.
pub fn import_netlist_json(text: &str) -> Result<GateNetlist, SynthError> {
    import_netlist_json_with(text, &CellMap::default())
}

pub fn import_netlist_json_with(text: &str, cells: &CellMap) -> Result<GateNetlist, SynthError> {
    let value: Value = serde_json::from_str(text).map_err(|e| SynthError::Schema(e.to_string()))?;
    if value.get("modules").is_some() {
        import_yosys(&value, cells)
    } else if value.get("gates").is_some() {
        import_native(value)
    } else {
        Err(SynthError::Schema("expected a `gates` or `modules` key".into()))
    }
}

fn import_native(value: Value) -> Result<GateNetlist, SynthError> {
    let doc: NetlistDoc = serde_json::from_value(value).map_err(|e| SynthError::Schema(e.to_string()))?;
    if doc.format_version != NETLIST_FORMAT_VERSION {
        return Err(SynthError::Schema(format!(
            "unsupported format_version {} (expected {NETLIST_FORMAT_VERSION})",
            doc.format_version
        )));
    }
    let mut origins: Vec<Option<NetOrigin>> = Vec::new();
    let mut claim = |net: NetId, o: NetOrigin| -> Result<(), SynthError> {
        if origins.len() <= net {
            origins.resize(net + 1, None);
        }
        if origins[net].is_some() {
            return Err(SynthError::Schema(format!("net {net} has more than one driver")));
        }
        origins[net] = Some(o);
        Ok(())
    };
    for p in &doc.inputs {
        claim(p.net, NetOrigin::Input(BitRef::new(&p.name, p.bit)))?;
    }
    if let Some(c) = doc.clock {
        claim(c, NetOrigin::Clock)?;
    }
    let mut gates = Vec::with_capacity(doc.gates.len());
    for (k, g) in doc.gates.iter().enumerate() {
        if g.id != k {
            return Err(SynthError::Schema(format!(
                "gate ids must be dense; found {} at position {k}",
                g.id
            )));
        }
        claim(g.out, NetOrigin::Gate(k))?;
        gates.push(Gate {
            kind: g.kind,
            inputs: g.inputs.clone(),
            output: g.out,
        });
    }
    let max_ref = doc
        .gates
        .iter()
        .flat_map(|g| g.inputs.iter())
        .chain(doc.outputs.iter().map(|p| &p.net))
        .copied()
        .max();
    if let Some(m) = max_ref {
        if m >= origins.len() {
            return Err(SynthError::Schema(format!("net {m} is never driven")));
        }
    }
    let origins = origins
        .into_iter()
        .enumerate()
        .map(|(n, o)| o.ok_or_else(|| SynthError::Schema(format!("net {n} is never driven"))))
        .collect::<Result<Vec<_>, _>>()?;
    let nl = GateNetlist {
        origins,
        gates,
        inputs: doc
            .inputs
            .iter()
            .map(|p| (BitRef::new(&p.name, p.bit), p.net))
            .collect(),
        outputs: doc
            .outputs
            .iter()
            .map(|p| (BitRef::new(&p.name, p.bit), p.net))
            .collect(),
        clock: doc.clock,
        state: doc
            .state
            .iter()
            .map(|s| (BitRef::new(&s.name, s.bit), s.gate))
            .collect(),
    };
    nl.check()?;
    Ok(nl)
}

/// How Yosys cell types map onto the gate basis: kind, input pin names (in gate pin order)
/// and output pin name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMap {
    pub cells: BTreeMap<String, CellSpec>,
    pub clock_port: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub kind: GateKind,
    pub inputs: Vec<String>,
    pub output: String,
}

impl Default for CellMap {
    fn default() -> Self {
        let spec = |kind, inputs: &[&str], output: &str| CellSpec {
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            output: output.into(),
        };
        let mut cells = BTreeMap::new();
        cells.insert("$_NOR_".into(), spec(GateKind::Nor2, &["A", "B"], "Y"));
        cells.insert("$_NOT_".into(), spec(GateKind::Not, &["A"], "Y"));
        cells.insert("$_BUF_".into(), spec(GateKind::Buf, &["A"], "Y"));
        cells.insert("$_DFF_P_".into(), spec(GateKind::Dlatch, &["D", "C"], "Q"));
        cells.insert("$_DLATCH_P_".into(), spec(GateKind::Dlatch, &["D", "E"], "Q"));
        CellMap {
            cells,
            clock_port: "clk".into(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum YBit {
    Sig(u64),
    Zero,
    One,
}

fn ybits(v: &Value, what: &str) -> Result<Vec<YBit>, SynthError> {
    let arr = v
        .as_array()
        .ok_or_else(|| SynthError::Schema(format!("{what}: expected a bit array")))?;
    arr.iter()
        .map(|b| match b {
            Value::Number(n) => n
                .as_u64()
                .map(YBit::Sig)
                .ok_or_else(|| SynthError::Schema(format!("{what}: invalid bit {n}"))),
            Value::String(s) if s == "0" => Ok(YBit::Zero),
            Value::String(s) if s == "1" => Ok(YBit::One),
            other => Err(SynthError::Schema(format!("{what}: unsupported bit {other}"))),
        })
        .collect()
}

fn import_yosys(value: &Value, map: &CellMap) -> Result<GateNetlist, SynthError> {
    let modules = value["modules"]
        .as_object()
        .ok_or_else(|| SynthError::Schema("`modules` must be an object".into()))?;
    let (top_name, top) = match modules.len() {
        1 => modules.iter().next().expect("one module"),
        _ => modules
            .iter()
            .find(|(_, m)| m["attributes"]["top"].is_string() || m["attributes"]["top"].is_number())
            .ok_or_else(|| SynthError::Schema("several modules and none marked top".into()))?,
    };
    let ports = top["ports"]
        .as_object()
        .ok_or_else(|| SynthError::Schema(format!("module `{top_name}` has no `ports` object")))?;
    let cells = match top.get("cells") {
        Some(c) => c
            .as_object()
            .ok_or_else(|| SynthError::Schema("`cells` must be an object".into()))?
            .clone(),
        None => Default::default(),
    };

    let mut nl = GateNetlist::new();
    let mut net_of: HashMap<YBit, NetId> = HashMap::new();
    let mut outputs = Vec::new();
    for (name, port) in ports {
        let dir = port["direction"].as_str().unwrap_or("");
        let bits = ybits(&port["bits"], &format!("port `{name}`"))?;
        match dir {
            "input" if *name == map.clock_port => {
                let c = nl.add_clock();
                for b in bits {
                    net_of.insert(b, c);
                }
            }
            "input" => {
                for (k, b) in bits.into_iter().enumerate() {
                    let n = nl.add_input(BitRef::new(name, k as u32));
                    if net_of.insert(b, n).is_some() {
                        return Err(SynthError::Schema(format!("bit of input `{name}` is shared")));
                    }
                }
            }
            "output" => outputs.push((name.clone(), bits)),
            other => {
                return Err(SynthError::Schema(format!(
                    "port `{name}` has unsupported direction `{other}`"
                )))
            }
        }
    }

    struct Pending {
        gate: usize,
        pins: Vec<YBit>,
        name: String,
    }
    let mut pending = Vec::new();
    for (cname, cell) in &cells {
        let ty = cell["type"]
            .as_str()
            .ok_or_else(|| SynthError::Schema(format!("cell `{cname}` has no type")))?;
        let spec = map
            .cells
            .get(ty)
            .ok_or_else(|| SynthError::UnsupportedCell(ty.to_string()))?;
        let conns = &cell["connections"];
        let pin = |p: &str| -> Result<YBit, SynthError> {
            let bits = ybits(&conns[p], &format!("cell `{cname}` pin {p}"))?;
            match bits.as_slice() {
                [b] => Ok(*b),
                _ => Err(SynthError::Schema(format!("cell `{cname}` pin {p} must be 1 bit"))),
            }
        };
        let pins = spec.inputs.iter().map(|p| pin(p)).collect::<Result<Vec<_>, _>>()?;
        let out = pin(&spec.output)?;
        let placeholder = vec![0; spec.kind.arity()];
        let n = nl.add_gate(spec.kind, placeholder);
        let gate = nl.gates.len() - 1;
        match out {
            YBit::Sig(_) => {
                if net_of.insert(out, n).is_some() {
                    return Err(SynthError::Schema(format!(
                        "cell `{cname}` drives a bit that already has a driver"
                    )));
                }
            }
            _ => return Err(SynthError::Schema(format!("cell `{cname}` drives a constant"))),
        }
        pending.push(Pending {
            gate,
            pins,
            name: cname.clone(),
        });
    }

    let mut resolve = |nl: &mut GateNetlist, b: YBit, what: &str| -> Result<NetId, SynthError> {
        if let Some(&n) = net_of.get(&b) {
            return Ok(n);
        }
        let n = match b {
            YBit::Zero => nl.add_gate(GateKind::Const0, vec![]),
            YBit::One => nl.add_gate(GateKind::Const1, vec![]),
            YBit::Sig(id) => return Err(SynthError::Schema(format!("{what} reads undriven bit {id}"))),
        };
        net_of.insert(b, n);
        Ok(n)
    };
    for p in &pending {
        for (k, &b) in p.pins.iter().enumerate() {
            let n = resolve(&mut nl, b, &format!("cell `{}`", p.name))?;
            nl.gates[p.gate].inputs[k] = n;
        }
    }
    for (name, bits) in outputs {
        for (k, b) in bits.into_iter().enumerate() {
            let n = resolve(&mut nl, b, &format!("output `{name}`"))?;
            nl.outputs.push((BitRef::new(&name, k as u32), n));
        }
    }
    // Register names come from `netnames` entries that cover latch outputs.
    let mut named: HashMap<NetId, BitRef> = HashMap::new();
    if let Some(names) = top.get("netnames").and_then(Value::as_object) {
        for (name, entry) in names {
            if entry["hide_name"].as_u64() == Some(1) {
                continue;
            }
            for (k, b) in ybits(&entry["bits"], &format!("netname `{name}`"))?
                .into_iter()
                .enumerate()
            {
                if let Some(&n) = net_of.get(&b) {
                    named.entry(n).or_insert_with(|| BitRef::new(name, k as u32));
                }
            }
        }
    }
    for p in &pending {
        if nl.gates[p.gate].kind != GateKind::Dlatch {
            continue;
        }
        let q = nl.gates[p.gate].output;
        let reg = named
            .get(&q)
            .cloned()
            .or_else(|| nl.outputs.iter().find(|(_, n)| *n == q).map(|(b, _)| b.clone()))
            .unwrap_or_else(|| BitRef::new(&p.name, 0));
        nl.state.push((reg, p.gate));
        if !nl.is_clock_net(nl.gates[p.gate].inputs[LATCH_C]) {
            return Err(SynthError::Schema(format!(
                "latch `{}` is not clocked by `{}`",
                p.name, map.clock_port
            )));
        }
    }
    nl.check()?;
    Ok(nl)
}

/// Writes the netlist as a single Yosys-style module. Constant gates become `"0"`/`"1"` bits.
pub fn netlist_to_yosys_json(nl: &GateNetlist, module: &str) -> String {
    let bit = |n: NetId| -> Value {
        match nl.driver(n).map(|g| nl.gates[g].kind) {
            Some(GateKind::Const0) => json!("0"),
            Some(GateKind::Const1) => json!("1"),
            _ => json!(n + 2),
        }
    };
    let mut ports = serde_json::Map::new();
    let group = |list: &[(BitRef, NetId)], dir: &str, ports: &mut serde_json::Map<String, Value>| {
        let mut by_name: BTreeMap<&str, Vec<(u32, NetId)>> = BTreeMap::new();
        for (b, n) in list {
            by_name.entry(&b.name).or_default().push((b.bit, *n));
        }
        for (name, mut bits) in by_name {
            bits.sort();
            ports.insert(
                name.to_string(),
                json!({"direction": dir, "bits": bits.iter().map(|&(_, n)| bit(n)).collect::<Vec<_>>()}),
            );
        }
    };
    group(&nl.inputs, "input", &mut ports);
    group(&nl.outputs, "output", &mut ports);
    if let Some(c) = nl.clock {
        ports.insert("clk".into(), json!({"direction": "input", "bits": [c + 2]}));
    }
    let mut cells = serde_json::Map::new();
    for (k, g) in nl.gates.iter().enumerate() {
        let (ty, pins): (&str, &[&str]) = match g.kind {
            GateKind::Nor2 => ("$_NOR_", &["A", "B"]),
            GateKind::Not => ("$_NOT_", &["A"]),
            GateKind::Buf => ("$_BUF_", &["A"]),
            GateKind::Dlatch => ("$_DLATCH_P_", &["D", "E"]),
            GateKind::Const0 | GateKind::Const1 => continue,
        };
        let out_pin = if g.kind == GateKind::Dlatch { "Q" } else { "Y" };
        let mut conns = serde_json::Map::new();
        for (p, &n) in pins.iter().zip(&g.inputs) {
            conns.insert(p.to_string(), json!([bit(n)]));
        }
        conns.insert(out_pin.into(), json!([g.output + 2]));
        cells.insert(format!("g{k:05}"), json!({"type": ty, "connections": conns}));
    }
    let mut netnames = serde_json::Map::new();
    let mut regs: BTreeMap<&str, Vec<(u32, NetId)>> = BTreeMap::new();
    for (b, g) in &nl.state {
        regs.entry(&b.name).or_default().push((b.bit, nl.gates[*g].output));
    }
    for (name, mut bits) in regs {
        bits.sort();
        // Netname bits are positional, so only dense registers are named.
        if bits.iter().enumerate().all(|(k, &(b, _))| b as usize == k) {
            netnames.insert(
                name.to_string(),
                json!({"hide_name": 0, "bits": bits.iter().map(|&(_, n)| n + 2).collect::<Vec<_>>()}),
            );
        }
    }
    let doc = json!({"modules": {module: {"ports": ports, "cells": cells, "netnames": netnames}}});
    serde_json::to_string_pretty(&doc).expect("module serializes")
}
