// SPDX-License-Identifier: Apache-2.0

//! Buffer insertion: per-I/O isolation buffers and fanout-limiting buffer trees.
//!
//! Besides the sink limit, a net may feed at most one *contending* pin: a NOR input or a
//! latch D input. Those cells push back on their driver when their other input disagrees,
//! and two such loads on one mass can overpower it. BUF/NOT inputs and latch clock pins are
//! followers and may share a net.

use super::netlist::{GateKind, GateNetlist, NetId, Pin, LATCH_C, LATCH_D};

/// Most contending pins a single net may feed.
pub const MAX_CONTENDING: usize = 1;

fn is_contending(nl: &GateNetlist, (g, pin): Pin) -> bool {
    match nl.gates[g].kind {
        GateKind::Nor2 => true,
        GateKind::Dlatch => pin == LATCH_D,
        _ => false,
    }
}

fn add_buf(nl: &mut GateNetlist, src: NetId) -> NetId {
    nl.add_gate(GateKind::Buf, vec![src])
}

fn connect(nl: &mut GateNetlist, (g, pin): Pin, net: NetId) {
    nl.gates[g].inputs[pin] = net;
}

/// Gives each sensor bit its own BUF before it fans out and each actuator bit its own BUF
/// after its driver, so I/O masses only ever touch one cell.
pub fn insert_io_buffers(nl: &GateNetlist) -> GateNetlist {
    let mut out = nl.clone();
    let sinks = out.sinks();
    for k in 0..out.inputs.len() {
        let net = out.inputs[k].1;
        if sinks[net].is_empty() {
            continue;
        }
        let b = add_buf(&mut out, net);
        for &pin in &sinks[net] {
            connect(&mut out, pin, b);
        }
    }
    for k in 0..out.outputs.len() {
        let net = out.outputs[k].1;
        out.outputs[k].1 = add_buf(&mut out, net);
    }
    out
}

/// Rebuilds every over-subscribed net as a buffer tree so that each net feeds at most
/// `max_fanout` pins, of which at most [`MAX_CONTENDING`] contend. The clock net gets a
/// tree with every latch at the same buffer depth.
pub fn limit_fanout(nl: &GateNetlist, max_fanout: usize) -> GateNetlist {
    assert!(max_fanout >= 2, "fanout limit must be at least 2");
    let mut out = nl.clone();
    let sinks = out.sinks();
    for (net, pins) in sinks.into_iter().enumerate() {
        let contending = pins.iter().filter(|&&p| is_contending(&out, p)).count();
        if pins.len() <= max_fanout && contending <= MAX_CONTENDING {
            continue;
        }
        if Some(net) == out.clock && contending == 0 {
            let mut d = 0;
            while max_fanout.pow(d + 1) < pins.len() {
                d += 1;
            }
            balanced(&mut out, net, &pins, d, max_fanout);
        } else {
            let ordered = interleave(&out, pins);
            tree(&mut out, net, &ordered, max_fanout);
        }
    }
    out
}

/// Orders pins so contending ones are spread across the tree's leaves.
fn interleave(nl: &GateNetlist, pins: Vec<Pin>) -> Vec<Pin> {
    let (mut c, mut f): (Vec<Pin>, Vec<Pin>) = pins.into_iter().partition(|&p| is_contending(nl, p));
    c.reverse();
    f.reverse();
    let mut out = Vec::with_capacity(c.len() + f.len());
    while !c.is_empty() || !f.is_empty() {
        if let Some(p) = c.pop() {
            out.push(p);
        }
        if let Some(p) = f.pop() {
            out.push(p);
        }
    }
    out
}

fn split(pins: &[Pin], parts: usize) -> Vec<&[Pin]> {
    let n = pins.len();
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for k in 0..parts {
        let len = n / parts + usize::from(k < n % parts);
        if len > 0 {
            out.push(&pins[start..start + len]);
        }
        start += len;
    }
    out
}

fn tree(nl: &mut GateNetlist, src: NetId, pins: &[Pin], max_fanout: usize) {
    let contending = pins.iter().filter(|&&p| is_contending(nl, p)).count();
    if pins.len() <= max_fanout && contending <= MAX_CONTENDING {
        for &p in pins {
            connect(nl, p, src);
        }
        return;
    }
    if pins.len() <= max_fanout {
        // Few enough pins but too many contend: keep one direct, buffer the others.
        let (first, rest) = pins.split_first().expect("non-empty");
        connect(nl, *first, src);
        let b = add_buf(nl, src);
        tree(nl, b, rest, max_fanout);
        return;
    }
    let mut direct_contending = 0;
    for group in split(pins, max_fanout) {
        if let [pin] = group {
            let contends = is_contending(nl, *pin);
            if !contends || direct_contending < MAX_CONTENDING {
                direct_contending += usize::from(contends);
                connect(nl, *pin, src);
                continue;
            }
        }
        let b = add_buf(nl, src);
        tree(nl, b, group, max_fanout);
    }
}

/// Tree with every pin exactly `depth` buffers below `src`.
fn balanced(nl: &mut GateNetlist, src: NetId, pins: &[Pin], depth: u32, max_fanout: usize) {
    if depth == 0 {
        for &p in pins {
            connect(nl, p, src);
        }
        return;
    }
    for group in split(pins, max_fanout) {
        let b = add_buf(nl, src);
        balanced(nl, b, group, depth - 1, max_fanout);
    }
}

/// BUF depth of every non-BUF pin reachable from `root` through BUF gates.
pub fn sink_depths(nl: &GateNetlist, root: NetId) -> Vec<usize> {
    let sinks = nl.sinks();
    let mut out = Vec::new();
    let mut stack = vec![(root, 0usize)];
    while let Some((net, d)) = stack.pop() {
        for &(g, _) in &sinks[net] {
            let gate = &nl.gates[g];
            if gate.kind == GateKind::Buf {
                stack.push((gate.output, d + 1));
            } else {
                out.push(d);
            }
        }
    }
    out
}

/// Smallest and largest BUF depth of latch clock pins below the clock net.
pub fn clock_skew(nl: &GateNetlist) -> Option<(usize, usize)> {
    let clk = nl.clock?;
    let sinks = nl.sinks();
    let mut depths = Vec::new();
    let mut stack = vec![(clk, 0usize)];
    while let Some((net, d)) = stack.pop() {
        for &(g, pin) in &sinks[net] {
            match nl.gates[g].kind {
                GateKind::Buf => stack.push((nl.gates[g].output, d + 1)),
                GateKind::Dlatch if pin == LATCH_C => depths.push(d),
                _ => {}
            }
        }
    }
    Some((*depths.iter().min()?, *depths.iter().max()?))
}
