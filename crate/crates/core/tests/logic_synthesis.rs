// SPDX-License-Identifier: Apache-2.0

use mechsynth::mdl::{parse_source, BehaviorAst};
use mechsynth::synth::aig::Aig;
use mechsynth::synth::{
    check_equivalence, clock_skew, elaborate, import_netlist_json, limit_fanout, map_to_basis, netlist_to_json,
    netlist_to_yosys_json, synthesize, BitRef, FunctionTable, GateKind, GateNetlist, Interpreter, SynthError,
    SynthOptions, Values, LATCH_D,
};
use proptest::prelude::*;

const MAZE: &str = include_str!("../../../mdl/mazerobot.mdl");
const LOCK: &str = include_str!("../../../mdl/lock.mdl");

fn behavior(src: &str) -> BehaviorAst {
    parse_source(src).unwrap().behavior
}

/// Wraps a module body in a throwaway document; ports are 1-bit inputs `a`,`b`,`c` and
/// output reg `q`.
fn tiny(body: &str) -> BehaviorAst {
    let src = format!(
        "mechanicalmodule t();
         boundary {{ line l1 {{(0,4),(4,4)}}, line l2 {{(4,4),(4,0)}}, line l3 {{(4,0),(0,0)}}, line l4 {{(0,0),(0,4)}} }};
         module m(input wire clk, input wire a, input wire b, input wire c, output reg q);
           always @(posedge clk) begin {body} end
         endmodule
         endmechanicalmodule"
    );
    behavior(&src)
}

fn port_width(ast: &BehaviorAst, name: &str) -> u32 {
    ast.port(name)
        .map(|p| p.width())
        .or_else(|| ast.reg(name).map(|r| r.width()))
        .unwrap()
}

/// One clock edge of the netlist: evaluates the latch D nets for the given input and state
/// values and returns them as register values.
fn netlist_step(nl: &GateNetlist, inputs: &Values, state: &Values) -> Values {
    let in_bits: Vec<bool> = nl
        .inputs
        .iter()
        .map(|(b, _)| (inputs[&b.name] >> b.bit) & 1 == 1)
        .collect();
    let latches = nl.latches();
    let mut latch_bits = vec![false; latches.len()];
    for (b, g) in &nl.state {
        let k = latches.iter().position(|x| x == g).unwrap();
        latch_bits[k] = (state[&b.name] >> b.bit) & 1 == 1;
    }
    let nets = nl.eval(&in_bits, &latch_bits).unwrap();
    let mut next = Values::new();
    for (b, g) in &nl.state {
        let d = nets[nl.gates[*g].inputs[LATCH_D]];
        *next.entry(b.name.clone()).or_default() |= u64::from(d) << b.bit;
    }
    next
}

/// Exhaustively compares netlist and interpreter over every input and register value.
/// Returns the number of cases checked.
fn compare_with_interpreter(ast: &BehaviorAst, nl: &GateNetlist) -> usize {
    let interp = Interpreter::new(ast);
    // Registers pruned from the netlist cannot reach an output; they stay at reset.
    let reset = interp.reset_state();
    let regs: Vec<String> = {
        let mut v: Vec<String> = nl.state.iter().map(|(b, _)| b.name.clone()).collect();
        v.sort();
        v.dedup();
        v
    };
    let ins: Vec<String> = {
        let mut v: Vec<String> = nl.inputs.iter().map(|(b, _)| b.name.clone()).collect();
        v.sort();
        v.dedup();
        v
    };
    let fields: Vec<(String, u32)> = ins
        .iter()
        .chain(&regs)
        .map(|n| (n.clone(), port_width(ast, n)))
        .collect();
    let total: u32 = fields.iter().map(|f| f.1).sum();
    assert!(total <= 16);
    for code in 0u64..1 << total {
        let mut shift = 0;
        let mut inputs = Values::new();
        let mut state = reset.clone();
        for (k, (name, w)) in fields.iter().enumerate() {
            let v = (code >> shift) & ((1 << w) - 1);
            shift += w;
            if k < ins.len() {
                inputs.insert(name.clone(), v);
            } else {
                state.insert(name.clone(), v);
            }
        }
        let want = interp.step(&state, &inputs);
        let got = netlist_step(nl, &inputs, &state);
        for (b, _) in &nl.state {
            assert_eq!(
                (got[&b.name] >> b.bit) & 1,
                (want[&b.name] >> b.bit) & 1,
                "{b} differs for inputs {inputs:?} state {state:?}"
            );
        }
        // Output ports read the latch of the same register bit.
        let nets = {
            let in_bits: Vec<bool> = nl
                .inputs
                .iter()
                .map(|(b, _)| (inputs[&b.name] >> b.bit) & 1 == 1)
                .collect();
            let latches = nl.latches();
            let mut lb = vec![false; latches.len()];
            for (b, g) in &nl.state {
                lb[latches.iter().position(|x| x == g).unwrap()] = (state[&b.name] >> b.bit) & 1 == 1;
            }
            nl.eval(&in_bits, &lb).unwrap()
        };
        for (b, n) in &nl.outputs {
            assert_eq!(u64::from(nets[*n]), (state[&b.name] >> b.bit) & 1, "output {b}");
        }
    }
    1 << total
}

#[test]
fn maze_netlist_matches_interpreter_on_all_64_cases() {
    let ast = behavior(MAZE);
    let s = synthesize(&ast, &SynthOptions::default()).unwrap();
    assert_eq!(s.table.total_bits(), 6);
    assert_eq!(compare_with_interpreter(&ast, &s.netlist), 64);
    assert!(check_equivalence(&s.netlist, &s.table).unwrap());
    assert!(check_equivalence(&s.mapped, &s.table).unwrap());
}

#[test]
fn lock_netlist_matches_interpreter_on_all_2048_cases() {
    let ast = behavior(LOCK);
    let s = synthesize(&ast, &SynthOptions::default()).unwrap();
    assert_eq!(s.table.total_bits(), 11);
    assert_eq!(compare_with_interpreter(&ast, &s.netlist), 2048);
    assert!(check_equivalence(&s.netlist, &s.table).unwrap());
}

#[test]
fn synthesized_netlists_respect_fanout_and_are_acyclic() {
    for src in [MAZE, LOCK] {
        let s = synthesize(&behavior(src), &SynthOptions::default()).unwrap();
        assert!(s.netlist.max_fanout() <= 2);
        s.netlist.comb_order().unwrap();
        let (a, b) = (s.mapped.counts(), s.netlist.counts());
        assert_eq!(b.total() - a.total(), b.buf - a.buf);
        let (lo, hi) = clock_skew(&s.netlist).unwrap();
        assert_eq!(lo, hi, "clock tree must be balanced");
        for (_, n) in &s.netlist.outputs {
            let g = s.netlist.driver(*n).unwrap();
            assert!(matches!(s.netlist.gates[g].kind, GateKind::Buf | GateKind::Dlatch));
        }
    }
}

#[test]
fn five_sink_net_gets_a_buffer_tree() {
    let mut nl = GateNetlist::new();
    let a = nl.add_input(BitRef::new("a", 0));
    let outs: Vec<_> = (0..5).map(|_| nl.add_gate(GateKind::Not, vec![a])).collect();
    for (k, &o) in outs.iter().enumerate() {
        nl.outputs.push((BitRef::new("y", k as u32), o));
    }
    let limited = limit_fanout(&nl, 2);
    assert!(limited.counts().buf >= 3);
    assert!(limited.max_fanout() <= 2);
    assert_eq!(limited.counts().total() - nl.counts().total(), limited.counts().buf);
    for x in [false, true] {
        let before = nl.eval(&[x], &[]).unwrap();
        let after = limited.eval(&[x], &[]).unwrap();
        for ((_, n0), (_, n1)) in nl.outputs.iter().zip(&limited.outputs) {
            assert_eq!(before[*n0], after[*n1]);
        }
    }
    // Buffer depth is ceil(log2(5)) - 1 = 2 at most above every sink.
    let depths = mechsynth::synth::fanout::sink_depths(&limited, a);
    assert!(depths.iter().all(|&d| d <= 2), "{depths:?}");
}

#[test]
fn small_fanouts_are_unchanged() {
    for sinks in 1..=2 {
        let mut nl = GateNetlist::new();
        let a = nl.add_input(BitRef::new("a", 0));
        for _ in 0..sinks {
            nl.add_gate(GateKind::Not, vec![a]);
        }
        assert_eq!(limit_fanout(&nl, 2), nl);
    }
}

#[test]
fn two_contending_sinks_are_separated() {
    let mut nl = GateNetlist::new();
    let a = nl.add_input(BitRef::new("a", 0));
    let b = nl.add_input(BitRef::new("b", 0));
    let y0 = nl.add_gate(GateKind::Nor2, vec![a, b]);
    let y1 = nl.add_gate(GateKind::Nor2, vec![a, b]);
    nl.outputs.push((BitRef::new("y", 0), y0));
    nl.outputs.push((BitRef::new("y", 1), y1));
    let limited = limit_fanout(&nl, 2);
    let sinks = limited.sinks();
    for (net, pins) in sinks.iter().enumerate() {
        let nor_pins = pins
            .iter()
            .filter(|(g, _)| limited.gates[*g].kind == GateKind::Nor2)
            .count();
        assert!(nor_pins <= 1, "net {net} feeds {nor_pins} NOR inputs");
    }
    for x in 0..4u8 {
        let bits = [x & 1 == 1, x & 2 == 2];
        let v = limited.eval(&bits, &[]).unwrap();
        assert_eq!(v[limited.outputs[0].1], !(bits[0] || bits[1]));
        assert_eq!(v[limited.outputs[1].1], !(bits[0] || bits[1]));
    }
}

#[test]
fn replacing_a_nor_by_a_buf_breaks_equivalence() {
    let s = synthesize(&behavior(MAZE), &SynthOptions::default()).unwrap();
    let mut detected = 0;
    let nors: Vec<usize> = (0..s.netlist.gates.len())
        .filter(|&g| s.netlist.gates[g].kind == GateKind::Nor2)
        .collect();
    for &g in &nors {
        let mut m = s.netlist.clone();
        m.gates[g].kind = GateKind::Buf;
        m.gates[g].inputs.truncate(1);
        if !check_equivalence(&m, &s.table).unwrap() {
            detected += 1;
        }
    }
    assert!(!nors.is_empty());
    assert!(detected > 0);
    let mut m = s.netlist.clone();
    m.gates[nors[0]].kind = GateKind::Buf;
    m.gates[nors[0]].inputs.truncate(1);
    assert!(!check_equivalence(&m, &s.table).unwrap());
}

#[test]
fn xnor_compare_maps_correctly() {
    let ast = tiny("q <= (a == b);");
    let table = elaborate(&ast).unwrap();
    let nl = map_to_basis(&table);
    assert!(check_equivalence(&nl, &table).unwrap());
    let latch = nl.state[0].1;
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        let v = nl.eval(&[a, b], &[false]).unwrap();
        assert_eq!(v[nl.gates[latch].inputs[LATCH_D]], a == b);
    }
}

#[test]
fn nor_of_inputs_is_one_gate() {
    let ast = tiny("q <= !(a | b);");
    let nl = map_to_basis(&elaborate(&ast).unwrap());
    let c = nl.counts();
    assert_eq!((c.nor2, c.not, c.dlatch), (1, 0, 1));
}

#[test]
fn constant_zero_feeds_latch() {
    let nl = map_to_basis(&elaborate(&tiny("q <= 1'b0;")).unwrap());
    let latch = nl.state[0].1;
    let d = nl.gates[latch].inputs[LATCH_D];
    assert_eq!(nl.gates[nl.driver(d).unwrap()].kind, GateKind::Const0);
}

#[test]
fn self_assignment_holds() {
    let table = elaborate(&tiny("q <= q;")).unwrap();
    assert_eq!(table.state.len(), 1);
    assert_eq!(table.state[0].next, table.state[0].current);
    let table = elaborate(&tiny("if (a) q <= b;")).unwrap();
    for s in [false, true] {
        assert_eq!(table.step(&[false, true], &[s]), vec![s]);
    }
}

#[test]
fn mixing_blocking_and_nonblocking_is_rejected() {
    let err = elaborate(&tiny("q = a; q <= b;")).unwrap_err();
    assert!(matches!(err, SynthError::MixedAssignment(_)), "{err}");
}

#[test]
fn empty_netlist_equals_empty_table() {
    let table = FunctionTable {
        aig: Aig::new(),
        inputs: vec![],
        state: vec![],
        outputs: vec![],
    };
    assert!(check_equivalence(&GateNetlist::new(), &table).unwrap());
}

#[test]
fn exported_maze_netlist_round_trips() {
    let s = synthesize(&behavior(MAZE), &SynthOptions::default()).unwrap();
    let yosys = import_netlist_json(&netlist_to_yosys_json(&s.netlist, "mazerobot")).unwrap();
    assert!(check_equivalence(&yosys, &s.table).unwrap());
    let native = import_netlist_json(&netlist_to_json(&s.netlist)).unwrap();
    assert_eq!(native, s.netlist);
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("a".to_string()),
        Just("b".to_string()),
        Just("c".to_string()),
        Just("q".to_string()),
        Just("1'b0".to_string()),
        Just("1'b1".to_string()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| format!("!({e})")),
            inner.clone().prop_map(|e| format!("~({e})")),
            (inner.clone(), inner, 0..7usize).prop_map(|(l, r, k)| {
                let op = ["&&", "||", "&", "|", "^", "==", "!="][k];
                format!("({l}) {op} ({r})")
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn random_expressions_synthesize_equivalently(e in expr(), g in expr()) {
        let ast = tiny(&format!("if ({g}) q <= {e};"));
        let s = synthesize(&ast, &SynthOptions::default()).unwrap();
        prop_assert!(s.netlist.max_fanout() <= 2);
        if !s.netlist.state.is_empty() {
            compare_with_interpreter(&ast, &s.netlist);
        }
        prop_assert!(check_equivalence(&s.netlist, &s.table).unwrap());
    }
}
