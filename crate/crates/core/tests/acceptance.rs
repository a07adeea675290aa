// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the libtest harness so
//! the summary is always printed.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mechsynth::compile::{build_network, compile_source, load_document, CompileConfig};
use mechsynth::dynamics::{SimParams, Simulator, System};
use mechsynth::mdl::{BehaviorAst, MdlDocument, Point};
use mechsynth::place::{
    assign_points, count_crossings, network_edges, pin_ios, reduce_crossings, SwapParams, ASSIGN_CANDIDATES,
};
use mechsynth::runtime::{
    parse_scenario, reference_maze_run, run_maze, run_scenario, Device, Dir, MazeBindings, MazeWorld, NetlistDevice,
    PhysicalDevice, ScenarioIo,
};
use mechsynth::synth::{check_equivalence, GateNetlist, Interpreter, Synthesis, Values, LATCH_D};
use mechsynth::techmap::{
    cell_buf, cell_dlatch, cell_nor, cell_not, compose_coprime_clocks, generate_clock, CouplingKind, MassSpringNetwork,
    MassTag, Phase,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAZE: &str = include_str!("../../../mdl/mazerobot.mdl");
const LOCK: &str = include_str!("../../../mdl/lock.mdl");
const MAZE_WORLD: &str = include_str!("../../../assets/maze_8x8.txt");
const LOCK_SCRIPT: &str = include_str!("../../../assets/lock_cycle.scn");

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn build(src: &str) -> (MdlDocument, Synthesis, MassSpringNetwork) {
    let (doc, _) = load_document(src, "acceptance.mdl").expect("example parses");
    let (s, n, _) = build_network(&doc, &CompileConfig::default()).expect("example compiles");
    (doc, s, n)
}

fn force(b: bool) -> f64 {
    if b {
        1.0
    } else {
        -1.0
    }
}

/// Readouts of `probe` at samples 0..samples under constant input forces.
fn readouts(n: &MassSpringNetwork, inputs: &[(usize, bool)], probe: usize, samples: u64) -> Vec<f64> {
    let mut sim = Simulator::new(n, &SimParams::default()).unwrap();
    for &(m, b) in inputs {
        sim.set_force(m, force(b));
    }
    (0..samples)
        .map(|k| {
            sim.run_to_sample(k).unwrap();
            sim.x(probe)
        })
        .collect()
}

// 1. Gate truth tables.
fn gates() -> Outcome {
    let mut checked = 0;
    let mut weakest = f64::INFINITY;
    type Cell = fn(&mut MassSpringNetwork, &[usize], usize);
    let cells: [(&str, usize, Cell, fn(&[bool]) -> bool); 3] = [
        (
            "NOR",
            2,
            |n, i, o| {
                cell_nor(n, i[0], i[1], o);
            },
            |v| !(v[0] || v[1]),
        ),
        (
            "NOT",
            1,
            |n, i, o| {
                cell_not(n, i[0], o);
            },
            |v| !v[0],
        ),
        (
            "BUF",
            1,
            |n, i, o| {
                cell_buf(n, i[0], o);
            },
            |v| v[0],
        ),
    ];
    for (name, arity, cell, truth) in cells {
        for code in 0..1u32 << arity {
            let bits: Vec<bool> = (0..arity).map(|k| (code >> k) & 1 == 1).collect();
            let mut n = MassSpringNetwork::new();
            let ins: Vec<usize> = (0..arity)
                .map(|_| n.add_mass(Phase::InPhase, MassTag::Sensor))
                .collect();
            let o = n.add_mass(Phase::InPhase, MassTag::Output);
            cell(&mut n, &ins, o);
            let forced: Vec<(usize, bool)> = ins.iter().copied().zip(bits.iter().copied()).collect();
            let x = *readouts(&n, &forced, o, 3).last().unwrap();
            ensure(x.abs() > 0.5, || format!("{name}{bits:?} ambiguous readout {x:.3}"))?;
            ensure((x > 0.0) == truth(&bits), || format!("{name}{bits:?} read {x:.3}"))?;
            weakest = weakest.min(x.abs());
            checked += 1;
        }
    }
    Ok(format!("{checked} input combinations, smallest |x| {weakest:.3}"))
}

// 2. D-latch.
fn latch() -> Outcome {
    let period = 4;
    let mut n = MassSpringNetwork::new();
    let c = generate_clock(&mut n, period, 0).unwrap();
    let d = n.add_mass(Phase::InPhase, MassTag::Sensor);
    let q = n.add_mass(Phase::InPhase, MassTag::Output);
    cell_dlatch(&mut n, d, c, q);
    let mut sim = Simulator::new(&n, &SimParams::default()).unwrap();
    // D changes every 3 cycles, out of step with the clock, so Q must hold between ticks.
    let pattern = [
        true, true, false, true, false, false, true, false, true, true, false, false,
    ];
    let cycles = 3 * pattern.len() as u64;
    let mut held = None;
    let mut ticks = 0;
    let mut holds = 0;
    for k in 0..cycles {
        let dv = pattern[(k / 3) as usize];
        sim.set_force(d, force(dv));
        sim.run_to_sample(k).unwrap();
        let tick = sim.logic(c);
        ensure(tick == (k % period as u64 == 0), || {
            format!("clock read {tick} at cycle {k}")
        })?;
        if let Some(h) = held {
            ensure(sim.logic(q) == h, || {
                format!("Q = {} at cycle {k}, expected {h}", sim.logic(q))
            })?;
            if !tick && sim.logic(d) != h {
                holds += 1;
            }
        }
        if tick {
            held = Some(sim.logic(d));
            ticks += 1;
        }
    }
    ensure(ticks >= 5, || format!("only {ticks} ticks"))?;
    ensure(holds > 0, || "stimulus never tested holding".into())?;
    Ok(format!("{ticks} ticks, Q held against a differing D on {holds} cycles"))
}

fn tick_cycles(n: &MassSpringNetwork, probe: usize, cycles: u64) -> Vec<u64> {
    let r = readouts(n, &[], probe, cycles);
    (0..cycles).filter(|&k| r[k as usize] > 0.0).collect()
}

// 3. Ring clocks.
fn rings() -> Outcome {
    for period in [4usize, 6, 8] {
        let mut n = MassSpringNetwork::new();
        let out = generate_clock(&mut n, period, 0).unwrap();
        let cycles = 10 * period as u64;
        let got = tick_cycles(&n, out, cycles);
        let want: Vec<u64> = (0..cycles).step_by(period).collect();
        ensure(got == want, || format!("period {period}: ticks at {got:?}"))?;
    }
    let mut n = MassSpringNetwork::new();
    let (out, period) = compose_coprime_clocks(&mut n, 4, 6, 0).unwrap();
    ensure(period == 12, || format!("composed period {period}"))?;
    let got = tick_cycles(&n, out, 60);
    ensure(got.windows(2).all(|w| w[1] - w[0] == 12) && got.len() == 5, || {
        format!("composed ticks at {got:?}")
    })?;
    Ok(format!(
        "rings 4/6/8 over 10N cycles, 4x6 composition ticks every 12 (at {got:?})"
    ))
}

/// Exhaustive comparison of a netlist's latch inputs and outputs against the interpreter.
fn interpreter_cases(ast: &BehaviorAst, nl: &GateNetlist) -> Result<usize, String> {
    let interp = Interpreter::new(ast);
    let reset = interp.reset_state();
    let width = |name: &str| {
        ast.port(name)
            .map(|p| p.width())
            .or_else(|| ast.reg(name).map(|r| r.width()))
            .unwrap()
    };
    let names = |it: &mut dyn Iterator<Item = &String>| -> Vec<String> {
        let set: BTreeSet<String> = it.cloned().collect();
        set.into_iter().collect()
    };
    let ins = names(&mut nl.inputs.iter().map(|(b, _)| &b.name));
    let regs = names(&mut nl.state.iter().map(|(b, _)| &b.name));
    let fields: Vec<(String, u32)> = ins.iter().chain(&regs).map(|n| (n.clone(), width(n))).collect();
    let total: u32 = fields.iter().map(|f| f.1).sum();
    let latches = nl.latches();
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
        let in_bits: Vec<bool> = nl
            .inputs
            .iter()
            .map(|(b, _)| (inputs[&b.name] >> b.bit) & 1 == 1)
            .collect();
        let mut latch_bits = vec![false; latches.len()];
        for (b, g) in &nl.state {
            latch_bits[latches.iter().position(|x| x == g).unwrap()] = (state[&b.name] >> b.bit) & 1 == 1;
        }
        let nets = nl.eval(&in_bits, &latch_bits).map_err(|e| e.to_string())?;
        let want = interp.step(&state, &inputs);
        for (b, g) in &nl.state {
            let got = nets[nl.gates[*g].inputs[LATCH_D]];
            ensure(got == ((want[&b.name] >> b.bit) & 1 == 1), || {
                format!("{b} for {inputs:?} {state:?}")
            })?;
        }
        for (b, net) in &nl.outputs {
            ensure(nets[*net] == ((state[&b.name] >> b.bit) & 1 == 1), || {
                format!("output {b}")
            })?;
        }
    }
    Ok(1 << total)
}

// 4. Synthesis equivalence.
fn equivalence() -> Outcome {
    let mut notes = Vec::new();
    for (name, src, bits) in [("maze", MAZE, 6usize), ("lock", LOCK, 11)] {
        let (doc, s, _) = build(src);
        ensure(s.table.total_bits() == bits, || {
            format!("{name}: {} free bits", s.table.total_bits())
        })?;
        let cases = interpreter_cases(&doc.behavior, &s.netlist)?;
        ensure(cases == 1 << bits, || format!("{name}: {cases} cases"))?;
        let eq = check_equivalence(&s.netlist, &s.table).map_err(|e| e.to_string())?;
        ensure(eq, || format!("{name}: netlist differs from the function table"))?;
        notes.push(format!("{name} {cases}"));
    }
    Ok(format!("all assignments equal: {}", notes.join(", ")))
}

// 5. End-to-end maze.
fn maze() -> Outcome {
    let (_, _, net) = build(MAZE);
    let world = MazeWorld::parse(MAZE_WORLD).map_err(|e| e.to_string())?;
    ensure(world.is_loop_free(), || "maze has loops".into())?;
    let bind = MazeBindings::from_network(&net).map_err(|e| e.to_string())?;
    let params = SimParams::default();
    ensure(net.fsm_period == 60 && params.steps_per_period == 400, || {
        "non-default timing".into()
    })?;
    let mut dev = PhysicalDevice::new(&net, &params).map_err(|e| e.to_string())?;
    let run = run_maze(&mut dev, &world, &bind, 1000).map_err(|e| e.to_string())?;
    let oracle = reference_maze_run(&world, 1000);
    if let Some(k) = run.steps.iter().zip(&oracle.steps).position(|(a, b)| a != b) {
        return Err(format!("step {k} differs: {:?} vs {:?}", run.steps[k], oracle.steps[k]));
    }
    ensure(run == oracle, || "trajectory length differs from the oracle".into())?;
    ensure(run.solved && run.blocked_moves() == 0, || "not solved cleanly".into())?;
    let mut seen = [false; 3];
    let mut prev = Dir::Left;
    for s in &run.steps {
        if prev == Dir::Left && s.dir == Dir::Right {
            seen[0] = true;
        }
        if prev == Dir::Up && s.sensors.up && s.sensors.right && s.dir == Dir::Left {
            seen[1] = true;
        }
        if prev == Dir::Right && s.dir == Dir::Down {
            seen[2] = true;
        }
        prev = s.dir;
    }
    ensure(seen.iter().all(|&b| b), || format!("checkpoints seen {seen:?}"))?;
    Ok(format!(
        "{} steps equal to the oracle, solved, all three checkpoints",
        run.steps.len()
    ))
}

fn lock_inputs(pass: u64, action: u64, key: u64) -> Values {
    [("pass_in", pass), ("action_btn", action), ("key", key)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn lock_pair(dev: &mut dyn Device, code: u64, attempt: u64) -> Result<(u64, u64), String> {
    let e = |e: mechsynth::runtime::RuntimeError| e.to_string();
    dev.tick(&lock_inputs(code, 1, 1)).map_err(e)?;
    let locked = dev.tick(&lock_inputs(code, 0, 1)).map_err(e)?.outputs["door"];
    dev.tick(&lock_inputs(attempt, 1, 0)).map_err(e)?;
    let after = dev.tick(&lock_inputs(attempt, 0, 0)).map_err(e)?.outputs["door"];
    Ok((locked, after))
}

// 6. End-to-end lock.
fn lock() -> Outcome {
    let (_, s, net) = build(LOCK);
    let params = SimParams::default();
    let script = parse_scenario(LOCK_SCRIPT).map_err(|e| e.to_string())?;
    let io = ScenarioIo::from_network(&net);
    let mut dev = PhysicalDevice::new(&net, &params).map_err(|e| e.to_string())?;
    let report = run_scenario(&mut dev, &io, &script).map_err(|e| e.to_string())?;
    ensure(report.passed() && report.results.len() == 3, || report.transcript())?;
    for code in 0..16 {
        for attempt in 0..16 {
            let mut dev = NetlistDevice::new(&s.netlist).map_err(|e| e.to_string())?;
            let (locked, after) = lock_pair(&mut dev, code, attempt)?;
            ensure(locked == 1 && (after == 0) == (code == attempt), || {
                format!("netlist pair {code:04b}/{attempt:04b}")
            })?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pairs: Vec<(u64, u64)> = (0..10)
        .map(|k| {
            let code = rng.gen_range(0..16);
            let attempt = if k % 2 == 0 {
                code
            } else {
                (code + rng.gen_range(1..16)) % 16
            };
            (code, attempt)
        })
        .collect();
    for &(code, attempt) in &pairs {
        let mut dev = PhysicalDevice::new(&net, &params).map_err(|e| e.to_string())?;
        let (locked, after) = lock_pair(&mut dev, code, attempt)?;
        ensure(locked == 1 && (after == 0) == (code == attempt), || {
            format!("ODE pair {code:04b}/{attempt:04b}: locked {locked} after {after}")
        })?;
    }
    Ok(format!(
        "script passes in ODE, 256 netlist pairs, {} ODE pairs",
        pairs.len()
    ))
}

// 7. Network scale.
fn scale() -> Outcome {
    let (_, _, maze) = build(MAZE);
    let (_, _, lock) = build(LOCK);
    let (m, l) = (maze.mass_count(), lock.mass_count());
    ensure((100..=350).contains(&m), || format!("maze has {m} masses"))?;
    ensure((170..=560).contains(&l), || format!("lock has {l} masses"))?;
    Ok(format!("maze {m} masses, lock {l} masses"))
}

fn sq(a: (f64, f64), p: Point) -> f64 {
    let (dx, dy) = (a.0 - p.x as f64, a.1 - p.y as f64);
    dx * dx + dy * dy
}

/// Minimum total squared displacement over all injective assignments.
fn brute_assign(pos: &[(f64, f64)], pts: &[Point], k: usize, used: &mut [bool]) -> f64 {
    if k == pos.len() {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for j in 0..pts.len() {
        if !used[j] {
            used[j] = true;
            best = best.min(sq(pos[k], pts[j]) + brute_assign(pos, pts, k + 1, used));
            used[j] = false;
        }
    }
    best
}

// 8. Place and route.
fn place_route() -> Outcome {
    let mut notes = Vec::new();
    for (name, src) in [("maze", MAZE), ("lock", LOCK)] {
        let c = compile_source(src, "acceptance.mdl", &CompileConfig::default(), true).map_err(|e| e.to_string())?;
        let (layout, domain) = (c.layout.unwrap(), c.domain.unwrap());
        let pins = pin_ios(&c.doc, &c.network).map_err(|e| e.to_string())?;
        let distinct: BTreeSet<Point> = layout.positions.iter().copied().collect();
        ensure(distinct.len() == layout.positions.len(), || {
            format!("{name}: positions collide")
        })?;
        ensure(layout.positions.iter().all(|&p| domain.contains(p)), || {
            format!("{name}: mass outside")
        })?;
        ensure(
            pins.iter().all(|&(m, p)| layout.positions[m] == p && layout.pinned[m]),
            || format!("{name}: pin moved"),
        )?;
        layout.check(&domain, &pins).map_err(|e| e.to_string())?;

        // Scramble the free masses over their own points, then reduce one scan at a time.
        let edges = network_edges(&c.network);
        let mut pos = layout.positions.clone();
        let free: Vec<usize> = (0..pos.len()).filter(|&m| !layout.pinned[m]).collect();
        let mut spots: Vec<Point> = free.iter().map(|&m| pos[m]).collect();
        spots.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
        for (&m, p) in free.iter().zip(spots) {
            pos[m] = p;
        }
        let params = SwapParams {
            max_scans: 1,
            ..SwapParams::default()
        };
        let mut counts = vec![count_crossings(&pos, &edges)];
        for _ in 0..40 {
            let swaps = reduce_crossings(&mut pos, &layout.pinned, &edges, &params);
            counts.push(count_crossings(&pos, &edges));
            if swaps == 0 {
                break;
            }
        }
        ensure(counts.windows(2).all(|w| w[1] <= w[0]), || {
            format!("{name}: crossings rose {counts:?}")
        })?;
        ensure(counts.last() < counts.first(), || {
            format!("{name}: reduction made no progress")
        })?;
        ensure(pins.iter().all(|&(m, p)| pos[m] == p), || {
            format!("{name}: reduction moved a pin")
        })?;
        notes.push(format!(
            "{name} {} crossings, scrambled {} -> {}",
            layout.crossings,
            counts[0],
            counts.last().unwrap()
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..60 {
        let n = rng.gen_range(1..=8);
        let m = n + rng.gen_range(0..=1);
        let mut pts = BTreeSet::new();
        while pts.len() < m {
            pts.insert(Point::new(rng.gen_range(0..6), rng.gen_range(0..6)));
        }
        let pts: Vec<Point> = pts.into_iter().collect();
        let pos: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(-1.0..6.0), rng.gen_range(-1.0..6.0)))
            .collect();
        let got = assign_points(&pos, &pts, ASSIGN_CANDIDATES).map_err(|e| e.to_string())?;
        let cost: f64 = pos.iter().zip(&got).map(|(&a, &p)| sq(a, p)).sum();
        let best = brute_assign(&pos, &pts, 0, &mut vec![false; m]);
        ensure((cost - best).abs() <= 1e-9 * best.max(1.0), || {
            format!("case {case}: {cost} vs optimum {best}")
        })?;
    }
    notes.push("assignment optimal on 60 exhaustive cases".into());
    Ok(notes.join("; "))
}

fn random_network(rng: &mut ChaCha8Rng) -> MassSpringNetwork {
    let mut n = MassSpringNetwork::new();
    let count = rng.gen_range(1..=8);
    for _ in 0..count {
        let phase = if rng.gen_bool(0.5) {
            Phase::InPhase
        } else {
            Phase::OutOfPhase
        };
        let m = n.add_mass(phase, MassTag::Intermediate);
        n.masses[m].bias = rng.gen_range(-1..=1);
        n.masses[m].x0 = rng.gen_range(-1.5..1.5);
    }
    for _ in 0..rng.gen_range(0..=2 * count) {
        let (i, j) = (rng.gen_range(0..count), rng.gen_range(0..count));
        if i != j {
            let kind = [
                CouplingKind::LinearPos,
                CouplingKind::LinearNeg,
                CouplingKind::NonlinearGate,
            ][rng.gen_range(0..3)];
            n.couple(i, j, kind);
        }
    }
    n
}

fn final_state(n: &MassSpringNetwork, spp: usize) -> Vec<f64> {
    let p = SimParams {
        steps_per_period: spp,
        ..SimParams::default()
    };
    let mut sim = Simulator::new(n, &p).unwrap();
    sim.set_force(0, 1.0);
    sim.set_force(1, -1.0);
    sim.advance(spp as u64).unwrap();
    sim.state().x.clone()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// 9. Numerics.
fn numerics() -> Outcome {
    let p = SimParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = random_network(&mut rng);
        let sys = System::new(&n, &p);
        let x: Vec<f64> = (0..n.mass_count()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let xp = rng.gen_range(0.0..2.0);
        let g = sys.gradient(&x, xp).map_err(|e| e.to_string())?;
        for k in 0..x.len() {
            let (mut a, mut b) = (x.clone(), x.clone());
            a[k] += h;
            b[k] -= h;
            let fd = (sys.potential(&a, xp).unwrap() - sys.potential(&b, xp).unwrap()) / (2.0 * h);
            worst = worst.max((g[k] - fd).abs() / g[k].abs().max(1.0));
        }
    }
    ensure(worst < 1e-6, || format!("gradient relative error {worst:e}"))?;

    for _ in 0..20 {
        let n = random_network(&mut rng);
        let mut sim = Simulator::new(&n, &p).unwrap();
        sim.freeze_clock(Some(rng.gen_range(0.0..2.0)));
        let mut e = sim.energy();
        for step in 0..2000 {
            sim.step().map_err(|e| e.to_string())?;
            let e2 = sim.energy();
            ensure(e2 <= e + 1e-8 * e.abs().max(1.0), || {
                format!("energy rose {e} -> {e2} at step {step}")
            })?;
            e = e2;
        }
    }

    let mut n = MassSpringNetwork::new();
    let a = n.add_mass(Phase::InPhase, MassTag::Sensor);
    let b = n.add_mass(Phase::InPhase, MassTag::Sensor);
    let o = n.add_mass(Phase::InPhase, MassTag::Output);
    cell_nor(&mut n, a, b, o);
    let (c, m, f) = (final_state(&n, 50), final_state(&n, 100), final_state(&n, 200));
    let ratio = max_diff(&c, &m) / max_diff(&m, &f);
    ensure((8.0..=32.0).contains(&ratio), || {
        format!("step-halving ratio {ratio:.2}")
    })?;
    Ok(format!(
        "gradient rel err {worst:.1e}, dissipation monotone, halving ratio {ratio:.2}"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("gate truth tables", gates, Duration::from_secs(10)),
        ("D-latch", latch, Duration::from_secs(30)),
        ("ring clocks", rings, Duration::from_secs(60)),
        ("synthesis equivalence", equivalence, Duration::from_secs(10)),
        ("end-to-end maze", maze, Duration::from_secs(20 * 60)),
        ("end-to-end lock", lock, Duration::from_secs(30 * 60)),
        ("network scale", scale, Duration::from_secs(600)),
        ("place and route", place_route, Duration::from_secs(600)),
        ("numerics", numerics, Duration::from_secs(600)),
    ];
    let results: Vec<(Outcome, Duration)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(_, f, _)| {
                scope.spawn(move || {
                    let t = Instant::now();
                    let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
                    (r, t.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (k, ((name, _, budget), (r, took))) in criteria.iter().zip(results).enumerate() {
        let r = r.and_then(|m| {
            if took <= *budget {
                Ok(m)
            } else {
                Err(format!("took {took:.1?}, budget {budget:.0?}"))
            }
        });
        let (tag, msg) = match r {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {}: {tag} {name} ({took:.1?}): {msg}", k + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
