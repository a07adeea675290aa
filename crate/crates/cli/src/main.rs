// SPDX-License-Identifier: Apache-2.0

//! `mechc`: compile MDL sources to mass-spring networks, simulate them and run the
//! closed-loop examples. Exit codes: 0 ok, 1 domain error, 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use mechsynth::compile::{compile_source, value_maps, CompileConfig};
use mechsynth::dynamics::{ForceSchedule, ForceSegment, Probe, SimParams, Simulator};
use mechsynth::mdl::Point;
use mechsynth::place::{discretize, discretize_polygon, render_svg, Layout};
use mechsynth::runtime::{parse_scenario, run_maze, run_scenario, MazeBindings, MazeWorld, PhysicalDevice, ScenarioIo};
use mechsynth::synth::{
    import_netlist_json_with, insert_io_buffers, limit_fanout, netlist_to_json, CellMap, GateNetlist,
};
use mechsynth::techmap::{map_netlist, MassSpringNetwork, MassTag, TechmapOptions};

#[derive(Parser)]
#[command(
    name = "mechc",
    version,
    about = "Mechanical description language to mass-spring network compiler"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile an MDL file: netlist, network, layout, SVG and report.
    Compile(CompileArgs),
    /// Integrate a compiled network and write a probe trace as CSV.
    Simulate(SimulateArgs),
    /// Drive a compiled maze network through a maze file.
    RunMaze(RunMazeArgs),
    /// Run a scenario script against a compiled network.
    RunScenario(RunScenarioArgs),
    /// Import a gate netlist (native or Yosys JSON) and optionally map it to a network.
    NetlistImport(NetlistImportArgs),
    /// Draw a placed network as SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct CompileArgs {
    mdl: PathBuf,
    /// TOML configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Power-clock cycles per FSM tick (default 60).
    #[arg(long)]
    fsm_period: Option<usize>,
    /// Fail instead of generating a ring clock for sequential designs.
    #[arg(long)]
    no_clock: bool,
    /// Do not split high-fanout nets into buffer trees.
    #[arg(long)]
    no_fanout_tree: bool,
    /// Do not isolate sensors and actuators behind buffers.
    #[arg(long)]
    no_io_buffers: bool,
    /// Placement seeds tried in parallel (default 4).
    #[arg(long)]
    seeds: Option<usize>,
    /// First placement seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Force-directed iterations before pinning I/O masses.
    #[arg(long)]
    stage1_iterations: Option<usize>,
    /// Force-directed iterations with I/O masses pinned.
    #[arg(long)]
    stage2_iterations: Option<usize>,
    /// Grid distance within which crossing reduction swaps masses.
    #[arg(long)]
    swap_radius: Option<f64>,
    /// Maximum crossing-reduction scans.
    #[arg(long)]
    swap_scans: Option<usize>,
    /// Crossing-reduction time limit in seconds.
    #[arg(long)]
    swap_time_limit: Option<f64>,
    /// Skip placement (no layout or SVG).
    #[arg(long)]
    no_layout: bool,
    /// Output directory (default: current directory).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    network: PathBuf,
    /// JSON force schedule: {"segments": [{"io"|"mass", "bit", "from", "to", "value"}]}.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Power-clock periods to integrate.
    #[arg(long)]
    periods: u64,
    /// I/O or register name, mass id (`12` or `m12`), or `tag:<tag>`. Default: actuators.
    #[arg(long = "probe")]
    probes: Vec<String>,
    /// Record every N steps instead of once per cycle at the readout phase.
    #[arg(long)]
    stride: Option<u64>,
    /// Simulation parameters as TOML.
    #[arg(long)]
    params: Option<PathBuf>,
    /// CSV output (printed when absent).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunMazeArgs {
    network: PathBuf,
    maze: PathBuf,
    /// Give up after this many ticks.
    #[arg(long, default_value_t = 1000)]
    max_steps: usize,
    /// Simulation parameters as TOML.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Trajectory CSV output.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunScenarioArgs {
    network: PathBuf,
    script: PathBuf,
    /// Simulation parameters as TOML.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Transcript output (printed when absent).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NetlistImportArgs {
    netlist: PathBuf,
    /// JSON cell map for Yosys netlists.
    #[arg(long)]
    cell_map: Option<PathBuf>,
    /// Do not isolate sensors and actuators behind buffers.
    #[arg(long)]
    no_io_buffers: bool,
    /// Most sinks per net in buffer trees.
    #[arg(long, default_value_t = 2)]
    max_fanout: usize,
    /// Native netlist JSON output.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also map to a network and write it here.
    #[arg(long)]
    network: Option<PathBuf>,
    /// Power-clock cycles per FSM tick for the mapped network.
    #[arg(long, default_value_t = 60)]
    fsm_period: usize,
    /// MDL file whose name and value maps label the network.
    #[arg(long)]
    mdl: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    network: PathBuf,
    layout: PathBuf,
    /// MDL file for the boundary outline; the layout's bounding box is used without it.
    #[arg(long)]
    mdl: Option<PathBuf>,
    /// SVG output (printed when absent).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_network(path: &Path) -> Result<MassSpringNetwork> {
    MassSpringNetwork::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_params(path: Option<&PathBuf>) -> Result<SimParams> {
    let p = match path {
        Some(p) => toml::from_str(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => SimParams::default(),
    };
    p.validate()?;
    Ok(p)
}

fn compile(a: CompileArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => CompileConfig::from_toml(&read(p)?)?,
        None => CompileConfig::default(),
    };
    if let Some(v) = a.fsm_period {
        cfg.fsm_period = v;
    }
    if a.no_clock {
        cfg.auto_clock = false;
    }
    if a.no_fanout_tree {
        cfg.fanout_buffers = false;
    }
    if a.no_io_buffers {
        cfg.io_buffers = false;
    }
    if let Some(v) = a.seeds {
        cfg.place.seeds = v;
    }
    if let Some(v) = a.seed {
        cfg.place.base_seed = v;
    }
    if let Some(v) = a.stage1_iterations {
        cfg.place.stage1_iterations = v;
    }
    if let Some(v) = a.stage2_iterations {
        cfg.place.stage2_iterations = v;
    }
    if let Some(v) = a.swap_radius {
        cfg.place.swap.radius = v;
    }
    if let Some(v) = a.swap_scans {
        cfg.place.swap.max_scans = v;
    }
    if let Some(v) = a.swap_time_limit {
        cfg.place.swap.time_limit_secs = v;
    }
    if let Some(v) = a.out {
        cfg.output_dir = Some(v);
    }
    let file = a.mdl.display().to_string();
    let c = compile_source(&read(&a.mdl)?, &file, &cfg, !a.no_layout)?;
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let stem = if c.doc.name.is_empty() {
        "design"
    } else {
        c.doc.name.as_str()
    };
    let path = |ext: &str| dir.join(format!("{stem}.{ext}"));
    write(&path("netlist.json"), &netlist_to_json(&c.synthesis.netlist))?;
    write(&path("network.json"), &c.network.to_json())?;
    if let (Some(layout), Some(domain)) = (&c.layout, &c.domain) {
        write(&path("layout.json"), &layout.to_json(&cfg.place))?;
        write(&path("svg"), &render_svg(&c.network, layout, domain))?;
    }
    let text = c.report.to_text();
    write(&path("report.txt"), &text)?;
    write(&path("report.json"), &serde_json::to_string_pretty(&c.report)?)?;
    print!("{text}");
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    segments: Vec<ScheduleEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleEntry {
    mass: Option<usize>,
    io: Option<String>,
    #[serde(default)]
    bit: u32,
    from: f64,
    to: f64,
    value: f64,
}

fn io_mass(net: &MassSpringNetwork, name: &str, bit: u32) -> Option<usize> {
    net.sensor(name, bit)
        .or_else(|| net.actuator(name, bit))
        .or_else(|| net.state_mass(name, bit))
}

fn load_schedule(net: &MassSpringNetwork, path: &Path) -> Result<ForceSchedule> {
    let f: ScheduleFile = serde_json::from_str(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let segments = f
        .segments
        .into_iter()
        .map(|e| {
            let mass = match (e.mass, &e.io) {
                (Some(m), None) => m,
                (None, Some(io)) => io_mass(net, io, e.bit).ok_or_else(|| anyhow!("unknown I/O `{io}[{}]`", e.bit))?,
                _ => bail!("each schedule segment needs exactly one of `mass` or `io`"),
            };
            Ok(ForceSegment {
                mass,
                from: e.from,
                to: e.to,
                value: e.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForceSchedule { segments })
}

fn resolve_probes(net: &MassSpringNetwork, specs: &[String]) -> Result<Vec<Probe>> {
    let mut probes = Vec::new();
    let bindings = || net.sensors.iter().chain(&net.actuators).chain(&net.state);
    if specs.is_empty() {
        for b in &net.actuators {
            probes.push(Probe {
                name: format!("{}[{}]", b.name, b.bit),
                mass: b.mass,
            });
        }
        return Ok(probes);
    }
    for s in specs {
        if let Some(tag) = s.strip_prefix("tag:") {
            let tag: MassTag = serde_json::from_value(serde_json::Value::String(tag.to_string()))
                .map_err(|_| anyhow!("unknown mass tag `{tag}`"))?;
            probes.extend(net.masses.iter().filter(|m| m.tag == tag).map(|m| Probe {
                name: format!("m{}", m.id),
                mass: m.id,
            }));
            continue;
        }
        if let Ok(id) = s.strip_prefix('m').unwrap_or(s).parse::<usize>() {
            if id >= net.mass_count() {
                bail!("unknown probe `{s}`: the network has {} masses", net.mass_count());
            }
            probes.push(Probe {
                name: format!("m{id}"),
                mass: id,
            });
            continue;
        }
        let before = probes.len();
        let mut seen = std::collections::BTreeSet::new();
        for b in bindings().filter(|b| b.name == *s) {
            if seen.insert(b.bit) {
                probes.push(Probe {
                    name: format!("{}[{}]", b.name, b.bit),
                    mass: b.mass,
                });
            }
        }
        if probes.len() == before {
            bail!("unknown probe `{s}`");
        }
    }
    Ok(probes)
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let net = load_network(&a.network)?;
    let params = load_params(a.params.as_ref())?;
    let schedule = match &a.schedule {
        Some(p) => load_schedule(&net, p)?,
        None => ForceSchedule::default(),
    };
    let probes = resolve_probes(&net, &a.probes)?;
    let mut sim = Simulator::new(&net, &params)?;
    let trace = sim.record(a.periods, &schedule, &probes, a.stride)?;
    emit(a.out.as_deref(), &trace.to_csv())
}

fn run_maze_cmd(a: RunMazeArgs) -> Result<bool> {
    let net = load_network(&a.network)?;
    let params = load_params(a.params.as_ref())?;
    let world = MazeWorld::parse(&read(&a.maze)?)?;
    let bind = MazeBindings::from_network(&net)?;
    let mut dev = PhysicalDevice::new(&net, &params)?;
    let run = run_maze(&mut dev, &world, &bind, a.max_steps)?;
    if let Some(out) = &a.out {
        write(out, &run.to_csv())?;
    }
    println!("steps: {}", run.steps.len());
    println!("blocked moves: {}", run.blocked_moves());
    println!("solved: {}", run.solved);
    Ok(run.solved && run.blocked_moves() == 0)
}

fn run_scenario_cmd(a: RunScenarioArgs) -> Result<bool> {
    let net = load_network(&a.network)?;
    let params = load_params(a.params.as_ref())?;
    let script = parse_scenario(&read(&a.script)?)?;
    let mut dev = PhysicalDevice::new(&net, &params)?;
    let report = run_scenario(&mut dev, &ScenarioIo::from_network(&net), &script)?;
    emit(a.out.as_deref(), &report.transcript())?;
    Ok(report.passed())
}

fn netlist_import(a: NetlistImportArgs) -> Result<()> {
    let cells = match &a.cell_map {
        Some(p) => serde_json::from_str(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => CellMap::default(),
    };
    let raw: GateNetlist = import_netlist_json_with(&read(&a.netlist)?, &cells)?;
    let buffered = if a.no_io_buffers { raw } else { insert_io_buffers(&raw) };
    if a.max_fanout < 2 {
        bail!("--max-fanout must be at least 2");
    }
    let nl = limit_fanout(&buffered, a.max_fanout);
    nl.check()?;
    let counts = nl.counts();
    println!(
        "gates: nor2 {} not {} buf {} dlatch {} const {}",
        counts.nor2,
        counts.not,
        counts.buf,
        counts.dlatch,
        counts.const0 + counts.const1
    );
    if let Some(out) = &a.out {
        write(out, &netlist_to_json(&nl))?;
    }
    if let Some(path) = &a.network {
        let opts = TechmapOptions {
            fsm_period: a.fsm_period,
            ..TechmapOptions::default()
        };
        let mut net = map_netlist(&nl, &opts)?;
        if let Some(mdl) = &a.mdl {
            let doc = mechsynth::mdl::parse_source(&read(mdl)?)?;
            net.name = doc.name.clone();
            net.value_maps = value_maps(&doc);
        }
        println!("masses: {}", net.mass_count());
        write(path, &net.to_json())?;
    }
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let net = load_network(&a.network)?;
    let (layout, _) = Layout::from_json(&read(&a.layout)?)?;
    if layout.positions.len() != net.mass_count() {
        bail!(
            "layout has {} masses but the network has {}",
            layout.positions.len(),
            net.mass_count()
        );
    }
    let domain = match &a.mdl {
        Some(p) => discretize(&mechsynth::mdl::parse_source(&read(p)?)?.boundary)?,
        None => {
            let xs = layout.positions.iter().map(|p| p.x);
            let ys = layout.positions.iter().map(|p| p.y);
            let (x0, x1) = (xs.clone().min().unwrap_or(0), xs.max().unwrap_or(0) + 1);
            let (y0, y1) = (ys.clone().min().unwrap_or(0), ys.max().unwrap_or(0) + 1);
            discretize_polygon(&[
                Point::new(x0, y0),
                Point::new(x0, y1),
                Point::new(x1, y1),
                Point::new(x1, y0),
            ])?
        }
    };
    emit(a.out.as_deref(), &render_svg(&net, &layout, &domain))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compile(a) => compile(a).map(|_| true),
        Command::Simulate(a) => simulate(a).map(|_| true),
        Command::RunMaze(a) => run_maze_cmd(a),
        Command::RunScenario(a) => run_scenario_cmd(a),
        Command::NetlistImport(a) => netlist_import(a).map(|_| true),
        Command::Render(a) => render(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
