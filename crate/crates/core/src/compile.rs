// SPDX-License-Identifier: Apache-2.0

//! The full pipeline from MDL source to a placed mass-spring network.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::mdl::{parse_source, validate, MdlDocument, MdlError};
use crate::place::{count_crossings, discretize, network_edges, place, GridDomain, Layout, PlaceError, PlaceOptions};
use crate::synth::{synthesize, GateCounts, SynthError, SynthOptions, Synthesis};
use crate::techmap::{map_netlist, MassSpringNetwork, TechmapError, TechmapOptions, Timing, ValueMap, MAX_RING_PERIOD};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompileConfig {
    pub fsm_period: usize,
    pub auto_clock: bool,
    /// Split nets with more than `max_fanout` sinks into buffer trees.
    pub fanout_buffers: bool,
    pub max_fanout: usize,
    pub io_buffers: bool,
    pub max_ring_period: usize,
    pub place: PlaceOptions,
    pub output_dir: Option<PathBuf>,
}

impl Default for CompileConfig {
    fn default() -> Self {
        CompileConfig {
            fsm_period: 60,
            auto_clock: true,
            fanout_buffers: true,
            max_fanout: 2,
            io_buffers: true,
            max_ring_period: MAX_RING_PERIOD,
            place: PlaceOptions::default(),
            output_dir: None,
        }
    }
}

impl CompileConfig {
    pub fn from_toml(text: &str) -> Result<Self, CompileError> {
        toml::from_str(text).map_err(|e| CompileError::Config(e.to_string()))
    }

    pub fn synth_options(&self) -> SynthOptions {
        SynthOptions {
            max_fanout: if self.fanout_buffers {
                self.max_fanout
            } else {
                usize::MAX
            },
            io_buffers: self.io_buffers,
        }
    }

    pub fn techmap_options(&self) -> TechmapOptions {
        TechmapOptions {
            fsm_period: self.fsm_period,
            auto_clock: self.auto_clock,
            max_ring_period: self.max_ring_period,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CompileError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Parse(#[from] MdlError),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Techmap(#[from] TechmapError),
    #[error(transparent)]
    Place(#[from] PlaceError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompileReport {
    pub name: String,
    pub gates: GateCounts,
    pub masses: usize,
    pub couplings: usize,
    pub combinational_depth: usize,
    pub timing: Timing,
    pub fsm_period: usize,
    pub rings: Vec<usize>,
    pub first_tick: usize,
    pub crossings: Option<usize>,
    pub warnings: Vec<String>,
}

impl CompileReport {
    pub fn to_text(&self) -> String {
        let g = &self.gates;
        let mut lines = vec![
            format!("design: {}", self.name),
            format!(
                "gates: nor2 {} not {} buf {} dlatch {} const {}",
                g.nor2,
                g.not,
                g.buf,
                g.dlatch,
                g.const0 + g.const1
            ),
            format!("masses: {}", self.masses),
            format!("couplings: {}", self.couplings),
            format!("combinational depth: {}", self.combinational_depth),
            format!("clock period: {} cycles (rings {:?})", self.fsm_period, self.rings),
            format!(
                "first tick: cycle {}, output latency {}",
                self.first_tick, self.timing.output_latency
            ),
        ];
        if let Some(c) = self.crossings {
            lines.push(format!("crossings: {c}"));
        }
        lines.extend(self.warnings.iter().map(|w| format!("warning: {w}")));
        lines.join("\n") + "\n"
    }
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub doc: MdlDocument,
    pub synthesis: Synthesis,
    pub network: MassSpringNetwork,
    pub timing: Timing,
    pub domain: Option<GridDomain>,
    pub layout: Option<Layout>,
    pub report: CompileReport,
}

/// Parses and validates; warnings are returned, errors fail.
pub fn load_document(source: &str, file: &str) -> Result<(MdlDocument, Vec<String>), CompileError> {
    let doc = parse_source(source)?;
    let diags = validate(&doc);
    let errors: Vec<String> = diags.iter().filter(|d| d.is_error()).map(|d| d.render(file)).collect();
    if !errors.is_empty() {
        return Err(CompileError::Invalid(errors.join("\n")));
    }
    Ok((doc, diags.iter().map(|d| d.render(file)).collect()))
}

/// Value maps of every I/O, keyed by MSB-first code value.
pub fn value_maps(doc: &MdlDocument) -> Vec<ValueMap> {
    doc.ios
        .iter()
        .map(|io| ValueMap {
            name: io.name.clone(),
            entries: io
                .values
                .iter()
                .filter_map(|(code, label)| {
                    let bits = crate::mdl::parse_code(code)?;
                    Some((bits.iter().fold(0u64, |a, &b| (a << 1) | u64::from(b)), label.clone()))
                })
                .collect(),
        })
        .collect()
}

/// Synthesis and technology mapping, without placement.
pub fn build_network(
    doc: &MdlDocument,
    cfg: &CompileConfig,
) -> Result<(Synthesis, MassSpringNetwork, Timing), CompileError> {
    let synthesis = synthesize(&doc.behavior, &cfg.synth_options())?;
    let timing = Timing::analyze(&synthesis.netlist)?;
    let mut network = map_netlist(&synthesis.netlist, &cfg.techmap_options())?;
    network.name = doc.name.clone();
    network.value_maps = value_maps(doc);
    Ok((synthesis, network, timing))
}

fn report(
    doc: &MdlDocument,
    s: &Synthesis,
    n: &MassSpringNetwork,
    t: &Timing,
    layout: Option<&Layout>,
    warnings: Vec<String>,
) -> CompileReport {
    CompileReport {
        name: doc.name.clone(),
        gates: s.netlist.counts(),
        masses: n.mass_count(),
        couplings: n.couplings.len(),
        combinational_depth: t.data_depth,
        timing: t.clone(),
        fsm_period: n.fsm_period,
        rings: n.rings.clone(),
        first_tick: n.first_tick,
        crossings: layout.map(|l| l.crossings),
        warnings,
    }
}

/// The whole pipeline. `with_layout = false` skips placement.
pub fn compile_source(
    source: &str,
    file: &str,
    cfg: &CompileConfig,
    with_layout: bool,
) -> Result<Compiled, CompileError> {
    let (doc, warnings) = load_document(source, file)?;
    let (synthesis, network, timing) = build_network(&doc, cfg)?;
    let (domain, layout) = if with_layout {
        let domain = discretize(&doc.boundary)?;
        let layout = place(&doc, &network, &cfg.place)?;
        debug_assert_eq!(
            layout.crossings,
            count_crossings(&layout.positions, &network_edges(&network))
        );
        (Some(domain), Some(layout))
    } else {
        (None, None)
    };
    let report = report(&doc, &synthesis, &network, &timing, layout.as_ref(), warnings);
    Ok(Compiled {
        doc,
        synthesis,
        network,
        timing,
        domain,
        layout,
        report,
    })
}
