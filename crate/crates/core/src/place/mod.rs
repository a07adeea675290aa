// SPDX-License-Identifier: Apache-2.0

//! Placement of a mass-spring network inside the declared boundary: lattice
//! discretization, I/O pinning, two force-directed stages, assignment to grid points and
//! a greedy crossing-reduction pass. Several seeds run in parallel; the layout with the
//! fewest crossings wins, then the shortest total edge length, then the lowest seed.

mod assign;
mod crossings;
mod domain;
mod force;
mod svg;

pub use assign::{assign_points, hungarian, ASSIGN_CANDIDATES};
pub use crossings::{count_crossings, reduce_crossings, segments_cross, unique_edges, SwapParams};
pub use domain::{discretize, discretize_polygon, on_segment, point_in_polygon, segment_points, GridDomain};
pub use force::{force_layout, random_positions, Frame};
pub use svg::render_svg;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mdl::{MdlDocument, Point};
use crate::techmap::MassSpringNetwork;

pub const LAYOUT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum PlaceError {
    #[error("boundary polygon has zero area")]
    Degenerate,
    #[error("unknown boundary line `{0}`")]
    UnknownLine(String),
    #[error("no mass is bound to {0}")]
    MissingBinding(String),
    #[error("pins {first} and {second} both round to ({x}, {y})")]
    PinCollision {
        first: String,
        second: String,
        x: i64,
        y: i64,
    },
    #[error("{masses} masses do not fit on {points} grid points")]
    Capacity { masses: usize, points: usize },
    #[error("layout invariant violated: {0}")]
    Invariant(String),
    #[error("layout JSON: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlaceOptions {
    pub seeds: usize,
    pub base_seed: u64,
    pub stage1_iterations: usize,
    pub stage2_iterations: usize,
    pub candidates: usize,
    pub swap: SwapParams,
}

impl Default for PlaceOptions {
    fn default() -> Self {
        PlaceOptions {
            seeds: 4,
            base_seed: 0,
            stage1_iterations: 500,
            stage2_iterations: 300,
            candidates: ASSIGN_CANDIDATES,
            swap: SwapParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    /// Grid point of every mass, indexed by mass id.
    pub positions: Vec<Point>,
    pub pinned: Vec<bool>,
    pub crossings: usize,
    pub seed: u64,
}

impl Layout {
    pub fn edge_length(&self, edges: &[(usize, usize)]) -> f64 {
        edges
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (self.positions[i], self.positions[j]);
                (((a.x - b.x).pow(2) + (a.y - b.y).pow(2)) as f64).sqrt()
            })
            .sum()
    }

    /// Injectivity, containment and pin fixity.
    pub fn check(&self, domain: &GridDomain, pins: &[(usize, Point)]) -> Result<(), PlaceError> {
        let mut seen = BTreeMap::new();
        for (id, &p) in self.positions.iter().enumerate() {
            if !domain.contains(p) {
                return Err(PlaceError::Invariant(format!(
                    "mass {id} at ({}, {}) is outside the boundary",
                    p.x, p.y
                )));
            }
            if let Some(other) = seen.insert(p, id) {
                return Err(PlaceError::Invariant(format!(
                    "masses {other} and {id} share ({}, {})",
                    p.x, p.y
                )));
            }
        }
        for &(id, p) in pins {
            if self.positions[id] != p || !self.pinned[id] {
                return Err(PlaceError::Invariant(format!("pinned mass {id} moved")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, params: &PlaceOptions) -> String {
        let file = LayoutFile {
            format_version: LAYOUT_FORMAT_VERSION,
            masses: self
                .positions
                .iter()
                .zip(&self.pinned)
                .enumerate()
                .map(|(id, (p, &pinned))| PlacedMass {
                    id,
                    x: p.x,
                    y: p.y,
                    pinned,
                })
                .collect(),
            crossings: self.crossings,
            seed: self.seed,
            params: params.clone(),
        };
        serde_json::to_string_pretty(&file).expect("layout serializes")
    }

    pub fn from_json(text: &str) -> Result<(Self, PlaceOptions), PlaceError> {
        let f: LayoutFile = serde_json::from_str(text).map_err(|e| PlaceError::Schema(e.to_string()))?;
        if f.format_version != LAYOUT_FORMAT_VERSION {
            return Err(PlaceError::Schema(format!(
                "unsupported format_version {}",
                f.format_version
            )));
        }
        if f.masses.iter().enumerate().any(|(k, m)| m.id != k) {
            return Err(PlaceError::Schema("mass ids must be dense and ordered".into()));
        }
        let layout = Layout {
            positions: f.masses.iter().map(|m| Point::new(m.x, m.y)).collect(),
            pinned: f.masses.iter().map(|m| m.pinned).collect(),
            crossings: f.crossings,
            seed: f.seed,
        };
        Ok((layout, f.params))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlacedMass {
    id: usize,
    x: i64,
    y: i64,
    pinned: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LayoutFile {
    format_version: u32,
    masses: Vec<PlacedMass>,
    crossings: usize,
    seed: u64,
    params: PlaceOptions,
}

fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

/// Point at `fraction` along `p1 -> p2`, rounded half up per axis and snapped to the
/// nearest lattice point of the segment (lowest point on ties).
pub fn pin_point(p1: Point, p2: Point, fraction: f64) -> Point {
    let x = p1.x as f64 + fraction * (p2.x - p1.x) as f64;
    let y = p1.y as f64 + fraction * (p2.y - p1.y) as f64;
    let r = Point::new(round_half_up(x), round_half_up(y));
    if on_segment(r, p1, p2) {
        return r;
    }
    segment_points(p1, p2)
        .into_iter()
        .min_by(|a, b| {
            let da = (a.x as f64 - x).powi(2) + (a.y as f64 - y).powi(2);
            let db = (b.x as f64 - x).powi(2) + (b.y as f64 - y).powi(2);
            da.total_cmp(&db).then(a.cmp(b))
        })
        .expect("segments have endpoints")
}

/// Grid point of every sensor and actuator mass, sorted by mass id. Location `k` of an
/// I/O of width `w` carries bit `w - 1 - k`.
pub fn pin_ios(doc: &MdlDocument, net: &MassSpringNetwork) -> Result<Vec<(usize, Point)>, PlaceError> {
    let mut taken: BTreeMap<Point, String> = BTreeMap::new();
    let mut pins = Vec::new();
    for io in &doc.ios {
        let w = io.locations.len();
        for (k, loc) in io.locations.iter().enumerate() {
            let bit = (w - 1 - k) as u32;
            let label = format!("{}[{bit}]", io.name);
            let line = doc
                .line(&loc.line)
                .ok_or_else(|| PlaceError::UnknownLine(loc.line.clone()))?;
            let mass = net
                .sensor(&io.name, bit)
                .or_else(|| net.actuator(&io.name, bit))
                .ok_or_else(|| PlaceError::MissingBinding(label.clone()))?;
            let p = pin_point(line.p1, line.p2, loc.fraction);
            if let Some(first) = taken.insert(p, label.clone()) {
                return Err(PlaceError::PinCollision {
                    first,
                    second: label,
                    x: p.x,
                    y: p.y,
                });
            }
            pins.push((mass, p));
        }
    }
    pins.sort_unstable();
    Ok(pins)
}

pub fn network_edges(net: &MassSpringNetwork) -> Vec<(usize, usize)> {
    unique_edges(net.couplings.iter().map(|c| (c.i, c.j)))
}

pub fn frame_of(domain: &GridDomain) -> Frame {
    let (lo, hi) = domain.bbox();
    Frame {
        min: (lo.x as f64, lo.y as f64),
        max: (hi.x as f64, hi.y as f64),
        area: domain.area,
    }
}

/// One seed of the full pipeline.
pub fn place_seed(
    n: usize,
    edges: &[(usize, usize)],
    domain: &GridDomain,
    pins: &[(usize, Point)],
    opts: &PlaceOptions,
    seed: u64,
) -> Result<Layout, PlaceError> {
    if n > domain.points.len() {
        return Err(PlaceError::Capacity {
            masses: n,
            points: domain.points.len(),
        });
    }
    let frame = frame_of(domain);
    let mut pos = random_positions(n, &frame, seed);
    force_layout(&mut pos, edges, &vec![false; n], &frame, opts.stage1_iterations);
    let mut pinned = vec![false; n];
    for &(m, p) in pins {
        pinned[m] = true;
        pos[m] = (p.x as f64, p.y as f64);
    }
    force_layout(&mut pos, edges, &pinned, &frame, opts.stage2_iterations);

    let pin_points: std::collections::BTreeSet<Point> = pins.iter().map(|&(_, p)| p).collect();
    let free_points: Vec<Point> = domain
        .points
        .iter()
        .copied()
        .filter(|p| !pin_points.contains(p))
        .collect();
    let free: Vec<usize> = (0..n).filter(|&m| !pinned[m]).collect();
    let wanted: Vec<(f64, f64)> = free.iter().map(|&m| pos[m]).collect();
    let placed = assign_points(&wanted, &free_points, opts.candidates)?;
    let mut positions = vec![Point::new(0, 0); n];
    for &(m, p) in pins {
        positions[m] = p;
    }
    for (&m, p) in free.iter().zip(placed) {
        positions[m] = p;
    }
    let mut layout = Layout {
        positions,
        pinned,
        crossings: 0,
        seed,
    };
    layout.check(domain, pins)?;
    reduce_crossings(&mut layout.positions, &layout.pinned, edges, &opts.swap);
    layout.check(domain, pins)?;
    layout.crossings = count_crossings(&layout.positions, edges);
    Ok(layout)
}

/// Places `net` inside the document's boundary, trying `opts.seeds` seeds in parallel.
pub fn place(doc: &MdlDocument, net: &MassSpringNetwork, opts: &PlaceOptions) -> Result<Layout, PlaceError> {
    let domain = discretize(&doc.boundary)?;
    let pins = pin_ios(doc, net)?;
    let edges = network_edges(net);
    let n = net.mass_count();
    let seeds: Vec<u64> = (0..opts.seeds.max(1) as u64).map(|s| opts.base_seed + s).collect();
    let results: Vec<Result<Layout, PlaceError>> = seeds
        .par_iter()
        .map(|&s| place_seed(n, &edges, &domain, &pins, opts, s))
        .collect();
    let mut best: Option<(Layout, f64)> = None;
    for r in results {
        let l = r?;
        let len = l.edge_length(&edges);
        let better = match &best {
            None => true,
            Some((b, blen)) => (l.crossings, len).partial_cmp(&(b.crossings, *blen)) == Some(std::cmp::Ordering::Less),
        };
        if better {
            best = Some((l, len));
        }
    }
    Ok(best.expect("at least one seed").0)
}
