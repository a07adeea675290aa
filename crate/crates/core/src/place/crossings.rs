// SPDX-License-Identifier: Apache-2.0

//! Edge crossing count and the greedy swap pass that lowers it.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::mdl::Point;

fn orient(a: Point, b: Point, c: Point) -> i64 {
    ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).signum()
}

/// Proper intersection: the segments cross at a single interior point. Touching,
/// collinear overlap and shared endpoints do not count.
pub fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Undirected edges without self loops or duplicates, sorted.
pub fn unique_edges(pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = pairs
        .into_iter()
        .filter(|(i, j)| i != j)
        .map(|(i, j)| (i.min(j), i.max(j)))
        .collect();
    e.sort_unstable();
    e.dedup();
    e
}

fn edges_cross(pos: &[Point], e: (usize, usize), f: (usize, usize)) -> bool {
    if e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1 {
        return false;
    }
    segments_cross(pos[e.0], pos[e.1], pos[f.0], pos[f.1])
}

pub fn count_crossings(pos: &[Point], edges: &[(usize, usize)]) -> usize {
    let mut n = 0;
    for (k, &e) in edges.iter().enumerate() {
        n += edges[k + 1..].iter().filter(|&&f| edges_cross(pos, e, f)).count();
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwapParams {
    pub radius: f64,
    pub max_scans: usize,
    pub time_limit_secs: f64,
}

impl Default for SwapParams {
    fn default() -> Self {
        SwapParams {
            radius: 3.0,
            max_scans: 20,
            time_limit_secs: 30.0,
        }
    }
}

/// Crossings that involve at least one edge of `local`.
fn local_crossings(pos: &[Point], edges: &[(usize, usize)], local: &[usize]) -> usize {
    let mut n = 0;
    for (k, &a) in local.iter().enumerate() {
        for (idx, &f) in edges.iter().enumerate() {
            if idx == a {
                continue;
            }
            // Pairs inside `local` are seen twice; count them from the lower index only.
            if let Some(kb) = local.iter().position(|&x| x == idx) {
                if kb < k {
                    continue;
                }
            }
            n += usize::from(edges_cross(pos, edges[a], f));
        }
    }
    n
}

/// Repeatedly scans pairs of free masses within `radius` of each other and swaps their
/// points whenever that lowers the crossings among edges touching the pair. Stops after a
/// scan without improvement, after `max_scans` scans, or at the time limit. Returns the
/// number of accepted swaps.
pub fn reduce_crossings(pos: &mut [Point], pinned: &[bool], edges: &[(usize, usize)], params: &SwapParams) -> usize {
    let start = Instant::now();
    let limit = Duration::from_secs_f64(params.time_limit_secs.max(0.0));
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); pos.len()];
    for (k, &(i, j)) in edges.iter().enumerate() {
        incident[i].push(k);
        incident[j].push(k);
    }
    let r = params.radius.max(0.0);
    let ri = r.floor() as i64;
    let mut offsets = Vec::new();
    for dx in -ri..=ri {
        for dy in -ri..=ri {
            if (dx, dy) != (0, 0) && ((dx * dx + dy * dy) as f64) <= r * r {
                offsets.push((dx, dy));
            }
        }
    }
    let mut swaps = 0;
    'scans: for _ in 0..params.max_scans {
        let mut improved = false;
        for a in 0..pos.len() {
            if pinned[a] || incident[a].is_empty() {
                continue;
            }
            let at: HashMap<Point, usize> = pos.iter().enumerate().map(|(k, &p)| (p, k)).collect();
            let mut near: Vec<usize> = offsets
                .iter()
                .filter_map(|&(dx, dy)| at.get(&Point::new(pos[a].x + dx, pos[a].y + dy)).copied())
                .filter(|&b| b > a && !pinned[b])
                .collect();
            near.sort_unstable();
            for b in near {
                if start.elapsed() > limit {
                    break 'scans;
                }
                let mut local: Vec<usize> = incident[a].iter().chain(&incident[b]).copied().collect();
                local.sort_unstable();
                local.dedup();
                let before = local_crossings(pos, edges, &local);
                pos.swap(a, b);
                let after = local_crossings(pos, edges, &local);
                if after < before {
                    swaps += 1;
                    improved = true;
                    break;
                } else {
                    pos.swap(a, b);
                }
            }
        }
        if !improved {
            break;
        }
    }
    swaps
}
