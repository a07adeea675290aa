// SPDX-License-Identifier: Apache-2.0

//! Minimum-cost assignment of free masses to grid points.

use std::collections::BTreeSet;

use crate::mdl::Point;

use super::PlaceError;

/// Candidate points kept per mass before falling back to the full cost matrix.
pub const ASSIGN_CANDIDATES: usize = 50;

/// Shortest augmenting path Hungarian method on a dense `rows x cols` matrix with
/// `rows <= cols`. Returns the column of every row.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "more rows than columns");
    // 1-based potentials; column 0 is the virtual start.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

fn sq_dist(a: (f64, f64), p: Point) -> f64 {
    let (dx, dy) = (a.0 - p.x as f64, a.1 - p.y as f64);
    dx * dx + dy * dy
}

/// Injective assignment of `positions` to `points` minimizing total squared displacement.
/// Each mass first considers only its `candidates` nearest points; if that restriction
/// leaves no perfect matching the full matrix is solved.
pub fn assign_points(positions: &[(f64, f64)], points: &[Point], candidates: usize) -> Result<Vec<Point>, PlaceError> {
    if positions.len() > points.len() {
        return Err(PlaceError::Capacity {
            masses: positions.len(),
            points: points.len(),
        });
    }
    if positions.is_empty() {
        return Ok(Vec::new());
    }
    if candidates < points.len() {
        let mut cols = BTreeSet::new();
        let mut allowed = Vec::with_capacity(positions.len());
        for &pos in positions {
            let mut near: Vec<usize> = (0..points.len()).collect();
            near.sort_by(|&a, &b| {
                sq_dist(pos, points[a])
                    .total_cmp(&sq_dist(pos, points[b]))
                    .then(a.cmp(&b))
            });
            near.truncate(candidates);
            cols.extend(near.iter().copied());
            allowed.push(near.into_iter().collect::<BTreeSet<usize>>());
        }
        let cols: Vec<usize> = cols.into_iter().collect();
        if cols.len() >= positions.len() {
            // Forbidden pairs cost more than any complete candidate matching can.
            let big = positions
                .iter()
                .map(|&pos| cols.iter().map(|&c| sq_dist(pos, points[c])).fold(0.0, f64::max))
                .sum::<f64>()
                + 1.0;
            let cost: Vec<Vec<f64>> = positions
                .iter()
                .zip(&allowed)
                .map(|(&pos, ok)| {
                    cols.iter()
                        .map(|&c| if ok.contains(&c) { sq_dist(pos, points[c]) } else { big })
                        .collect()
                })
                .collect();
            let sol = hungarian(&cost);
            if sol.iter().zip(&allowed).all(|(&c, ok)| ok.contains(&cols[c])) {
                return Ok(sol.into_iter().map(|c| points[cols[c]]).collect());
            }
        }
    }
    let cost: Vec<Vec<f64>> = positions
        .iter()
        .map(|&pos| points.iter().map(|&p| sq_dist(pos, p)).collect())
        .collect();
    Ok(hungarian(&cost).into_iter().map(|c| points[c]).collect())
}
