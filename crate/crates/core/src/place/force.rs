// SPDX-License-Identifier: Apache-2.0

//! Fruchterman-Reingold force-directed layout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rectangle positions are clamped to, and the area that sets the spring length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub min: (f64, f64),
    pub max: (f64, f64),
    pub area: f64,
}

impl Frame {
    fn clamp(&self, p: (f64, f64)) -> (f64, f64) {
        (p.0.clamp(self.min.0, self.max.0), p.1.clamp(self.min.1, self.max.1))
    }

    pub fn ideal_length(&self, nodes: usize) -> f64 {
        (self.area / nodes.max(1) as f64).sqrt()
    }
}

pub fn random_positions(n: usize, frame: &Frame, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (
                rng.gen_range(frame.min.0..=frame.max.0),
                rng.gen_range(frame.min.1..=frame.max.1),
            )
        })
        .collect()
}

/// Runs `iterations` steps from `pos`. Attraction `d^2/k` along edges, repulsion `k^2/d`
/// between all pairs, each move capped by a temperature that falls linearly to zero.
/// Masses with `fixed[i]` never move.
pub fn force_layout(
    pos: &mut [(f64, f64)],
    edges: &[(usize, usize)],
    fixed: &[bool],
    frame: &Frame,
    iterations: usize,
) {
    let n = pos.len();
    if n < 2 || iterations == 0 {
        return;
    }
    let k = frame.ideal_length(n);
    let k2 = k * k;
    let t0 = 0.1 * (frame.max.0 - frame.min.0).max(frame.max.1 - frame.min.1).max(1.0);
    let mut disp = vec![(0.0, 0.0); n];
    for it in 0..iterations {
        let t = t0 * (1.0 - it as f64 / iterations as f64);
        disp.iter_mut().for_each(|d| *d = (0.0, 0.0));
        for i in 0..n {
            for j in i + 1..n {
                let (mut dx, mut dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                let mut d2 = dx * dx + dy * dy;
                if d2 < 1e-18 {
                    // Coincident: separate along a fixed, index-dependent direction.
                    let a = (i * 7919 + j * 104_729) as f64;
                    (dx, dy) = (a.cos() * 1e-3, a.sin() * 1e-3);
                    d2 = dx * dx + dy * dy;
                }
                let f = k2 / d2;
                disp[i].0 += dx * f;
                disp[i].1 += dy * f;
                disp[j].0 -= dx * f;
                disp[j].1 -= dy * f;
            }
        }
        for &(i, j) in edges {
            let (dx, dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
            let d = (dx * dx + dy * dy).sqrt();
            let f = d / k;
            disp[i].0 -= dx * f;
            disp[i].1 -= dy * f;
            disp[j].0 += dx * f;
            disp[j].1 += dy * f;
        }
        for i in 0..n {
            if fixed[i] {
                continue;
            }
            let (dx, dy) = disp[i];
            let len = (dx * dx + dy * dy).sqrt();
            if len > 0.0 {
                let s = len.min(t) / len;
                pos[i] = frame.clamp((pos[i].0 + dx * s, pos[i].1 + dy * s));
            }
        }
    }
}
