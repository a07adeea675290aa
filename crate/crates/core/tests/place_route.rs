// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use mechsynth::compile::{build_network, load_document, CompileConfig};
use mechsynth::mdl::Point;
use mechsynth::place::{
    assign_points, count_crossings, discretize, discretize_polygon, force_layout, network_edges, pin_ios, pin_point,
    place, place_seed, reduce_crossings, Frame, Layout, PlaceError, PlaceOptions, SwapParams,
};
use proptest::prelude::*;

const MAZE: &str = include_str!("../../../mdl/mazerobot.mdl");
const LOCK: &str = include_str!("../../../mdl/lock.mdl");

fn pts(v: &[(i64, i64)]) -> Vec<Point> {
    v.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

/// Winding-number oracle in floating point, boundary points accepted by distance.
fn oracle_inside(p: (f64, f64), v: &[Point]) -> bool {
    let n = v.len();
    let mut angle = 0.0;
    for k in 0..n {
        let (a, b) = (v[k], v[(k + 1) % n]);
        let (ax, ay) = (a.x as f64 - p.0, a.y as f64 - p.1);
        let (bx, by) = (b.x as f64 - p.0, b.y as f64 - p.1);
        // On the segment: zero cross product and within the span.
        let cross = ax * by - ay * bx;
        let dot = ax * bx + ay * by;
        if cross.abs() < 1e-9 && dot <= 1e-9 {
            return true;
        }
        angle += cross.atan2(dot);
    }
    angle.abs() > std::f64::consts::PI
}

fn oracle_count(v: &[Point]) -> usize {
    let (x0, x1) = (
        v.iter().map(|p| p.x).min().unwrap(),
        v.iter().map(|p| p.x).max().unwrap(),
    );
    let (y0, y1) = (
        v.iter().map(|p| p.y).min().unwrap(),
        v.iter().map(|p| p.y).max().unwrap(),
    );
    let mut n = 0;
    for x in x0..=x1 {
        for y in y0..=y1 {
            n += usize::from(oracle_inside((x as f64, y as f64), v));
        }
    }
    n
}

#[test]
fn square_and_pentagon_lattice_counts() {
    let square = pts(&[(0, 0), (0, 39), (39, 39), (39, 0)]);
    let d = discretize_polygon(&square).unwrap();
    assert_eq!(d.points.len(), 1600);
    assert_eq!(d.points.len(), oracle_count(&square));

    let pentagon = pts(&[(0, 35), (20, 49), (39, 35), (39, 0), (0, 0)]);
    let d = discretize_polygon(&pentagon).unwrap();
    assert_eq!(d.points.len(), oracle_count(&pentagon));
    assert!(d.points.windows(2).all(|w| w[0] < w[1]));

    let unit = pts(&[(0, 0), (0, 1), (1, 1), (1, 0)]);
    let d = discretize_polygon(&unit).unwrap();
    assert_eq!(d.points, pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]));

    assert!(matches!(
        discretize_polygon(&pts(&[(0, 0), (5, 0), (9, 0)])),
        Err(PlaceError::Degenerate)
    ));
}

#[test]
fn document_boundaries_discretize() {
    for src in [MAZE, LOCK] {
        let (doc, _) = load_document(src, "t.mdl").unwrap();
        let d = discretize(&doc.boundary).unwrap();
        for (name, line) in &d.lines {
            let l = doc.line(name).unwrap();
            assert_eq!(line.first(), Some(&l.p1));
            assert_eq!(line.last(), Some(&l.p2));
            assert!(line.iter().all(|p| d.contains(*p)));
        }
    }
}

#[test]
fn pin_arithmetic() {
    assert_eq!(pin_point(Point::new(0, 0), Point::new(0, 39), 0.5), Point::new(0, 20));
    assert_eq!(pin_point(Point::new(0, 0), Point::new(0, 39), 0.0), Point::new(0, 0));
    assert_eq!(
        pin_point(Point::new(0, 0), Point::new(10, 0), 0.50),
        pin_point(Point::new(0, 0), Point::new(10, 0), 0.51)
    );
}

#[test]
fn colliding_pins_are_rejected() {
    let src = r#"mechanicalmodule t();
  boundary {
      line a {(0,0), (0,10)},
      line b {(0,10), (10,10)},
      line c {(10,10), (10,0)},
      line d {(10,0), (0,0)}};
  sensor s1 { location = {(a, 0.50)}, values = { "0b0": "OFF", "0b1": "ON"}};
  sensor s2 { location = {(a, 0.51)}, values = { "0b0": "OFF", "0b1": "ON"}};
  actuator y { type = "linear actuator", location = {(c, 0.5)}, values = { "0b0": "OFF", "0b1": "ON"}};
  module m(input wire clk, input wire s1, input wire s2, output reg y);
    always @(posedge clk) y <= s1 & s2;
  endmodule
endmechanicalmodule
"#;
    let (doc, _) = load_document(src, "t.mdl").unwrap();
    let (_, net, _) = build_network(&doc, &CompileConfig::default()).unwrap();
    match pin_ios(&doc, &net) {
        Err(PlaceError::PinCollision { x: 0, y: 5, .. }) => {}
        other => panic!("expected a collision, got {other:?}"),
    }
}

fn frame(w: f64) -> Frame {
    Frame {
        min: (0.0, 0.0),
        max: (w, w),
        area: w * w,
    }
}

#[test]
fn two_node_spring_reaches_ideal_length() {
    let f = frame(40.0);
    let k = f.ideal_length(2);
    let mut pos = vec![(15.0, 20.0), (17.0, 21.0)];
    force_layout(&mut pos, &[(0, 1)], &[false, false], &f, 500);
    let d = ((pos[0].0 - pos[1].0).powi(2) + (pos[0].1 - pos[1].1).powi(2)).sqrt();
    assert!((d - k).abs() / k < 0.05, "distance {d}, ideal {k}");
}

#[test]
fn trivial_layouts() {
    let f = frame(10.0);
    let mut one = vec![(3.0, 4.0)];
    force_layout(&mut one, &[], &[false], &f, 100);
    assert_eq!(one, vec![(3.0, 4.0)]);
    let mut pinned = vec![(1.0, 2.0), (7.0, 7.0)];
    force_layout(&mut pinned, &[(0, 1)], &[true, true], &f, 100);
    assert_eq!(pinned, vec![(1.0, 2.0), (7.0, 7.0)]);
}

fn brute_force_cost(pos: &[(f64, f64)], points: &[Point]) -> f64 {
    fn rec(k: usize, pos: &[(f64, f64)], points: &[Point], used: &mut Vec<bool>) -> f64 {
        if k == pos.len() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for j in 0..points.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            let c = (pos[k].0 - points[j].x as f64).powi(2) + (pos[k].1 - points[j].y as f64).powi(2);
            best = best.min(c + rec(k + 1, pos, points, used));
            used[j] = false;
        }
        best
    }
    rec(0, pos, points, &mut vec![false; points.len()])
}

fn cost(pos: &[(f64, f64)], sol: &[Point]) -> f64 {
    pos.iter()
        .zip(sol)
        .map(|(a, p)| (a.0 - p.x as f64).powi(2) + (a.1 - p.y as f64).powi(2))
        .sum()
}

#[test]
fn three_by_three_assignment() {
    let pos = [(0.2, 0.1), (0.1, 0.0), (2.0, 2.2)];
    let points = pts(&[(0, 0), (1, 0), (2, 2)]);
    let sol = assign_points(&pos, &points, 50).unwrap();
    assert!((cost(&pos, &sol) - brute_force_cost(&pos, &points)).abs() < 1e-12);
    assert_eq!(sol.iter().collect::<BTreeSet<_>>().len(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn assignment_is_optimal(
        pos in prop::collection::vec((0.0f64..6.0, 0.0f64..6.0), 1..=7),
        extra in 0usize..3,
        candidates in 1usize..6,
    ) {
        let mut points = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                points.push(Point::new(x * 2, y * 2));
            }
        }
        points.truncate(pos.len() + extra);
        // With at least as many candidates as masses the truncation cannot cut off an
        // optimum; with fewer it still yields a valid matching.
        let exact = assign_points(&pos, &points, candidates.max(pos.len())).unwrap();
        prop_assert_eq!(exact.iter().collect::<BTreeSet<_>>().len(), pos.len());
        prop_assert!((cost(&pos, &exact) - brute_force_cost(&pos, &points)).abs() < 1e-9);
        let default = assign_points(&pos, &points, mechsynth::place::ASSIGN_CANDIDATES).unwrap();
        prop_assert!((cost(&pos, &default) - brute_force_cost(&pos, &points)).abs() < 1e-9);
        let narrow = assign_points(&pos, &points, candidates).unwrap();
        prop_assert_eq!(narrow.iter().collect::<BTreeSet<_>>().len(), pos.len());
        prop_assert!(narrow.iter().all(|p| points.contains(p)));
    }

    #[test]
    fn crossing_count_matches_pairwise_oracle(
        coords in prop::collection::vec((0i64..8, 0i64..8), 12),
        edges in prop::collection::vec((0usize..12, 0usize..12), 10),
    ) {
        let pos: Vec<Point> = coords.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let edges = mechsynth::place::unique_edges(edges);
        let want = oracle_crossings(&pos, &edges);
        prop_assert_eq!(count_crossings(&pos, &edges), want);
    }

    #[test]
    fn swap_pass_never_adds_crossings(
        seed_coords in prop::collection::btree_set((0i64..7, 0i64..7), 14),
        edges in prop::collection::vec((0usize..14, 0usize..14), 20),
        pins in prop::collection::vec(any::<bool>(), 14),
    ) {
        let mut pos: Vec<Point> = seed_coords.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let n = pos.len();
        let edges = mechsynth::place::unique_edges(edges.into_iter().filter(|&(i, j)| i < n && j < n));
        let pinned: Vec<bool> = pins[..n].to_vec();
        let before = count_crossings(&pos, &edges);
        let original = pos.clone();
        reduce_crossings(&mut pos, &pinned, &edges, &SwapParams::default());
        prop_assert!(count_crossings(&pos, &edges) <= before);
        for k in 0..n {
            if pinned[k] {
                prop_assert_eq!(pos[k], original[k]);
            }
        }
        let mut sorted = pos.clone();
        sorted.sort();
        let mut orig_sorted = original;
        orig_sorted.sort();
        prop_assert_eq!(sorted, orig_sorted);
    }
}

/// Parametric segment intersection in floating point, proper crossings only.
fn oracle_crossings(pos: &[Point], edges: &[(usize, usize)]) -> usize {
    let mut n = 0;
    for a in 0..edges.len() {
        for b in a + 1..edges.len() {
            let (e, f) = (edges[a], edges[b]);
            if e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1 {
                continue;
            }
            let (p, r) = (
                (pos[e.0].x as f64, pos[e.0].y as f64),
                (
                    pos[e.1].x as f64 - pos[e.0].x as f64,
                    pos[e.1].y as f64 - pos[e.0].y as f64,
                ),
            );
            let (q, s) = (
                (pos[f.0].x as f64, pos[f.0].y as f64),
                (
                    pos[f.1].x as f64 - pos[f.0].x as f64,
                    pos[f.1].y as f64 - pos[f.0].y as f64,
                ),
            );
            let denom = r.0 * s.1 - r.1 * s.0;
            if denom == 0.0 {
                continue;
            }
            let t = ((q.0 - p.0) * s.1 - (q.1 - p.1) * s.0) / denom;
            let u = ((q.0 - p.0) * r.1 - (q.1 - p.1) * r.0) / denom;
            if t > 1e-12 && t < 1.0 - 1e-12 && u > 1e-12 && u < 1.0 - 1e-12 {
                n += 1;
            }
        }
    }
    n
}

#[test]
fn k4_crossing_removed_by_one_swap() {
    let mut pos = pts(&[(0, 0), (4, 0), (4, 4), (0, 4), (3, 1)]);
    let edges = mechsynth::place::unique_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    assert_eq!(count_crossings(&pos, &edges), 1);
    let pinned = [true, true, true, false, false];
    let params = SwapParams {
        radius: 5.0,
        ..SwapParams::default()
    };
    assert_eq!(reduce_crossings(&mut pos, &pinned, &edges, &params), 1);
    assert_eq!(count_crossings(&pos, &edges), 0);
    assert_eq!(pos[3], Point::new(3, 1));

    let before = pos.clone();
    assert_eq!(reduce_crossings(&mut pos, &pinned, &edges, &params), 0);
    assert_eq!(pos, before);
    let mut all = pts(&[(0, 0), (4, 4), (0, 4), (4, 0)]);
    let frozen = all.clone();
    reduce_crossings(&mut all, &[true; 4], &[(0, 1), (2, 3)], &params);
    assert_eq!(all, frozen);
}

#[test]
fn capacity_equal_to_mass_count_is_filled() {
    let points = pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]);
    let pos = [(0.5, 0.5); 4];
    let sol = assign_points(&pos, &points, 1).unwrap();
    assert_eq!(sol.iter().collect::<BTreeSet<_>>().len(), 4);
}

fn placed(
    src: &str,
    opts: &PlaceOptions,
) -> (
    Layout,
    Vec<(usize, Point)>,
    mechsynth::place::GridDomain,
    Vec<(usize, usize)>,
) {
    let (doc, _) = load_document(src, "t.mdl").unwrap();
    let (_, net, _) = build_network(&doc, &CompileConfig::default()).unwrap();
    let layout = place(&doc, &net, opts).unwrap();
    (
        layout,
        pin_ios(&doc, &net).unwrap(),
        discretize(&doc.boundary).unwrap(),
        network_edges(&net),
    )
}

#[test]
fn example_layouts_hold_their_invariants() {
    let opts = PlaceOptions {
        seeds: 2,
        ..PlaceOptions::default()
    };
    for src in [MAZE, LOCK] {
        let (layout, pins, domain, edges) = placed(src, &opts);
        layout.check(&domain, &pins).unwrap();
        assert_eq!(layout.crossings, count_crossings(&layout.positions, &edges));
        let (again, ..) = placed(src, &opts);
        assert_eq!(layout, again);
        let json = layout.to_json(&opts);
        let (back, params) = Layout::from_json(&json).unwrap();
        assert_eq!(back, layout);
        assert_eq!(params, opts);
    }
}

#[test]
fn swap_pass_improves_a_real_layout() {
    let (doc, _) = load_document(MAZE, "t.mdl").unwrap();
    let (_, net, _) = build_network(&doc, &CompileConfig::default()).unwrap();
    let domain = discretize(&doc.boundary).unwrap();
    let pins = pin_ios(&doc, &net).unwrap();
    let edges = network_edges(&net);
    let no_swaps = PlaceOptions {
        swap: SwapParams {
            max_scans: 0,
            ..SwapParams::default()
        },
        ..PlaceOptions::default()
    };
    let raw = place_seed(net.mass_count(), &edges, &domain, &pins, &no_swaps, 3).unwrap();
    let tuned = place_seed(net.mass_count(), &edges, &domain, &pins, &PlaceOptions::default(), 3).unwrap();
    assert!(tuned.crossings <= raw.crossings);
    tuned.check(&domain, &pins).unwrap();
}
