// SPDX-License-Identifier: Apache-2.0

//! Integer lattice points of a closed polygon, boundary included.

use crate::mdl::{BoundaryLine, Point};

use super::PlaceError;

#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    pub vertices: Vec<Point>,
    /// Every lattice point inside or on the boundary, in lexicographic order.
    pub points: Vec<Point>,
    /// Lattice points of each named boundary line, ordered from its first point.
    pub lines: Vec<(String, Vec<Point>)>,
    pub area: f64,
}

impl GridDomain {
    pub fn contains(&self, p: Point) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    pub fn line(&self, name: &str) -> Option<&[Point]> {
        self.lines.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bbox(&self) -> (Point, Point) {
        bbox(&self.vertices)
    }
}

fn bbox(v: &[Point]) -> (Point, Point) {
    let min = Point::new(
        v.iter().map(|p| p.x).min().unwrap_or(0),
        v.iter().map(|p| p.y).min().unwrap_or(0),
    );
    let max = Point::new(
        v.iter().map(|p| p.x).max().unwrap_or(0),
        v.iter().map(|p| p.y).max().unwrap_or(0),
    );
    (min, max)
}

fn cross(o: Point, a: Point, b: Point) -> i64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

pub fn on_segment(p: Point, a: Point, b: Point) -> bool {
    cross(a, b, p) == 0 && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Even-odd ray cast; only meaningful for points off the boundary.
fn strictly_inside(p: Point, v: &[Point]) -> bool {
    let mut inside = false;
    for k in 0..v.len() {
        let (a, b) = (v[k], v[(k + 1) % v.len()]);
        if (a.y > p.y) != (b.y > p.y) {
            // x of the edge at height p.y, compared without division.
            let lhs = (p.x - a.x) * (b.y - a.y);
            let rhs = (b.x - a.x) * (p.y - a.y);
            if (b.y > a.y && lhs < rhs) || (b.y < a.y && lhs > rhs) {
                inside = !inside;
            }
        }
    }
    inside
}

pub fn point_in_polygon(p: Point, v: &[Point]) -> bool {
    (0..v.len()).any(|k| on_segment(p, v[k], v[(k + 1) % v.len()])) || strictly_inside(p, v)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Lattice points on the segment from `a` to `b`, starting at `a`.
pub fn segment_points(a: Point, b: Point) -> Vec<Point> {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let g = gcd(dx, dy).max(1);
    (0..=g)
        .map(|k| Point::new(a.x + dx / g * k, a.y + dy / g * k))
        .collect()
}

pub fn discretize_polygon(vertices: &[Point]) -> Result<GridDomain, PlaceError> {
    let area2: i64 = (0..vertices.len())
        .map(|k| {
            let (a, b) = (vertices[k], vertices[(k + 1) % vertices.len()]);
            a.x * b.y - b.x * a.y
        })
        .sum();
    if vertices.len() < 3 || area2 == 0 {
        return Err(PlaceError::Degenerate);
    }
    let (lo, hi) = bbox(vertices);
    let mut points = Vec::new();
    for x in lo.x..=hi.x {
        for y in lo.y..=hi.y {
            let p = Point::new(x, y);
            if point_in_polygon(p, vertices) {
                points.push(p);
            }
        }
    }
    Ok(GridDomain {
        vertices: vertices.to_vec(),
        points,
        lines: Vec::new(),
        area: area2.unsigned_abs() as f64 / 2.0,
    })
}

/// Discretizes the polygon traced by the boundary lines in declaration order.
pub fn discretize(boundary: &[BoundaryLine]) -> Result<GridDomain, PlaceError> {
    let vertices: Vec<Point> = boundary.iter().map(|l| l.p1).collect();
    let mut d = discretize_polygon(&vertices)?;
    d.lines = boundary
        .iter()
        .map(|l| (l.name.clone(), segment_points(l.p1, l.p2)))
        .collect();
    Ok(d)
}
