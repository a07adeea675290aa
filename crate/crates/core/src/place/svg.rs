// SPDX-License-Identifier: Apache-2.0

//! SVG drawing of a placed network: masses as circles colored by bias, couplings as
//! lines, and a red bar across every coupling with negative stiffness.

use std::fmt::Write as _;

use super::{GridDomain, Layout};
use crate::techmap::{CouplingKind, MassSpringNetwork, MassTag};

const SCALE: f64 = 12.0;
const MARGIN: f64 = 2.0;

pub fn render_svg(net: &MassSpringNetwork, layout: &Layout, domain: &GridDomain) -> String {
    let (lo, hi) = domain.bbox();
    let w = (hi.x - lo.x) as f64 + 2.0 * MARGIN;
    let h = (hi.y - lo.y) as f64 + 2.0 * MARGIN;
    // y grows upward in the source geometry.
    let tx = |x: i64| ((x - lo.x) as f64 + MARGIN) * SCALE;
    let ty = |y: i64| ((hi.y - y) as f64 + MARGIN) * SCALE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        w * SCALE,
        h * SCALE,
        w * SCALE,
        h * SCALE
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let poly: Vec<String> = domain
        .vertices
        .iter()
        .map(|p| format!("{:.1},{:.1}", tx(p.x), ty(p.y)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polygon points="{}" fill="none" stroke="#444444" stroke-width="2"/>"##,
        poly.join(" ")
    );
    let _ = writeln!(s, r##"<g stroke="#888888" stroke-width="1.5">"##);
    for c in &net.couplings {
        if c.i == c.j {
            continue;
        }
        let (a, b) = (layout.positions[c.i], layout.positions[c.j]);
        let (x1, y1, x2, y2) = (tx(a.x), ty(a.y), tx(b.x), ty(b.y));
        let dash = if c.kind == CouplingKind::NonlinearGate {
            r#" stroke-dasharray="4 3""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}"{dash}/>"#
        );
        if c.kind.strength(1.0) < 0.0 {
            let (mx, my) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
            let len = ((x2 - x1).powi(2) + (y2 - y1).powi(2)).sqrt().max(1e-9);
            let (nx, ny) = (-(y2 - y1) / len * 4.0, (x2 - x1) / len * 4.0);
            let _ = writeln!(
                s,
                r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#d62728" stroke-width="3"/>"##,
                mx - nx,
                my - ny,
                mx + nx,
                my + ny
            );
        }
    }
    let _ = writeln!(s, "</g>");
    for m in &net.masses {
        let p = layout.positions[m.id];
        let fill = match m.bias.signum() {
            1 => "#1f77b4",
            -1 => "#ff7f0e",
            _ => "#c7c7c7",
        };
        let stroke = match m.tag {
            MassTag::Sensor | MassTag::Actuator => r##" stroke="#000000" stroke-width="2""##,
            _ => "",
        };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.1}" cy="{:.1}" r="{:.1}" fill="{fill}"{stroke}><title>{}</title></circle>"#,
            tx(p.x),
            ty(p.y),
            SCALE * 0.35,
            m.id
        );
    }
    s.push_str("</svg>\n");
    s
}
