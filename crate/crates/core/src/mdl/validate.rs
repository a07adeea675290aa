// SPDX-License-Identifier: Apache-2.0

//! Semantic checks over a parsed document. Problems are returned as data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ast::*;
use super::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span,
            message: message.into(),
        }
    }

    fn warning(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            span,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: severity: message`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{file}:{}:{}: {}: {}",
            self.span.line, self.span.col, self.severity, self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.severity, self.message)
    }
}

/// Twice the signed area of the vertex loop. Negative means clockwise with y pointing up.
pub fn signed_area2(vertices: &[Point]) -> i64 {
    let n = vertices.len();
    (0..n)
        .map(|k| {
            let (a, b) = (vertices[k], vertices[(k + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum()
}

/// Runs every document check. An empty result means the document is fully valid;
/// warnings alone do not block compilation.
pub fn validate(doc: &MdlDocument) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    check_boundary(doc, &mut diags);
    check_ios(doc, &mut diags);
    check_behavior(doc, &mut diags);
    diags
}

fn check_boundary(doc: &MdlDocument, diags: &mut Vec<Diagnostic>) {
    if doc.boundary.len() < 3 {
        diags.push(Diagnostic::error(
            doc.span,
            format!("boundary needs at least 3 lines, found {}", doc.boundary.len()),
        ));
        return;
    }
    let mut names = BTreeSet::new();
    for line in &doc.boundary {
        if !names.insert(line.name.as_str()) {
            diags.push(Diagnostic::error(
                line.span,
                format!("duplicate boundary line `{}`", line.name),
            ));
        }
        if line.p1 == line.p2 {
            diags.push(Diagnostic::error(
                line.span,
                format!("boundary line `{}` has identical endpoints", line.name),
            ));
        }
    }
    let n = doc.boundary.len();
    let mut closed = true;
    for k in 0..n {
        let (a, b) = (&doc.boundary[k], &doc.boundary[(k + 1) % n]);
        if a.p2 != b.p1 {
            closed = false;
            diags.push(Diagnostic::error(
                b.span,
                format!(
                    "boundary not closed: line `{}` ends at ({}, {}) but line `{}` starts at ({}, {})",
                    a.name, a.p2.x, a.p2.y, b.name, b.p1.x, b.p1.y
                ),
            ));
        }
    }
    if !closed {
        return;
    }
    let area2 = signed_area2(&doc.vertices());
    if area2 == 0 {
        diags.push(Diagnostic::error(
            doc.boundary[0].span,
            "boundary is degenerate (zero area)",
        ));
    } else if area2 > 0 {
        diags.push(Diagnostic::error(doc.boundary[0].span, "boundary not clockwise"));
    }
}

fn check_ios(doc: &MdlDocument, diags: &mut Vec<Diagnostic>) {
    let mut names = BTreeSet::new();
    let mut pins: BTreeMap<(String, u64), &str> = BTreeMap::new();
    for io in &doc.ios {
        if !names.insert(io.name.as_str()) {
            diags.push(Diagnostic::error(io.span, format!("duplicate I/O name `{}`", io.name)));
        }
        if io.locations.is_empty() {
            diags.push(Diagnostic::error(io.span, format!("`{}` has no location", io.name)));
        }
        if io.kind == IoKind::Sensor && io.actuator_type.is_some() {
            diags.push(Diagnostic::warning(
                io.span,
                format!("`type` on sensor `{}` is ignored", io.name),
            ));
        }
        let mut codes_ok = true;
        for (code, _) in &io.values {
            if parse_code(code).is_none() {
                codes_ok = false;
                diags.push(Diagnostic::error(
                    io.span,
                    format!("value code `{code}` of `{}` is not a binary literal like 0b01", io.name),
                ));
            }
        }
        let mut seen_codes = BTreeSet::new();
        for (code, _) in &io.values {
            if !seen_codes.insert(code.as_str()) {
                diags.push(Diagnostic::error(
                    io.span,
                    format!("duplicate value code `{code}` in `{}`", io.name),
                ));
            }
        }
        if codes_ok && !io.values.is_empty() {
            match io.code_width() {
                None => diags.push(Diagnostic::error(
                    io.span,
                    format!("value codes of `{}` have different widths", io.name),
                )),
                // One-bit codes label each bit individually, so they fit any location count.
                Some(w) if w != io.width() && w != 1 => diags.push(Diagnostic::error(
                    io.span,
                    format!(
                        "location count ≠ bit width: `{}` has {} location(s) but {w}-bit value codes",
                        io.name,
                        io.width()
                    ),
                )),
                _ => {}
            }
        }
        for loc in &io.locations {
            if doc.line(&loc.line).is_none() {
                diags.push(Diagnostic::error(
                    loc.span,
                    format!("`{}` refers to unknown boundary line `{}`", io.name, loc.line),
                ));
            }
            if !(0.0..=1.0).contains(&loc.fraction) || !loc.fraction.is_finite() {
                diags.push(Diagnostic::error(
                    loc.span,
                    format!("location fraction {} of `{}` is outside [0, 1]", loc.fraction, io.name),
                ));
            } else if loc.fraction == 0.0 || loc.fraction == 1.0 {
                diags.push(Diagnostic::warning(
                    loc.span,
                    format!(
                        "`{}` is pinned at an endpoint of line `{}`; corner pins can collide with the adjacent line",
                        io.name, loc.line
                    ),
                ));
            }
            let key = (loc.line.clone(), loc.fraction.to_bits());
            if let Some(other) = pins.insert(key, &io.name) {
                diags.push(Diagnostic::error(
                    loc.span,
                    format!(
                        "location ({}, {}) of `{}` is already used by `{other}`",
                        loc.line, loc.fraction, io.name
                    ),
                ));
            }
        }
    }
}

fn is_zero_literal(e: &Expr) -> bool {
    matches!(e, Expr::Literal { value: 0, .. })
}

fn check_behavior<'a>(doc: &'a MdlDocument, diags: &mut Vec<Diagnostic>) {
    let m = &doc.behavior;

    let mut declared: BTreeMap<&str, u32> = BTreeMap::new();
    let mut declare = |ident: &'a str, width: u32, span: Span, diags: &mut Vec<Diagnostic>| {
        if declared.insert(ident, width).is_some() {
            diags.push(Diagnostic::error(span, format!("`{ident}` is declared more than once")));
        }
    };
    let check_range = |name: &str, range: Option<Range>, span: Span, diags: &mut Vec<Diagnostic>| {
        if let Some(r) = range {
            if r.lsb != 0 {
                diags.push(Diagnostic::error(span, format!("range of `{name}` must be [N:0]")));
            }
        }
    };
    for p in &m.ports {
        declare(&p.name, p.width(), p.span, diags);
        check_range(&p.name, p.range, p.span, diags);
        if p.direction == Direction::Input && p.net_type == NetType::Reg {
            diags.push(Diagnostic::error(p.span, format!("input `{}` cannot be a reg", p.name)));
        }
        if let Some(init) = &p.init {
            if p.direction == Direction::Input {
                diags.push(Diagnostic::error(
                    p.span,
                    format!("input `{}` cannot have an initial value", p.name),
                ));
            } else if !is_zero_literal(init) {
                diags.push(Diagnostic::error(
                    init.span(),
                    format!("initial value of `{}` must be zero", p.name),
                ));
            }
        }
    }
    for r in &m.regs {
        declare(&r.name, r.width(), r.span, diags);
        check_range(&r.name, r.range, r.span, diags);
        if let Some(init) = &r.init {
            if !is_zero_literal(init) {
                diags.push(Diagnostic::error(
                    init.span(),
                    format!("initial value of `{}` must be zero", r.name),
                ));
            }
        }
    }
    for lp in &m.params {
        declare(&lp.name, lp.range.map_or(32, Range::width), lp.span, diags);
        if !matches!(lp.value, Expr::Literal { .. }) {
            diags.push(Diagnostic::error(
                lp.span,
                format!("localparam `{}` must be a literal constant", lp.name),
            ));
        }
    }

    match m.port("clk") {
        Some(p) if p.direction == Direction::Input && p.width() == 1 => {}
        Some(p) => diags.push(Diagnostic::error(p.span, "`clk` must be a 1-bit input")),
        None => diags.push(Diagnostic::error(m.span, "module has no `clk` input")),
    }
    match m.processes.len() {
        0 => diags.push(Diagnostic::error(
            m.span,
            "module has no `always @(posedge clk)` process",
        )),
        1 => {}
        _ => diags.push(Diagnostic::error(
            m.processes[1].span,
            "only one `always @(posedge clk)` process is supported",
        )),
    }
    for p in &m.processes {
        if p.clock != "clk" {
            diags.push(Diagnostic::error(
                p.span,
                format!("process is clocked by `{}`; the clock must be `clk`", p.clock),
            ));
        }
    }

    for io in &doc.ios {
        let (want, what) = match io.kind {
            IoKind::Sensor => (Direction::Input, "input"),
            IoKind::Actuator => (Direction::Output, "output"),
        };
        match m.port(&io.name) {
            None => diags.push(Diagnostic::error(
                io.span,
                format!("{} `{}` has no matching {what} port", io.kind.as_str(), io.name),
            )),
            Some(p) if p.direction != want => diags.push(Diagnostic::error(
                p.span,
                format!(
                    "port `{}` must be an {what} to match the {} declaration",
                    p.name,
                    io.kind.as_str()
                ),
            )),
            Some(p) if p.width() as usize != io.width() => diags.push(Diagnostic::error(
                p.span,
                format!(
                    "port `{}` is {} bit(s) wide but `{}` has {} location(s)",
                    p.name,
                    p.width(),
                    io.name,
                    io.width()
                ),
            )),
            _ => {}
        }
    }
    for p in &m.ports {
        if p.name == "clk" {
            continue;
        }
        if doc.io(&p.name).is_none() {
            diags.push(Diagnostic::error(
                p.span,
                format!(
                    "port `{}` has no {} declaration",
                    p.name,
                    if p.direction == Direction::Input {
                        "sensor"
                    } else {
                        "actuator"
                    }
                ),
            ));
        }
    }

    for proc_ in &m.processes {
        proc_.body.visit(&mut |s| match s {
            Stmt::Assign { lhs, rhs, .. } => {
                check_target(m, lhs, diags);
                check_expr(&declared, rhs, diags);
            }
            Stmt::If { cond, .. } => check_expr(&declared, cond, diags),
            Stmt::Case { subject, arms, .. } => {
                check_expr(&declared, subject, diags);
                for arm in arms {
                    for l in &arm.labels {
                        check_expr(&declared, l, diags);
                    }
                }
            }
            Stmt::Block(_) | Stmt::Empty => {}
        });
    }
}

fn check_target(m: &BehaviorAst, lhs: &LValue, diags: &mut Vec<Diagnostic>) {
    let width = if let Some(r) = m.reg(&lhs.name) {
        r.width()
    } else if let Some(p) = m.port(&lhs.name) {
        if p.direction == Direction::Input {
            diags.push(Diagnostic::error(
                lhs.span,
                format!("cannot assign to input `{}`", lhs.name),
            ));
            return;
        }
        if p.net_type != NetType::Reg {
            diags.push(Diagnostic::error(
                lhs.span,
                format!(
                    "cannot assign to `{}`: outputs written by the process must be `output reg`",
                    lhs.name
                ),
            ));
            return;
        }
        p.width()
    } else if m.param(&lhs.name).is_some() {
        diags.push(Diagnostic::error(
            lhs.span,
            format!("cannot assign to localparam `{}`", lhs.name),
        ));
        return;
    } else {
        diags.push(Diagnostic::error(lhs.span, format!("undeclared name `{}`", lhs.name)));
        return;
    };
    if let Some(i) = lhs.index {
        if i >= width {
            diags.push(Diagnostic::error(
                lhs.span,
                format!("bit {i} is out of range for `{}` ({width} bits)", lhs.name),
            ));
        }
    }
}

fn check_expr(declared: &BTreeMap<&str, u32>, e: &Expr, diags: &mut Vec<Diagnostic>) {
    match e {
        Expr::Ident { name, span } => {
            if !declared.contains_key(name.as_str()) {
                diags.push(Diagnostic::error(*span, format!("undeclared name `{name}`")));
            } else if name == "clk" {
                diags.push(Diagnostic::error(*span, "`clk` cannot be used as data"));
            }
        }
        Expr::Index { name, index, span } => match declared.get(name.as_str()) {
            None => diags.push(Diagnostic::error(*span, format!("undeclared name `{name}`"))),
            Some(w) if index >= w => diags.push(Diagnostic::error(
                *span,
                format!("bit {index} is out of range for `{name}` ({w} bits)"),
            )),
            _ => {}
        },
        Expr::Literal { .. } => {}
        Expr::Unary { operand, .. } => check_expr(declared, operand, diags),
        Expr::Binary { lhs, rhs, .. } => {
            check_expr(declared, lhs, diags);
            check_expr(declared, rhs, diags);
        }
    }
}
