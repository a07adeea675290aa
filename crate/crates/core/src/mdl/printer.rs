// SPDX-License-Identifier: Apache-2.0

//! Canonical pretty-printer. Output re-parses to an equal document.

use std::fmt::Write;

use super::ast::*;

pub fn print_document(doc: &MdlDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mechanicalmodule {}();", doc.name);
    if !doc.boundary.is_empty() {
        out.push_str("  boundary {\n");
        for (k, line) in doc.boundary.iter().enumerate() {
            let sep = if k + 1 == doc.boundary.len() { "" } else { "," };
            let _ = writeln!(
                out,
                "    line {} {{({}, {}), ({}, {})}}{sep}",
                line.name, line.p1.x, line.p1.y, line.p2.x, line.p2.y
            );
        }
        out.push_str("  };\n");
    }
    for io in &doc.ios {
        let _ = writeln!(out, "  {} {} {{", io.kind.as_str(), io.name);
        let mut fields = Vec::new();
        if let Some(t) = &io.actuator_type {
            fields.push(format!("    type = {}", quote(t)));
        }
        let locs: Vec<String> = io
            .locations
            .iter()
            .map(|l| format!("({}, {})", l.line, fmt_fraction(l.fraction)))
            .collect();
        fields.push(format!("    location = {{{}}}", locs.join(", ")));
        let values: Vec<String> = io
            .values
            .iter()
            .map(|(c, l)| format!("{}: {}", quote(c), quote(l)))
            .collect();
        fields.push(format!("    values = {{{}}}", values.join(", ")));
        out.push_str(&fields.join(",\n"));
        out.push_str(" };\n");
    }
    print_module(&mut out, &doc.behavior);
    out.push_str("endmechanicalmodule\n");
    out
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            q.push('\\');
        }
        q.push(c);
    }
    q.push('"');
    q
}

fn fmt_fraction(f: f64) -> String {
    let s = format!("{f}");
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

fn fmt_range(r: Option<Range>) -> String {
    r.map(|r| format!("[{}:{}] ", r.msb, r.lsb)).unwrap_or_default()
}

fn print_module(out: &mut String, m: &BehaviorAst) {
    let _ = writeln!(out, "  module {} (", m.name);
    for (k, p) in m.ports.iter().enumerate() {
        let dir = match p.direction {
            Direction::Input => "input",
            Direction::Output => "output",
        };
        let ty = match p.net_type {
            NetType::Wire => "wire",
            NetType::Reg => "reg",
        };
        let init = p
            .init
            .as_ref()
            .map(|e| format!(" = {}", print_expr(e)))
            .unwrap_or_default();
        let sep = if k + 1 == m.ports.len() { "" } else { "," };
        let _ = writeln!(out, "    {dir} {ty} {}{}{init}{sep}", fmt_range(p.range), p.name);
    }
    out.push_str("  );\n");
    for lp in &m.params {
        let _ = writeln!(
            out,
            "    localparam {}{} = {};",
            fmt_range(lp.range),
            lp.name,
            print_expr(&lp.value)
        );
    }
    for r in &m.regs {
        let init = r
            .init
            .as_ref()
            .map(|e| format!(" = {}", print_expr(e)))
            .unwrap_or_default();
        let _ = writeln!(out, "    reg {}{}{init};", fmt_range(r.range), r.name);
    }
    for p in &m.processes {
        let _ = write!(out, "    always @(posedge {}) ", p.clock);
        print_stmt(out, &p.body, 2);
    }
    out.push_str("  endmodule\n");
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

/// Prints a statement starting at the current cursor; ends with a newline.
fn print_stmt(out: &mut String, s: &Stmt, level: usize) {
    match s {
        Stmt::Block(stmts) => {
            out.push_str("begin\n");
            for st in stmts {
                indent(out, level + 1);
                print_stmt(out, st, level + 1);
            }
            indent(out, level);
            out.push_str("end\n");
        }
        Stmt::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let _ = write!(out, "if ({}) ", print_expr(cond));
            if else_branch.is_some() && dangles(then_branch) {
                out.push_str("begin\n");
                indent(out, level + 1);
                print_stmt(out, then_branch, level + 1);
                indent(out, level);
                out.push_str("end\n");
            } else {
                print_stmt(out, then_branch, level);
            }
            if let Some(e) = else_branch {
                indent(out, level);
                out.push_str("else ");
                print_stmt(out, e, level);
            }
        }
        Stmt::Case { subject, arms, default } => {
            let _ = writeln!(out, "case ({})", print_expr(subject));
            for arm in arms {
                indent(out, level + 1);
                let labels: Vec<String> = arm.labels.iter().map(print_expr).collect();
                let _ = write!(out, "{}: ", labels.join(", "));
                print_stmt(out, &arm.body, level + 1);
            }
            if let Some(d) = default {
                indent(out, level + 1);
                out.push_str("default: ");
                print_stmt(out, d, level + 1);
            }
            indent(out, level);
            out.push_str("endcase\n");
        }
        Stmt::Assign { lhs, rhs, blocking } => {
            let op = if *blocking { "=" } else { "<=" };
            let idx = lhs.index.map(|i| format!("[{i}]")).unwrap_or_default();
            let _ = writeln!(out, "{}{idx} {op} {};", lhs.name, print_expr(rhs));
        }
        Stmt::Empty => out.push_str(";\n"),
    }
}

/// True when a following `else` would bind to an `if` nested inside `s`.
fn dangles(s: &Stmt) -> bool {
    match s {
        Stmt::If { else_branch: None, .. } => true,
        Stmt::If {
            else_branch: Some(e), ..
        } => dangles(e),
        _ => false,
    }
}

pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::Ident { name, .. } => name.clone(),
        Expr::Index { name, index, .. } => format!("{name}[{index}]"),
        Expr::Literal { width, base, value, .. } => {
            let digits = |b: LiteralBase| match b {
                LiteralBase::Binary => format!("{value:b}"),
                LiteralBase::Decimal => format!("{value}"),
                LiteralBase::Hex => format!("{value:x}"),
                LiteralBase::Octal => format!("{value:o}"),
            };
            match (width, base) {
                (Some(w), Some(b)) => format!("{w}'{}{}", b.letter(), digits(*b)),
                (None, Some(b)) => format!("'{}{}", b.letter(), digits(*b)),
                (_, None) => format!("{value}"),
            }
        }
        Expr::Unary { op, operand } => {
            let sym = match op {
                UnaryOp::LogicalNot => "!",
                UnaryOp::BitNot => "~",
            };
            format!("{sym}{}", print_operand(operand))
        }
        Expr::Binary { op, lhs, rhs } => {
            format!("{} {} {}", print_operand(lhs), op.symbol(), print_operand(rhs))
        }
    }
}

fn print_operand(e: &Expr) -> String {
    match e {
        Expr::Binary { .. } => format!("({})", print_expr(e)),
        _ => print_expr(e),
    }
}
