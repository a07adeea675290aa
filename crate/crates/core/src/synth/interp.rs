// SPDX-License-Identifier: Apache-2.0

//! Concrete cycle-level interpreter of the behavioral process. It shares no code with the
//! symbolic elaborator and serves as the reference semantics.

use std::collections::BTreeMap;

use crate::mdl::{BehaviorAst, BinaryOp, Direction, Expr, Stmt, UnaryOp};

/// Register values by name (bit k of the value is bit k of the register).
pub type Values = BTreeMap<String, u64>;

fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

pub struct Interpreter<'a> {
    ast: &'a BehaviorAst,
    widths: BTreeMap<&'a str, u32>,
}

struct Frame {
    cur: Values,
    pending: Values,
}

impl<'a> Interpreter<'a> {
    pub fn new(ast: &'a BehaviorAst) -> Self {
        let mut widths = BTreeMap::new();
        for p in &ast.ports {
            widths.insert(p.name.as_str(), p.width());
        }
        for r in &ast.regs {
            widths.insert(r.name.as_str(), r.width());
        }
        Interpreter { ast, widths }
    }

    /// All registers (output regs and declared regs) at their reset value 0.
    pub fn reset_state(&self) -> Values {
        self.ast
            .ports
            .iter()
            .filter(|p| p.direction == Direction::Output)
            .map(|p| (p.name.clone(), 0))
            .chain(self.ast.regs.iter().map(|r| (r.name.clone(), 0)))
            .collect()
    }

    /// One clock edge: returns the register values after the edge.
    pub fn step(&self, state: &Values, inputs: &Values) -> Values {
        let mut frame = Frame {
            cur: state.clone(),
            pending: BTreeMap::new(),
        };
        if let Some(p) = self.ast.process() {
            self.exec(&p.body, inputs, &mut frame);
        }
        let mut next = frame.cur;
        for (k, v) in frame.pending {
            next.insert(k, v);
        }
        next
    }

    fn exec(&self, s: &Stmt, inputs: &Values, f: &mut Frame) {
        match s {
            Stmt::Empty => {}
            Stmt::Block(b) => b.iter().for_each(|s| self.exec(s, inputs, f)),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                if self.eval(cond, inputs, f).0 != 0 {
                    self.exec(then_branch, inputs, f);
                } else if let Some(e) = else_branch {
                    self.exec(e, inputs, f);
                }
            }
            Stmt::Case { subject, arms, default } => {
                let (v, _) = self.eval(subject, inputs, f);
                for arm in arms {
                    if arm.labels.iter().any(|l| self.eval(l, inputs, f).0 == v) {
                        self.exec(&arm.body, inputs, f);
                        return;
                    }
                }
                if let Some(d) = default {
                    self.exec(d, inputs, f);
                }
            }
            Stmt::Assign { lhs, rhs, blocking } => {
                let (v, _) = self.eval(rhs, inputs, f);
                let width = self.widths[lhs.name.as_str()];
                let old = if *blocking {
                    f.cur[&lhs.name]
                } else {
                    *f.pending.get(&lhs.name).unwrap_or(&f.cur[&lhs.name])
                };
                let new = match lhs.index {
                    Some(i) => (old & !(1 << i)) | ((v & 1) << i),
                    None => v & mask(width),
                };
                if *blocking {
                    f.cur.insert(lhs.name.clone(), new);
                } else {
                    f.pending.insert(lhs.name.clone(), new);
                }
            }
        }
    }

    /// Returns (value, width).
    fn eval(&self, e: &Expr, inputs: &Values, f: &Frame) -> (u64, u32) {
        match e {
            Expr::Literal { value, width, .. } => (*value, width.unwrap_or(32)),
            Expr::Ident { name, .. } => self.read(name, inputs, f),
            Expr::Index { name, index, .. } => ((self.read(name, inputs, f).0 >> index) & 1, 1),
            Expr::Unary { op, operand } => {
                let (v, w) = self.eval(operand, inputs, f);
                match op {
                    UnaryOp::LogicalNot => ((v == 0) as u64, 1),
                    UnaryOp::BitNot => (!v & mask(w), w),
                }
            }
            Expr::Binary { op, lhs, rhs } => {
                let (a, wa) = self.eval(lhs, inputs, f);
                let (b, wb) = self.eval(rhs, inputs, f);
                let w = wa.max(wb);
                match op {
                    BinaryOp::Eq => ((a == b) as u64, 1),
                    BinaryOp::Ne => ((a != b) as u64, 1),
                    BinaryOp::LogicalAnd => ((a != 0 && b != 0) as u64, 1),
                    BinaryOp::LogicalOr => ((a != 0 || b != 0) as u64, 1),
                    BinaryOp::BitAnd => (a & b, w),
                    BinaryOp::BitOr => (a | b, w),
                    BinaryOp::BitXor => (a ^ b, w),
                }
            }
        }
    }

    fn read(&self, name: &str, inputs: &Values, f: &Frame) -> (u64, u32) {
        if let Some(&v) = inputs.get(name) {
            return (v, self.widths[name]);
        }
        if let Some(&v) = f.cur.get(name) {
            return (v, self.widths[name]);
        }
        let p = self
            .ast
            .param(name)
            .unwrap_or_else(|| panic!("undeclared name `{name}`; validate the document first"));
        match p.value {
            Expr::Literal { value, width, .. } => {
                let w = p.range.map_or(width.unwrap_or(32), |r| r.width());
                (value & mask(w), w)
            }
            _ => panic!("localparam `{name}` is not a literal"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdl::parse_source;

    #[test]
    fn toggle_register() {
        let doc = parse_source(
            "mechanicalmodule t(); module m(input wire clk, output reg q); \
             always @(posedge clk) q <= !q; endmodule endmechanicalmodule",
        )
        .unwrap();
        let it = Interpreter::new(&doc.behavior);
        let s0 = it.reset_state();
        let s1 = it.step(&s0, &Values::new());
        let s2 = it.step(&s1, &Values::new());
        assert_eq!(s1["q"], 1);
        assert_eq!(s2["q"], 0);
    }

    #[test]
    fn nonblocking_reads_old_value() {
        let doc = parse_source(
            "mechanicalmodule t(); module m(input wire clk, output reg a); reg b; \
             always @(posedge clk) begin a <= b; b <= 1'b1; end endmodule endmechanicalmodule",
        )
        .unwrap();
        let it = Interpreter::new(&doc.behavior);
        let s1 = it.step(&it.reset_state(), &Values::new());
        assert_eq!((s1["a"], s1["b"]), (0, 1));
        let s2 = it.step(&s1, &Values::new());
        assert_eq!(s2["a"], 1);
    }
}
