// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use super::Span;

/// Integer grid point, y axis pointing up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLine {
    pub name: String,
    pub p1: Point,
    pub p2: Point,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IoKind {
    Sensor,
    Actuator,
}

impl IoKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IoKind::Sensor => "sensor",
            IoKind::Actuator => "actuator",
        }
    }
}

/// A pin position: a fraction along a named boundary line, measured from its first point.
#[derive(Debug, Clone, PartialEq)]
pub struct Location {
    pub line: String,
    pub fraction: f64,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IoDecl {
    pub name: String,
    pub kind: IoKind,
    pub actuator_type: Option<String>,
    pub locations: Vec<Location>,
    /// Binary code (as written, e.g. `0b01`) to label, in source order.
    pub values: Vec<(String, String)>,
    pub span: Span,
}

impl IoDecl {
    /// Width of the codes in the value map, if they are consistent and well formed.
    pub fn code_width(&self) -> Option<usize> {
        let mut width = None;
        for (code, _) in &self.values {
            let w = parse_code(code)?.len();
            match width {
                None => width = Some(w),
                Some(prev) if prev != w => return None,
                _ => {}
            }
        }
        width
    }

    /// Number of signal bits carried by this I/O: one per location.
    pub fn width(&self) -> usize {
        self.locations.len()
    }

    /// Label for a full-width value, when the value map is written with full-width codes.
    pub fn label_for(&self, value: u64) -> Option<&str> {
        let w = self.width();
        self.values.iter().find_map(|(code, label)| {
            let bits = parse_code(code)?;
            (bits.len() == w && bits_to_u64(&bits) == value).then_some(label.as_str())
        })
    }
}

/// Parses `0b0101` into MSB-first bits.
pub fn parse_code(code: &str) -> Option<Vec<bool>> {
    let digits = code.strip_prefix("0b").or_else(|| code.strip_prefix("0B"))?;
    if digits.is_empty() {
        return None;
    }
    digits
        .chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

fn bits_to_u64(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Input,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetType {
    Wire,
    Reg,
}

/// `[msb:lsb]` range. Only descending ranges ending at 0 are meaningful for widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Range {
    pub msb: u32,
    pub lsb: u32,
}

impl Range {
    pub fn width(self) -> u32 {
        self.msb.abs_diff(self.lsb) + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Port {
    pub direction: Direction,
    pub net_type: NetType,
    pub range: Option<Range>,
    pub name: String,
    pub init: Option<Expr>,
    pub span: Span,
}

impl Port {
    pub fn width(&self) -> u32 {
        self.range.map_or(1, Range::width)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalParam {
    pub name: String,
    pub range: Option<Range>,
    pub value: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegDecl {
    pub name: String,
    pub range: Option<Range>,
    pub init: Option<Expr>,
    pub span: Span,
}

impl RegDecl {
    pub fn width(&self) -> u32 {
        self.range.map_or(1, Range::width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiteralBase {
    Binary,
    Decimal,
    Hex,
    Octal,
}

impl LiteralBase {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'b' => Some(LiteralBase::Binary),
            'd' => Some(LiteralBase::Decimal),
            'h' => Some(LiteralBase::Hex),
            'o' => Some(LiteralBase::Octal),
            _ => None,
        }
    }

    pub fn radix(self) -> u32 {
        match self {
            LiteralBase::Binary => 2,
            LiteralBase::Decimal => 10,
            LiteralBase::Hex => 16,
            LiteralBase::Octal => 8,
        }
    }

    pub fn letter(self) -> char {
        match self {
            LiteralBase::Binary => 'b',
            LiteralBase::Decimal => 'd',
            LiteralBase::Hex => 'h',
            LiteralBase::Octal => 'o',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    /// `!`
    LogicalNot,
    /// `~`
    BitNot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Eq,
    Ne,
    LogicalAnd,
    LogicalOr,
    BitAnd,
    BitOr,
    BitXor,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::LogicalAnd => "&&",
            BinaryOp::LogicalOr => "||",
            BinaryOp::BitAnd => "&",
            BinaryOp::BitOr => "|",
            BinaryOp::BitXor => "^",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::LogicalOr => 1,
            BinaryOp::LogicalAnd => 2,
            BinaryOp::BitOr => 3,
            BinaryOp::BitXor => 4,
            BinaryOp::BitAnd => 5,
            BinaryOp::Eq | BinaryOp::Ne => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Ident {
        name: String,
        span: Span,
    },
    Literal {
        width: Option<u32>,
        base: Option<LiteralBase>,
        value: u64,
        span: Span,
    },
    Index {
        name: String,
        index: u32,
        span: Span,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Ident { span, .. } | Expr::Literal { span, .. } | Expr::Index { span, .. } => *span,
            Expr::Unary { operand, .. } => operand.span(),
            Expr::Binary { lhs, .. } => lhs.span(),
        }
    }

    /// Calls `f` on every referenced identifier.
    pub fn visit_names<'a>(&'a self, f: &mut impl FnMut(&'a str, Span)) {
        match self {
            Expr::Ident { name, span } | Expr::Index { name, span, .. } => f(name, *span),
            Expr::Literal { .. } => {}
            Expr::Unary { operand, .. } => operand.visit_names(f),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.visit_names(f);
                rhs.visit_names(f);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LValue {
    pub name: String,
    pub index: Option<u32>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseArm {
    pub labels: Vec<Expr>,
    pub body: Stmt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Block(Vec<Stmt>),
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
    },
    Case {
        subject: Expr,
        arms: Vec<CaseArm>,
        default: Option<Box<Stmt>>,
    },
    Assign {
        lhs: LValue,
        rhs: Expr,
        blocking: bool,
    },
    Empty,
}

impl Stmt {
    pub fn visit(&self, f: &mut impl FnMut(&Stmt)) {
        f(self);
        match self {
            Stmt::Block(stmts) => stmts.iter().for_each(|s| s.visit(f)),
            Stmt::If {
                then_branch,
                else_branch,
                ..
            } => {
                then_branch.visit(f);
                if let Some(e) = else_branch {
                    e.visit(f);
                }
            }
            Stmt::Case { arms, default, .. } => {
                arms.iter().for_each(|a| a.body.visit(f));
                if let Some(d) = default {
                    d.visit(f);
                }
            }
            Stmt::Assign { .. } | Stmt::Empty => {}
        }
    }
}

/// The single `always @(posedge <clock>)` block.
#[derive(Debug, Clone, PartialEq)]
pub struct Process {
    pub clock: String,
    pub body: Stmt,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorAst {
    pub name: String,
    pub ports: Vec<Port>,
    pub params: Vec<LocalParam>,
    pub regs: Vec<RegDecl>,
    pub processes: Vec<Process>,
    pub span: Span,
}

impl BehaviorAst {
    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn reg(&self, name: &str) -> Option<&RegDecl> {
        self.regs.iter().find(|r| r.name == name)
    }

    pub fn param(&self, name: &str) -> Option<&LocalParam> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn process(&self) -> Option<&Process> {
        self.processes.first()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdlDocument {
    pub name: String,
    pub boundary: Vec<BoundaryLine>,
    pub ios: Vec<IoDecl>,
    pub behavior: BehaviorAst,
    pub span: Span,
}

impl MdlDocument {
    pub fn line(&self, name: &str) -> Option<&BoundaryLine> {
        self.boundary.iter().find(|l| l.name == name)
    }

    pub fn sensors(&self) -> impl Iterator<Item = &IoDecl> {
        self.ios.iter().filter(|io| io.kind == IoKind::Sensor)
    }

    pub fn actuators(&self) -> impl Iterator<Item = &IoDecl> {
        self.ios.iter().filter(|io| io.kind == IoKind::Actuator)
    }

    pub fn io(&self, name: &str) -> Option<&IoDecl> {
        self.ios.iter().find(|io| io.name == name)
    }

    /// Boundary vertices in declaration order (first point of every line).
    pub fn vertices(&self) -> Vec<Point> {
        self.boundary.iter().map(|l| l.p1).collect()
    }

    /// Name-to-width map of every port.
    pub fn port_widths(&self) -> BTreeMap<&str, u32> {
        self.behavior
            .ports
            .iter()
            .map(|p| (p.name.as_str(), p.width()))
            .collect()
    }
}
