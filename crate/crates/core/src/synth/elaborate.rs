// SPDX-License-Identifier: Apache-2.0

//! Symbolic execution of the clocked process into per-bit next-state functions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::aig::{Aig, Lit};
use super::SynthError;
use crate::mdl::{BehaviorAst, BinaryOp, Direction, Expr, LValue, Stmt, UnaryOp};

/// One bit of a named port or register.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitRef {
    pub name: String,
    pub bit: u32,
}

impl BitRef {
    pub fn new(name: impl Into<String>, bit: u32) -> Self {
        BitRef { name: name.into(), bit }
    }
}

impl std::fmt::Display for BitRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}[{}]", self.name, self.bit)
    }
}

#[derive(Debug, Clone)]
pub struct StateBit {
    pub reg: BitRef,
    /// Free variable holding the current value.
    pub current: Lit,
    pub next: Lit,
}

/// Next-state functions of every register bit that can influence an output, over the
/// sensor input bits and the current state bits.
#[derive(Debug, Clone)]
pub struct FunctionTable {
    pub aig: Aig,
    pub inputs: Vec<(BitRef, Lit)>,
    pub state: Vec<StateBit>,
    /// Output port bits; each is the value of the state bit with the same name.
    pub outputs: Vec<BitRef>,
}

impl FunctionTable {
    pub fn state_index(&self, reg: &BitRef) -> Option<usize> {
        self.state.iter().position(|s| &s.reg == reg)
    }

    pub fn total_bits(&self) -> usize {
        self.inputs.len() + self.state.len()
    }

    /// Evaluates next-state bits for concrete input and state bits (table order).
    pub fn step(&self, inputs: &[bool], state: &[bool]) -> Vec<bool> {
        let mut assignment = vec![false; self.aig.input_count()];
        for ((_, lit), &v) in self.inputs.iter().zip(inputs) {
            assignment[self.aig_input_index(*lit)] = v;
        }
        for (s, &v) in self.state.iter().zip(state) {
            assignment[self.aig_input_index(s.current)] = v;
        }
        let values = self.aig.eval_all(&assignment);
        self.state
            .iter()
            .map(|s| super::aig::lit_value(&values, s.next))
            .collect()
    }

    fn aig_input_index(&self, lit: Lit) -> usize {
        match self.aig.node(lit.node()) {
            super::aig::Node::Input(k) => k,
            _ => unreachable!("table variables are AIG inputs"),
        }
    }
}

type Bits = Vec<Lit>;

#[derive(Clone)]
struct Env {
    /// Values visible to reads: current state updated by blocking assignments.
    cur: BTreeMap<String, Bits>,
    /// Pending nonblocking values.
    pending: BTreeMap<String, Bits>,
}

struct Elaborator {
    aig: Aig,
    inputs: BTreeMap<String, Bits>,
    params: BTreeMap<String, Bits>,
    widths: BTreeMap<String, u32>,
}

/// Largest subject width for which case coverage is checked exhaustively.
const MAX_COVERAGE_WIDTH: u32 = 16;

pub fn elaborate(ast: &BehaviorAst) -> Result<FunctionTable, SynthError> {
    let process = ast.process().ok_or(SynthError::NoProcess)?;

    let mut blocking = BTreeSet::new();
    let mut nonblocking = BTreeSet::new();
    process.body.visit(&mut |s| {
        if let Stmt::Assign { lhs, blocking: b, .. } = s {
            if *b {
                blocking.insert(lhs.name.clone());
            } else {
                nonblocking.insert(lhs.name.clone());
            }
        }
    });
    if let Some(name) = blocking.intersection(&nonblocking).next() {
        return Err(SynthError::MixedAssignment(name.clone()));
    }

    let mut el = Elaborator {
        aig: Aig::new(),
        inputs: BTreeMap::new(),
        params: BTreeMap::new(),
        widths: BTreeMap::new(),
    };
    let mut input_list = Vec::new();
    for p in &ast.ports {
        el.widths.insert(p.name.clone(), p.width());
        if p.direction == Direction::Input && p.name != "clk" {
            let bits: Bits = (0..p.width()).map(|_| el.aig.add_input()).collect();
            for (k, &l) in bits.iter().enumerate() {
                input_list.push((BitRef::new(&p.name, k as u32), l));
            }
            el.inputs.insert(p.name.clone(), bits);
        }
    }
    for lp in &ast.params {
        let (value, width) = match lp.value {
            Expr::Literal { value, width, .. } => (value, width.unwrap_or(32)),
            _ => {
                return Err(SynthError::Unsupported(format!(
                    "localparam `{}` is not a literal",
                    lp.name
                )))
            }
        };
        let width = lp.range.map_or(width, |r| r.width());
        if width < 64 && value >> width != 0 {
            return Err(SynthError::Width(format!(
                "localparam `{}` value {value} does not fit in {width} bits",
                lp.name
            )));
        }
        let bits = (0..width)
            .map(|k| {
                if k < 64 && (value >> k) & 1 == 1 {
                    Lit::TRUE
                } else {
                    Lit::FALSE
                }
            })
            .collect();
        el.params.insert(lp.name.clone(), bits);
    }

    // Registers: output regs and declared regs, each with a current-value variable per bit.
    let mut regs: Vec<(String, u32)> = ast
        .ports
        .iter()
        .filter(|p| p.direction == Direction::Output)
        .map(|p| (p.name.clone(), p.width()))
        .collect();
    regs.extend(ast.regs.iter().map(|r| (r.name.clone(), r.width())));
    let mut state_vars: Vec<(BitRef, Lit)> = Vec::new();
    let mut cur = BTreeMap::new();
    for (name, width) in &regs {
        el.widths.insert(name.clone(), *width);
        let bits: Bits = (0..*width).map(|_| el.aig.add_input()).collect();
        for (k, &l) in bits.iter().enumerate() {
            state_vars.push((BitRef::new(name, k as u32), l));
        }
        cur.insert(name.clone(), bits);
    }
    let env = Env {
        pending: cur.clone(),
        cur: cur.clone(),
    };
    let env = el.exec(&process.body, env)?;

    let mut next_of: HashMap<BitRef, Lit> = HashMap::new();
    for (name, _) in &regs {
        let bits = if nonblocking.contains(name) {
            &env.pending[name]
        } else {
            &env.cur[name]
        };
        for (k, &l) in bits.iter().enumerate() {
            next_of.insert(BitRef::new(name, k as u32), l);
        }
    }

    // Keep the registers in the cone of influence of the outputs.
    let outputs: Vec<BitRef> = ast
        .ports
        .iter()
        .filter(|p| p.direction == Direction::Output)
        .flat_map(|p| (0..p.width()).map(move |k| BitRef::new(&p.name, k)))
        .collect();
    let var_to_state: HashMap<usize, usize> = state_vars.iter().enumerate().map(|(k, (_, l))| (l.node(), k)).collect();
    let mut keep = vec![false; state_vars.len()];
    let mut work: Vec<usize> = outputs
        .iter()
        .map(|o| {
            state_vars
                .iter()
                .position(|(r, _)| r == o)
                .expect("outputs are registers")
        })
        .collect();
    while let Some(k) = work.pop() {
        if std::mem::replace(&mut keep[k], true) {
            continue;
        }
        let next = next_of[&state_vars[k].0];
        for v in el.aig.support(&[next]) {
            let node = el.aig.input(v).node();
            if let Some(&s) = var_to_state.get(&node) {
                if !keep[s] {
                    work.push(s);
                }
            }
        }
    }
    let state = state_vars
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|((reg, current), _)| StateBit {
            next: next_of[&reg],
            reg,
            current,
        })
        .collect();

    Ok(FunctionTable {
        aig: el.aig,
        inputs: input_list,
        state,
        outputs,
    })
}

impl Elaborator {
    fn exec(&mut self, stmt: &Stmt, env: Env) -> Result<Env, SynthError> {
        match stmt {
            Stmt::Empty => Ok(env),
            Stmt::Block(stmts) => stmts.iter().try_fold(env, |env, s| self.exec(s, env)),
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let c = self.eval(cond, &env)?;
                let c = self.truthy(&c);
                let t = self.exec(then_branch, env.clone())?;
                let e = match else_branch {
                    Some(e) => self.exec(e, env)?,
                    None => env,
                };
                Ok(self.merge(c, t, e))
            }
            Stmt::Case { subject, arms, default } => {
                let subj = self.eval(subject, &env)?;
                let mut conds = Vec::with_capacity(arms.len());
                for arm in arms {
                    let mut any = Lit::FALSE;
                    for label in &arm.labels {
                        let v = self.eval(label, &env)?;
                        let eq = self.equal(&subj, &v);
                        any = self.aig.or(any, eq);
                    }
                    conds.push(any);
                }
                // With every subject value covered, the last arm is the fallback.
                let exhaustive = self.covers_all(arms.iter().flat_map(|a| a.labels.iter()), subj.len() as u32);
                let mut acc = match (default, exhaustive) {
                    (_, true) if !arms.is_empty() => None,
                    (Some(d), _) => Some(self.exec(d, env.clone())?),
                    (None, _) => Some(env.clone()),
                };
                for (k, arm) in arms.iter().enumerate().rev() {
                    let branch = self.exec(&arm.body, env.clone())?;
                    acc = Some(match acc {
                        None => branch,
                        Some(rest) => self.merge(conds[k], branch, rest),
                    });
                }
                Ok(acc.unwrap_or(env))
            }
            Stmt::Assign { lhs, rhs, blocking } => {
                let value = self.eval(rhs, &env)?;
                let mut env = env;
                let width = self.widths[&lhs.name];
                let target = if *blocking {
                    env.cur.get_mut(&lhs.name)
                } else {
                    env.pending.get_mut(&lhs.name)
                }
                .ok_or_else(|| SynthError::Unsupported(format!("cannot assign to `{}`", lhs.name)))?;
                match lhs.index {
                    Some(i) => {
                        let v = fit(&value, 1, lhs)?;
                        target[i as usize] = v[0];
                    }
                    None => *target = fit(&value, width, lhs)?,
                }
                Ok(env)
            }
        }
    }

    fn covers_all<'e>(&self, labels: impl Iterator<Item = &'e Expr>, width: u32) -> bool {
        if width > MAX_COVERAGE_WIDTH {
            return false;
        }
        let mut seen = BTreeSet::new();
        for l in labels {
            match self.constant(l) {
                Some(v) if v < (1u64 << width) => {
                    seen.insert(v);
                }
                Some(_) => {}
                None => return false,
            }
        }
        seen.len() as u64 == 1u64 << width
    }

    fn constant(&self, e: &Expr) -> Option<u64> {
        match e {
            Expr::Literal { value, .. } => Some(*value),
            Expr::Ident { name, .. } => {
                let bits = self.params.get(name)?;
                Some(
                    bits.iter()
                        .enumerate()
                        .take(64)
                        .fold(0, |acc, (k, l)| acc | ((*l == Lit::TRUE) as u64) << k),
                )
            }
            _ => None,
        }
    }

    fn merge(&mut self, c: Lit, t: Env, e: Env) -> Env {
        let mut mux_map = |a: BTreeMap<String, Bits>, b: BTreeMap<String, Bits>| {
            a.into_iter()
                .zip(b)
                .map(|((name, ta), (_, tb))| {
                    let bits = ta.iter().zip(&tb).map(|(&x, &y)| self.aig.mux(c, x, y)).collect();
                    (name, bits)
                })
                .collect()
        };
        let cur = mux_map(t.cur, e.cur);
        let pending = mux_map(t.pending, e.pending);
        Env { cur, pending }
    }

    fn truthy(&mut self, v: &Bits) -> Lit {
        self.aig.or_all(v.iter().copied())
    }

    fn equal(&mut self, a: &Bits, b: &Bits) -> Lit {
        let n = a.len().max(b.len());
        let mut acc = Lit::TRUE;
        for k in 0..n {
            let x = a.get(k).copied().unwrap_or(Lit::FALSE);
            let y = b.get(k).copied().unwrap_or(Lit::FALSE);
            let eq = self.aig.xnor(x, y);
            acc = self.aig.and(acc, eq);
        }
        acc
    }

    fn eval(&mut self, e: &Expr, env: &Env) -> Result<Bits, SynthError> {
        Ok(match e {
            Expr::Literal { value, width, .. } => {
                let w = width.unwrap_or(32);
                (0..w)
                    .map(|k| {
                        if k < 64 && (value >> k) & 1 == 1 {
                            Lit::TRUE
                        } else {
                            Lit::FALSE
                        }
                    })
                    .collect()
            }
            Expr::Ident { name, .. } => self.lookup(name, env)?,
            Expr::Index { name, index, .. } => {
                let bits = self.lookup(name, env)?;
                vec![*bits
                    .get(*index as usize)
                    .ok_or_else(|| SynthError::Width(format!("bit {index} is out of range for `{name}`")))?]
            }
            Expr::Unary { op, operand } => {
                let v = self.eval(operand, env)?;
                match op {
                    UnaryOp::LogicalNot => vec![!self.truthy(&v)],
                    UnaryOp::BitNot => v.into_iter().map(|l| !l).collect(),
                }
            }
            Expr::Binary { op, lhs, rhs } => {
                let a = self.eval(lhs, env)?;
                let b = self.eval(rhs, env)?;
                match op {
                    BinaryOp::Eq => vec![self.equal(&a, &b)],
                    BinaryOp::Ne => vec![!self.equal(&a, &b)],
                    BinaryOp::LogicalAnd => {
                        let (x, y) = (self.truthy(&a), self.truthy(&b));
                        vec![self.aig.and(x, y)]
                    }
                    BinaryOp::LogicalOr => {
                        let (x, y) = (self.truthy(&a), self.truthy(&b));
                        vec![self.aig.or(x, y)]
                    }
                    BinaryOp::BitAnd | BinaryOp::BitOr | BinaryOp::BitXor => {
                        let n = a.len().max(b.len());
                        (0..n)
                            .map(|k| {
                                let x = a.get(k).copied().unwrap_or(Lit::FALSE);
                                let y = b.get(k).copied().unwrap_or(Lit::FALSE);
                                match op {
                                    BinaryOp::BitAnd => self.aig.and(x, y),
                                    BinaryOp::BitOr => self.aig.or(x, y),
                                    _ => self.aig.xor(x, y),
                                }
                            })
                            .collect()
                    }
                }
            }
        })
    }

    fn lookup(&self, name: &str, env: &Env) -> Result<Bits, SynthError> {
        if let Some(bits) = self.inputs.get(name) {
            return Ok(bits.clone());
        }
        if let Some(bits) = env.cur.get(name) {
            return Ok(bits.clone());
        }
        if let Some(bits) = self.params.get(name) {
            return Ok(bits.clone());
        }
        if name == "clk" {
            return Err(SynthError::Unsupported("`clk` cannot be used as data".into()));
        }
        Err(SynthError::Unsupported(format!("undeclared name `{name}`")))
    }
}

/// Narrows or zero-extends `value` to `width`. Narrowing is allowed only when every dropped
/// bit is the constant 0.
fn fit(value: &Bits, width: u32, lhs: &LValue) -> Result<Bits, SynthError> {
    let width = width as usize;
    if value.len() > width && value[width..].iter().any(|&l| l != Lit::FALSE) {
        return Err(SynthError::Width(format!(
            "{}:{}: assignment to `{}` ({width} bit(s)) from a {}-bit value",
            lhs.span.line,
            lhs.span.col,
            lhs.name,
            value.len()
        )));
    }
    let mut out: Bits = value.iter().copied().take(width).collect();
    out.resize(width, Lit::FALSE);
    Ok(out)
}
