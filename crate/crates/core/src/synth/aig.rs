// SPDX-License-Identifier: Apache-2.0

//! Structurally hashed and-inverter graph.

use std::collections::HashMap;
use std::fmt;

/// Edge into the graph: node index shifted left by one, low bit set when complemented.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub const FALSE: Lit = Lit(0);
    pub const TRUE: Lit = Lit(1);

    pub fn new(node: usize, complemented: bool) -> Lit {
        Lit(((node as u32) << 1) | complemented as u32)
    }

    pub fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn regular(self) -> Lit {
        Lit(self.0 & !1)
    }

    pub fn is_const(self) -> bool {
        self.node() == 0
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Lit::FALSE => write!(f, "0"),
            Lit::TRUE => write!(f, "1"),
            l => write!(f, "{}n{}", if l.is_complemented() { "!" } else { "" }, l.node()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Const,
    /// Free variable with its index in `Aig::inputs`.
    Input(usize),
    And(Lit, Lit),
}

#[derive(Debug, Clone, Default)]
pub struct Aig {
    nodes: Vec<Node>,
    inputs: Vec<usize>,
    strash: HashMap<(Lit, Lit), usize>,
}

impl Aig {
    pub fn new() -> Self {
        Aig {
            nodes: vec![Node::Const],
            inputs: Vec::new(),
            strash: HashMap::new(),
        }
    }

    pub fn node(&self, index: usize) -> Node {
        self.nodes[index]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn and_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::And(..))).count()
    }

    pub fn add_input(&mut self) -> Lit {
        let id = self.nodes.len();
        self.nodes.push(Node::Input(self.inputs.len()));
        self.inputs.push(id);
        Lit::new(id, false)
    }

    pub fn input(&self, index: usize) -> Lit {
        Lit::new(self.inputs[index], false)
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        if a == Lit::FALSE || b == Lit::FALSE || a == !b {
            return Lit::FALSE;
        }
        if a == Lit::TRUE || a == b {
            return b;
        }
        if b == Lit::TRUE {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&id) = self.strash.get(&key) {
            return Lit::new(id, false);
        }
        let id = self.nodes.len();
        self.nodes.push(Node::And(key.0, key.1));
        self.strash.insert(key, id);
        Lit::new(id, false)
    }

    pub fn or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.and(!a, !b)
    }

    pub fn xor(&mut self, a: Lit, b: Lit) -> Lit {
        let p = self.and(a, !b);
        let q = self.and(!a, b);
        self.or(p, q)
    }

    pub fn xnor(&mut self, a: Lit, b: Lit) -> Lit {
        !self.xor(a, b)
    }

    /// `sel ? t : e`
    pub fn mux(&mut self, sel: Lit, t: Lit, e: Lit) -> Lit {
        if t == e {
            return t;
        }
        let p = self.and(sel, t);
        let q = self.and(!sel, e);
        self.or(p, q)
    }

    pub fn and_all(&mut self, lits: impl IntoIterator<Item = Lit>) -> Lit {
        lits.into_iter().fold(Lit::TRUE, |acc, l| self.and(acc, l))
    }

    pub fn or_all(&mut self, lits: impl IntoIterator<Item = Lit>) -> Lit {
        lits.into_iter().fold(Lit::FALSE, |acc, l| self.or(acc, l))
    }

    /// Evaluates every node for one input assignment (`inputs[k]` is input k).
    pub fn eval_all(&self, inputs: &[bool]) -> Vec<bool> {
        let mut val = vec![false; self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            val[id] = match *node {
                Node::Const => false,
                Node::Input(k) => inputs[k],
                Node::And(a, b) => lit_value(&val, a) && lit_value(&val, b),
            };
        }
        val
    }

    pub fn eval(&self, lit: Lit, inputs: &[bool]) -> bool {
        lit_value(&self.eval_all(inputs), lit)
    }

    /// Indices of the inputs in the transitive fan-in of `roots`.
    pub fn support(&self, roots: &[Lit]) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = roots.iter().map(|l| l.node()).collect();
        let mut out = Vec::new();
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n], true) {
                continue;
            }
            match self.nodes[n] {
                Node::Const => {}
                Node::Input(k) => out.push(k),
                Node::And(a, b) => {
                    stack.push(a.node());
                    stack.push(b.node());
                }
            }
        }
        out.sort_unstable();
        out
    }
}

pub fn lit_value(values: &[bool], lit: Lit) -> bool {
    values[lit.node()] ^ lit.is_complemented()
}
