//! Compiled propositional circuit with Kleene three-valued evaluation.

use std::collections::HashMap;

use super::atoms::Literal;
use super::term::{Node, TermId, TermStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl std::ops::Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

impl Truth {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn from_option(v: Option<bool>) -> Self {
        v.map_or(Truth::Unknown, Truth::from_bool)
    }

    pub fn and(self, other: Truth) -> Self {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Truth) -> Self {
        !(!self).and(!other)
    }

    pub fn iff(self, other: Truth) -> Self {
        match (self, other) {
            (Truth::Unknown, _) | (_, Truth::Unknown) => Truth::Unknown,
            (a, b) => Truth::from_bool(a == b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Gate {
    Const(bool),
    Input(u32),
    Not(u32),
    And(Vec<u32>),
    Or(Vec<u32>),
    Implies(u32, u32),
    Iff(u32, u32),
    Ite(u32, u32, u32),
}

/// Gates in topological order; the last gate is the output.
#[derive(Clone, Debug)]
pub struct Circuit {
    gates: Vec<Gate>,
}

impl Circuit {
    /// Compiles an abstract (Prop-only) formula.
    pub fn compile(store: &TermStore, root: TermId) -> Self {
        let mut slot: HashMap<TermId, u32> = HashMap::new();
        let mut gates = Vec::new();
        for id in store.topo_order(root) {
            let s = |t: &TermId| slot[t];
            let g = match store.node(id) {
                Node::Const(b) => Gate::Const(*b),
                Node::Prop(i) => Gate::Input(*i),
                Node::BoolAtom(_) | Node::TheoryAtom(_) => {
                    panic!("circuit compiled from an unabstracted formula")
                }
                Node::Not(a) => Gate::Not(s(a)),
                Node::And(cs) => Gate::And(cs.iter().map(s).collect()),
                Node::Or(cs) => Gate::Or(cs.iter().map(s).collect()),
                Node::Implies(a, b) => Gate::Implies(s(a), s(b)),
                Node::Iff(a, b) => Gate::Iff(s(a), s(b)),
                Node::Ite(c, t, e) => Gate::Ite(s(c), s(t), s(e)),
            };
            slot.insert(id, gates.len() as u32);
            gates.push(g);
        }
        Circuit { gates }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Kleene evaluation; `values[i]` is the value of atom `i` if assigned.
    pub fn eval3(&self, values: &[Option<bool>]) -> Truth {
        let mut v: Vec<Truth> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let r = match g {
                Gate::Const(b) => Truth::from_bool(*b),
                Gate::Input(i) => Truth::from_option(values[*i as usize]),
                Gate::Not(a) => !v[*a as usize],
                Gate::And(cs) => cs
                    .iter()
                    .fold(Truth::True, |acc, c| acc.and(v[*c as usize])),
                Gate::Or(cs) => cs
                    .iter()
                    .fold(Truth::False, |acc, c| acc.or(v[*c as usize])),
                Gate::Implies(a, b) => (!v[*a as usize]).or(v[*b as usize]),
                Gate::Iff(a, b) => v[*a as usize].iff(v[*b as usize]),
                Gate::Ite(c, t, e) => {
                    let (t, e) = (v[*t as usize], v[*e as usize]);
                    match v[*c as usize] {
                        Truth::True => t,
                        Truth::False => e,
                        Truth::Unknown if t == e => t,
                        Truth::Unknown => Truth::Unknown,
                    }
                }
            };
            v.push(r);
        }
        *v.last().expect("nonempty circuit")
    }

    /// Evaluation under a partial assignment given as literals over `n_atoms` atoms.
    pub fn eval_literals(&self, n_atoms: usize, lits: &[Literal]) -> Truth {
        let mut values = vec![None; n_atoms];
        for l in lits {
            values[l.atom() as usize] = Some(l.is_positive());
        }
        self.eval3(&values)
    }

    /// Exact evaluation on a total assignment packed as a bitmask (bit i = atom i).
    pub fn eval_bits(&self, bits: u64, scratch: &mut Vec<bool>) -> bool {
        scratch.clear();
        for g in &self.gates {
            let r = match g {
                Gate::Const(b) => *b,
                Gate::Input(i) => bits >> i & 1 == 1,
                Gate::Not(a) => !scratch[*a as usize],
                Gate::And(cs) => cs.iter().all(|c| scratch[*c as usize]),
                Gate::Or(cs) => cs.iter().any(|c| scratch[*c as usize]),
                Gate::Implies(a, b) => !scratch[*a as usize] || scratch[*b as usize],
                Gate::Iff(a, b) => scratch[*a as usize] == scratch[*b as usize],
                Gate::Ite(c, t, e) => {
                    if scratch[*c as usize] {
                        scratch[*t as usize]
                    } else {
                        scratch[*e as usize]
                    }
                }
            };
            scratch.push(r);
        }
        *scratch.last().expect("nonempty circuit")
    }
}
