//! Tseitin clausal form over abstraction indices.

use std::collections::HashMap;

use super::atoms::{AtomKind, AtomTable, Literal};
use super::term::{Node, TermId, TermStore};

#[derive(Clone, Debug)]
pub struct CnfProblem {
    pub clauses: Vec<Vec<Literal>>,
    /// Atoms plus labels.
    pub n_vars: u32,
    /// The indices belonging to the atom set, ascending (`0..n_atoms`).
    pub alpha_indices: Vec<u32>,
    /// Kind per variable; labels are `AtomKind::Label`.
    pub kinds: Vec<AtomKind>,
}

impl CnfProblem {
    pub fn n_atoms(&self) -> usize {
        self.alpha_indices.len()
    }

    pub fn n_labels(&self) -> usize {
        self.n_vars as usize - self.n_atoms()
    }
}

struct Builder<'a> {
    store: &'a TermStore,
    clauses: Vec<Vec<Literal>>,
    kinds: Vec<AtomKind>,
    labels: HashMap<TermId, Literal>,
}

impl Builder<'_> {
    fn add(&mut self, mut clause: Vec<Literal>) {
        clause.sort();
        clause.dedup();
        if clause.windows(2).any(|w| w[0].atom() == w[1].atom()) {
            return;
        }
        self.clauses.push(clause);
    }

    fn fresh(&mut self) -> Literal {
        let v = self.kinds.len() as u32;
        self.kinds.push(AtomKind::Label);
        Literal::pos(v)
    }

    /// A literal equivalent to `t`, defining a label if needed.
    fn lit(&mut self, t: TermId) -> Literal {
        if let Some(&l) = self.labels.get(&t) {
            return l;
        }
        let node = self.store.node(t).clone();
        let l = match node {
            Node::Prop(i) => return Literal::pos(i),
            Node::Not(a) => return self.lit(a).negate(),
            Node::Const(b) => {
                let l = self.fresh();
                self.add(vec![if b { l } else { l.negate() }]);
                l
            }
            Node::BoolAtom(_) | Node::TheoryAtom(_) => panic!("clausal form of an unabstracted formula"),
            Node::And(cs) | Node::Or(cs) => {
                let conj = matches!(self.store.node(t), Node::And(_));
                let ls: Vec<Literal> = cs.iter().map(|c| self.lit(*c)).collect();
                let l = self.fresh();
                // And: l -> c_i, (all c_i) -> l. Or is the dual.
                let (out, ins) = if conj {
                    (l, ls)
                } else {
                    (l.negate(), ls.iter().map(|x| x.negate()).collect())
                };
                for &c in &ins {
                    self.add(vec![out.negate(), c]);
                }
                let mut big: Vec<Literal> = ins.iter().map(|c| c.negate()).collect();
                big.push(out);
                self.add(big);
                l
            }
            Node::Implies(a, b) => {
                let (a, b) = (self.lit(a), self.lit(b));
                let l = self.fresh();
                self.add(vec![l.negate(), a.negate(), b]);
                self.add(vec![a, l]);
                self.add(vec![b.negate(), l]);
                l
            }
            Node::Iff(a, b) => {
                let (a, b) = (self.lit(a), self.lit(b));
                let l = self.fresh();
                self.add(vec![l.negate(), a.negate(), b]);
                self.add(vec![l.negate(), a, b.negate()]);
                self.add(vec![l, a, b]);
                self.add(vec![l, a.negate(), b.negate()]);
                l
            }
            Node::Ite(c, th, el) => {
                let (c, th, el) = (self.lit(c), self.lit(th), self.lit(el));
                let l = self.fresh();
                self.add(vec![c.negate(), th.negate(), l]);
                self.add(vec![c.negate(), th, l.negate()]);
                self.add(vec![c, el.negate(), l]);
                self.add(vec![c, el, l.negate()]);
                l
            }
        };
        self.labels.insert(t, l);
        l
    }

    /// Asserts `t` (or its negation) at the top level without labelling the root.
    fn top(&mut self, t: TermId, positive: bool) {
        let node = self.store.node(t).clone();
        match (node, positive) {
            (Node::Const(b), p) => {
                if b != p {
                    self.clauses.push(Vec::new());
                }
            }
            (Node::Not(a), p) => self.top(a, !p),
            (Node::And(cs), true) | (Node::Or(cs), false) => {
                for c in cs {
                    self.top(c, positive);
                }
            }
            (Node::Or(cs), true) | (Node::And(cs), false) => {
                let clause = cs
                    .iter()
                    .map(|c| {
                        let l = self.lit(*c);
                        if positive {
                            l
                        } else {
                            l.negate()
                        }
                    })
                    .collect();
                self.add(clause);
            }
            (Node::Implies(a, b), true) => {
                let (a, b) = (self.lit(a), self.lit(b));
                self.add(vec![a.negate(), b]);
            }
            (Node::Implies(a, b), false) => {
                self.top(a, true);
                self.top(b, false);
            }
            (Node::Iff(a, b), p) => {
                let (a, b) = (self.lit(a), self.lit(b));
                let b = if p { b } else { b.negate() };
                self.add(vec![a.negate(), b]);
                self.add(vec![a, b.negate()]);
            }
            (Node::Ite(c, th, el), p) => {
                let (c, th, el) = (self.lit(c), self.lit(th), self.lit(el));
                let (th, el) = if p { (th, el) } else { (th.negate(), el.negate()) };
                self.add(vec![c.negate(), th]);
                self.add(vec![c, el]);
            }
            (_, p) => {
                let l = self.lit(t);
                self.add(vec![if p { l } else { l.negate() }]);
            }
        }
    }
}

/// Clausal form of an abstract formula. Models restricted to the atom
/// indices are exactly the propositional models of the formula; every label
/// is functionally determined by the atoms.
pub fn to_cnf(store: &TermStore, abstract_root: TermId, table: &AtomTable) -> CnfProblem {
    let n = table.len();
    let mut b = Builder {
        store,
        clauses: Vec::new(),
        kinds: table.entries().iter().map(|e| e.kind).collect(),
        labels: HashMap::new(),
    };
    b.top(abstract_root, true);
    CnfProblem {
        clauses: b.clauses,
        n_vars: b.kinds.len() as u32,
        alpha_indices: (0..n as u32).collect(),
        kinds: b.kinds,
    }
}
