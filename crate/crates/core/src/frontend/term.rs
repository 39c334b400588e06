//! Hash-consed formula DAG.

use std::collections::HashMap;

use super::linear::LinearAtom;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(bool),
    BoolAtom(String),
    TheoryAtom(LinearAtom),
    /// Abstraction variable standing for the atom with this index.
    Prop(u32),
    Not(TermId),
    And(Vec<TermId>),
    Or(Vec<TermId>),
    Implies(TermId, TermId),
    Iff(TermId, TermId),
    Ite(TermId, TermId, TermId),
}

impl Node {
    pub fn children(&self) -> Vec<TermId> {
        match self {
            Node::Const(_) | Node::BoolAtom(_) | Node::TheoryAtom(_) | Node::Prop(_) => vec![],
            Node::Not(a) => vec![*a],
            Node::And(cs) | Node::Or(cs) => cs.clone(),
            Node::Implies(a, b) | Node::Iff(a, b) => vec![*a, *b],
            Node::Ite(c, t, e) => vec![*c, *t, *e],
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Node::BoolAtom(_) | Node::TheoryAtom(_))
    }

    /// Same connective with children replaced.
    pub fn with_children(&self, ch: &[TermId]) -> Node {
        match self {
            Node::Const(_) | Node::BoolAtom(_) | Node::TheoryAtom(_) | Node::Prop(_) => self.clone(),
            Node::Not(_) => Node::Not(ch[0]),
            Node::And(_) => Node::And(ch.to_vec()),
            Node::Or(_) => Node::Or(ch.to_vec()),
            Node::Implies(..) => Node::Implies(ch[0], ch[1]),
            Node::Iff(..) => Node::Iff(ch[0], ch[1]),
            Node::Ite(..) => Node::Ite(ch[0], ch[1], ch[2]),
        }
    }
}

/// Interning store. Children always have smaller ids than their parents.
#[derive(Clone, Debug, Default)]
pub struct TermStore {
    nodes: Vec<Node>,
    index: HashMap<Node, TermId>,
}

impl TermStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: TermId) -> &Node {
        &self.nodes[id.index()]
    }

    /// Raw interning, no simplification.
    pub fn intern(&mut self, node: Node) -> TermId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = TermId(u32::try_from(self.nodes.len()).expect("term store overflow"));
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn mk_const(&mut self, b: bool) -> TermId {
        self.intern(Node::Const(b))
    }

    pub fn const_value(&self, id: TermId) -> Option<bool> {
        match self.node(id) {
            Node::Const(b) => Some(*b),
            _ => None,
        }
    }

    pub fn mk_not(&mut self, a: TermId) -> TermId {
        match self.node(a) {
            Node::Const(b) => {
                let b = !*b;
                self.mk_const(b)
            }
            Node::Not(inner) => *inner,
            _ => self.intern(Node::Not(a)),
        }
    }

    fn mk_nary(&mut self, children: Vec<TermId>, conj: bool) -> TermId {
        // conj: absorbing = false, neutral = true; dually for disjunction
        let mut flat = Vec::with_capacity(children.len());
        let mut stack: Vec<TermId> = children.into_iter().rev().collect();
        while let Some(c) = stack.pop() {
            match self.node(c) {
                Node::Const(b) if *b == conj => {}
                Node::Const(_) => return self.mk_const(!conj),
                Node::And(cs) if conj => stack.extend(cs.iter().rev().copied()),
                Node::Or(cs) if !conj => stack.extend(cs.iter().rev().copied()),
                _ => {
                    if !flat.contains(&c) {
                        flat.push(c)
                    }
                }
            }
        }
        match flat.len() {
            0 => self.mk_const(conj),
            1 => flat[0],
            _ if conj => self.intern(Node::And(flat)),
            _ => self.intern(Node::Or(flat)),
        }
    }

    pub fn mk_and(&mut self, children: Vec<TermId>) -> TermId {
        self.mk_nary(children, true)
    }

    pub fn mk_or(&mut self, children: Vec<TermId>) -> TermId {
        self.mk_nary(children, false)
    }

    pub fn mk_implies(&mut self, a: TermId, b: TermId) -> TermId {
        match (self.const_value(a), self.const_value(b)) {
            (Some(true), _) => b,
            (Some(false), _) | (_, Some(true)) => self.mk_const(true),
            (_, Some(false)) => self.mk_not(a),
            _ => self.intern(Node::Implies(a, b)),
        }
    }

    pub fn mk_iff(&mut self, a: TermId, b: TermId) -> TermId {
        if a == b {
            return self.mk_const(true);
        }
        match (self.const_value(a), self.const_value(b)) {
            (Some(true), _) => b,
            (Some(false), _) => self.mk_not(b),
            (_, Some(true)) => a,
            (_, Some(false)) => self.mk_not(a),
            _ => self.intern(Node::Iff(a, b)),
        }
    }

    pub fn mk_xor(&mut self, a: TermId, b: TermId) -> TermId {
        let iff = self.mk_iff(a, b);
        self.mk_not(iff)
    }

    pub fn mk_ite(&mut self, c: TermId, t: TermId, e: TermId) -> TermId {
        if t == e {
            return t;
        }
        match (self.const_value(c), self.const_value(t), self.const_value(e)) {
            (Some(true), ..) => t,
            (Some(false), ..) => e,
            (_, Some(true), Some(false)) => c,
            (_, Some(false), Some(true)) => self.mk_not(c),
            _ => self.intern(Node::Ite(c, t, e)),
        }
    }

    /// Nodes reachable from `root`, children before parents.
    pub fn topo_order(&self, root: TermId) -> Vec<TermId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                order.push(id);
                continue;
            }
            if seen[id.index()] {
                continue;
            }
            seen[id.index()] = true;
            stack.push((id, true));
            for c in self.node(id).children().into_iter().rev() {
                if !seen[c.index()] {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    /// Structural rebuild bottom-up: `f` sees each reachable node once and
    /// may replace it; otherwise the node is re-interned with mapped children.
    pub fn rewrite(
        &mut self,
        root: TermId,
        mut f: impl FnMut(&mut TermStore, TermId) -> Option<TermId>,
    ) -> TermId {
        let order = self.topo_order(root);
        let mut map: HashMap<TermId, TermId> = HashMap::with_capacity(order.len());
        for id in order {
            let out = match f(self, id) {
                Some(r) => r,
                None => {
                    let node = self.node(id).clone();
                    let ch: Vec<TermId> = node.children().iter().map(|c| map[c]).collect();
                    self.intern(node.with_children(&ch))
                }
            };
            map.insert(id, out);
        }
        map[&root]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_consing_shares_structure() {
        let mut s = TermStore::new();
        let a = s.intern(Node::BoolAtom("a".into()));
        let b = s.intern(Node::BoolAtom("b".into()));
        let x = s.mk_and(vec![a, b]);
        let y = s.mk_and(vec![a, b]);
        assert_eq!(x, y);
        assert_ne!(s.mk_and(vec![b, a]), x);
    }

    #[test]
    fn smart_constructors_fold_constants() {
        let mut s = TermStore::new();
        let a = s.intern(Node::BoolAtom("a".into()));
        let t = s.mk_const(true);
        let f = s.mk_const(false);
        assert_eq!(s.mk_and(vec![a, t]), a);
        assert_eq!(s.mk_and(vec![a, f]), f);
        assert_eq!(s.mk_or(vec![a, f]), a);
        assert_eq!(s.mk_or(vec![]), f);
        let na = s.mk_not(a);
        assert_eq!(s.mk_not(na), a);
        assert_eq!(s.mk_iff(a, f), na);
        assert_eq!(s.mk_ite(a, t, f), a);
    }

    #[test]
    fn nested_conjunctions_flatten() {
        let mut s = TermStore::new();
        let a = s.intern(Node::BoolAtom("a".into()));
        let b = s.intern(Node::BoolAtom("b".into()));
        let c = s.intern(Node::BoolAtom("c".into()));
        let ab = s.mk_and(vec![a, b]);
        let abc = s.mk_and(vec![ab, c, a]);
        assert_eq!(s.node(abc), &Node::And(vec![a, b, c]));
    }
}
