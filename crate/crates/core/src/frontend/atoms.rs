//! The atom table: the ordered atom set with its Boolean abstraction indices.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::linear::LinearAtom;
use super::term::{Node, TermId, TermStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomKind {
    Theory,
    Boolean,
    /// Tseitin definition variable. Only appears in clause storage.
    Label,
}

/// A literal over an abstraction index, packed as `index << 1 | negated`.
///
/// Ordering is by index, positive before negative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(u32);

impl Literal {
    pub fn new(atom: u32, positive: bool) -> Self {
        Literal(atom << 1 | u32::from(!positive))
    }

    pub fn pos(atom: u32) -> Self {
        Literal::new(atom, true)
    }

    pub fn neg(atom: u32) -> Self {
        Literal::new(atom, false)
    }

    pub fn atom(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Self {
        Literal(self.0 ^ 1)
    }

    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }

    /// Truth of the literal under a value for its atom.
    pub fn holds(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "A{}", self.atom())
        } else {
            write!(f, "~A{}", self.atom())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LiteralRepr {
    atom: u32,
    polarity: bool,
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LiteralRepr {
            atom: self.atom(),
            polarity: self.is_positive(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = LiteralRepr::deserialize(d)?;
        Ok(Literal::new(r.atom, r.polarity))
    }
}

#[derive(Clone, Debug)]
pub struct AtomEntry {
    pub term: TermId,
    pub kind: AtomKind,
    /// Variable names of a theory atom, sorted; empty for Boolean atoms.
    pub symbols: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct AtomTable {
    atoms: Vec<AtomEntry>,
    index_of: HashMap<TermId, u32>,
    linear: Vec<Option<LinearAtom>>,
    bool_names: Vec<Option<String>>,
    by_linear: HashMap<LinearAtom, u32>,
    by_name: HashMap<String, u32>,
}

impl AtomTable {
    /// Registers every atom reachable from `root` in depth-first,
    /// left-to-right order of first occurrence.
    pub fn from_formula(store: &TermStore, root: TermId) -> Self {
        let mut table = AtomTable::default();
        for id in store.topo_order(root) {
            if store.node(id).is_atom() {
                table.register(store, id);
            }
        }
        table
    }

    fn register(&mut self, store: &TermStore, term: TermId) -> u32 {
        if let Some(&i) = self.index_of.get(&term) {
            return i;
        }
        let idx = self.atoms.len() as u32;
        match store.node(term) {
            Node::TheoryAtom(a) => {
                let symbols = a.variables().map(str::to_string).collect();
                self.atoms.push(AtomEntry {
                    term,
                    kind: AtomKind::Theory,
                    symbols,
                });
                self.by_linear.insert(a.clone(), idx);
                self.linear.push(Some(a.clone()));
                self.bool_names.push(None);
            }
            Node::BoolAtom(name) => {
                self.atoms.push(AtomEntry {
                    term,
                    kind: AtomKind::Boolean,
                    symbols: Vec::new(),
                });
                self.by_name.insert(name.clone(), idx);
                self.linear.push(None);
                self.bool_names.push(Some(name.clone()));
            }
            other => panic!("not an atom: {other:?}"),
        }
        self.index_of.insert(term, idx);
        idx
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn entry(&self, index: u32) -> &AtomEntry {
        &self.atoms[index as usize]
    }

    pub fn entries(&self) -> &[AtomEntry] {
        &self.atoms
    }

    pub fn kind(&self, index: u32) -> AtomKind {
        self.atoms[index as usize].kind
    }

    pub fn index_of(&self, term: TermId) -> Option<u32> {
        self.index_of.get(&term).copied()
    }

    pub fn term_of(&self, index: u32) -> TermId {
        self.atoms[index as usize].term
    }

    pub fn linear(&self, index: u32) -> Option<&LinearAtom> {
        self.linear[index as usize].as_ref()
    }

    pub fn bool_name(&self, index: u32) -> Option<&str> {
        self.bool_names[index as usize].as_deref()
    }

    pub fn find_linear(&self, atom: &LinearAtom) -> Option<u32> {
        self.by_linear.get(atom).copied()
    }

    pub fn find_bool(&self, name: &str) -> Option<u32> {
        self.by_name.get(name).copied()
    }

    pub fn is_theory(&self, index: u32) -> bool {
        self.kind(index) == AtomKind::Theory
    }

    /// Indices of theory atoms, ascending.
    pub fn theory_atoms(&self) -> Vec<u32> {
        (0..self.len() as u32).filter(|&i| self.is_theory(i)).collect()
    }

    pub fn boolean_atoms(&self) -> Vec<u32> {
        (0..self.len() as u32).filter(|&i| !self.is_theory(i)).collect()
    }

    pub fn all_atoms(&self) -> Vec<u32> {
        (0..self.len() as u32).collect()
    }

    /// Real variable names used by theory atoms, sorted.
    pub fn real_variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self
            .atoms
            .iter()
            .flat_map(|a| a.symbols.iter().cloned())
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// Human-readable rendering of a literal.
    pub fn describe(&self, lit: Literal) -> String {
        let body = match (self.linear(lit.atom()), self.bool_name(lit.atom())) {
            (Some(a), _) => format!("({a})"),
            (_, Some(n)) => n.to_string(),
            _ => format!("A{}", lit.atom()),
        };
        if lit.is_positive() {
            body
        } else {
            format!("~{body}")
        }
    }
}
