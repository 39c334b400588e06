//! Input side: SMT-LIB parsing, atom normalization, Boolean abstraction,
//! clausal form and three-valued evaluation.

pub mod atoms;
pub mod cnf;
pub mod eval;
pub mod linear;
pub mod parse;
pub mod print;
pub mod sexp;
pub mod term;

pub use atoms::{AtomEntry, AtomKind, AtomTable, Literal};
pub use cnf::{to_cnf, CnfProblem};
pub use eval::{Circuit, Truth};
pub use linear::{LinExpr, LinearAtom, Rational, Relation};
pub use parse::Sort;
pub use term::{Node, TermId, TermStore};

use crate::error::Result;

/// A parsed formula with its atom table.
#[derive(Clone, Debug)]
pub struct Problem {
    pub store: TermStore,
    /// Conjunction of all assertions.
    pub root: TermId,
    pub table: AtomTable,
    /// Declared symbols in declaration order.
    pub declarations: Vec<(String, Sort)>,
}

impl Problem {
    pub fn parse(text: &str) -> Result<Self> {
        let script = parse::parse_script(text)?;
        let mut store = script.store;
        let root = store.mk_and(script.assertions);
        let table = AtomTable::from_formula(&store, root);
        Ok(Problem {
            store,
            root,
            table,
            declarations: script.declarations,
        })
    }

    /// Replaces every atom by its abstraction variable.
    pub fn boolean_abstraction(&mut self, phi: TermId) -> TermId {
        let table = &self.table;
        self.store.rewrite(phi, |s, id| {
            table.index_of(id).map(|i| s.intern(Node::Prop(i)))
        })
    }

    /// Inverse of [`Problem::boolean_abstraction`].
    pub fn refine(&mut self, abstract_phi: TermId) -> TermId {
        let table = &self.table;
        self.store.rewrite(abstract_phi, |s, id| match s.node(id) {
            Node::Prop(i) => Some(table.term_of(*i)),
            _ => None,
        })
    }
}

/// A problem prepared for enumeration: abstraction, clauses and circuit.
#[derive(Clone, Debug)]
pub struct Instance {
    pub problem: Problem,
    pub abstract_root: TermId,
    pub cnf: CnfProblem,
    pub circuit: Circuit,
}

impl Instance {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Instance::new(Problem::parse(text)?))
    }

    pub fn new(mut problem: Problem) -> Self {
        let abstract_root = problem.boolean_abstraction(problem.root);
        let cnf = to_cnf(&problem.store, abstract_root, &problem.table);
        let circuit = Circuit::compile(&problem.store, abstract_root);
        Instance {
            problem,
            abstract_root,
            cnf,
            circuit,
        }
    }

    pub fn table(&self) -> &AtomTable {
        &self.problem.table
    }

    pub fn n_atoms(&self) -> usize {
        self.problem.table.len()
    }

    /// Three-valued truth of the formula under a partial assignment.
    pub fn eval3(&self, lits: &[Literal]) -> Truth {
        self.circuit.eval_literals(self.n_atoms(), lits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::linear::Relation;

    #[test]
    fn two_equalities_give_two_theory_atoms() {
        let inst = Instance::parse("(declare-const x Real)(assert (or (= x 0) (= x 1)))").unwrap();
        let t = inst.table();
        assert_eq!(t.len(), 2);
        assert!(t.is_theory(0) && t.is_theory(1));
        assert_eq!(t.linear(0).unwrap().relation(), Relation::Eq);
        assert_eq!(t.linear(0).unwrap().bound(), &linear::rat(0));
        assert_eq!(inst.cnf.clauses, vec![vec![Literal::pos(0), Literal::pos(1)]]);
        assert_eq!(inst.cnf.n_labels(), 0);
    }

    #[test]
    fn constant_formula_has_no_atoms() {
        let p = Problem::parse("(assert true)").unwrap();
        assert_eq!(p.store.const_value(p.root), Some(true));
        assert!(p.table.is_empty());
        let inst = Instance::new(p);
        assert!(inst.cnf.clauses.is_empty());
        assert_eq!(inst.eval3(&[]), Truth::True);
    }

    #[test]
    fn abstraction_of_disjunction() {
        let mut p = Problem::parse(
            "(declare-const x Real)(declare-const y Real)(declare-const z Real)
             (assert (or (<= (- x y) 3) (= x z)))",
        )
        .unwrap();
        let a = p.boolean_abstraction(p.root);
        let (a0, a1) = (p.store.intern(Node::Prop(0)), p.store.intern(Node::Prop(1)));
        assert_eq!(p.store.node(a), &Node::Or(vec![a0, a1]));
        assert_eq!(p.refine(a), p.root);
    }

    #[test]
    fn negated_biconditional_clauses() {
        let inst = Instance::parse(
            "(declare-const x Real)(assert (= (not (<= x 0)) (= x 1)))",
        )
        .unwrap();
        let (a0, a1) = (Literal::pos(0), Literal::pos(1));
        assert_eq!(
            inst.cnf.clauses,
            vec![vec![a0, a1], vec![a0.negate(), a1.negate()]]
        );
    }

    #[test]
    fn shared_atom_across_ge_and_le() {
        let p = Problem::parse(
            "(declare-const y Real)(assert (and (>= y 2) (or (< y 2) (<= (* 2 y) 4))))",
        )
        .unwrap();
        // y >= 2 is not(y < 2); 2y <= 4 is y <= 2
        assert_eq!(p.table.len(), 2);
        for e in p.table.entries() {
            assert_eq!(e.symbols, vec!["y".to_string()]);
        }
    }
}
