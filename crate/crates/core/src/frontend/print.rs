//! SMT-LIB rendering of atoms and lemma files, and reading lemma files back.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::atoms::{AtomTable, Literal};
use super::linear::{LinearAtom, Rational, Relation};
use super::parse::parse_script;
use super::term::{Node, TermId, TermStore};
use super::Problem;
use crate::error::{Error, Result};
use crate::oracle::TLemma;

pub fn symbol(name: &str) -> String {
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn integer(n: &BigInt) -> String {
    if n.is_negative() {
        format!("(- {}.0)", -n)
    } else {
        format!("{n}.0")
    }
}

pub fn real(r: &Rational) -> String {
    if r.is_integer() {
        return integer(r.numer());
    }
    let body = format!("(/ {}.0 {}.0)", r.numer().abs(), r.denom());
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

pub fn atom(a: &LinearAtom) -> String {
    let terms: Vec<String> = a
        .coeffs()
        .iter()
        .map(|(v, c)| {
            if c.is_one() {
                symbol(v)
            } else {
                format!("(* {} {})", integer(c), symbol(v))
            }
        })
        .collect();
    let lhs = if terms.len() == 1 {
        terms[0].clone()
    } else {
        format!("(+ {})", terms.join(" "))
    };
    let rel = match a.relation() {
        Relation::Le => "<=",
        Relation::Lt => "<",
        Relation::Eq => "=",
    };
    format!("({rel} {lhs} {})", real(a.bound()))
}

pub fn literal(table: &AtomTable, l: Literal) -> String {
    let body = match (table.linear(l.atom()), table.bool_name(l.atom())) {
        (Some(a), _) => atom(a),
        (_, Some(n)) => symbol(n),
        _ => unreachable!("atom without a body"),
    };
    if l.is_positive() {
        body
    } else {
        format!("(not {body})")
    }
}

pub fn clause(table: &AtomTable, lits: &[Literal]) -> String {
    match lits {
        [] => "false".to_string(),
        [l] => literal(table, *l),
        _ => {
            let parts: Vec<String> = lits.iter().map(|l| literal(table, *l)).collect();
            format!("(or {})", parts.join(" "))
        }
    }
}

/// A script re-declaring every symbol of `problem` and asserting each lemma.
pub fn render_lemma_file(problem: &Problem, lemmas: &[TLemma]) -> String {
    let mut out = String::from("(set-logic QF_LRA)\n");
    for (name, sort) in &problem.declarations {
        let _ = writeln!(out, "(declare-fun {} () {})", symbol(name), sort.name());
    }
    for l in lemmas {
        let _ = writeln!(out, "(assert {})", clause(&problem.table, &l.literals));
    }
    out
}

fn read_literal(store: &TermStore, table: &AtomTable, t: TermId) -> Result<Literal> {
    match store.node(t) {
        Node::Not(a) => Ok(read_literal(store, table, *a)?.negate()),
        Node::TheoryAtom(a) => table
            .find_linear(a)
            .map(Literal::pos)
            .ok_or_else(|| Error::LemmaFile(format!("atom ({a}) does not occur in the instance"))),
        Node::BoolAtom(n) => table
            .find_bool(n)
            .map(Literal::pos)
            .ok_or_else(|| Error::LemmaFile(format!("atom {n} does not occur in the instance"))),
        other => Err(Error::LemmaFile(format!("expected a literal, found {other:?}"))),
    }
}

/// Reads the clauses asserted by a lemma file, mapped onto `problem`'s atoms.
pub fn parse_lemma_file(problem: &Problem, text: &str) -> Result<Vec<TLemma>> {
    let script = parse_script(text)?;
    let store = &script.store;
    let mut out = Vec::new();
    for &a in &script.assertions {
        let lits = match store.node(a) {
            Node::Const(false) => Vec::new(),
            Node::Const(true) => {
                return Err(Error::LemmaFile("assertion simplifies to true".into()))
            }
            Node::Or(cs) => cs
                .iter()
                .map(|c| read_literal(store, &problem.table, *c))
                .collect::<Result<_>>()?,
            _ => vec![read_literal(store, &problem.table, a)?],
        };
        out.push(TLemma::new(lits));
    }
    Ok(out)
}
