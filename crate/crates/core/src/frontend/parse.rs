//! SMT-LIB2 (QF_LRA subset) to terms.

use std::collections::HashMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::linear::{LinExpr, LinearAtom, Normalized, Rational, SourceRelation};
use super::sexp::{read_all, Sexp, SexpKind};
use super::term::{Node, TermId, TermStore};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Bool,
    Real,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::Bool => "Bool",
            Sort::Real => "Real",
        }
    }
}

/// A parsed script: declarations in order and one term per `assert`.
#[derive(Clone, Debug)]
pub struct Script {
    pub store: TermStore,
    pub declarations: Vec<(String, Sort)>,
    pub assertions: Vec<TermId>,
}

/// A real-valued term after `ite` lifting: a guarded list of linear
/// expressions whose guards are mutually exclusive and exhaustive.
type Cases = Vec<(TermId, LinExpr)>;

#[derive(Clone)]
enum Value {
    Bool(TermId),
    Real(Cases),
}

struct Translator {
    store: TermStore,
    declarations: Vec<(String, Sort)>,
    sorts: HashMap<String, Sort>,
    defines: HashMap<String, Value>,
    assertions: Vec<TermId>,
}

pub fn parse_script(text: &str) -> Result<Script> {
    let mut t = Translator {
        store: TermStore::new(),
        declarations: Vec::new(),
        sorts: HashMap::new(),
        defines: HashMap::new(),
        assertions: Vec::new(),
    };
    for cmd in read_all(text)? {
        t.command(&cmd)?;
    }
    Ok(Script {
        store: t.store,
        declarations: t.declarations,
        assertions: t.assertions,
    })
}

fn parse_number(s: &str) -> Option<Rational> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit() || b == b'.') {
        return None;
    }
    match s.split_once('.') {
        None => BigInt::from_str(s).ok().map(Rational::from_integer),
        Some((int, frac)) => {
            if int.is_empty() || frac.is_empty() || frac.contains('.') {
                return None;
            }
            let num = BigInt::from_str(&format!("{int}{frac}")).ok()?;
            let den = BigInt::from(10u32).pow(frac.len() as u32);
            Some(Rational::new(num, den))
        }
    }
}

impl Translator {
    fn command(&mut self, cmd: &Sexp) -> Result<()> {
        let items = cmd
            .as_list()
            .ok_or_else(|| cmd.error("expected a command"))?;
        let head = cmd.head().ok_or_else(|| cmd.error("expected a command name"))?;
        match head {
            "set-logic" => {
                let logic = items
                    .get(1)
                    .and_then(Sexp::as_atom)
                    .ok_or_else(|| cmd.error("set-logic needs a logic name"))?;
                if logic != "QF_LRA" {
                    return Err(items[1].unsupported(format!("logic {logic}")));
                }
            }
            "set-info" | "set-option" | "check-sat" | "exit" | "get-model" | "get-info"
            | "get-value" | "get-unsat-core" | "get-assignment" | "get-option" | "echo" => {}
            "declare-const" => {
                let [_, name, sort] = items else {
                    return Err(cmd.error("declare-const takes a name and a sort"));
                };
                self.declare(name, sort)?;
            }
            "declare-fun" => {
                let [_, name, args, sort] = items else {
                    return Err(cmd.error("declare-fun takes a name, arguments and a sort"));
                };
                match args.as_list() {
                    Some([]) => self.declare(name, sort)?,
                    Some(_) => return Err(cmd.unsupported("uninterpreted function of arity > 0")),
                    None => return Err(args.error("expected an argument list")),
                }
            }
            "define-fun" => {
                let [_, name, args, sort, body] = items else {
                    return Err(cmd.error("define-fun takes a name, arguments, a sort and a body"));
                };
                if !matches!(args.as_list(), Some([])) {
                    return Err(cmd.unsupported("define-fun with parameters"));
                }
                let sort = self.sort(sort)?;
                let name_s = name.as_atom().ok_or_else(|| name.error("expected a symbol"))?;
                let v = self.term(body, &mut Vec::new())?;
                self.check_sort(&v, sort, body)?;
                self.defines.insert(name_s.to_string(), v);
            }
            "assert" => {
                let [_, body] = items else {
                    return Err(cmd.error("assert takes one term"));
                };
                let v = self.term(body, &mut Vec::new())?;
                let t = self.expect_bool(v, body)?;
                self.assertions.push(t);
            }
            "push" | "pop" | "reset" | "reset-assertions" | "declare-sort" | "define-sort"
            | "check-sat-assuming" | "declare-datatypes" | "define-fun-rec" => {
                return Err(cmd.unsupported(format!("command {head}")));
            }
            _ => return Err(cmd.error(format!("unknown command {head}"))),
        }
        Ok(())
    }

    fn sort(&self, s: &Sexp) -> Result<Sort> {
        match s.as_atom() {
            Some("Bool") => Ok(Sort::Bool),
            Some("Real") => Ok(Sort::Real),
            Some(other) => Err(s.unsupported(format!("sort {other}"))),
            None => Err(s.unsupported("parametric sort")),
        }
    }

    fn declare(&mut self, name: &Sexp, sort: &Sexp) -> Result<()> {
        let n = name.as_atom().ok_or_else(|| name.error("expected a symbol"))?;
        let sort = self.sort(sort)?;
        if self.sorts.contains_key(n) {
            return Err(name.error(format!("symbol {n} already declared")));
        }
        self.sorts.insert(n.to_string(), sort);
        self.declarations.push((n.to_string(), sort));
        Ok(())
    }

    fn check_sort(&self, v: &Value, sort: Sort, at: &Sexp) -> Result<()> {
        match (v, sort) {
            (Value::Bool(_), Sort::Bool) | (Value::Real(_), Sort::Real) => Ok(()),
            _ => Err(at.error(format!("expected a term of sort {}", sort.name()))),
        }
    }

    fn expect_bool(&self, v: Value, at: &Sexp) -> Result<TermId> {
        match v {
            Value::Bool(t) => Ok(t),
            Value::Real(_) => Err(at.error("expected a Bool term")),
        }
    }

    fn expect_real(&self, v: Value, at: &Sexp) -> Result<Cases> {
        match v {
            Value::Real(c) => Ok(c),
            Value::Bool(_) => Err(at.error("expected a Real term")),
        }
    }

    fn bools(&mut self, args: &[Sexp], env: &mut Vec<HashMap<String, Value>>) -> Result<Vec<TermId>> {
        args.iter()
            .map(|a| {
                let v = self.term(a, env)?;
                self.expect_bool(v, a)
            })
            .collect()
    }

    fn reals(&mut self, args: &[Sexp], env: &mut Vec<HashMap<String, Value>>) -> Result<Vec<Cases>> {
        args.iter()
            .map(|a| {
                let v = self.term(a, env)?;
                self.expect_real(v, a)
            })
            .collect()
    }

    fn lookup(&mut self, name: &str, env: &[HashMap<String, Value>]) -> Option<Value> {
        for scope in env.iter().rev() {
            if let Some(v) = scope.get(name) {
                return Some(v.clone());
            }
        }
        if let Some(v) = self.defines.get(name) {
            return Some(v.clone());
        }
        match self.sorts.get(name)? {
            Sort::Bool => Some(Value::Bool(self.store.intern(Node::BoolAtom(name.to_string())))),
            Sort::Real => {
                let t = self.store.mk_const(true);
                Some(Value::Real(vec![(t, LinExpr::var(name))]))
            }
        }
    }

    fn term(&mut self, s: &Sexp, env: &mut Vec<HashMap<String, Value>>) -> Result<Value> {
        match &s.kind {
            SexpKind::Str(_) => Err(s.error("unexpected string literal")),
            SexpKind::Atom(a) => {
                match a.as_str() {
                    "true" => return Ok(Value::Bool(self.store.mk_const(true))),
                    "false" => return Ok(Value::Bool(self.store.mk_const(false))),
                    _ => {}
                }
                if let Some(r) = parse_number(a) {
                    let t = self.store.mk_const(true);
                    return Ok(Value::Real(vec![(t, LinExpr::constant(r))]));
                }
                if a.starts_with('#') {
                    return Err(s.unsupported(format!("literal {a}")));
                }
                self.lookup(a, env)
                    .ok_or_else(|| s.error(format!("unknown symbol {a}")))
            }
            SexpKind::List(items) => {
                let Some(head) = s.head() else {
                    return Err(s.error("expected an application"));
                };
                let args = &items[1..];
                self.application(s, head, args, env)
            }
        }
    }

    fn application(
        &mut self,
        s: &Sexp,
        head: &str,
        args: &[Sexp],
        env: &mut Vec<HashMap<String, Value>>,
    ) -> Result<Value> {
        let need = |n: usize| -> Result<()> {
            if args.len() < n {
                Err(s.error(format!("{head} needs at least {n} argument(s)")))
            } else {
                Ok(())
            }
        };
        let v = match head {
            "not" => {
                if args.len() != 1 {
                    return Err(s.error("not takes one argument"));
                }
                let a = self.bools(args, env)?[0];
                Value::Bool(self.store.mk_not(a))
            }
            "and" => {
                let cs = self.bools(args, env)?;
                Value::Bool(self.store.mk_and(cs))
            }
            "or" => {
                let cs = self.bools(args, env)?;
                Value::Bool(self.store.mk_or(cs))
            }
            "=>" => {
                need(2)?;
                let cs = self.bools(args, env)?;
                let mut acc = *cs.last().unwrap();
                for &c in cs[..cs.len() - 1].iter().rev() {
                    acc = self.store.mk_implies(c, acc);
                }
                Value::Bool(acc)
            }
            "xor" => {
                need(2)?;
                let cs = self.bools(args, env)?;
                let mut acc = cs[0];
                for &c in &cs[1..] {
                    acc = self.store.mk_xor(acc, c);
                }
                Value::Bool(acc)
            }
            "=" | "distinct" => {
                need(2)?;
                let vals: Vec<Value> = args
                    .iter()
                    .map(|a| self.term(a, env))
                    .collect::<Result<_>>()?;
                let pairs: Vec<(usize, usize)> = if head == "=" {
                    (1..vals.len()).map(|i| (i - 1, i)).collect()
                } else {
                    (0..vals.len())
                        .flat_map(|i| (i + 1..vals.len()).map(move |j| (i, j)))
                        .collect()
                };
                let mut parts = Vec::new();
                for (i, j) in pairs {
                    let eq = match (&vals[i], &vals[j]) {
                        (Value::Bool(a), Value::Bool(b)) => self.store.mk_iff(*a, *b),
                        (Value::Real(a), Value::Real(b)) => {
                            self.compare(a, b, SourceRelation::Eq)
                        }
                        _ => return Err(args[j].error("mixed sorts in equality")),
                    };
                    parts.push(if head == "=" { eq } else { self.store.mk_not(eq) });
                }
                Value::Bool(self.store.mk_and(parts))
            }
            "ite" => {
                if args.len() != 3 {
                    return Err(s.error("ite takes three arguments"));
                }
                let c = self.term(&args[0], env)?;
                let c = self.expect_bool(c, &args[0])?;
                let t = self.term(&args[1], env)?;
                let e = self.term(&args[2], env)?;
                match (t, e) {
                    (Value::Bool(t), Value::Bool(e)) => Value::Bool(self.store.mk_ite(c, t, e)),
                    (Value::Real(t), Value::Real(e)) => {
                        let nc = self.store.mk_not(c);
                        let mut cases = Vec::new();
                        for (g, x) in t {
                            let g2 = self.store.mk_and(vec![c, g]);
                            if self.store.const_value(g2) != Some(false) {
                                cases.push((g2, x));
                            }
                        }
                        for (g, x) in e {
                            let g2 = self.store.mk_and(vec![nc, g]);
                            if self.store.const_value(g2) != Some(false) {
                                cases.push((g2, x));
                            }
                        }
                        Value::Real(cases)
                    }
                    _ => return Err(s.error("ite branches have different sorts")),
                }
            }
            "<=" | "<" | ">=" | ">" => {
                need(2)?;
                let rel = match head {
                    "<=" => SourceRelation::Le,
                    "<" => SourceRelation::Lt,
                    ">=" => SourceRelation::Ge,
                    _ => SourceRelation::Gt,
                };
                let vals = self.reals(args, env)?;
                let mut parts = Vec::new();
                for w in vals.windows(2) {
                    parts.push(self.compare(&w[0], &w[1], rel));
                }
                Value::Bool(self.store.mk_and(parts))
            }
            "+" => {
                need(1)?;
                let vals = self.reals(args, env)?;
                Value::Real(self.fold_cases(vals, |a, b| Ok(a.add(b)))?)
            }
            "-" => {
                need(1)?;
                let vals = self.reals(args, env)?;
                if vals.len() == 1 {
                    let neg = -Rational::one();
                    Value::Real(vals[0].iter().map(|(g, e)| (*g, e.scale(&neg))).collect())
                } else {
                    Value::Real(self.fold_cases(vals, |a, b| Ok(a.sub(b)))?)
                }
            }
            "*" => {
                need(1)?;
                let vals = self.reals(args, env)?;
                Value::Real(self.fold_cases(vals, |a, b| {
                    if a.is_constant() {
                        Ok(b.scale(&a.constant))
                    } else if b.is_constant() {
                        Ok(a.scale(&b.constant))
                    } else {
                        Err(s.unsupported("nonlinear multiplication"))
                    }
                })?)
            }
            "/" => {
                need(2)?;
                let vals = self.reals(args, env)?;
                Value::Real(self.fold_cases(vals, |a, b| {
                    if !b.is_constant() {
                        Err(s.unsupported("division by a non-constant term"))
                    } else if b.constant.is_zero() {
                        Err(s.unsupported("division by zero"))
                    } else {
                        Ok(a.scale(&(Rational::one() / &b.constant)))
                    }
                })?)
            }
            "let" => {
                let [bindings, body] = args else {
                    return Err(s.error("let takes bindings and a body"));
                };
                let list = bindings
                    .as_list()
                    .ok_or_else(|| bindings.error("expected a binding list"))?;
                let mut scope = HashMap::new();
                for b in list {
                    match b.as_list() {
                        Some([name, val]) => {
                            let n = name.as_atom().ok_or_else(|| name.error("expected a symbol"))?;
                            let v = self.term(val, env)?;
                            scope.insert(n.to_string(), v);
                        }
                        _ => return Err(b.error("malformed binding")),
                    }
                }
                env.push(scope);
                let r = self.term(body, env);
                env.pop();
                r?
            }
            "!" => {
                need(1)?;
                self.term(&args[0], env)?
            }
            "forall" | "exists" => return Err(s.unsupported("quantifier")),
            "to_real" | "to_int" | "is_int" | "div" | "mod" | "abs" => {
                return Err(s.unsupported(format!("integer operator {head}")))
            }
            _ => {
                if self.sorts.contains_key(head) {
                    return Err(s.unsupported("uninterpreted function application"));
                }
                return Err(s.error(format!("unknown function {head}")));
            }
        };
        Ok(v)
    }

    /// Left fold over guarded cases; the result ranges over the product of guards.
    fn fold_cases(
        &mut self,
        vals: Vec<Cases>,
        mut op: impl FnMut(&LinExpr, &LinExpr) -> Result<LinExpr>,
    ) -> Result<Cases> {
        let mut it = vals.into_iter();
        let mut acc = it.next().expect("at least one operand");
        for next in it {
            let mut out = Vec::with_capacity(acc.len() * next.len());
            for (g1, e1) in &acc {
                for (g2, e2) in &next {
                    let g = self.store.mk_and(vec![*g1, *g2]);
                    if self.store.const_value(g) == Some(false) {
                        continue;
                    }
                    out.push((g, op(e1, e2)?));
                }
            }
            acc = out;
        }
        Ok(acc)
    }

    fn compare(&mut self, a: &Cases, b: &Cases, rel: SourceRelation) -> TermId {
        let mut disjuncts = Vec::new();
        for (g1, e1) in a {
            for (g2, e2) in b {
                let lit = match LinearAtom::normalize(&e1.sub(e2), rel) {
                    Normalized::Const(v) => self.store.mk_const(v),
                    Normalized::Literal { atom, positive } => {
                        let t = self.store.intern(Node::TheoryAtom(atom));
                        if positive {
                            t
                        } else {
                            self.store.mk_not(t)
                        }
                    }
                };
                disjuncts.push(self.store.mk_and(vec![*g1, *g2, lit]));
            }
        }
        self.store.mk_or(disjuncts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::linear::{rat, Relation};
    use crate::error::Error;

    fn one(text: &str) -> (TermStore, TermId) {
        let s = parse_script(text).unwrap();
        let mut store = s.store;
        let root = store.mk_and(s.assertions);
        (store, root)
    }

    #[test]
    fn decimals_and_fractions() {
        assert_eq!(parse_number("12"), Some(rat(12)));
        assert_eq!(parse_number("1.25"), Some(Rational::new(5.into(), 4.into())));
        assert_eq!(parse_number("1."), None);
        assert_eq!(parse_number("x1"), None);
    }

    #[test]
    fn ge_and_le_forms_share_an_atom() {
        let (s, root) = one("(declare-const x Real)(assert (and (<= x 0) (> x 0)))");
        // x > 0 becomes not (x <= 0): the conjunction mentions a single atom
        let Node::And(cs) = s.node(root) else { panic!() };
        assert_eq!(s.node(cs[1]), &Node::Not(cs[0]));
    }

    #[test]
    fn distinct_is_negated_equality() {
        let (s, root) = one("(declare-const x Real)(assert (distinct x 1))");
        let Node::Not(a) = s.node(root) else { panic!() };
        let Node::TheoryAtom(atom) = s.node(*a) else { panic!() };
        assert_eq!(atom.relation(), Relation::Eq);
    }

    #[test]
    fn real_ite_is_case_split() {
        let (s, root) =
            one("(declare-const b Bool)(declare-const x Real)(assert (<= (ite b x 3) 2))");
        // (b and x <= 2) or (not b and false)  ->  b and x <= 2
        let Node::And(cs) = s.node(root) else { panic!("{:?}", s.node(root)) };
        assert_eq!(cs.len(), 2);
        assert_eq!(s.node(cs[0]), &Node::BoolAtom("b".into()));
    }

    #[test]
    fn let_bindings_and_annotations() {
        let (s, root) = one(
            "(declare-const x Real)(declare-const y Real)
             (assert (! (let ((z (+ x y)) (w 2)) (< z (* w y))) :named a1))",
        );
        // x + y < 2y  ->  x - y < 0
        let Node::TheoryAtom(atom) = s.node(root) else { panic!("{:?}", s.node(root)) };
        assert_eq!(atom.relation(), Relation::Lt);
        assert_eq!(atom.coeffs().len(), 2);
        assert_eq!(atom.bound(), &rat(0));
    }

    #[test]
    fn self_comparison_folds_to_false() {
        let (s, root) = one("(declare-const x Real)(assert (< x x))");
        assert_eq!(s.const_value(root), Some(false));
    }

    #[test]
    fn unsupported_constructs() {
        let cases = [
            "(declare-const x Real)(assert (forall ((y Real)) (< x y)))",
            "(declare-const x Real)(declare-const y Real)(assert (< (* x y) 1))",
            "(declare-const n Int)",
            "(declare-fun f (Real) Real)",
            "(set-logic QF_LIA)",
            "(push 1)",
        ];
        for c in cases {
            let e = parse_script(c).unwrap_err();
            assert!(matches!(e, Error::Unsupported { .. }), "{c}: {e}");
        }
    }

    #[test]
    fn malformed_input_reports_position() {
        let e = parse_script("(declare-const x Real)\n(assert (<= x y))").unwrap_err();
        match e {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 15)),
            other => panic!("{other}"),
        }
        assert!(matches!(
            parse_script("(assert (and true").unwrap_err(),
            Error::Parse { .. }
        ));
        assert!(matches!(
            parse_script("(declare-const x Real)(assert x)").unwrap_err(),
            Error::Parse { .. }
        ));
    }
}
