//! Builtin exact-rational LRA procedure: Fourier–Motzkin elimination with
//! strictness flags, equalities eliminated first by substitution, and a
//! model-guided split for disequalities.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{BackendAnswer, TheoryBackend};
use crate::error::{Error, Result};
use crate::frontend::{LinearAtom, Literal, Rational, Relation};

/// `sum(a * x) < b` if strict, `<= b` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    a: Vec<BigInt>,
    b: Rational,
    strict: bool,
}

/// `sum(a * x) = b`.
#[derive(Clone, Debug)]
struct Eq {
    a: Vec<BigInt>,
    b: Rational,
}

enum Step {
    Subst { var: usize, eq: Eq },
    Bounds { var: usize, rows: Vec<Row> },
}

fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn dot(a: &[BigInt], x: &[Rational]) -> Rational {
    a.iter()
        .zip(x)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, v)| Rational::from_integer(c.clone()) * v)
        .sum()
}

/// Scales `a`,`b` by `k` and adds `m` times (`c`,`d`).
fn combine(k: &BigInt, a: &[BigInt], b: &Rational, m: &BigInt, c: &[BigInt], d: &Rational) -> (Vec<BigInt>, Rational) {
    let coeffs = a.iter().zip(c).map(|(x, y)| k * x + m * y).collect();
    let bound = Rational::from_integer(k.clone()) * b + Rational::from_integer(m.clone()) * d;
    (coeffs, bound)
}

/// Tightest-bound set of rows keyed by coefficient vector; `None` on a
/// constant contradiction.
#[derive(Default)]
struct RowSet {
    rows: BTreeMap<Vec<BigInt>, (Rational, bool)>,
}

impl RowSet {
    fn insert(&mut self, mut a: Vec<BigInt>, mut b: Rational, strict: bool) -> bool {
        let g = content(&a);
        if g.is_zero() {
            let ok = if strict { b.is_positive() } else { !b.is_negative() };
            return ok;
        }
        if !g.is_one() {
            for c in &mut a {
                *c /= &g;
            }
            b /= Rational::from_integer(g);
        }
        match self.rows.get_mut(&a) {
            Some((b0, s0)) => {
                if b < *b0 || (b == *b0 && strict && !*s0) {
                    *b0 = b;
                    *s0 = strict;
                }
            }
            None => {
                self.rows.insert(a, (b, strict));
            }
        }
        true
    }

    fn into_rows(self) -> Vec<Row> {
        self.rows
            .into_iter()
            .map(|(a, (b, strict))| Row { a, b, strict })
            .collect()
    }
}

/// Feasibility of rows and equalities over `n` variables, with a model on
/// request.
fn feasible(
    n: usize,
    rows: Vec<Row>,
    eqs: Vec<Eq>,
    want_model: bool,
    deadline: Instant,
) -> Result<Option<Option<Vec<Rational>>>> {
    let mut steps = Vec::new();
    let mut eqs = eqs;
    let mut rows = rows;
    let mut i = 0;
    while i < eqs.len() {
        let eq = eqs[i].clone();
        i += 1;
        let Some(j) = eq.a.iter().position(|c| !c.is_zero()) else {
            if !eq.b.is_zero() {
                return Ok(None);
            }
            continue;
        };
        let ej = &eq.a[j];
        let k = ej.abs();
        let sgn = if ej.is_negative() { -BigInt::one() } else { BigInt::one() };
        for other in eqs[i..].iter_mut() {
            if !other.a[j].is_zero() {
                let m = -(&sgn * &other.a[j]);
                let (a, b) = combine(&k, &other.a, &other.b, &m, &eq.a, &eq.b);
                *other = Eq { a, b };
            }
        }
        for r in rows.iter_mut() {
            if !r.a[j].is_zero() {
                let m = -(&sgn * &r.a[j]);
                let (a, b) = combine(&k, &r.a, &r.b, &m, &eq.a, &eq.b);
                r.a = a;
                r.b = b;
            }
        }
        steps.push(Step::Subst { var: j, eq });
    }

    let mut set = RowSet::default();
    for r in rows {
        if !set.insert(r.a, r.b, r.strict) {
            return Ok(None);
        }
    }
    let mut rows = set.into_rows();

    loop {
        if Instant::now() > deadline {
            return Err(Error::OracleTimeout(deadline.elapsed()));
        }
        let mut best: Option<(usize, usize)> = None;
        for j in 0..n {
            let pos = rows.iter().filter(|r| r.a[j].is_positive()).count();
            let neg = rows.iter().filter(|r| r.a[j].is_negative()).count();
            if pos + neg == 0 {
                continue;
            }
            let cost = pos * neg;
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((j, cost));
            }
        }
        let Some((j, _)) = best else { break };
        let (with, without): (Vec<Row>, Vec<Row>) = rows.into_iter().partition(|r| !r.a[j].is_zero());
        let mut set = RowSet::default();
        for r in without {
            set.insert(r.a, r.b, r.strict);
        }
        for p in with.iter().filter(|r| r.a[j].is_positive()) {
            for q in with.iter().filter(|r| r.a[j].is_negative()) {
                let (a, b) = combine(&-&q.a[j], &p.a, &p.b, &p.a[j], &q.a, &q.b);
                if !set.insert(a, b, p.strict || q.strict) {
                    return Ok(None);
                }
            }
        }
        steps.push(Step::Bounds { var: j, rows: with });
        rows = set.into_rows();
    }

    if !want_model {
        return Ok(Some(None));
    }
    let mut val: Vec<Option<Rational>> = vec![None; n];
    let fixed = |val: &mut Vec<Option<Rational>>, skip: usize, a: &[BigInt]| -> Vec<Rational> {
        for (k, c) in a.iter().enumerate() {
            if k != skip && !c.is_zero() && val[k].is_none() {
                val[k] = Some(Rational::zero());
            }
        }
        val.iter().map(|v| v.clone().unwrap_or_else(Rational::zero)).collect()
    };
    for step in steps.iter().rev() {
        match step {
            Step::Subst { var, eq } => {
                let mut x = fixed(&mut val, *var, &eq.a);
                x[*var] = Rational::zero();
                let rest = dot(&eq.a, &x);
                val[*var] = Some((&eq.b - rest) / Rational::from_integer(eq.a[*var].clone()));
            }
            Step::Bounds { var, rows } => {
                let mut lo: Option<(Rational, bool)> = None;
                let mut hi: Option<(Rational, bool)> = None;
                for r in rows {
                    let mut x = fixed(&mut val, *var, &r.a);
                    x[*var] = Rational::zero();
                    let aj = Rational::from_integer(r.a[*var].clone());
                    let v = (&r.b - dot(&r.a, &x)) / &aj;
                    if aj.is_positive() {
                        if hi.as_ref().is_none_or(|(h, s)| v < *h || (v == *h && r.strict && !s)) {
                            hi = Some((v, r.strict));
                        }
                    } else if lo.as_ref().is_none_or(|(l, s)| v > *l || (v == *l && r.strict && !s)) {
                        lo = Some((v, r.strict));
                    }
                }
                let one = Rational::one();
                let x = match (lo, hi) {
                    (Some((l, _)), Some((h, _))) if l == h => l,
                    (Some((l, _)), Some((h, _))) => (l + h) / Rational::from_integer(2.into()),
                    (Some((l, s)), None) => if s { l + one } else { l },
                    (None, Some((h, s))) => if s { h - one } else { h },
                    (None, None) => Rational::zero(),
                };
                val[*var] = Some(x);
            }
        }
    }
    Ok(Some(Some(
        val.into_iter().map(|v| v.unwrap_or_else(Rational::zero)).collect(),
    )))
}

/// The builtin backend. Holds the linear atoms of the owning table.
pub struct Builtin {
    atoms: Arc<Vec<Option<LinearAtom>>>,
}

impl Builtin {
    pub fn new(atoms: Arc<Vec<Option<LinearAtom>>>) -> Self {
        Builtin { atoms }
    }
}

impl TheoryBackend for Builtin {
    fn solve(&mut self, lits: &[Literal], want_model: bool, deadline: Instant) -> Result<BackendAnswer> {
        let atoms: Vec<(&LinearAtom, bool)> = lits
            .iter()
            .map(|l| {
                let a = self.atoms[l.atom() as usize]
                    .as_ref()
                    .ok_or_else(|| Error::Internal(format!("atom {} is not a theory atom", l.atom())))?;
                Ok((a, l.is_positive()))
            })
            .collect::<Result<_>>()?;
        let mut names: Vec<&str> = atoms.iter().flat_map(|(a, _)| a.variables()).collect();
        names.sort();
        names.dedup();
        let n = names.len();
        let dense = |a: &LinearAtom, sign: i32| -> Vec<BigInt> {
            let mut v = vec![BigInt::zero(); n];
            for (name, c) in a.coeffs() {
                let k = names.binary_search(&name.as_str()).expect("collected variable");
                v[k] = c * BigInt::from(sign);
            }
            v
        };

        let mut rows = Vec::new();
        let mut eqs = Vec::new();
        let mut diseqs = Vec::new();
        for (a, pos) in &atoms {
            let b = a.bound().clone();
            match (a.relation(), pos) {
                (Relation::Le, true) => rows.push(Row { a: dense(a, 1), b, strict: false }),
                (Relation::Lt, true) => rows.push(Row { a: dense(a, 1), b, strict: true }),
                // not (e <= b)  is  -e < -b
                (Relation::Le, false) => rows.push(Row { a: dense(a, -1), b: -b, strict: true }),
                (Relation::Lt, false) => rows.push(Row { a: dense(a, -1), b: -b, strict: false }),
                (Relation::Eq, true) => eqs.push(Eq { a: dense(a, 1), b }),
                (Relation::Eq, false) => diseqs.push(Eq { a: dense(a, 1), b }),
            }
        }

        let need_model = want_model || !diseqs.is_empty();
        let model = loop {
            let Some(m) = feasible(n, rows.clone(), eqs.clone(), need_model, deadline)? else {
                return Ok(BackendAnswer { sat: false, core: None, model: None });
            };
            let Some(m) = m else { break None };
            let Some(d) = diseqs.iter().position(|d| dot(&d.a, &m) == d.b) else {
                break Some(m);
            };
            let d = diseqs.remove(d);
            let below = Row { a: d.a.clone(), b: d.b.clone(), strict: true };
            let above = Row { a: d.a.iter().map(|c| -c).collect(), b: -d.b, strict: true };
            let mut trial = rows.clone();
            trial.push(below);
            if feasible(n, trial.clone(), eqs.clone(), false, deadline)?.is_some() {
                rows = trial;
            } else {
                rows.push(above);
            }
        };

        let model = if want_model {
            model.map(|m| {
                names
                    .iter()
                    .map(|s| s.to_string())
                    .zip(m)
                    .collect::<BTreeMap<_, _>>()
            })
        } else {
            None
        };
        if let Some(m) = &model {
            debug_assert!(atoms.iter().all(|(a, pos)| a.eval(m) == *pos), "model violates a literal");
        }
        Ok(BackendAnswer { sat: true, core: None, model })
    }
}
