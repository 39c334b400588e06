//! Linear expressions and canonical linear-arithmetic atoms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational number. Always reduced with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Lt,
    Eq,
}

/// Relations as they appear in the source, before `>=`/`>` are folded away.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceRelation {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

/// `sum(coeffs) + constant`, with variables ordered by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinExpr {
    pub coeffs: BTreeMap<String, Rational>,
    pub constant: Rational,
}

impl LinExpr {
    pub fn constant(c: Rational) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), Rational::one());
        LinExpr {
            coeffs,
            constant: Rational::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            let e = out.coeffs.entry(v.clone()).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                out.coeffs.remove(v);
            }
        }
        out.constant += &other.constant;
        out
    }

    pub fn scale(&self, k: &Rational) -> LinExpr {
        if k.is_zero() {
            return LinExpr::default();
        }
        LinExpr {
            coeffs: self
                .coeffs
                .iter()
                .map(|(v, c)| (v.clone(), c * k))
                .collect(),
            constant: &self.constant * k,
        }
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.scale(&-Rational::one()))
    }
}

/// A canonical linear atom `sum(coeffs) rel bound`.
///
/// Invariants: nonempty coefficient list sorted by variable name, integer
/// coefficients with gcd 1, and a positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearAtom {
    coeffs: Vec<(String, BigInt)>,
    relation: Relation,
    bound: Rational,
}

/// Result of normalizing a comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    Const(bool),
    /// The comparison is equivalent to `atom` (if `positive`) or its negation.
    Literal { atom: LinearAtom, positive: bool },
}

impl LinearAtom {
    pub fn coeffs(&self) -> &[(String, BigInt)] {
        &self.coeffs
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn bound(&self) -> &Rational {
        &self.bound
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.coeffs.iter().map(|(v, _)| v.as_str())
    }

    /// The atom read back as `expr rel 0`.
    pub fn as_expr(&self) -> LinExpr {
        let mut e = LinExpr::constant(-self.bound.clone());
        for (v, c) in &self.coeffs {
            e.coeffs
                .insert(v.clone(), Rational::from_integer(c.clone()));
        }
        e
    }

    /// Truth value at a point; missing variables read as zero.
    pub fn eval(&self, point: &BTreeMap<String, Rational>) -> bool {
        let zero = Rational::zero();
        let lhs: Rational = self
            .coeffs
            .iter()
            .map(|(v, c)| point.get(v).unwrap_or(&zero) * Rational::from_integer(c.clone()))
            .sum();
        match self.relation {
            Relation::Le => lhs <= self.bound,
            Relation::Lt => lhs < self.bound,
            Relation::Eq => lhs == self.bound,
        }
    }

    /// Canonicalizes `expr rel 0`.
    pub fn normalize(expr: &LinExpr, rel: SourceRelation) -> Normalized {
        let (expr, rel) = match rel {
            SourceRelation::Ge => (expr.scale(&-Rational::one()), Relation::Le),
            SourceRelation::Gt => (expr.scale(&-Rational::one()), Relation::Lt),
            SourceRelation::Le => (expr.clone(), Relation::Le),
            SourceRelation::Lt => (expr.clone(), Relation::Lt),
            SourceRelation::Eq => (expr.clone(), Relation::Eq),
        };
        let coeffs: Vec<(&String, &Rational)> =
            expr.coeffs.iter().filter(|(_, c)| !c.is_zero()).collect();
        let bound = -expr.constant.clone();
        if coeffs.is_empty() {
            let zero = Rational::zero();
            return Normalized::Const(match rel {
                Relation::Le => zero <= bound,
                Relation::Lt => zero < bound,
                Relation::Eq => zero == bound,
            });
        }

        // Clear denominators, then divide out the common factor.
        let lcm = coeffs
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs
            .iter()
            .map(|(_, c)| (*c * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let scale = Rational::new(lcm, gcd.clone());
        let mut ints: Vec<BigInt> = ints.into_iter().map(|c| c / &gcd).collect();
        let mut bound = bound * scale;

        let mut positive = true;
        let mut relation = rel;
        if ints[0].is_negative() {
            for c in &mut ints {
                *c = -c.clone();
            }
            bound = -bound;
            // -e <= b  <=>  not (e < -b);  -e < b  <=>  not (e <= -b)
            relation = match rel {
                Relation::Eq => Relation::Eq,
                Relation::Le => {
                    positive = false;
                    Relation::Lt
                }
                Relation::Lt => {
                    positive = false;
                    Relation::Le
                }
            };
        }
        let atom = LinearAtom {
            coeffs: coeffs
                .iter()
                .map(|(v, _)| (*v).clone())
                .zip(ints)
                .collect(),
            relation,
            bound,
        };
        Normalized::Literal { atom, positive }
    }
}

impl fmt::Display for LinearAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if mag.is_one() {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}{v}")?;
            }
        }
        let rel = match self.relation {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "=",
        };
        write!(f, " {rel} {}", self.bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn expr(terms: &[(&str, i64)], constant: i64) -> LinExpr {
        let mut e = LinExpr::constant(rat(constant));
        for (v, c) in terms {
            e = e.add(&LinExpr::var(v).scale(&rat(*c)));
        }
        e
    }

    fn literal_holds(n: &Normalized, point: &BTreeMap<String, Rational>) -> bool {
        match n {
            Normalized::Const(b) => *b,
            Normalized::Literal { atom, positive } => atom.eval(point) == *positive,
        }
    }

    fn source_holds(e: &LinExpr, rel: SourceRelation, point: &BTreeMap<String, Rational>) -> bool {
        let zero = Rational::zero();
        let v: Rational = e
            .coeffs
            .iter()
            .map(|(n, c)| point.get(n).unwrap_or(&zero) * c)
            .sum::<Rational>()
            + &e.constant;
        match rel {
            SourceRelation::Le => v <= zero,
            SourceRelation::Lt => v < zero,
            SourceRelation::Ge => v >= zero,
            SourceRelation::Gt => v > zero,
            SourceRelation::Eq => v == zero,
        }
    }

    #[test]
    fn ge_flips_sign_into_strict_negation() {
        // y >= 2  ==  -y + 2 <= 0  ==  not (y < 2)
        let n = LinearAtom::normalize(&expr(&[("y", 1)], -2), SourceRelation::Ge);
        let Normalized::Literal { atom, positive } = &n else {
            panic!("expected literal")
        };
        assert!(!positive);
        assert_eq!(atom.relation(), Relation::Lt);
        assert_eq!(atom.bound(), &rat(2));
        assert_eq!(atom.coeffs(), &[("y".to_string(), BigInt::from(1))]);

        // re-evaluate on random rational points
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let y = rat_frac(rng.random_range(-40..40), rng.random_range(1..7));
            let point: BTreeMap<_, _> = [("y".to_string(), y)].into();
            assert_eq!(
                literal_holds(&n, &point),
                source_holds(&expr(&[("y", 1)], -2), SourceRelation::Ge, &point)
            );
        }
        // the boundary point is where strictness matters
        let point: BTreeMap<_, _> = [("y".to_string(), rat(2))].into();
        assert!(literal_holds(&n, &point));
    }

    #[test]
    fn scaled_atoms_share_a_form() {
        let a = LinearAtom::normalize(&expr(&[("x", 2)], 0), SourceRelation::Le);
        let b = LinearAtom::normalize(&expr(&[("x", 1)], 0), SourceRelation::Le);
        assert_eq!(a, b);
        let c = LinearAtom::normalize(&expr(&[("x", 1)], 0), SourceRelation::Gt);
        let Normalized::Literal { atom, positive } = c else {
            panic!()
        };
        assert!(!positive);
        let Normalized::Literal { atom: base, .. } = b else {
            panic!()
        };
        assert_eq!(atom, base);
    }

    #[test]
    fn rational_coefficients_are_cleared() {
        // x/2 + y/3 = 1  ->  3x + 2y = 6
        let e = LinExpr::var("x")
            .scale(&rat_frac(1, 2))
            .add(&LinExpr::var("y").scale(&rat_frac(1, 3)))
            .add(&LinExpr::constant(rat(-1)));
        let Normalized::Literal { atom, positive } = LinearAtom::normalize(&e, SourceRelation::Eq)
        else {
            panic!()
        };
        assert!(positive);
        assert_eq!(
            atom.coeffs(),
            &[
                ("x".to_string(), BigInt::from(3)),
                ("y".to_string(), BigInt::from(2))
            ]
        );
        assert_eq!(atom.bound(), &rat(6));
    }

    #[test]
    fn constant_comparisons_fold() {
        let e = expr(&[("x", 1), ("x", -1)], 0);
        assert_eq!(
            LinearAtom::normalize(&e, SourceRelation::Lt),
            Normalized::Const(false)
        );
        assert_eq!(
            LinearAtom::normalize(&e, SourceRelation::Le),
            Normalized::Const(true)
        );
    }

    fn arb_expr() -> impl Strategy<Value = (LinExpr, u8)> {
        (
            prop::collection::vec((0usize..3, -6i64..=6, 1i64..4), 1..4),
            -9i64..=9,
            0u8..5,
        )
            .prop_map(|(terms, k, rel)| {
                let names = ["a", "b", "c"];
                let mut e = LinExpr::constant(rat(k));
                for (v, n, d) in terms {
                    e = e.add(&LinExpr::var(names[v]).scale(&rat_frac(n, d)));
                }
                (e, rel)
            })
    }

    fn rel_of(r: u8) -> SourceRelation {
        [
            SourceRelation::Le,
            SourceRelation::Lt,
            SourceRelation::Ge,
            SourceRelation::Gt,
            SourceRelation::Eq,
        ][r as usize]
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent((e, r) in arb_expr()) {
            if let Normalized::Literal { atom, .. } = LinearAtom::normalize(&e, rel_of(r)) {
                let src = match atom.relation() {
                    Relation::Le => SourceRelation::Le,
                    Relation::Lt => SourceRelation::Lt,
                    Relation::Eq => SourceRelation::Eq,
                };
                let again = LinearAtom::normalize(&atom.as_expr(), src);
                prop_assert_eq!(again, Normalized::Literal { atom: atom.clone(), positive: true });
            }
        }

        #[test]
        fn normalization_preserves_truth((e, r) in arb_expr(), pts in prop::collection::vec((-12i64..12, 1i64..5), 3)) {
            let point: BTreeMap<String, Rational> = ["a", "b", "c"]
                .iter()
                .zip(pts)
                .map(|(n, (p, q))| (n.to_string(), rat_frac(p, q)))
                .collect();
            let n = LinearAtom::normalize(&e, rel_of(r));
            prop_assert_eq!(literal_holds(&n, &point), source_holds(&e, rel_of(r), &point));
        }
    }
}
