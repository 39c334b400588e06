//! Theory consistency checks, unsat cores and lemma construction.

pub mod external;
pub mod fm;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::{AtomTable, LinearAtom, Literal, Rational};

/// A clause over theory atoms, stored with sorted, duplicate-free literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TLemma {
    pub literals: Vec<Literal>,
}

impl TLemma {
    pub fn new(mut literals: Vec<Literal>) -> Self {
        literals.sort();
        literals.dedup();
        TLemma { literals }
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// True iff every literal is false under the total assignment `bits`.
    pub fn falsified_by_bits(&self, bits: u64) -> bool {
        self.literals
            .iter()
            .all(|l| !l.holds(bits >> l.atom() & 1 == 1))
    }
}

/// The clause negating a core, literals sorted by atom index.
pub fn lemma_from_core(core: &[Literal]) -> TLemma {
    TLemma::new(core.iter().map(|l| l.negate()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Sat,
    Unsat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryVerdict {
    pub status: Status,
    pub core: Option<Vec<Literal>>,
    pub model: Option<BTreeMap<String, Rational>>,
}

impl TheoryVerdict {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }

    fn sat(model: Option<BTreeMap<String, Rational>>) -> Self {
        TheoryVerdict {
            status: Status::Sat,
            core: None,
            model,
        }
    }

    fn unsat(core: Vec<Literal>) -> Self {
        TheoryVerdict {
            status: Status::Unsat,
            core: Some(core),
            model: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    #[default]
    Builtin,
    /// Command line of an SMT-LIB2 solver reading from stdin.
    External(Vec<String>),
}

impl Backend {
    /// Splits a command string on whitespace.
    pub fn external(cmd: &str) -> Self {
        Backend::External(cmd.split_whitespace().map(str::to_string).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub backend: Backend,
    pub minimize_cores: bool,
    pub model_production: bool,
    pub query_timeout: Duration,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            backend: Backend::Builtin,
            minimize_cores: true,
            model_production: false,
            query_timeout: Duration::from_secs(10),
        }
    }
}

/// Raw backend reply. `core` is a subset of the queried literals when
/// reported; `model` only when it was requested and is available.
#[derive(Clone, Debug)]
pub struct BackendAnswer {
    pub sat: bool,
    pub core: Option<Vec<Literal>>,
    pub model: Option<BTreeMap<String, Rational>>,
}

/// A decision procedure for conjunctions of theory literals.
pub trait TheoryBackend: Send {
    fn solve(&mut self, lits: &[Literal], want_model: bool, deadline: Instant) -> Result<BackendAnswer>;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OracleStats {
    pub n_checks: u64,
    pub n_backend_calls: u64,
}

/// One theory solver instance, bound to an atom table.
pub struct Oracle {
    backend: Box<dyn TheoryBackend>,
    config: OracleConfig,
    theory: Arc<Vec<bool>>,
    pub stats: OracleStats,
}

impl Oracle {
    pub fn new(config: &OracleConfig, table: &AtomTable) -> Result<Self> {
        let atoms: Arc<Vec<Option<LinearAtom>>> =
            Arc::new((0..table.len() as u32).map(|i| table.linear(i).cloned()).collect());
        let backend: Box<dyn TheoryBackend> = match &config.backend {
            Backend::Builtin => Box::new(fm::Builtin::new(atoms.clone())),
            Backend::External(cmd) => Box::new(external::External::spawn(
                cmd,
                atoms.clone(),
                &table.real_variables(),
                config.query_timeout,
            )?),
        };
        Ok(Oracle::with_backend(backend, config.clone(), table))
    }

    pub fn with_backend(backend: Box<dyn TheoryBackend>, config: OracleConfig, table: &AtomTable) -> Self {
        let theory = (0..table.len() as u32).map(|i| table.is_theory(i)).collect();
        Oracle {
            backend,
            config,
            theory: Arc::new(theory),
            stats: OracleStats::default(),
        }
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    /// Sorted theory literals of `lits`, or a complementary pair if one exists.
    fn prepare(&self, lits: &[Literal]) -> std::result::Result<Vec<Literal>, Vec<Literal>> {
        let mut v: Vec<Literal> = lits
            .iter()
            .copied()
            .filter(|l| self.theory.get(l.atom() as usize).copied().unwrap_or(false))
            .collect();
        v.sort();
        v.dedup();
        for w in v.windows(2) {
            if w[0].atom() == w[1].atom() {
                return Err(vec![w[0], w[1]]);
            }
        }
        Ok(v)
    }

    fn raw(&mut self, lits: &[Literal], want_model: bool) -> Result<BackendAnswer> {
        if lits.is_empty() {
            return Ok(BackendAnswer {
                sat: true,
                core: None,
                model: want_model.then(BTreeMap::new),
            });
        }
        self.stats.n_backend_calls += 1;
        let deadline = Instant::now() + self.config.query_timeout;
        self.backend.solve(lits, want_model, deadline)
    }

    /// Consistency of the conjunction of the theory literals in `lits`.
    /// Boolean literals are ignored.
    pub fn check(&mut self, lits: &[Literal]) -> Result<TheoryVerdict> {
        self.stats.n_checks += 1;
        let lits = match self.prepare(lits) {
            Ok(v) => v,
            Err(pair) => return Ok(TheoryVerdict::unsat(pair)),
        };
        let want_model = self.config.model_production;
        let ans = self.raw(&lits, want_model)?;
        if ans.sat {
            return Ok(TheoryVerdict::sat(if want_model { ans.model } else { None }));
        }
        let core = ans.core.unwrap_or_else(|| lits.clone());
        let core = if self.config.minimize_cores {
            self.minimize_unchecked(core)?
        } else {
            core
        };
        Ok(TheoryVerdict::unsat(core))
    }

    pub fn is_consistent(&mut self, lits: &[Literal]) -> Result<bool> {
        self.stats.n_checks += 1;
        match self.prepare(lits) {
            Ok(v) => Ok(self.raw(&v, false)?.sat),
            Err(_) => Ok(false),
        }
    }

    fn minimize_unchecked(&mut self, mut core: Vec<Literal>) -> Result<Vec<Literal>> {
        core.sort();
        core.dedup();
        let mut i = 0;
        while i < core.len() {
            let mut trial = core.clone();
            trial.remove(i);
            let unsat = match self.prepare(&trial) {
                Ok(v) => !self.raw(&v, false)?.sat,
                Err(_) => true,
            };
            if unsat {
                core = trial;
            } else {
                i += 1;
            }
        }
        Ok(core)
    }

    /// Deletion-based minimal unsatisfiable subset, in ascending literal order.
    pub fn minimize_core(&mut self, lits: &[Literal]) -> Result<Vec<Literal>> {
        if self.is_consistent(lits)? {
            return Err(Error::Internal("minimize_core called on a consistent set".into()));
        }
        let v = self.prepare(lits).unwrap_or_else(|pair| pair);
        self.minimize_unchecked(v)
    }

    /// A clause is a theory lemma iff its negation is inconsistent. Boolean
    /// literals count only through complementary pairs.
    pub fn is_valid_lemma(&mut self, lemma: &TLemma) -> Result<bool> {
        let lits = &lemma.literals;
        if lits.windows(2).any(|w| w[0].atom() == w[1].atom()) {
            return Ok(true);
        }
        let neg: Vec<Literal> = lits.iter().map(|l| l.negate()).collect();
        Ok(!self.is_consistent(&neg)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::Problem;

    fn setup(text: &str) -> (Problem, Oracle) {
        let p = Problem::parse(text).unwrap();
        let o = Oracle::new(&OracleConfig::default(), &p.table).unwrap();
        (p, o)
    }

    #[test]
    fn two_equalities_conflict() {
        let (_, mut o) = setup("(declare-const x Real)(assert (and (= x 0) (= x 1)))");
        let v = o.check(&[Literal::pos(0), Literal::pos(1)]).unwrap();
        assert_eq!(v.status, Status::Unsat);
        assert_eq!(v.core, Some(vec![Literal::pos(0), Literal::pos(1)]));
        let lemma = lemma_from_core(v.core.as_ref().unwrap());
        assert_eq!(lemma.literals, vec![Literal::neg(0), Literal::neg(1)]);
        assert!(o.is_valid_lemma(&lemma).unwrap());
    }

    #[test]
    fn bound_and_disequality_are_consistent() {
        let (_, mut o) = setup("(declare-const x Real)(assert (and (<= x 0) (= x 1)))");
        assert!(o.check(&[Literal::pos(0), Literal::neg(1)]).unwrap().is_sat());
        assert!(o.check(&[]).unwrap().is_sat());
    }

    #[test]
    fn core_is_minimized() {
        let (_, mut o) = setup(
            "(declare-const x Real)(declare-const y Real)
             (assert (and (<= x 0) (= x 1) (<= y 5)))",
        );
        let lits = [Literal::pos(0), Literal::pos(1), Literal::pos(2)];
        let v = o.check(&lits).unwrap();
        assert_eq!(v.core, Some(vec![Literal::pos(0), Literal::pos(1)]));
        assert_eq!(o.minimize_core(&lits).unwrap(), vec![Literal::pos(0), Literal::pos(1)]);
        assert!(matches!(o.minimize_core(&lits[..1]), Err(Error::Internal(_))));
    }

    #[test]
    fn lemma_validity() {
        let (_, mut o) = setup("(declare-const x Real)(assert (and (= x 0) (= x 1)))");
        assert!(o.is_valid_lemma(&TLemma::new(vec![Literal::pos(0), Literal::neg(0)])).unwrap());
        assert!(!o.is_valid_lemma(&TLemma::new(vec![Literal::pos(0), Literal::pos(1)])).unwrap());
    }

    #[test]
    fn models_satisfy_queried_literals() {
        let p = Problem::parse(
            "(declare-const x Real)(declare-const y Real)
             (assert (and (< x y) (<= (+ x y) 3) (= x 1)))",
        )
        .unwrap();
        let cfg = OracleConfig {
            model_production: true,
            ..OracleConfig::default()
        };
        let mut o = Oracle::new(&cfg, &p.table).unwrap();
        let lits = [Literal::pos(0), Literal::pos(1), Literal::pos(2)];
        let v = o.check(&lits).unwrap();
        let m = v.model.unwrap();
        for l in lits {
            assert_eq!(p.table.linear(l.atom()).unwrap().eval(&m), l.is_positive());
        }
    }
}
