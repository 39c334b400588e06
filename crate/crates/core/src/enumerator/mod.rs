//! Projected AllSMT: blocking-clause enumeration over the Boolean
//! abstraction with lazy theory checks, in total and partial modes.

pub mod dpll;

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::{AtomKind, Instance, Literal, Truth};
use crate::oracle::{lemma_from_core, Oracle, TLemma};
use dpll::{Dpll, SearchResult};

/// A consistent set of literals, sorted by atom index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub literals: Vec<Literal>,
}

impl Assignment {
    pub fn new(mut literals: Vec<Literal>) -> Self {
        literals.sort();
        literals.dedup();
        debug_assert!(literals.windows(2).all(|w| w[0].atom() != w[1].atom()));
        Assignment { literals }
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Restriction to the atoms in `proj`.
    pub fn project(&self, proj: &[u32]) -> Assignment {
        Assignment {
            literals: self
                .literals
                .iter()
                .copied()
                .filter(|l| proj.contains(&l.atom()))
                .collect(),
        }
    }

    /// The clause forbidding every extension of this assignment.
    pub fn blocking_clause(&self) -> Vec<Literal> {
        self.literals.iter().map(|l| l.negate()).collect()
    }

    /// Whether the total assignment `bits` extends this one.
    pub fn extended_by_bits(&self, bits: u64) -> bool {
        self.literals.iter().all(|l| l.holds(bits >> l.atom() & 1 == 1))
    }

    /// Whether some total assignment extends both.
    pub fn compatible(&self, other: &Assignment) -> bool {
        self.literals.iter().all(|a| {
            other
                .literals
                .iter()
                .all(|b| a.atom() != b.atom() || a == b)
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnumerationMode {
    #[default]
    Total,
    Partial,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationStats {
    pub n_candidates: u64,
    /// Calls to the oracle on nonempty theory-literal sets from the search.
    pub n_theory_checks: u64,
    /// Extra consistency queries spent on core minimization.
    pub n_core_checks: u64,
    pub n_lemmas: u64,
    pub n_blocking_clauses: u64,
    pub elapsed_ns: u64,
}

impl EnumerationStats {
    pub fn absorb(&mut self, o: &EnumerationStats) {
        self.n_candidates += o.n_candidates;
        self.n_theory_checks += o.n_theory_checks;
        self.n_core_checks += o.n_core_checks;
        self.n_lemmas += o.n_lemmas;
        self.n_blocking_clauses += o.n_blocking_clauses;
        self.elapsed_ns += o.elapsed_ns;
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnumerationOutcome {
    /// Enumerated assignments, projected, in discovery order.
    pub assignments: Vec<Assignment>,
    /// Lemmas in discovery order.
    pub lemmas: Vec<TLemma>,
    pub stats: EnumerationStats,
    /// The budget lapsed; the outcome is incomplete.
    pub truncated: bool,
}

/// What to enumerate: the instance, optionally conjoined with a cube and
/// seed lemmas, projected on `proj`.
#[derive(Clone, Copy)]
pub struct Task<'a> {
    pub instance: &'a Instance,
    pub proj: &'a [u32],
    pub cube: &'a [Literal],
    pub seed_lemmas: &'a [TLemma],
}

impl<'a> Task<'a> {
    pub fn new(instance: &'a Instance, proj: &'a [u32]) -> Self {
        Task {
            instance,
            proj,
            cube: &[],
            seed_lemmas: &[],
        }
    }
}

#[derive(Clone, Copy, Default)]
pub struct EnumConfig<'a> {
    pub mode: EnumerationMode,
    /// Check partial candidates every k decisions.
    pub early_pruning: Option<u32>,
    /// Branch on the negative polarity first.
    pub negative_phase: bool,
    pub deadline: Option<Instant>,
    pub cancel: Option<&'a AtomicBool>,
}

struct Minimizer {
    /// Blocking clauses as they were added.
    clauses: Vec<Vec<Literal>>,
    /// atom -> blocking clauses mentioning it
    by_atom: Vec<Vec<usize>>,
}

impl Minimizer {
    fn new(n_atoms: usize) -> Self {
        Minimizer {
            clauses: Vec::new(),
            by_atom: vec![Vec::new(); n_atoms],
        }
    }

    fn add(&mut self, clause: Vec<Literal>) {
        let i = self.clauses.len();
        for l in &clause {
            self.by_atom[l.atom() as usize].push(i);
        }
        self.clauses.push(clause);
    }

    /// Greedy literal dropping over `proj` in ascending order, keeping a drop
    /// only while the formula stays Kleene-true and every blocking clause
    /// keeps a true literal.
    fn minimize(&self, inst: &Instance, eta: &[Literal], proj: &[u32], keep: &[Literal]) -> Vec<Literal> {
        let n = inst.n_atoms();
        let mut values: Vec<Option<bool>> = vec![None; n];
        for l in eta {
            values[l.atom() as usize] = Some(l.is_positive());
        }
        let holds = |values: &[Option<bool>], l: &Literal| values[l.atom() as usize].map(|v| l.holds(v)) == Some(true);
        let mut true_count: Vec<usize> = self
            .clauses
            .iter()
            .map(|c| c.iter().filter(|l| holds(&values, l)).count())
            .collect();
        let mut sorted_proj = proj.to_vec();
        sorted_proj.sort_unstable();
        for a in sorted_proj {
            let ai = a as usize;
            let Some(v) = values[ai] else { continue };
            if keep.iter().any(|l| l.atom() == a) {
                continue;
            }
            let lit = Literal::new(a, v);
            let blocked = self.by_atom[ai]
                .iter()
                .any(|&c| true_count[c] == 1 && self.clauses[c].contains(&lit));
            if blocked {
                continue;
            }
            values[ai] = None;
            if inst.circuit.eval3(&values) == Truth::True {
                for &c in &self.by_atom[ai] {
                    if self.clauses[c].contains(&lit) {
                        true_count[c] -= 1;
                    }
                }
            } else {
                values[ai] = Some(v);
            }
        }
        (0..n as u32)
            .filter_map(|i| values[i as usize].map(|v| Literal::new(i, v)))
            .collect()
    }
}

/// Branching order: projection atoms, then remaining atoms, then labels.
fn branch_order(inst: &Instance, proj: &[u32]) -> Vec<u32> {
    let cnf = &inst.cnf;
    let mut in_proj = vec![false; cnf.n_vars as usize];
    let mut p: Vec<u32> = proj.to_vec();
    p.sort_unstable();
    p.dedup();
    for &a in &p {
        in_proj[a as usize] = true;
    }
    let mut order = p;
    order.extend(cnf.alpha_indices.iter().copied().filter(|&a| !in_proj[a as usize]));
    order.extend((0..cnf.n_vars).filter(|&v| cnf.kinds[v as usize] == AtomKind::Label));
    order
}

fn theory_literals(inst: &Instance, trail: &[Literal]) -> Vec<Literal> {
    let n = inst.n_atoms() as u32;
    let table = inst.table();
    let mut v: Vec<Literal> = trail
        .iter()
        .copied()
        .filter(|l| l.atom() < n && table.is_theory(l.atom()))
        .collect();
    v.sort();
    v
}

/// ProjectedAllSMT. On budget expiry the outcome is returned with
/// `truncated` set.
pub fn projected_allsmt(task: Task<'_>, config: EnumConfig<'_>, oracle: &mut Oracle) -> Result<EnumerationOutcome> {
    let start = Instant::now();
    let inst = task.instance;
    let n_atoms = inst.n_atoms();
    debug_assert!(task.proj.iter().all(|&a| (a as usize) < n_atoms));
    let mut proj: Vec<u32> = task.proj.to_vec();
    proj.sort_unstable();
    proj.dedup();

    let mut engine = Dpll::new(inst.cnf.n_vars as usize, branch_order(inst, &proj), !config.negative_phase);
    for c in &inst.cnf.clauses {
        engine.add_clause(c);
    }
    for &l in task.cube {
        engine.add_clause(&[l]);
    }
    for s in task.seed_lemmas {
        engine.add_clause(&s.literals);
    }

    let mut out = EnumerationOutcome::default();
    let mut minimizer = Minimizer::new(n_atoms);

    let learn_conflict = |engine: &mut Dpll, out: &mut EnumerationOutcome, oracle: &mut Oracle, lits: &[Literal]| -> Result<bool> {
        out.stats.n_theory_checks += 1;
        let before = oracle.stats.n_backend_calls;
        let v = oracle.check(lits)?;
        out.stats.n_core_checks += (oracle.stats.n_backend_calls - before).saturating_sub(1);
        if v.is_sat() {
            return Ok(true);
        }
        let lemma = lemma_from_core(v.core.as_deref().unwrap_or(lits));
        debug_assert!(lemma.literals.iter().all(|l| engine.value_of(*l) == Some(false)));
        engine.add_clause(&lemma.literals);
        out.stats.n_lemmas += 1;
        out.lemmas.push(lemma);
        Ok(false)
    };

    loop {
        if let Some(c) = config.cancel {
            if c.load(Ordering::Relaxed) {
                return Err(Error::Cancelled);
            }
        }
        if config.deadline.is_some_and(|d| Instant::now() > d) {
            out.truncated = true;
            break;
        }
        match engine.search(config.early_pruning) {
            SearchResult::Exhausted => break,
            SearchResult::Checkpoint => {
                let lits = theory_literals(inst, engine.trail());
                if !lits.is_empty() {
                    learn_conflict(&mut engine, &mut out, oracle, &lits)?;
                }
            }
            SearchResult::Total => {
                out.stats.n_candidates += 1;
                let eta: Vec<Literal> = (0..n_atoms as u32)
                    .map(|a| Literal::new(a, engine.value(a).expect("total candidate")))
                    .collect();
                let lits = theory_literals(inst, &eta);
                if !lits.is_empty() && !learn_conflict(&mut engine, &mut out, oracle, &lits)? {
                    continue;
                }
                let mu = match config.mode {
                    EnumerationMode::Total => eta,
                    EnumerationMode::Partial => minimizer.minimize(inst, &eta, &proj, task.cube),
                };
                let mu = Assignment::new(mu).project(&proj);
                let block = mu.blocking_clause();
                debug_assert!(block.iter().all(|l| engine.value_of(*l) == Some(false)));
                engine.add_clause(&block);
                minimizer.add(block);
                out.stats.n_blocking_clauses += 1;
                out.assignments.push(mu);
            }
        }
    }
    out.stats.elapsed_ns = start.elapsed().as_nanos() as u64;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleConfig;

    const EX: &str = "(declare-const x Real)(assert (or (= x 0) (= x 1)))";

    fn run(text: &str, mode: EnumerationMode, negative_phase: bool) -> EnumerationOutcome {
        let inst = Instance::parse(text).unwrap();
        let mut o = Oracle::new(&OracleConfig::default(), inst.table()).unwrap();
        let proj = inst.table().all_atoms();
        let cfg = EnumConfig {
            mode,
            negative_phase,
            ..EnumConfig::default()
        };
        projected_allsmt(Task::new(&inst, &proj), cfg, &mut o).unwrap()
    }

    fn a(lits: &[Literal]) -> Assignment {
        Assignment::new(lits.to_vec())
    }

    #[test]
    fn total_mode_on_two_equalities() {
        let out = run(EX, EnumerationMode::Total, false);
        let (p, n) = (Literal::pos, Literal::neg);
        assert_eq!(out.assignments, vec![a(&[p(0), n(1)]), a(&[n(0), p(1)])]);
        assert_eq!(out.lemmas, vec![TLemma::new(vec![n(0), n(1)])]);
    }

    #[test]
    fn partial_mode_documented_traces() {
        let (p, n) = (Literal::pos, Literal::neg);
        let out = run(EX, EnumerationMode::Partial, false);
        assert_eq!(out.assignments, vec![a(&[p(0)]), a(&[n(0), p(1)])]);
        assert_eq!(out.lemmas.len(), 1);

        let out = run(EX, EnumerationMode::Partial, true);
        assert_eq!(out.assignments, vec![a(&[p(1)]), a(&[p(0), n(1)])]);
        assert!(out.lemmas.is_empty());
    }

    #[test]
    fn vacuous_enumeration() {
        let out = run("(assert true)", EnumerationMode::Total, false);
        assert_eq!(out.assignments, vec![Assignment::default()]);
        assert!(out.lemmas.is_empty());
    }

    #[test]
    fn projection_and_blocking() {
        let (p, n) = (Literal::pos, Literal::neg);
        let mu = a(&[p(1), n(2), p(5)]);
        assert_eq!(mu.project(&[1, 2]), a(&[p(1), n(2)]));
        assert_eq!(mu.project(&[1, 2, 5]), mu);
        assert!(Assignment::default().project(&[1]).is_empty());
        assert_eq!(a(&[p(0), n(1)]).blocking_clause(), vec![n(0), p(1)]);
    }
}
