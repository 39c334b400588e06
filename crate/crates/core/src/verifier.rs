//! Brute-force ground truth: classification of all total assignments and
//! lemma-set checks against it.

use serde::{Deserialize, Serialize};

use crate::enumerator::Assignment;
use crate::error::{Error, Result};
use crate::frontend::{Instance, Literal};
use crate::oracle::{Oracle, OracleConfig, TLemma};
use crate::strategies::{run_strategy, StrategySpec};

pub const DEFAULT_CAP: usize = 20;

/// Total assignments over the atom set, packed as bitmasks (bit i = atom i),
/// split by propositional and theory satisfaction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub n_atoms: usize,
    /// Theory-consistent, propositionally satisfying. Ascending.
    pub ctta: Vec<u64>,
    /// Theory-inconsistent, propositionally satisfying. Ascending.
    pub itta: Vec<u64>,
    pub neg_ctta: u64,
    pub neg_itta: u64,
}

pub fn bits_to_assignment(bits: u64, n_atoms: usize) -> Assignment {
    Assignment::new((0..n_atoms as u32).map(|i| Literal::new(i, bits >> i & 1 == 1)).collect())
}

pub fn assignment_to_bits(a: &Assignment) -> u64 {
    a.literals
        .iter()
        .filter(|l| l.is_positive())
        .fold(0, |acc, l| acc | 1 << l.atom())
}

impl Classification {
    pub fn ctta_assignments(&self) -> Vec<Assignment> {
        self.ctta.iter().map(|&b| bits_to_assignment(b, self.n_atoms)).collect()
    }

    pub fn itta_assignments(&self) -> Vec<Assignment> {
        self.itta.iter().map(|&b| bits_to_assignment(b, self.n_atoms)).collect()
    }
}

/// Theory consistency of every assignment to the theory atoms, as a table
/// indexed by the packed theory bits (bit k = k-th theory atom).
fn theory_table(inst: &Instance, oracle: &mut Oracle) -> Result<Vec<bool>> {
    let theory = inst.table().theory_atoms();
    let t = theory.len();
    let mut table = vec![false; 1usize << t];
    let mut prefix: Vec<Literal> = Vec::with_capacity(t);
    // Depth-first with pruning: an inconsistent prefix rules out its subtree.
    fn go(
        depth: usize,
        bits: usize,
        theory: &[u32],
        prefix: &mut Vec<Literal>,
        oracle: &mut Oracle,
        table: &mut [bool],
    ) -> Result<()> {
        if depth > 0 && !oracle.is_consistent(prefix)? {
            return Ok(());
        }
        if depth == theory.len() {
            table[bits] = true;
            return Ok(());
        }
        for v in [false, true] {
            prefix.push(Literal::new(theory[depth], v));
            go(depth + 1, bits | usize::from(v) << depth, theory, prefix, oracle, table)?;
            prefix.pop();
        }
        Ok(())
    }
    go(0, 0, &theory, &mut prefix, oracle, &mut table)?;
    Ok(table)
}

/// Packs the theory-atom bits of a total assignment.
fn theory_bits(bits: u64, theory: &[u32]) -> usize {
    theory
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &a)| acc | ((bits >> a & 1) as usize) << k)
}

pub fn classify(inst: &Instance, oracle: &mut Oracle, cap: usize) -> Result<Classification> {
    let n = inst.n_atoms();
    if n > cap || n >= 63 {
        return Err(Error::CapExceeded { atoms: n, cap });
    }
    let consistent = theory_table(inst, oracle)?;
    let theory = inst.table().theory_atoms();
    let mut c = Classification {
        n_atoms: n,
        ctta: Vec::new(),
        itta: Vec::new(),
        neg_ctta: 0,
        neg_itta: 0,
    };
    let mut scratch = Vec::new();
    for bits in 0..1u64 << n {
        let prop = inst.circuit.eval_bits(bits, &mut scratch);
        let cons = consistent[theory_bits(bits, &theory)];
        match (prop, cons) {
            (true, true) => c.ctta.push(bits),
            (true, false) => c.itta.push(bits),
            (false, true) => c.neg_ctta += 1,
            (false, false) => c.neg_itta += 1,
        }
    }
    Ok(c)
}

/// Falsification test of a clause as a mask comparison.
#[derive(Clone, Copy)]
struct Packed {
    mask: u64,
    falsifying: u64,
}

impl Packed {
    fn new(lemma: &TLemma) -> Self {
        let mut p = Packed { mask: 0, falsifying: 0 };
        for l in &lemma.literals {
            p.mask |= 1 << l.atom();
            if !l.is_positive() {
                p.falsifying |= 1 << l.atom();
            }
        }
        p
    }

    fn falsified_by(self, bits: u64) -> bool {
        bits & self.mask == self.falsifying
    }
}

/// Every assignment falsifies some lemma.
pub fn rules_out(lemmas: &[TLemma], rhos: &[Assignment]) -> bool {
    let bits: Vec<u64> = rhos.iter().map(assignment_to_bits).collect();
    rules_out_bits(lemmas, &bits)
}

pub fn rules_out_bits(lemmas: &[TLemma], rhos: &[u64]) -> bool {
    let packed: Vec<Packed> = lemmas.iter().map(Packed::new).collect();
    rhos.iter().all(|&r| packed.iter().any(|p| p.falsified_by(r)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    /// Every theory-inconsistent satisfying assignment falsifies some lemma.
    pub rules_out: bool,
    /// Every lemma is theory-valid.
    pub lemmas_valid: bool,
    /// Every lemma mentions only theory atoms of the instance.
    pub atoms_in_theory: bool,
    /// Propositional models of the formula conjoined with the lemmas are
    /// exactly the theory-consistent satisfying assignments.
    pub abstraction_equivalent: bool,
    pub n_ctta: usize,
    pub n_itta: usize,
    pub n_lemmas: usize,
    pub n_invalid: usize,
    pub n_not_ruled_out: usize,
    /// The strategy run was cut short by its budget; nothing is certified.
    pub truncated: bool,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        !self.truncated
            && self.rules_out
            && self.lemmas_valid
            && self.atoms_in_theory
            && self.abstraction_equivalent
    }
}

/// The four checks for a given lemma set.
pub fn check_lemmas(inst: &Instance, class: &Classification, lemmas: &[TLemma], oracle: &mut Oracle) -> Result<Verdict> {
    let table = inst.table();
    let n = inst.n_atoms() as u32;
    let atoms_in_theory = lemmas
        .iter()
        .all(|l| l.literals.iter().all(|x| x.atom() < n && table.is_theory(x.atom())));
    let mut n_invalid = 0;
    for l in lemmas {
        if l.literals.iter().any(|x| x.atom() >= n) || !oracle.is_valid_lemma(l)? {
            n_invalid += 1;
        }
    }
    let packed: Vec<Packed> = lemmas.iter().map(Packed::new).collect();
    let n_not_ruled_out = class
        .itta
        .iter()
        .filter(|&&r| !packed.iter().any(|p| p.falsified_by(r)))
        .count();

    // Models of the formula with the lemmas, compared against the CTTA list.
    let mut scratch = Vec::new();
    let mut models = Vec::new();
    for bits in 0..1u64 << class.n_atoms {
        if inst.circuit.eval_bits(bits, &mut scratch) && !packed.iter().any(|p| p.falsified_by(bits)) {
            models.push(bits);
        }
    }
    Ok(Verdict {
        rules_out: n_not_ruled_out == 0,
        lemmas_valid: n_invalid == 0,
        atoms_in_theory,
        abstraction_equivalent: models == class.ctta,
        n_ctta: class.ctta.len(),
        n_itta: class.itta.len(),
        n_lemmas: lemmas.len(),
        n_invalid,
        n_not_ruled_out,
        truncated: false,
    })
}

/// Runs a strategy and checks its lemma set against brute-force classification.
pub fn check_strategy(inst: &Instance, spec: &StrategySpec, oracle_cfg: &OracleConfig, cap: usize) -> Result<Verdict> {
    let mut oracle = Oracle::new(oracle_cfg, inst.table())?;
    let class = classify(inst, &mut oracle, cap)?;
    match run_strategy(inst, spec, oracle_cfg) {
        Ok(r) => check_lemmas(inst, &class, &r.lemmas.lemmas, &mut oracle),
        Err(Error::BudgetExceeded(partial)) => {
            let mut v = check_lemmas(inst, &class, &partial.lemmas, &mut oracle)?;
            v.truncated = true;
            Ok(v)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI1: &str = "(declare-const x Real)(assert (or (<= x 0) (= x 1)))";
    const PHI2: &str = "(declare-const x Real)(assert (= (not (<= x 0)) (= x 1)))";

    fn class(text: &str) -> Classification {
        let inst = Instance::parse(text).unwrap();
        let mut o = Oracle::new(&OracleConfig::default(), inst.table()).unwrap();
        classify(&inst, &mut o, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn partition_property_holds() {
        for text in [PHI1, PHI2] {
            let c = class(text);
            let total = c.ctta.len() as u64 + c.itta.len() as u64 + c.neg_ctta + c.neg_itta;
            assert_eq!(total, 1 << c.n_atoms);
        }
    }

    #[test]
    fn t_equivalent_pair_shares_ctta() {
        // bit 0: x <= 0, bit 1: x = 1
        let (c1, c2) = (class(PHI1), class(PHI2));
        assert_eq!(c1.ctta, [0b01, 0b10]);
        assert_eq!(c1.itta, [0b11]);
        assert_eq!(c2.ctta, [0b01, 0b10]);
        assert!(c2.itta.is_empty());
    }

    #[test]
    fn constant_false_has_no_satisfying_assignments() {
        let c = class("(declare-const x Real)(assert (and (<= x 0) false))");
        assert!(c.ctta.is_empty() && c.itta.is_empty());
    }

    #[test]
    fn rules_out_edge_cases() {
        let rho = Assignment::new(vec![Literal::pos(0), Literal::pos(1)]);
        let lemma = TLemma::new(vec![Literal::neg(0), Literal::neg(1)]);
        assert!(rules_out(&[lemma], std::slice::from_ref(&rho)));
        assert!(rules_out(&[], &[]));
        assert!(!rules_out(&[], &[rho]));
    }

    #[test]
    fn cap_is_enforced() {
        let inst = Instance::parse(
            "(declare-const x Real)(declare-const y Real)(assert (or (<= x 0) (<= y 0) (<= (+ x y) 0)))",
        )
        .unwrap();
        let mut o = Oracle::new(&OracleConfig::default(), inst.table()).unwrap();
        assert!(matches!(classify(&inst, &mut o, 2), Err(Error::CapExceeded { atoms: 3, cap: 2 })));
    }
}
