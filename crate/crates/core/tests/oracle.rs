use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tlemma::frontend::linear::{rat, Rational};
use tlemma::gen::{generate, GenConfig};
use tlemma::{Instance, Literal, Oracle, OracleConfig, TLemma};

fn oracle(inst: &Instance) -> Oracle {
    Oracle::new(&OracleConfig::default(), inst.table()).unwrap()
}

fn with_models(inst: &Instance) -> Oracle {
    let cfg = OracleConfig {
        model_production: true,
        ..OracleConfig::default()
    };
    Oracle::new(&cfg, inst.table()).unwrap()
}

const XY: &str = "(declare-fun x () Real)(declare-fun y () Real)(assert (and (<= x 0) (= x 1) (<= y 5)))";

#[test]
fn example_core_is_the_conflicting_pair() {
    let inst = Instance::parse(XY).unwrap();
    let mut o = oracle(&inst);
    let all = [Literal::pos(0), Literal::pos(1), Literal::pos(2)];
    let v = o.check(&all).unwrap();
    assert!(!v.is_sat());
    assert_eq!(v.core.unwrap(), [Literal::pos(0), Literal::pos(1)]);
}

#[test]
fn example_disjunction_is_not_a_lemma() {
    let inst = Instance::parse("(declare-fun x () Real)(assert (or (= x 0) (= x 1)))").unwrap();
    let mut o = with_models(&inst);
    let v = o.check(&[Literal::neg(0), Literal::neg(1)]).unwrap();
    assert!(v.is_sat());
    let x = &v.model.unwrap()["x"];
    assert!(*x != rat(0) && *x != rat(1));
    assert!(!o.is_valid_lemma(&TLemma::new(vec![Literal::pos(0), Literal::pos(1)])).unwrap());
    assert!(o.is_valid_lemma(&TLemma::new(vec![Literal::neg(0), Literal::neg(1)])).unwrap());
}

/// Random conjunctions over the theory atoms of generated formulas.
fn conjunctions(seed: u64, real_vars: u32, max_lits: usize, count: usize) -> Vec<(Instance, Vec<Literal>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut index = 0;
    while out.len() < count {
        let inst = Instance::parse(&generate(&GenConfig::new(5, 0, real_vars), seed, index).unwrap()).unwrap();
        index += 1;
        let theory = inst.table().theory_atoms();
        if theory.len() < 2 {
            continue;
        }
        let k = rng.random_range(2..=theory.len().min(max_lits));
        let lits: Vec<Literal> = sample(&mut rng, theory.len(), k)
            .into_iter()
            .map(|i| Literal::new(theory[i], rng.random_bool(0.5)))
            .collect();
        out.push((inst, lits));
    }
    out
}

/// Exact feasibility for one-variable conjunctions by interval reasoning.
fn one_var_feasible(inst: &Instance, lits: &[Literal]) -> bool {
    // Candidate points: every bound, midpoints between bounds and beyond both ends.
    let mut bounds: Vec<Rational> = Vec::new();
    for l in lits {
        let a = inst.table().linear(l.atom()).unwrap();
        let c = Rational::from_integer(a.coeffs()[0].1.clone());
        bounds.push(a.bound() / c);
    }
    bounds.sort();
    let mut points = bounds.clone();
    for w in bounds.windows(2) {
        points.push((&w[0] + &w[1]) / rat(2));
    }
    points.push(&bounds[0] - rat(1));
    points.push(bounds.last().unwrap() + rat(1));
    points.iter().any(|p| {
        let pt = std::collections::BTreeMap::from([("x0".to_string(), p.clone())]);
        lits.iter()
            .all(|l| inst.table().linear(l.atom()).unwrap().eval(&pt) == l.is_positive())
    })
}

#[test]
fn one_variable_verdicts_match_interval_oracle() {
    let mut unsat = 0;
    for (inst, lits) in conjunctions(21, 1, 6, 300) {
        let expected = one_var_feasible(&inst, &lits);
        assert_eq!(oracle(&inst).is_consistent(&lits).unwrap(), expected, "{lits:?}");
        unsat += usize::from(!expected);
    }
    assert!(unsat > 20, "too few unsat samples: {unsat}");
}

#[test]
fn models_witness_sat_verdicts() {
    for (inst, lits) in conjunctions(22, 3, 8, 300) {
        let v = with_models(&inst).check(&lits).unwrap();
        if let Some(model) = v.model {
            for l in &lits {
                assert_eq!(inst.table().linear(l.atom()).unwrap().eval(&model), l.is_positive());
            }
        } else {
            assert!(!v.is_sat());
        }
    }
}

#[test]
fn cores_are_unsat_and_minimal() {
    let mut n_unsat = 0;
    for (inst, lits) in conjunctions(23, 3, 8, 1500) {
        let mut o = oracle(&inst);
        let v = o.check(&lits).unwrap();
        if v.is_sat() {
            continue;
        }
        n_unsat += 1;
        let core = v.core.unwrap();
        assert!(core.iter().all(|l| lits.contains(l)));
        assert!(!o.is_consistent(&core).unwrap());
        // Subset-enumeration oracle: no proper subset of the core is unsat.
        for mask in 0..(1u32 << core.len()) - 1 {
            let sub: Vec<Literal> = core.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, l)| *l).collect();
            assert!(o.is_consistent(&sub).unwrap(), "core {core:?} not minimal");
        }
        if n_unsat == 200 {
            break;
        }
    }
    assert_eq!(n_unsat, 200);
}

#[test]
fn lemmas_from_cores_are_valid() {
    for (inst, lits) in conjunctions(24, 3, 8, 300) {
        let mut o = oracle(&inst);
        if let Some(core) = o.check(&lits).unwrap().core {
            let lemma = tlemma::oracle::lemma_from_core(&core);
            assert!(o.is_valid_lemma(&lemma).unwrap());
        }
    }
}
