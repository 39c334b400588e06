use proptest::prelude::*;

use tlemma::gen::{generate, product_instance, GenConfig};
use tlemma::strategies::{dedup_lemmas, run_strategy, Provenance, Stage, StrategySpec};
use tlemma::verifier::{check_strategy, classify, rules_out_bits, DEFAULT_CAP};
use tlemma::{Instance, Literal, Oracle, OracleConfig, TLemma};

const ALL: [&str; 6] = ["baseline", "baseline-proj", "baseline-proj-part", "dnc", "dnc-proj", "dnc-proj-part"];

fn spec(name: &str, workers: usize) -> StrategySpec {
    StrategySpec {
        workers,
        ..name.parse().unwrap()
    }
}

fn corpus(seed: u64, n: u64) -> Vec<Instance> {
    let cfg = GenConfig {
        max_atoms: Some(12),
        ..GenConfig::new(5, 4, 3)
    };
    (0..n)
        .map(|i| Instance::parse(&generate(&cfg, seed, i).unwrap()).unwrap())
        .collect()
}

#[test]
fn all_strategies_pass_the_verifier() {
    for inst in corpus(51, 100) {
        for name in ALL {
            let v = check_strategy(&inst, &spec(name, 1), &OracleConfig::default(), DEFAULT_CAP).unwrap();
            assert!(v.passed(), "{name}: {v:?}");
        }
    }
}

#[test]
fn rules_out_holds_for_any_worker_count() {
    for inst in corpus(52, 40) {
        let class = classify(&inst, &mut Oracle::new(&OracleConfig::default(), inst.table()).unwrap(), DEFAULT_CAP).unwrap();
        for name in ["dnc", "dnc-proj", "dnc-proj-part"] {
            for workers in [1, 2, 4] {
                let r = run_strategy(&inst, &spec(name, workers), &OracleConfig::default()).unwrap();
                assert!(rules_out_bits(&r.lemmas.lemmas, &class.itta), "{name} workers={workers}");
            }
        }
    }
}

#[test]
fn early_pruning_and_subsumption_keep_rules_out() {
    for inst in corpus(53, 40) {
        let class = classify(&inst, &mut Oracle::new(&OracleConfig::default(), inst.table()).unwrap(), DEFAULT_CAP).unwrap();
        for name in ALL {
            let s = StrategySpec {
                early_pruning: Some(2),
                subsume: true,
                negative_phase: true,
                ..spec(name, 2)
            };
            let r = run_strategy(&inst, &s, &OracleConfig::default()).unwrap();
            assert!(rules_out_bits(&r.lemmas.lemmas, &class.itta), "{name}");
        }
    }
}

#[test]
fn projection_finds_the_lemma_behind_a_boolean_disjunct() {
    let inst = Instance::parse(
        "(declare-fun b () Bool)(declare-fun x () Real)(assert (or b (and (= x 0) (= x 1))))",
    )
    .unwrap();
    let base = run_strategy(&inst, &spec("baseline", 1), &OracleConfig::default()).unwrap();
    let proj = run_strategy(&inst, &spec("baseline-proj", 1), &OracleConfig::default()).unwrap();
    // atoms: 0 = b, 1 = (x = 0), 2 = (x = 1)
    let expected = vec![TLemma::new(vec![Literal::neg(1), Literal::neg(2)])];
    assert_eq!(proj.lemmas.lemmas, expected);
    assert_eq!(base.lemmas.lemmas, expected);
    // With b false the theory atoms are forced, so b's polarities do not
    // multiply the search here: the counts tie.
    assert!(proj.stats.n_candidates <= base.stats.n_candidates);
}

#[test]
fn projection_skips_boolean_polarities() {
    let inst = Instance::parse(
        "(declare-fun b1 () Bool)(declare-fun b2 () Bool)(declare-fun x () Real)
         (assert (and (or b1 b2) (or (= x 0) (= x 1))))",
    )
    .unwrap();
    let base = run_strategy(&inst, &spec("baseline", 1), &OracleConfig::default()).unwrap();
    let proj = run_strategy(&inst, &spec("baseline-proj", 1), &OracleConfig::default()).unwrap();
    assert_eq!(proj.lemmas.lemmas, base.lemmas.lemmas);
    assert_eq!((proj.stats.n_candidates, base.stats.n_candidates), (3, 7));
}

#[test]
fn two_components_give_one_lemma_each() {
    let inst = Instance::parse(
        "(declare-fun x () Real)(declare-fun y () Real)
         (assert (and (or (= x 0) (= x 1)) (or (= y 0) (= y 1))))",
    )
    .unwrap();
    let expected = vec![
        TLemma::new(vec![Literal::neg(0), Literal::neg(1)]),
        TLemma::new(vec![Literal::neg(2), Literal::neg(3)]),
    ];
    for name in ["baseline-proj-part", "dnc-proj-part"] {
        let r = run_strategy(&inst, &spec(name, 1), &OracleConfig::default()).unwrap();
        assert_eq!(r.n_partitions, 2);
        assert_eq!(r.lemmas.lemmas, expected, "{name}");
        let v = check_strategy(&inst, &spec(name, 1), &OracleConfig::default(), DEFAULT_CAP).unwrap();
        assert!(v.passed());
    }
}

#[test]
fn partitioning_rules_out_on_product_instances() {
    for seed in 0..20 {
        let inst = Instance::parse(&product_instance(100 + seed, 2, 2, 3).unwrap()).unwrap();
        for name in ["baseline-proj-part", "dnc-proj-part"] {
            let v = check_strategy(&inst, &spec(name, 2), &OracleConfig::default(), DEFAULT_CAP).unwrap();
            assert!(v.passed(), "seed {seed} {name}: {v:?}");
        }
    }
}

#[test]
fn lemma_sets_are_canonical() {
    for inst in corpus(54, 30) {
        for name in ALL {
            let r = run_strategy(&inst, &spec(name, 2), &OracleConfig::default()).unwrap();
            let l = &r.lemmas.lemmas;
            assert!(l.windows(2).all(|w| w[0] < w[1]), "{name}: not sorted or duplicated");
            assert_eq!(r.lemmas.provenance.len(), l.len());
            for t in l {
                assert!(t.literals.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }
}

fn provenance() -> Provenance {
    Provenance {
        stage: Stage::Baseline,
        worker: 0,
        ordinal: 0,
        component: None,
        task: None,
    }
}

fn lemma_strategy() -> impl Strategy<Value = TLemma> {
    prop::collection::vec((0u32..6, any::<bool>()), 1..4)
        .prop_map(|v| {
            let mut seen = std::collections::BTreeMap::new();
            for (a, p) in v {
                seen.entry(a).or_insert(p);
            }
            TLemma::new(seen.into_iter().map(|(a, p)| Literal::new(a, p)).collect())
        })
}

proptest! {
    #[test]
    fn dedup_and_subsumption_never_change_rules_out(
        lemmas in prop::collection::vec(lemma_strategy(), 0..12),
        rhos in prop::collection::vec(0u64..64, 0..20),
    ) {
        let raw: Vec<_> = lemmas.iter().cloned().map(|l| (l, provenance())).collect();
        let before = rules_out_bits(&lemmas, &rhos);
        prop_assert_eq!(rules_out_bits(&dedup_lemmas(raw.clone(), false).lemmas, &rhos), before);
        prop_assert_eq!(rules_out_bits(&dedup_lemmas(raw, true).lemmas, &rhos), before);
    }

    #[test]
    fn rules_out_is_monotone(
        lemmas in prop::collection::vec(lemma_strategy(), 0..8),
        extra in lemma_strategy(),
        rhos in prop::collection::vec(0u64..64, 0..20),
    ) {
        if rules_out_bits(&lemmas, &rhos) {
            let mut more = lemmas.clone();
            more.push(extra);
            prop_assert!(rules_out_bits(&more, &rhos));
        }
    }
}
