//! Lemma-enumeration strategies: baseline, divide and conquer, projection on
//! theory atoms and theory-driven partitioning, plus lemma deduplication.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::enumerator::{
    projected_allsmt, Assignment, EnumConfig, EnumerationMode, EnumerationOutcome, EnumerationStats, Task,
};
use crate::error::{Error, Result};
use crate::frontend::Instance;
use crate::oracle::{Oracle, OracleConfig, TLemma};
use crate::partition::partition_atoms;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    Baseline,
    DnC,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategySpec {
    pub base: Base,
    /// Project the enumeration on the theory atoms.
    pub projection: bool,
    /// Enumerate per symbol-disjoint component. Implies projection.
    pub partitioning: bool,
    pub workers: usize,
    /// Theory check on partial candidates every k decisions.
    pub early_pruning: Option<u32>,
    pub budget: Option<Duration>,
    pub seed: u64,
    /// Drop lemmas subsumed by another lemma.
    pub subsume: bool,
    /// Branch on negative polarity first.
    pub negative_phase: bool,
}

impl StrategySpec {
    pub fn new(base: Base, projection: bool, partitioning: bool) -> Self {
        StrategySpec {
            base,
            projection: projection || partitioning,
            partitioning,
            workers: 1,
            early_pruning: None,
            budget: None,
            seed: 0,
            subsume: false,
            negative_phase: false,
        }
    }

    pub fn name(&self) -> String {
        let mut s = String::from(match self.base {
            Base::Baseline => "baseline",
            Base::DnC => "dnc",
        });
        if self.projection {
            s.push_str("-proj");
        }
        if self.partitioning {
            s.push_str("-part");
        }
        s
    }

    /// Every accepted strategy name.
    pub const NAMES: [&'static str; 6] = [
        "baseline",
        "baseline-proj",
        "baseline-proj-part",
        "dnc",
        "dnc-proj",
        "dnc-proj-part",
    ];
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for StrategySpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let spec = match s {
            "baseline" => StrategySpec::new(Base::Baseline, false, false),
            "baseline-proj" => StrategySpec::new(Base::Baseline, true, false),
            "baseline-proj-part" => StrategySpec::new(Base::Baseline, true, true),
            "dnc" => StrategySpec::new(Base::DnC, false, false),
            "dnc-proj" => StrategySpec::new(Base::DnC, true, false),
            "dnc-proj-part" => StrategySpec::new(Base::DnC, true, true),
            _ => {
                return Err(format!(
                    "unknown strategy '{s}' (expected one of: {})",
                    StrategySpec::NAMES.join(", ")
                ))
            }
        };
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Baseline,
    Partial,
    Residual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub stage: Stage,
    pub worker: usize,
    /// Position of the lemma in the discovery order of its enumeration run.
    pub ordinal: usize,
    /// Theory component being enumerated, when partitioning.
    pub component: Option<usize>,
    /// Residual task (index of the partial assignment), for the second D&C phase.
    pub task: Option<usize>,
}

/// Deduplicated lemmas in canonical order, with where each was first found.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaSet {
    pub lemmas: Vec<TLemma>,
    pub provenance: Vec<Provenance>,
}

impl LemmaSet {
    pub fn len(&self) -> usize {
        self.lemmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }

    /// Lower median of the lemma lengths; 0 for an empty set.
    pub fn median_size(&self) -> usize {
        let mut sizes: Vec<usize> = self.lemmas.iter().map(TLemma::len).collect();
        if sizes.is_empty() {
            return 0;
        }
        sizes.sort_unstable();
        sizes[(sizes.len() - 1) / 2]
    }
}

/// Canonicalizes, sorts and removes duplicates; with `subsume`, also drops
/// every lemma whose literal set strictly contains another's.
pub fn dedup_lemmas(raw: Vec<(TLemma, Provenance)>, subsume: bool) -> LemmaSet {
    let mut v: Vec<(TLemma, Provenance)> = raw
        .into_iter()
        .map(|(l, p)| (TLemma::new(l.literals), p))
        .collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v.dedup_by(|a, b| a.0 == b.0);
    if subsume {
        let subset = |a: &TLemma, b: &TLemma| a.literals.iter().all(|l| b.literals.binary_search(l).is_ok());
        let keep: Vec<bool> = (0..v.len())
            .map(|i| {
                !(0..v.len()).any(|j| j != i && v[j].0.len() < v[i].0.len() && subset(&v[j].0, &v[i].0))
            })
            .collect();
        v = v
            .into_iter()
            .zip(keep)
            .filter_map(|(x, k)| k.then_some(x))
            .collect();
    }
    let (lemmas, provenance) = v.into_iter().unzip();
    LemmaSet { lemmas, provenance }
}

#[derive(Clone, Debug, Default)]
pub struct StrategyResult {
    pub lemmas: LemmaSet,
    /// Counters summed over every enumeration run of the strategy.
    pub stats: EnumerationStats,
    /// Assignments enumerated, summed over all runs.
    pub n_assignments: u64,
    /// Theory components enumerated separately (1 without partitioning).
    pub n_partitions: usize,
    /// Partial assignments of the first D&C phase, summed over components.
    pub n_cubes: usize,
    pub wall_time: Duration,
}

struct Ctx<'a> {
    inst: &'a Instance,
    spec: &'a StrategySpec,
    oracle_cfg: &'a OracleConfig,
    deadline: Option<Instant>,
    raw: Vec<(TLemma, Provenance)>,
    result: StrategyResult,
    truncated: bool,
}

impl Ctx<'_> {
    fn config<'c>(&self, mode: EnumerationMode, cancel: Option<&'c AtomicBool>) -> EnumConfig<'c> {
        EnumConfig {
            mode,
            early_pruning: self.spec.early_pruning,
            negative_phase: self.spec.negative_phase,
            deadline: self.deadline,
            cancel,
        }
    }

    fn record(&mut self, out: &EnumerationOutcome, stage: Stage, worker: usize, component: Option<usize>, task: Option<usize>) {
        self.result.stats.absorb(&out.stats);
        self.result.n_assignments += out.assignments.len() as u64;
        self.truncated |= out.truncated;
        for (ordinal, l) in out.lemmas.iter().enumerate() {
            self.raw.push((
                l.clone(),
                Provenance {
                    stage,
                    worker,
                    ordinal,
                    component,
                    task,
                },
            ));
        }
    }

    fn baseline(&mut self, oracle: &mut Oracle, proj: &[u32], seeds: &[TLemma], component: Option<usize>) -> Result<Vec<TLemma>> {
        let task = Task {
            seed_lemmas: seeds,
            ..Task::new(self.inst, proj)
        };
        let out = projected_allsmt(task, self.config(EnumerationMode::Total, None), oracle)?;
        self.record(&out, Stage::Baseline, 0, component, None);
        Ok(out.lemmas)
    }

    fn dnc(&mut self, oracle: &mut Oracle, proj: &[u32], seeds: &[TLemma], component: Option<usize>) -> Result<Vec<TLemma>> {
        let task = Task {
            seed_lemmas: seeds,
            ..Task::new(self.inst, proj)
        };
        let phase1 = projected_allsmt(task, self.config(EnumerationMode::Partial, None), oracle)?;
        self.record(&phase1, Stage::Partial, 0, component, None);
        let mut found = phase1.lemmas.clone();
        if phase1.truncated {
            return Ok(found);
        }
        check_disjoint(&phase1.assignments)?;
        self.result.n_cubes += phase1.assignments.len();

        let mut residual_seeds = seeds.to_vec();
        residual_seeds.extend(phase1.lemmas.iter().cloned());
        let outcomes = self.residual(oracle, &phase1.assignments, proj, &residual_seeds)?;
        let workers = self.spec.workers.max(1).min(phase1.assignments.len().max(1));
        for (i, out) in outcomes.iter().enumerate() {
            self.record(out, Stage::Residual, i % workers, component, Some(i));
            found.extend(out.lemmas.iter().cloned());
        }
        Ok(found)
    }

    /// Second D&C phase: one total enumeration per cube, spread round-robin
    /// over the worker pool.
    fn residual(&self, oracle: &mut Oracle, cubes: &[Assignment], proj: &[u32], seeds: &[TLemma]) -> Result<Vec<EnumerationOutcome>> {
        let workers = self.spec.workers.max(1).min(cubes.len().max(1));
        let run_one = |oracle: &mut Oracle, cube: &Assignment, cancel: Option<&AtomicBool>| {
            let task = Task {
                instance: self.inst,
                proj,
                cube: &cube.literals,
                seed_lemmas: seeds,
            };
            projected_allsmt(task, self.config(EnumerationMode::Total, cancel), oracle)
        };
        if workers == 1 {
            return cubes.iter().map(|c| run_one(oracle, c, None)).collect();
        }

        let cancel = AtomicBool::new(false);
        let mut slots: Vec<Option<Result<EnumerationOutcome>>> = (0..cubes.len()).map(|_| None).collect();
        // Worker `w` takes cubes w, w + workers, ...; the calling thread is
        // worker 0 and reuses its oracle.
        let stride = |oracle: &mut Oracle, w: usize| {
            let mut results = Vec::new();
            for i in (w..cubes.len()).step_by(workers) {
                let r = run_one(oracle, &cubes[i], Some(&cancel));
                let stop = r.is_err();
                if stop {
                    cancel.store(true, Ordering::Relaxed);
                }
                results.push((i, r));
                if stop {
                    break;
                }
            }
            results
        };
        std::thread::scope(|scope| {
            let handles: Vec<_> = (1..workers)
                .map(|w| {
                    let stride = &stride;
                    let cancel = &cancel;
                    scope.spawn(move || match Oracle::new(self.oracle_cfg, self.inst.table()) {
                        Ok(mut oracle) => stride(&mut oracle, w),
                        Err(e) => {
                            cancel.store(true, Ordering::Relaxed);
                            vec![(w, Err(e))]
                        }
                    })
                })
                .collect();
            for (i, r) in stride(oracle, 0) {
                slots[i] = Some(r);
            }
            for h in handles {
                match h.join() {
                    Ok(results) => {
                        for (i, r) in results {
                            slots[i] = Some(r);
                        }
                    }
                    Err(_) => {
                        slots[0] = Some(Err(Error::Internal("worker thread panicked".into())));
                    }
                }
            }
        });

        let mut first_cancel = None;
        let mut outs = Vec::with_capacity(cubes.len());
        for slot in slots {
            match slot {
                Some(Ok(o)) => outs.push(o),
                Some(Err(Error::Cancelled)) | None => {
                    first_cancel.get_or_insert(Error::Cancelled);
                }
                Some(Err(e)) => return Err(e),
            }
        }
        match first_cancel {
            Some(e) => Err(e),
            None => Ok(outs),
        }
    }

    fn inner(&mut self, oracle: &mut Oracle, proj: &[u32], seeds: &[TLemma], component: Option<usize>) -> Result<Vec<TLemma>> {
        match self.spec.base {
            Base::Baseline => self.baseline(oracle, proj, seeds, component),
            Base::DnC => self.dnc(oracle, proj, seeds, component),
        }
    }
}

/// Errors unless no total assignment extends two of the given cubes.
fn check_disjoint(cubes: &[Assignment]) -> Result<()> {
    for i in 0..cubes.len() {
        for j in i + 1..cubes.len() {
            if cubes[i].compatible(&cubes[j]) {
                return Err(Error::Internal(format!(
                    "partial assignments {i} and {j} are not disjoint"
                )));
            }
        }
    }
    Ok(())
}

/// Runs a strategy end to end. Budget expiry yields
/// [`Error::BudgetExceeded`] carrying the lemmas found so far.
pub fn run_strategy(inst: &Instance, spec: &StrategySpec, oracle_cfg: &OracleConfig) -> Result<StrategyResult> {
    let start = Instant::now();
    let mut ctx = Ctx {
        inst,
        spec,
        oracle_cfg,
        deadline: spec.budget.map(|b| start + b),
        raw: Vec::new(),
        result: StrategyResult::default(),
        truncated: false,
    };
    let mut oracle = Oracle::new(oracle_cfg, inst.table())?;
    let table = inst.table();

    if spec.partitioning {
        let partition = partition_atoms(table);
        let mut seeds: Vec<TLemma> = Vec::new();
        for (ci, comp) in partition.theory_components().enumerate() {
            let found = ctx.inner(&mut oracle, comp, &seeds, Some(ci))?;
            seeds.extend(found);
            if ctx.truncated {
                break;
            }
        }
        ctx.result.n_partitions = partition.n_theory_components();
    } else {
        let proj = if spec.projection {
            table.theory_atoms()
        } else {
            table.all_atoms()
        };
        ctx.inner(&mut oracle, &proj, &[], None)?;
        ctx.result.n_partitions = 1;
    }

    let lemmas = dedup_lemmas(std::mem::take(&mut ctx.raw), spec.subsume);
    if ctx.truncated {
        return Err(Error::BudgetExceeded(Box::new(lemmas)));
    }
    let mut result = ctx.result;
    result.lemmas = lemmas;
    result.wall_time = start.elapsed();
    Ok(result)
}
