//! Run statistics and benchmark sweeps.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::Instance;
use crate::oracle::OracleConfig;
use crate::strategies::{run_strategy, LemmaSet, StrategyResult, StrategySpec};

/// One row per (instance, strategy) run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub instance: String,
    pub strategy: String,
    pub wall_time_ms: u64,
    pub n_lemmas: u64,
    /// Lower median of lemma lengths over the deduplicated set.
    pub median_lemma_size: u64,
    pub n_assignments: u64,
    pub n_theory_checks: u64,
    pub n_partitions: u64,
    pub workers: u64,
    pub truncated: bool,
    pub seed: u64,
}

/// JSON schema of [`RunStats`] rows.
pub const RUN_STATS_SCHEMA: &str = include_str!("../schema/run_stats.schema.json");

/// Result of running one strategy on one instance.
pub struct Run {
    pub stats: RunStats,
    pub lemmas: LemmaSet,
    /// Present only for complete runs.
    pub result: Option<StrategyResult>,
}

/// Runs `spec` on `inst`; budget expiry is reported through `truncated`.
pub fn run_instance(name: &str, inst: &Instance, spec: &StrategySpec, oracle: &OracleConfig) -> Result<Run> {
    let start = std::time::Instant::now();
    let base = RunStats {
        instance: name.to_string(),
        strategy: spec.name(),
        wall_time_ms: 0,
        n_lemmas: 0,
        median_lemma_size: 0,
        n_assignments: 0,
        n_theory_checks: 0,
        n_partitions: 0,
        workers: spec.workers as u64,
        truncated: false,
        seed: spec.seed,
    };
    match run_strategy(inst, spec, oracle) {
        Ok(r) => Ok(Run {
            stats: RunStats {
                wall_time_ms: r.wall_time.as_millis() as u64,
                n_lemmas: r.lemmas.len() as u64,
                median_lemma_size: r.lemmas.median_size() as u64,
                n_assignments: r.n_assignments,
                n_theory_checks: r.stats.n_theory_checks,
                n_partitions: r.n_partitions as u64,
                ..base
            },
            lemmas: r.lemmas.clone(),
            result: Some(r),
        }),
        Err(Error::BudgetExceeded(partial)) => Ok(Run {
            stats: RunStats {
                wall_time_ms: start.elapsed().as_millis() as u64,
                n_lemmas: partial.len() as u64,
                median_lemma_size: partial.median_size() as u64,
                truncated: true,
                ..base
            },
            lemmas: *partial,
            result: None,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub strategies: Vec<StrategySpec>,
    pub budget: Duration,
    pub workers: usize,
    pub parallel_instances: usize,
    pub oracle: OracleConfig,
}

/// `.smt2` files of a corpus directory, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "smt2"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every strategy on every instance. Failed runs are reported on stderr
/// and skipped; the rows of the others are returned in (instance, strategy)
/// order.
pub fn bench(files: &[PathBuf], cfg: &BenchConfig) -> Vec<RunStats> {
    let par = cfg.parallel_instances.max(1).min(files.len().max(1));
    let per_run_workers = (cfg.workers / par).max(1);
    let run_file = |path: &PathBuf| -> Vec<RunStats> {
        let name = path.display().to_string();
        let inst = match fs::read_to_string(path).map_err(Error::from).and_then(|t| Instance::parse(&t)) {
            Ok(i) => i,
            Err(e) => {
                eprintln!("{name}: {e}");
                return Vec::new();
            }
        };
        let mut rows = Vec::new();
        for s in &cfg.strategies {
            let spec = StrategySpec {
                workers: per_run_workers,
                budget: Some(cfg.budget),
                ..s.clone()
            };
            match run_instance(&name, &inst, &spec, &cfg.oracle) {
                Ok(run) => rows.push(run.stats),
                Err(e) => eprintln!("{name} [{}]: {e}", spec.name()),
            }
        }
        rows
    };
    if par == 1 {
        return files.iter().flat_map(run_file).collect();
    }
    let mut per_file: Vec<Vec<RunStats>> = vec![Vec::new(); files.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..par)
            .map(|w| {
                let run_file = &run_file;
                scope.spawn(move || {
                    (w..files.len())
                        .step_by(par)
                        .map(|i| (i, run_file(&files[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, rows) in h.join().expect("bench worker panicked") {
                per_file[i] = rows;
            }
        }
    });
    per_file.into_iter().flatten().collect()
}

pub fn write_csv(path: &Path, rows: &[RunStats]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl(path: &Path, rows: &[RunStats]) -> Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    for r in rows {
        serde_json::to_writer(&mut f, r).map_err(|e| Error::Io(e.into()))?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_field_names() {
        let inst = Instance::parse("(declare-const x Real)(assert (or (= x 0) (= x 1)))").unwrap();
        let spec: StrategySpec = "baseline".parse().unwrap();
        let run = run_instance("ex.smt2", &inst, &spec, &OracleConfig::default()).unwrap();
        let v = serde_json::to_value(&run.stats).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            [
                "instance",
                "median_lemma_size",
                "n_assignments",
                "n_lemmas",
                "n_partitions",
                "n_theory_checks",
                "seed",
                "strategy",
                "truncated",
                "wall_time_ms",
                "workers"
            ]
        );
        assert_eq!(run.stats.n_lemmas, 1);
        assert_eq!(run.stats.median_lemma_size, 2);
    }

    #[test]
    fn schema_lists_every_field() {
        let schema: serde_json::Value = serde_json::from_str(RUN_STATS_SCHEMA).unwrap();
        let required = schema["required"].as_array().unwrap();
        assert_eq!(required.len(), 11);
    }
}
