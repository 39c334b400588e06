use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tlemma::bench::{self, BenchConfig, RunStats};
use tlemma::frontend::print::{parse_lemma_file, render_lemma_file};
use tlemma::gen::{generate, GenConfig};
use tlemma::oracle::Backend;
use tlemma::strategies::{Provenance, StrategySpec};
use tlemma::verifier::{check_lemmas, classify, DEFAULT_CAP};
use tlemma::{Error, Instance, Oracle, OracleConfig};

const EARLY_PRUNING_INTERVAL: u32 = 8;

#[derive(Parser)]
#[command(name = "tlemma", version, about = "Theory-lemma enumeration for QF_LRA formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a lemma set for one instance.
    Enumerate(EnumerateArgs),
    /// Check a lemma file against an instance by exhaustive classification.
    Verify(VerifyArgs),
    /// Generate a random corpus.
    Gen(GenArgs),
    /// Run strategies over a corpus and write per-run statistics.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct OracleArgs {
    /// SMT-LIB2 solver command used as theory oracle (TLEMMA_ORACLE_CMD takes precedence).
    #[arg(long)]
    oracle_cmd: Option<String>,
}

impl OracleArgs {
    fn config(&self) -> OracleConfig {
        let cmd = std::env::var("TLEMMA_ORACLE_CMD")
            .ok()
            .filter(|s| !s.trim().is_empty())
            .or_else(|| self.oracle_cmd.clone());
        OracleConfig {
            backend: cmd.map_or(Backend::Builtin, |c| Backend::external(&c)),
            ..OracleConfig::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "off")]
    early_pruning: OnOff,
    /// Remove lemmas subsumed by other lemmas.
    #[arg(long)]
    subsume: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 60.0)]
    budget_secs: f64,
}

impl RunArgs {
    fn workers(&self) -> usize {
        self.workers.unwrap_or_else(default_workers).max(1)
    }

    fn apply(&self, spec: StrategySpec) -> StrategySpec {
        StrategySpec {
            workers: self.workers(),
            early_pruning: matches!(self.early_pruning, OnOff::On).then_some(EARLY_PRUNING_INTERVAL),
            budget: Some(Duration::from_secs_f64(self.budget_secs.max(0.0))),
            seed: self.seed,
            subsume: self.subsume,
            ..spec
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get()).min(8)
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, default_value = "dnc-proj-part")]
    strategy: String,
    #[arg(short, long)]
    input: PathBuf,
    /// Lemma file; a provenance sidecar is written next to it as `<output>.json`.
    #[arg(short, long)]
    output: PathBuf,
    /// Statistics record (one JSON object).
    #[arg(long)]
    stats: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    lemmas: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    depth: u32,
    #[arg(long, default_value_t = 10)]
    n_bool: u32,
    #[arg(long, default_value_t = 10)]
    n_real: u32,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_atoms: Option<usize>,
    #[arg(long)]
    min_atoms: Option<usize>,
    #[arg(short, long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    corpus: PathBuf,
    /// Comma-separated strategy names.
    #[arg(long, value_delimiter = ',', default_value = "baseline,dnc,dnc-proj,dnc-proj-part")]
    strategies: Vec<String>,
    /// Output prefix; writes `<prefix>.csv` and `<prefix>.jsonl`.
    #[arg(short, long, default_value = "bench")]
    output: PathBuf,
    #[arg(long, default_value_t = 1)]
    parallel_instances: usize,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    oracle: OracleArgs,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("tlemma: {msg}");
    ExitCode::from(1)
}

fn parse_strategy(name: &str) -> Result<StrategySpec, String> {
    name.parse::<StrategySpec>()
}

fn read_instance(path: &Path) -> tlemma::Result<Instance> {
    Instance::parse(&fs::read_to_string(path)?)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    instance: String,
    strategy: String,
    truncated: bool,
    lemmas: Vec<SidecarEntry<'a>>,
}

#[derive(Serialize)]
struct SidecarEntry<'a> {
    clause: String,
    provenance: &'a Provenance,
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn cmd_enumerate(a: &EnumerateArgs) -> ExitCode {
    let spec = match parse_strategy(&a.strategy) {
        Ok(s) => a.run.apply(s),
        Err(e) => return fail(e),
    };
    let inst = match read_instance(&a.input) {
        Ok(i) => i,
        Err(e) => return fail(format!("{}: {e}", a.input.display())),
    };
    let name = a.input.display().to_string();
    let run = match bench::run_instance(&name, &inst, &spec, &a.oracle.config()) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let table = inst.table();
    let sidecar = Sidecar {
        instance: name,
        strategy: spec.name(),
        truncated: run.stats.truncated,
        lemmas: run
            .lemmas
            .lemmas
            .iter()
            .zip(&run.lemmas.provenance)
            .map(|(l, p)| SidecarEntry {
                clause: tlemma::frontend::print::clause(table, &l.literals),
                provenance: p,
            })
            .collect(),
    };
    let written = fs::write(&a.output, render_lemma_file(&inst.problem, &run.lemmas.lemmas))
        .and_then(|()| fs::write(sidecar_path(&a.output), json(&sidecar)))
        .and_then(|()| match &a.stats {
            Some(p) => fs::write(p, json(&run.stats)),
            None => Ok(()),
        });
    if let Err(e) = written {
        return fail(e);
    }
    if run.stats.truncated {
        eprintln!("tlemma: budget exhausted, partial lemma set written");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_verify(a: &VerifyArgs) -> ExitCode {
    let inst = match read_instance(&a.input) {
        Ok(i) => i,
        Err(e) => return fail(format!("{}: {e}", a.input.display())),
    };
    let text = match fs::read_to_string(&a.lemmas) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", a.lemmas.display())),
    };
    let lemmas = match parse_lemma_file(&inst.problem, &text) {
        Ok(l) => l,
        Err(e @ Error::LemmaFile(_)) => {
            eprintln!("tlemma: {e}");
            return ExitCode::from(5);
        }
        Err(e) => return fail(e),
    };
    let verdict = Oracle::new(&a.oracle.config(), inst.table()).and_then(|mut o| {
        let class = classify(&inst, &mut o, a.cap)?;
        check_lemmas(&inst, &class, &lemmas, &mut o)
    });
    let v = match verdict {
        Ok(v) => v,
        Err(e @ Error::CapExceeded { .. }) => {
            eprintln!("tlemma: {e}");
            return ExitCode::from(3);
        }
        Err(e) => return fail(e),
    };
    print!("{}", json(&v));
    if !v.lemmas_valid || !v.atoms_in_theory {
        ExitCode::from(5)
    } else if !v.passed() {
        ExitCode::from(4)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_gen(a: &GenArgs) -> ExitCode {
    if a.depth == 0 {
        return fail("depth must be at least 1");
    }
    let cfg = GenConfig {
        max_atoms: a.max_atoms,
        min_atoms: a.min_atoms,
        ..GenConfig::new(a.depth, a.n_bool, a.n_real)
    };
    if let Err(e) = fs::create_dir_all(&a.out_dir) {
        return fail(e);
    }
    for i in 0..a.count {
        let text = match generate(&cfg, a.seed, i) {
            Ok(t) => t,
            Err(e) => return fail(e),
        };
        let path = a.out_dir.join(format!("gen_d{}_s{}_{i:04}.smt2", a.depth, a.seed));
        if let Err(e) = fs::write(&path, text) {
            return fail(format!("{}: {e}", path.display()));
        }
    }
    ExitCode::SUCCESS
}

fn cmd_bench(a: &BenchArgs) -> ExitCode {
    let mut strategies = Vec::new();
    for name in &a.strategies {
        match parse_strategy(name.trim()) {
            Ok(s) => strategies.push(a.run.apply(s)),
            Err(e) => return fail(e),
        }
    }
    let files = match bench::corpus_files(&a.corpus) {
        Ok(f) => f,
        Err(e) => return fail(format!("{}: {e}", a.corpus.display())),
    };
    let cfg = BenchConfig {
        strategies,
        budget: Duration::from_secs_f64(a.run.budget_secs.max(0.0)),
        workers: a.run.workers(),
        parallel_instances: a.parallel_instances,
        oracle: a.oracle.config(),
    };
    let rows: Vec<RunStats> = bench::bench(&files, &cfg);
    let csv = a.output.with_extension("csv");
    let jsonl = a.output.with_extension("jsonl");
    if let Err(e) = bench::write_csv(&csv, &rows).and_then(|()| bench::write_jsonl(&jsonl, &rows)) {
        return fail(e);
    }
    eprintln!("tlemma: {} rows written to {} and {}", rows.len(), csv.display(), jsonl.display());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
    }
}
