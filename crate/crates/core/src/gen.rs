//! Seeded synthetic instance generators.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::{Instance, Problem};
use crate::oracle::OracleConfig;
use crate::strategies::{run_strategy, StrategySpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Nesting depth; depth 1 is a single atom.
    pub depth: u32,
    pub n_bool: u32,
    pub n_real: u32,
    /// Reject formulas with more distinct atoms than this.
    pub max_atoms: Option<usize>,
    /// Reject formulas with fewer distinct atoms than this.
    pub min_atoms: Option<usize>,
}

impl GenConfig {
    pub fn new(depth: u32, n_bool: u32, n_real: u32) -> Self {
        GenConfig {
            depth,
            n_bool,
            n_real,
            max_atoms: None,
            min_atoms: None,
        }
    }
}

const RELATIONS: [&str; 5] = ["<=", "<", ">=", ">", "="];
const MAX_TRIES: usize = 10_000;

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    cfg: &'a GenConfig,
    atoms: Vec<String>,
}

fn int(n: i64) -> String {
    if n < 0 {
        format!("(- {})", -n)
    } else {
        n.to_string()
    }
}

impl<R: Rng> Gen<'_, R> {
    fn fresh_atom(&mut self) -> String {
        let n = self.cfg.n_real as usize;
        let k = self.rng.random_range(1..=3usize.min(n));
        let mut vars: Vec<usize> = sample(self.rng, n, k).into_vec();
        vars.sort_unstable();
        let terms: Vec<String> = vars
            .iter()
            .map(|&v| {
                let mut c = self.rng.random_range(-4..=3i64);
                if c >= 0 {
                    c += 1;
                }
                if c == 1 {
                    format!("x{v}")
                } else {
                    format!("(* {} x{v})", int(c))
                }
            })
            .collect();
        let lhs = if terms.len() == 1 {
            terms[0].clone()
        } else {
            format!("(+ {})", terms.join(" "))
        };
        let rel = RELATIONS[self.rng.random_range(0..RELATIONS.len())];
        let bound = self.rng.random_range(-8..=8i64);
        format!("({rel} {lhs} {})", int(bound))
    }

    fn leaf(&mut self) -> String {
        let use_bool = match (self.cfg.n_bool, self.cfg.n_real) {
            (0, _) => false,
            (_, 0) => true,
            _ => self.rng.random_bool(0.5),
        };
        if use_bool {
            return format!("b{}", self.rng.random_range(0..self.cfg.n_bool));
        }
        if !self.atoms.is_empty() && self.rng.random_bool(0.5) {
            let i = self.rng.random_range(0..self.atoms.len());
            return self.atoms[i].clone();
        }
        let a = self.fresh_atom();
        self.atoms.push(a.clone());
        a
    }

    fn node(&mut self, depth: u32) -> String {
        if depth >= self.cfg.depth {
            return self.leaf();
        }
        match self.rng.random_range(0..4) {
            0 => format!("(and {} {})", self.node(depth + 1), self.node(depth + 1)),
            1 => format!("(or {} {})", self.node(depth + 1), self.node(depth + 1)),
            2 => format!("(not {})", self.node(depth + 1)),
            _ => format!("(= {} {})", self.node(depth + 1), self.node(depth + 1)),
        }
    }
}

fn script(cfg: &GenConfig, body: &str) -> String {
    let mut s = String::from("(set-logic QF_LRA)\n");
    for i in 0..cfg.n_bool {
        let _ = writeln!(s, "(declare-fun b{i} () Bool)");
    }
    for i in 0..cfg.n_real {
        let _ = writeln!(s, "(declare-fun x{i} () Real)");
    }
    let _ = writeln!(s, "(assert {body})");
    s.push_str("(check-sat)\n");
    s
}

fn accepted(cfg: &GenConfig, text: &str) -> Result<bool> {
    if cfg.max_atoms.is_none() && cfg.min_atoms.is_none() {
        return Ok(true);
    }
    let n = Problem::parse(text)?.table.len();
    Ok(cfg.max_atoms.is_none_or(|m| n <= m) && cfg.min_atoms.is_none_or(|m| n >= m))
}

/// One random formula as an SMT-LIB script, drawn from `rng`.
pub fn generate_with<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Result<String> {
    if cfg.depth == 0 {
        return Err(Error::Internal("depth must be at least 1".into()));
    }
    if cfg.n_bool == 0 && cfg.n_real == 0 {
        return Err(Error::Internal("need at least one variable".into()));
    }
    for _ in 0..MAX_TRIES {
        let mut g = Gen {
            rng: &mut *rng,
            cfg,
            atoms: Vec::new(),
        };
        let body = g.node(1);
        let text = script(cfg, &body);
        if accepted(cfg, &text)? {
            return Ok(text);
        }
    }
    Err(Error::Internal(format!(
        "no formula within the atom bounds after {MAX_TRIES} attempts"
    )))
}

/// The `index`-th formula of the corpus identified by `seed`.
pub fn generate(cfg: &GenConfig, seed: u64, index: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    generate_with(&mut rng, cfg)
}

/// Projected models a formula must have on its own theory atoms before it is
/// accepted as a component of [`product_instance`].
const MIN_COMPONENT_MODELS: u64 = 3;

fn component<R: Rng>(rng: &mut R, c: usize, vars: u32, depth: u32) -> (String, String) {
    let cfg = GenConfig::new(depth, 0, vars);
    let mut g = Gen {
        rng: &mut *rng,
        cfg: &cfg,
        atoms: Vec::new(),
    };
    let body = g.node(1).replace('x', &format!("v{c}_"));
    let mut vals: Vec<i64> = sample(rng, 9, 3).into_iter().map(|v| v as i64 - 4).collect();
    vals.sort_unstable();
    let pin: Vec<String> = vals.iter().map(|v| format!("(= v{c}_0 {})", int(*v))).collect();
    let mut decls = String::new();
    for i in 0..vars {
        let _ = writeln!(decls, "(declare-fun v{c}_{i} () Real)");
    }
    // One atom over all of the component's variables keeps it connected.
    let all: Vec<String> = (0..vars).map(|i| format!("v{c}_{i}")).collect();
    let link = if all.len() > 1 {
        format!(" (<= (+ {}) 20)", all.join(" "))
    } else {
        String::new()
    };
    (decls, format!("(or {}) {body}{link}", pin.join(" ")))
}

fn enough_models(decls: &str, conjunct: &str) -> Result<bool> {
    let inst = Instance::parse(&format!("{decls}(assert (and {conjunct}))"))?;
    let spec: StrategySpec = "baseline-proj".parse().map_err(Error::Internal)?;
    let r = run_strategy(&inst, &spec, &OracleConfig::default())?;
    Ok(r.n_assignments >= MIN_COMPONENT_MODELS)
}

/// A conjunction of `components` formulas over pairwise disjoint variable
/// sets. Each component pins one of its variables to one of three values,
/// conjoins a random formula over its own variables, and is resampled until
/// it has at least three theory-consistent models on its own atoms.
pub fn product_instance(seed: u64, components: usize, vars_per_component: u32, depth: u32) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut decls = String::from("(set-logic QF_LRA)\n");
    let mut parts = Vec::new();
    for c in 0..components {
        let mut tries = 0;
        let (d, part) = loop {
            let (d, part) = component(&mut rng, c, vars_per_component, depth);
            if enough_models(&d, &part)? {
                break (d, part);
            }
            tries += 1;
            if tries == MAX_TRIES {
                return Err(Error::Internal(format!("no component with enough models after {MAX_TRIES} attempts")));
            }
        };
        decls.push_str(&d);
        parts.push(part);
    }
    let _ = writeln!(decls, "(assert (and {}))", parts.join(" "));
    decls.push_str("(check-sat)\n");
    Ok(decls)
}

/// A small planning-flavoured instance: time points, a fluent and three
/// actions with private parameters, linked only through Boolean action
/// atoms. Its theory atoms fall into five symbol-disjoint groups.
pub fn planning_instance(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = || rng.random_range(1..=4i64);
    let (d, f, p0, p1, p2) = (k(), k(), k(), k(), k());
    let mut s = String::from("(set-logic QF_LRA)\n");
    for b in ["act_a", "act_b", "act_c"] {
        let _ = writeln!(s, "(declare-fun {b} () Bool)");
    }
    for r in ["t0", "t1", "fl0", "fl1", "pa", "pb", "pc"] {
        let _ = writeln!(s, "(declare-fun {r} () Real)");
    }
    let _ = writeln!(
        s,
        "(assert (and (<= 0 t0) (or (< (+ t0 {d}) t1) (= t1 t0)) (or act_a act_b act_c)
  (=> act_a (and (>= pa {p0}) (or (< pa 0) (<= pa (+ {p0} 2)))))
  (=> act_b (and (or (= pb {p1}) (= pb (+ {p1} 1))) (> pb 0)))
  (=> act_c (or (<= pc (- {p2})) (>= pc {p2})))
  (=> act_a (> fl1 (+ fl0 {f})))
  (=> act_b (or (= fl1 fl0) (< fl1 0)))
  (=> (and act_a act_b) (not (= t1 t0)))))"
    );
    s.push_str("(check-sat)\n");
    s
}
