//! Theory-lemma enumeration for quantifier-free linear rational arithmetic.
//!
//! Given an SMT-LIB2 formula, the crate computes a set of theory-valid clauses
//! (T-lemmas) that rules out every theory-inconsistent total truth assignment
//! propositionally satisfying the formula. Four enumeration strategies are
//! provided (baseline AllSMT, divide and conquer, projection on theory atoms,
//! theory-driven partitioning) together with a brute-force verifier.
//!
//! The usual flow:
//!
//! ```
//! use tlemma::{Instance, OracleConfig, StrategySpec};
//!
//! let inst = Instance::parse("(declare-const x Real)(assert (or (= x 0) (= x 1)))").unwrap();
//! let spec: StrategySpec = "baseline".parse().unwrap();
//! let result = tlemma::strategies::run_strategy(&inst, &spec, &OracleConfig::default()).unwrap();
//! assert_eq!(result.lemmas.len(), 1);
//! ```

pub mod bench;
pub mod enumerator;
pub mod error;
pub mod frontend;
pub mod gen;
pub mod oracle;
pub mod partition;
pub mod strategies;
pub mod verifier;

pub use enumerator::{Assignment, EnumerationMode, EnumerationOutcome};
pub use error::{Error, Result};
pub use frontend::{AtomKind, AtomTable, CnfProblem, Instance, Literal, Problem, Truth};
pub use oracle::{Oracle, OracleConfig, TLemma, TheoryVerdict};
pub use partition::Partition;
pub use strategies::{LemmaSet, StrategySpec};
