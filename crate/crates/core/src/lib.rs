//! Exact engine for a conditional logic with a Bayesian reading of the
//! conditional: a free model built in stages, set semantics for formulas,
//! and the exact extension of probabilities to conditional propositions.

pub mod algebra;
pub mod audit;
pub mod dump;
pub mod error;
pub mod eval;
pub mod formula;
pub mod model;
pub mod prob;
pub mod ratfn;
pub mod tasks;

pub use algebra::{StageSet, WorldTable};
pub use error::{DistError, DumpError, ModelError, ParseError};
pub use eval::{check_independence, evaluate, verdict, Verdict};
pub use formula::{desugar, parse, render, AtomContext, Formula};
pub use model::{Case, ModelConfig, ModelState, ProcessingRecord, Schedule};
pub use prob::{bayes_check, epsilon_prob, load_distribution, measure, prob, Distribution};
pub use ratfn::{fmt_rational, limit_at_zero, Rational, RationalFn};
