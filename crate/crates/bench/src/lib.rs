//! Scenario runner for `dmbl-core`: the worked three-world example, the
//! schema and invariant suites, the Lewis demonstration and the `dmbl`
//! command line.

pub mod appendix_f;
pub mod cli;
pub mod pools;
pub mod report;
pub mod schemata;
pub mod suites;

pub use report::{CheckRecord, ScenarioReport, Status};
