//! Scenario runner: reads a JSON scenario, computes analytic delay, backlog
//! and output bounds, simulates the same network, and checks that every bound
//! dominates its empirical CCDF.

pub mod analyze;
pub mod compare;
pub mod output;
pub mod scenario;
pub mod simulate;

pub use analyze::{run_analyze, BoundRow, BoundSet, SampleSpec};
pub use compare::{run_compare, ComparisonReport, ComparisonRow};
pub use scenario::{parse_scenario, parse_str, Overrides, Scenario};
pub use simulate::{run_simulate, EmpiricalRow, Replication};
