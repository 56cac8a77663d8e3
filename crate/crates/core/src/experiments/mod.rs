//! Benchmark cases, the time-stepping driver and EOC tables.

pub mod catalog;
pub mod driver;
pub mod eoc;

pub use catalog::{case, exact_solution_catalog, CaseId, Circle, ExperimentCase, Ladder};
pub use driver::{
    case_grid, run_case, run_ladder, ErrorRecord, RunConfig, RunOutcome, Scheme, GHOST_WIDTH,
};
pub use eoc::{eoc, eoc_table, fill_eoc, EocTable};
