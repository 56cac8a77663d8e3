//! Semi-implicit compact schemes for level-set advection.

pub mod error;
pub mod experiments;
pub mod grid;
pub mod high_resolution;
pub mod nonlinear;
pub mod schemes_1d;
pub mod schemes_2d;
pub mod stability;
pub mod stencil;
pub mod sweep;

pub use error::{Error, Result};
pub use experiments::{
    case, run_case, run_ladder, CaseId, EocTable, ErrorRecord, ExperimentCase, Ladder, RunConfig,
    RunOutcome, Scheme,
};
pub use grid::{build_grid, CourantField, Dim, Field, GhostPolicy, Grid, GridSpec, Layout};
pub use high_resolution::HrPredictor;
pub use schemes_1d::{LimiterParams, LimiterState, Weight};
pub use schemes_2d::CrossTermVariant;
pub use stability::{
    amplification_factor, instability_onset, scan_max_magnitude, AmplificationReport,
    FrozenStencil, OnsetConfig, ScanConfig, SchemeKind,
};
pub use stencil::{LocalRelation, StencilSystem, StepInputs};
pub use sweep::{dense_oracle_solve, sweep_solve, SweepSchedule};
