//! Time stepping of a benchmark case with error accumulation.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use super::catalog::{ExperimentCase, Ladder};
use crate::error::{Error, Result};
use crate::grid::{
    build_grid, courant_numbers, inflow_mask, inject_boundary, write_snapshot, Dim, Field,
    GhostPolicy, Grid, GridSpec,
};
use crate::high_resolution::{high_resolution_in_sweep_step, HrPredictor};
use crate::nonlinear::{assemble_velocity, VelocityModel};
use crate::schemes_1d::{
    assemble_second_order, assemble_third_order, high_resolution_step, LimiterParams, Weight,
};
use crate::schemes_2d::{
    assemble_second_order_2d, assemble_third_order_2d, high_resolution_step_2d, CrossTermVariant,
};
use crate::stencil::StepInputs;
use crate::sweep::{sweep_solve, SweepSchedule};

/// Ghost layers needed by the widest stencil (`i - 2s`).
pub const GHOST_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Second(Weight),
    HighResolution,
    Third,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Second(_) => "second",
            Scheme::HighResolution => "hr",
            Scheme::Third => "third",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `second`, `hr` or `third`. `second` uses the fixed weight 1/2,
/// the choice of the published square tables.
impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "second" => Ok(Scheme::Second(Weight::Fixed(0.5))),
            "hr" => Ok(Scheme::HighResolution),
            "third" => Ok(Scheme::Third),
            _ => Err(Error::Config(format!(
                "unknown scheme '{s}' (expected second, hr or third)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    /// `I`.
    pub nodes: usize,
    /// `N`.
    pub steps: usize,
    pub sweeps: usize,
    pub variant: CrossTermVariant,
    pub limiter: LimiterParams,
    /// `None` picks [`HrPredictor::default_for`] the case dimension.
    pub hr_predictor: Option<HrPredictor>,
    /// Where per-step snapshots go; also receives the dump of a failed step.
    pub snapshot_dir: Option<PathBuf>,
    /// Write a snapshot after every step (needs `snapshot_dir`).
    pub snapshots: bool,
}

impl RunConfig {
    pub fn new(case: &ExperimentCase, scheme: Scheme, nodes: usize, steps: usize) -> Self {
        RunConfig {
            scheme,
            nodes,
            steps,
            sweeps: case.default_sweeps,
            variant: CrossTermVariant::default(),
            limiter: LimiterParams::default(),
            hr_predictor: None,
            snapshot_dir: None,
            snapshots: false,
        }
    }
}

/// One row of an error table.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub case: String,
    pub scheme: String,
    pub nodes: usize,
    pub steps: usize,
    /// Largest `max(|C|, |D|)` over all steps and interior nodes.
    pub courant_max: f64,
    /// `tau h^d` times the summed absolute error over all steps and interior nodes.
    pub error: f64,
    pub eoc: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: ErrorRecord,
    pub grid: Grid,
    pub solution: Field,
    /// Nodes breaking the limiter inequalities, summed over lines and steps.
    pub limiter_violations: usize,
}

pub fn case_grid(case: &ExperimentCase, nodes: usize, steps: usize) -> Result<Grid> {
    if nodes < 2 || steps == 0 {
        return Err(Error::Config(format!(
            "need I >= 2 and N >= 1, got I={nodes}, N={steps}"
        )));
    }
    build_grid(GridSpec::on_interval(
        case.dim,
        case.lo,
        case.hi,
        nodes,
        GHOST_WIDTH,
        case.t_final,
        steps,
    ))
}

fn snapshot_path(config: &RunConfig, case: &ExperimentCase, step: usize, tag: &str) -> PathBuf {
    let dir = config
        .snapshot_dir
        .clone()
        .unwrap_or_else(std::env::temp_dir);
    dir.join(format!(
        "{}-{}-I{}-N{}-step{step}{tag}.csv",
        case.name(),
        config.scheme,
        config.nodes,
        config.steps
    ))
}

fn dump(grid: &Grid, field: &Field, t: f64, path: &PathBuf) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    write_snapshot(grid, field, t, BufWriter::new(File::create(path)?))?;
    Ok(())
}

pub fn run_case(case: &ExperimentCase, config: &RunConfig) -> Result<RunOutcome> {
    let grid = case_grid(case, config.nodes, config.steps)?;
    let layout = grid.layout();
    let exact = |p: [f64; 2], t: f64| case.exact(p, t);
    let external = |p: [f64; 2]| case.external_velocity(p);
    let model = VelocityModel::new(&external, case.delta);
    let schedule = SweepSchedule::alternating(case.dim);
    let scale = grid.h().powi(case.dim.count() as i32);
    let predictor = config
        .hr_predictor
        .unwrap_or_else(|| HrPredictor::default_for(case.dim));

    let mut prev = grid.sample(|p| exact(p, 0.0));
    let mut error = 0.0;
    let mut courant_max: f64 = 0.0;
    let mut violations = 0;

    for n in 1..=config.steps {
        let tau = grid.time().tau(n);
        let t = grid.time().time(n);
        let velocity = assemble_velocity(&grid, &prev, &model);
        let courant = courant_numbers(&grid, &velocity, tau);
        courant_max = courant_max.max(courant.max_abs());
        let fixed = inflow_mask(&grid, &courant);
        let mut boundary = prev.clone();
        inject_boundary(
            &grid,
            &mut boundary,
            &courant,
            Some(&exact),
            GhostPolicy::Exact,
            t,
        )?;
        let inp = StepInputs {
            grid: &grid,
            courant: &courant,
            prev: &prev,
            boundary: &boundary,
            fixed: &fixed,
        };

        let mut next = match (config.scheme, case.dim) {
            (Scheme::HighResolution, _) if predictor == HrPredictor::InSweep => {
                let (field, lim) =
                    high_resolution_in_sweep_step(&inp, config.sweeps, &schedule, config.limiter)?;
                violations += lim.violations(&inp);
                field
            }
            (Scheme::HighResolution, Dim::One) => {
                let (field, state) =
                    high_resolution_step(&inp, config.sweeps, &schedule, config.limiter)?;
                let c: Vec<f64> = (0..layout.nx as isize)
                    .map(|i| courant.c_at(i, 0))
                    .collect();
                violations += state.violations(&c);
                field
            }
            (Scheme::HighResolution, Dim::Two) => {
                let (field, lim) =
                    high_resolution_step_2d(&inp, config.sweeps, &schedule, config.limiter)?;
                for (j, st) in lim.x_lines.iter().enumerate() {
                    let c: Vec<f64> = (0..layout.nx as isize)
                        .map(|i| courant.c_at(i, j as isize))
                        .collect();
                    violations += st.violations(&c);
                }
                for (i, st) in lim.y_lines.iter().enumerate() {
                    let d: Vec<f64> = (0..layout.ny as isize)
                        .map(|j| courant.d_at(i as isize, j))
                        .collect();
                    violations += st.violations(&d);
                }
                field
            }
            (scheme, dim) => {
                let system = match (scheme, dim) {
                    (Scheme::Second(w), Dim::One) => assemble_second_order(&inp, w)?,
                    (Scheme::Second(w), Dim::Two) => assemble_second_order_2d(&inp, w, w)?,
                    (Scheme::Third, Dim::One) => assemble_third_order(&inp)?,
                    _ => assemble_third_order_2d(&inp, config.variant)?,
                };
                sweep_solve(&system, &inp.initial_guess(), config.sweeps, &schedule)?
            }
        };
        // Ghosts of the new level carry the prescribed values at t^n.
        for k in 0..next.values.len() {
            let (i, j) = layout.node(k);
            if !layout.is_interior(i, j) {
                next.values[k] = boundary.values[k];
            }
        }

        if let Some(node) = next.first_non_finite() {
            let path = snapshot_path(config, case, n, "-nonfinite");
            let written = dump(&grid, &next, t, &path)
                .ok()
                .map(|_| path.display().to_string());
            return Err(Error::NonFinite {
                step: n,
                node,
                snapshot: written,
            });
        }
        if config.snapshots {
            dump(&grid, &next, t, &snapshot_path(config, case, n, ""))?;
        }

        let sum: f64 = layout
            .interior_nodes()
            .map(|(i, j)| (exact(grid.coord(i, j), t) - next.get(i, j)).abs())
            .sum();
        error += tau * scale * sum;
        prev = next;
    }

    Ok(RunOutcome {
        record: ErrorRecord {
            case: case.name().to_string(),
            scheme: config.scheme.to_string(),
            nodes: config.nodes,
            steps: config.steps,
            courant_max,
            error,
            eoc: None,
        },
        grid,
        solution: prev,
        limiter_violations: violations,
    })
}

/// Runs every level of a ladder (plus its coarser pre-level when `with_pre`)
/// and fills the EOC column. The pre-level only seeds the first EOC and is
/// not returned. `levels` truncates the ladder.
pub fn run_ladder(
    case: &ExperimentCase,
    ladder: &Ladder,
    template: &RunConfig,
    levels: Option<usize>,
    with_pre: bool,
) -> Result<Vec<RunOutcome>> {
    let take = levels
        .unwrap_or(ladder.levels.len())
        .min(ladder.levels.len());
    let mut plan: Vec<(usize, usize)> = Vec::with_capacity(take + 1);
    let pre = if with_pre { ladder.pre } else { None };
    plan.extend(pre);
    plan.extend(ladder.levels.iter().take(take).copied());

    let mut outcomes = plan
        .par_iter()
        .map(|&(nodes, steps)| {
            run_case(
                case,
                &RunConfig {
                    nodes,
                    steps,
                    ..template.clone()
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    for k in 1..outcomes.len() {
        let coarse = outcomes[k - 1].record.error;
        outcomes[k].record.eoc = Some(super::eoc::eoc(coarse, outcomes[k].record.error));
    }
    if pre.is_some() {
        outcomes.remove(0);
    }
    Ok(outcomes)
}
