#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use semilevel_core::grid::fill_ghosts;
use semilevel_core::{
    build_grid, CourantField, Dim, Field, GhostPolicy, Grid, GridSpec, StepInputs,
};

/// Owned data behind a [`StepInputs`].
pub struct Problem {
    pub grid: Grid,
    pub courant: CourantField,
    pub prev: Field,
    pub boundary: Field,
    pub fixed: Vec<bool>,
}

impl Problem {
    pub fn inputs(&self) -> StepInputs<'_> {
        StepInputs {
            grid: &self.grid,
            courant: &self.courant,
            prev: &self.prev,
            boundary: &self.boundary,
            fixed: &self.fixed,
        }
    }
}

pub fn grid(dim: Dim, nodes: usize, periodic: bool) -> Grid {
    let mut spec = GridSpec::on_interval(dim, 0.0, 1.0, nodes, 2, 1.0, 1);
    spec.periodic_x = periodic;
    build_grid(spec).unwrap()
}

/// One of three random profiles on `x in [0, 1)`: white noise, a step
/// function with four jumps, or two superposed sine waves.
pub fn random_profile<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let kind = rng.gen_range(0..3);
    let jumps: Vec<(f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let (amp, phase) = (rng.gen_range(0.1..1.0), rng.gen_range(0.0..2.0 * PI));
    (0..n)
        .map(|k| {
            let x = k as f64 / n as f64;
            match kind {
                0 => rng.gen_range(-1.0..1.0),
                1 => jumps.iter().filter(|(p, _)| x >= *p).map(|(_, h)| h).sum(),
                _ => amp * (2.0 * PI * x + phase).sin() + 0.3 * (6.0 * PI * x).sin(),
            }
        })
        .collect()
}

/// Periodic 1D problem with constant Courant number `c`.
pub fn periodic_problem(values: &[f64], c: f64) -> Problem {
    let grid = grid(Dim::One, values.len() - 1, true);
    let layout = grid.layout();
    let mut prev = Field::zeros(layout);
    for (i, &v) in values.iter().enumerate() {
        prev.set(i as isize, 0, v);
    }
    fill_ghosts(
        &grid,
        &mut prev,
        None,
        GhostPolicy::ExtrapolateConstant,
        0.0,
    )
    .unwrap();
    Problem {
        courant: CourantField::uniform(layout, c, 0.0),
        boundary: prev.clone(),
        fixed: vec![false; layout.interior_len()],
        prev,
        grid,
    }
}

/// Total variation of the periodic backward differences
/// `Psi_i = Phi_i - Phi_{i-1}`.
pub fn tv_of_differences(field: &Field) -> f64 {
    let n = field.layout.nx as isize;
    let v = |i: isize| field.get(i.rem_euclid(n), 0);
    (0..n)
        .map(|i| (v(i) - 2.0 * v(i - 1) + v(i - 2)).abs())
        .sum()
}

/// Random non-periodic problem: random values everywhere (ghosts and inflow
/// nodes included), Courant numbers from `courant(x, y)`, inflow nodes fixed.
pub fn random_problem<R: Rng>(
    rng: &mut R,
    dim: Dim,
    nodes: usize,
    courant: impl Fn(f64, f64) -> (f64, f64),
) -> Problem {
    let grid = grid(dim, nodes, false);
    let layout = grid.layout();
    let mut cf = CourantField::uniform(layout, 0.0, 0.0);
    for (i, j) in layout.all_nodes() {
        let p = grid.coord(i, j);
        let (c, d) = courant(p[0], p[1]);
        let k = layout.idx(i, j);
        cf.c[k] = c;
        cf.d[k] = if dim == Dim::Two { d } else { 0.0 };
    }
    let mut prev = Field::zeros(layout);
    let mut boundary = Field::zeros(layout);
    for k in 0..prev.values.len() {
        prev.values[k] = rng.gen_range(-1.0..1.0);
        boundary.values[k] = rng.gen_range(-1.0..1.0);
    }
    let fixed = semilevel_core::grid::inflow_mask(&grid, &cf);
    Problem {
        grid,
        courant: cf,
        prev,
        boundary,
        fixed,
    }
}
