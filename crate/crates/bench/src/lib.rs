//! Shared fixtures for the criterion benches.

use semilevel_core::grid::{inflow_mask, inject_boundary};
use semilevel_core::{
    build_grid, case, CaseId, CourantField, Dim, Field, GhostPolicy, Grid, GridSpec, StepInputs,
};

/// One time step of a rotating benchmark case, with everything a scheme
/// needs to assemble it.
pub struct StepFixture {
    pub grid: Grid,
    pub courant: CourantField,
    pub prev: Field,
    pub boundary: Field,
    pub fixed: Vec<bool>,
}

impl StepFixture {
    /// First step of `id` on `nodes` intervals with Courant number about
    /// `courant` along the rotation.
    pub fn new(id: CaseId, nodes: usize, courant: f64) -> Self {
        let c = case(id);
        let spec = GridSpec::on_interval(c.dim, c.lo, c.hi, nodes, 2, 1.0, 1);
        let grid = build_grid(spec).unwrap();
        let layout = grid.layout();
        let tau = courant * grid.h();
        let mut cf = CourantField::uniform(layout, 0.0, 0.0);
        for (i, j) in layout.all_nodes() {
            let [u, v] = c.external_velocity(grid.coord(i, j));
            let k = layout.idx(i, j);
            cf.c[k] = tau * u / grid.h();
            cf.d[k] = if c.dim == Dim::Two {
                tau * v / grid.h()
            } else {
                0.0
            };
        }
        let exact = move |p: [f64; 2], t: f64| c.exact(p, t);
        let prev = grid.sample(|p| exact(p, 0.0));
        let mut boundary = prev.clone();
        inject_boundary(
            &grid,
            &mut boundary,
            &cf,
            Some(&exact),
            GhostPolicy::Exact,
            tau,
        )
        .unwrap();
        StepFixture {
            fixed: inflow_mask(&grid, &cf),
            grid,
            courant: cf,
            prev,
            boundary,
        }
    }

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
