//! Uniform structured grids, discrete fields with ghost layers, Courant
//! numbers and boundary-value injection.
//!
//! Nodes are addressed by signed indices `(i, j)`: interior nodes run over
//! `0..=I` on every active axis, ghost nodes extend the range by the ghost
//! width on both sides. One-dimensional grids use `j = 0` only.
//!
//! Storage is row-major with `i` as the outer index, which is also the outer
//! loop of the sweeping solver.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn count(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Sequence of time steps. All shipped cases use a uniform step.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeSteps {
    Uniform { tau: f64, n_steps: usize },
    Variable(Vec<f64>),
}

impl TimeSteps {
    pub fn n_steps(&self) -> usize {
        match self {
            TimeSteps::Uniform { n_steps, .. } => *n_steps,
            TimeSteps::Variable(taus) => taus.len(),
        }
    }

    /// Step size of step `n` (1-based: step `n` advances `t^{n-1}` to `t^n`).
    pub fn tau(&self, n: usize) -> f64 {
        match self {
            TimeSteps::Uniform { tau, .. } => *tau,
            TimeSteps::Variable(taus) => taus[n - 1],
        }
    }

    /// Time level `t^n`.
    pub fn time(&self, n: usize) -> f64 {
        match self {
            TimeSteps::Uniform { tau, .. } => n as f64 * tau,
            TimeSteps::Variable(taus) => taus[..n].iter().sum(),
        }
    }
}

/// Geometry of a uniform grid plus its time ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub dim: Dim,
    pub origin: [f64; 2],
    pub h: f64,
    /// `I`: interior nodes are `0..=I` on every active axis.
    pub nodes: usize,
    pub ghost_width: usize,
    pub time: TimeSteps,
    /// Wrap the x axis periodically with period `I + 1` nodes (1D only).
    pub periodic_x: bool,
}

impl GridSpec {
    /// Grid on `[lo, hi]` (per active axis) with `nodes` intervals and `n_steps`
    /// uniform steps up to `t_final`.
    pub fn on_interval(
        dim: Dim,
        lo: f64,
        hi: f64,
        nodes: usize,
        ghost_width: usize,
        t_final: f64,
        n_steps: usize,
    ) -> Self {
        let h = if nodes == 0 {
            0.0
        } else {
            (hi - lo) / nodes as f64
        };
        let tau = if n_steps == 0 {
            0.0
        } else {
            t_final / n_steps as f64
        };
        GridSpec {
            dim,
            origin: [lo, if dim == Dim::Two { lo } else { 0.0 }],
            h,
            nodes,
            ghost_width,
            time: TimeSteps::Uniform { tau, n_steps },
            periodic_x: false,
        }
    }
}

/// Extents of a field array including ghost layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    /// Interior node count along x (`I + 1`).
    pub nx: usize,
    /// Interior node count along y (`1` in 1D).
    pub ny: usize,
    pub gx: usize,
    pub gy: usize,
}

impl Layout {
    #[inline]
    pub fn stride(&self) -> usize {
        self.ny + 2 * self.gy
    }

    pub fn len(&self) -> usize {
        (self.nx + 2 * self.gx) * self.stride()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interior_len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn contains(&self, i: isize, j: isize) -> bool {
        i >= -(self.gx as isize)
            && i < (self.nx + self.gx) as isize
            && j >= -(self.gy as isize)
            && j < (self.ny + self.gy) as isize
    }

    #[inline]
    pub fn is_interior(&self, i: isize, j: isize) -> bool {
        i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny
    }

    /// Storage index of node `(i, j)`; the node must lie inside the layout.
    #[inline]
    pub fn idx(&self, i: isize, j: isize) -> usize {
        debug_assert!(self.contains(i, j), "node ({i}, {j}) outside layout");
        (i + self.gx as isize) as usize * self.stride() + (j + self.gy as isize) as usize
    }

    pub fn index(&self, i: isize, j: isize) -> Option<usize> {
        self.contains(i, j).then(|| self.idx(i, j))
    }

    /// Inverse of [`Layout::idx`].
    pub fn node(&self, idx: usize) -> (isize, isize) {
        let s = self.stride();
        (
            (idx / s) as isize - self.gx as isize,
            (idx % s) as isize - self.gy as isize,
        )
    }

    /// Position of an interior node in the interior-only ordering.
    #[inline]
    pub fn interior_idx(&self, i: isize, j: isize) -> usize {
        i as usize * self.ny + j as usize
    }

    /// Interior nodes in storage order.
    pub fn interior_nodes(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        (0..self.nx as isize).flat_map(move |i| (0..self.ny as isize).map(move |j| (i, j)))
    }

    /// All nodes (interior and ghost) in storage order.
    pub fn all_nodes(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        let (gx, gy) = (self.gx as isize, self.gy as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        (-gx..nx + gx).flat_map(move |i| (-gy..ny + gy).map(move |j| (i, j)))
    }
}

/// A validated grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    spec: GridSpec,
    layout: Layout,
}

/// Validates `spec` and builds the grid.
pub fn build_grid(spec: GridSpec) -> Result<Grid> {
    if !(spec.h > 0.0 && spec.h.is_finite()) {
        return Err(Error::Config(format!(
            "grid spacing must be positive, got {}",
            spec.h
        )));
    }
    match &spec.time {
        TimeSteps::Uniform { tau, n_steps } => {
            if !(*tau > 0.0 && tau.is_finite()) {
                return Err(Error::Config(format!(
                    "time step must be positive, got {tau}"
                )));
            }
            if *n_steps == 0 {
                return Err(Error::Config("at least one time step is required".into()));
            }
        }
        TimeSteps::Variable(taus) => {
            if taus.is_empty() {
                return Err(Error::Config("at least one time step is required".into()));
            }
            if let Some(tau) = taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
                return Err(Error::Config(format!(
                    "time step must be positive, got {tau}"
                )));
            }
        }
    }
    if spec.nodes == 0 {
        return Err(Error::Config(
            "grid needs at least two nodes per axis".into(),
        ));
    }
    if spec.periodic_x && spec.dim == Dim::Two {
        return Err(Error::Config(
            "periodic wrapping is only supported in 1D".into(),
        ));
    }
    let layout = Layout {
        nx: spec.nodes + 1,
        ny: if spec.dim == Dim::Two {
            spec.nodes + 1
        } else {
            1
        },
        gx: spec.ghost_width,
        gy: if spec.dim == Dim::Two {
            spec.ghost_width
        } else {
            0
        },
    };
    Ok(Grid { spec, layout })
}

impl Grid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn dim(&self) -> Dim {
        self.spec.dim
    }

    pub fn h(&self) -> f64 {
        self.spec.h
    }

    /// `I`
    pub fn nodes(&self) -> usize {
        self.spec.nodes
    }

    pub fn ghost_width(&self) -> usize {
        self.spec.ghost_width
    }

    pub fn time(&self) -> &TimeSteps {
        &self.spec.time
    }

    pub fn is_periodic(&self) -> bool {
        self.spec.periodic_x
    }

    #[inline]
    pub fn x(&self, i: isize) -> f64 {
        self.spec.origin[0] + i as f64 * self.spec.h
    }

    #[inline]
    pub fn y(&self, j: isize) -> f64 {
        self.spec.origin[1] + j as f64 * self.spec.h
    }

    #[inline]
    pub fn coord(&self, i: isize, j: isize) -> [f64; 2] {
        match self.spec.dim {
            Dim::One => [self.x(i), 0.0],
            Dim::Two => [self.x(i), self.y(j)],
        }
    }

    /// Nearest node index to a coordinate (inverse of [`Grid::coord`]).
    pub fn node_at(&self, p: [f64; 2]) -> (isize, isize) {
        let i = ((p[0] - self.spec.origin[0]) / self.spec.h).round() as isize;
        let j = match self.spec.dim {
            Dim::One => 0,
            Dim::Two => ((p[1] - self.spec.origin[1]) / self.spec.h).round() as isize,
        };
        (i, j)
    }

    /// Maps a possibly out-of-range x index back into the interior when the
    /// grid is periodic.
    #[inline]
    pub fn wrap_i(&self, i: isize) -> isize {
        if self.spec.periodic_x {
            i.rem_euclid(self.layout.nx as isize)
        } else {
            i
        }
    }

    /// Field filled by evaluating `f` at every node, ghosts included.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> Field {
        let mut field = Field::zeros(self.layout);
        for (i, j) in self.layout.all_nodes() {
            field.values[self.layout.idx(i, j)] = f(self.coord(i, j));
        }
        field
    }
}

/// Time-level snapshot of the discrete level-set function, ghosts included.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub values: Vec<f64>,
    pub layout: Layout,
    pub time_index: usize,
}

impl Field {
    pub fn zeros(layout: Layout) -> Self {
        Field {
            values: vec![0.0; layout.len()],
            layout,
            time_index: 0,
        }
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> f64 {
        self.values[self.layout.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, value: f64) {
        let k = self.layout.idx(i, j);
        self.values[k] = value;
    }

    /// Storage index of the first non-finite interior value, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.layout
            .interior_nodes()
            .map(|(i, j)| self.layout.idx(i, j))
            .find(|&k| !self.values[k].is_finite())
    }

    /// Interior values in storage order.
    pub fn interior(&self) -> Vec<f64> {
        self.layout
            .interior_nodes()
            .map(|(i, j)| self.get(i, j))
            .collect()
    }
}

/// Velocity samples `(u, v)` at every node of a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySamples {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub layout: Layout,
}

impl VelocitySamples {
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let layout = grid.layout();
        let mut u = vec![0.0; layout.len()];
        let mut v = vec![0.0; layout.len()];
        for (i, j) in layout.all_nodes() {
            let k = layout.idx(i, j);
            let vel = f(grid.coord(i, j));
            u[k] = vel[0];
            v[k] = if grid.dim() == Dim::Two { vel[1] } else { 0.0 };
        }
        VelocitySamples { u, v, layout }
    }
}

/// Per-node Courant numbers `C = tau u / h` and `D = tau v / h`.
#[derive(Debug, Clone, PartialEq)]
pub struct CourantField {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub layout: Layout,
}

impl CourantField {
    pub fn uniform(layout: Layout, c: f64, d: f64) -> Self {
        CourantField {
            c: vec![c; layout.len()],
            d: vec![d; layout.len()],
            layout,
        }
    }

    #[inline]
    pub fn c_at(&self, i: isize, j: isize) -> f64 {
        self.c[self.layout.idx(i, j)]
    }

    #[inline]
    pub fn d_at(&self, i: isize, j: isize) -> f64 {
        self.d[self.layout.idx(i, j)]
    }

    /// Largest `max(|C|, |D|)` over interior nodes.
    pub fn max_abs(&self) -> f64 {
        self.layout
            .interior_nodes()
            .map(|(i, j)| {
                let k = self.layout.idx(i, j);
                self.c[k].abs().max(self.d[k].abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Courant numbers for one time step of size `tau`.
pub fn courant_numbers(grid: &Grid, velocity: &VelocitySamples, tau: f64) -> CourantField {
    let scale = tau / grid.h();
    CourantField {
        c: velocity.u.iter().map(|u| scale * u).collect(),
        d: velocity.v.iter().map(|v| scale * v).collect(),
        layout: velocity.layout,
    }
}

/// How ghost nodes are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GhostPolicy {
    /// Ghost values from the boundary data (exact solution).
    #[default]
    Exact,
    /// Ghost values copied from the nearest interior node.
    ExtrapolateConstant,
}

/// Source of prescribed values at boundary and ghost nodes.
pub trait BoundaryData {
    fn boundary_value(&self, p: [f64; 2], t: f64) -> f64;
}

impl<F: Fn([f64; 2], f64) -> f64> BoundaryData for F {
    fn boundary_value(&self, p: [f64; 2], t: f64) -> f64 {
        self(p, t)
    }
}

/// Interior boundary nodes where the flow enters the domain, indexed by
/// [`Layout::interior_idx`].
pub fn inflow_mask(grid: &Grid, courant: &CourantField) -> Vec<bool> {
    let layout = grid.layout();
    let last = grid.nodes() as isize;
    let mut mask = vec![false; layout.interior_len()];
    for (i, j) in layout.interior_nodes() {
        let c = courant.c_at(i, j);
        let d = courant.d_at(i, j);
        let mut inflow = false;
        if !grid.is_periodic() {
            inflow |= (i == 0 && c > 0.0) || (i == last && c < 0.0);
        }
        if grid.dim() == Dim::Two {
            inflow |= (j == 0 && d > 0.0) || (j == last && d < 0.0);
        }
        mask[layout.interior_idx(i, j)] = inflow;
    }
    mask
}

/// Writes prescribed values at time `t` into the ghost nodes and the inflow
/// boundary nodes of `field`. Other interior nodes are untouched.
pub fn inject_boundary(
    grid: &Grid,
    field: &mut Field,
    courant: &CourantField,
    data: Option<&dyn BoundaryData>,
    policy: GhostPolicy,
    t: f64,
) -> Result<()> {
    let layout = grid.layout();
    let mask = inflow_mask(grid, courant);
    if data.is_none() && mask.iter().any(|&m| m) {
        return Err(Error::Config(
            "inflow boundary without boundary data".into(),
        ));
    }
    if let Some(data) = data {
        for (i, j) in layout.interior_nodes() {
            if mask[layout.interior_idx(i, j)] {
                field.set(i, j, data.boundary_value(grid.coord(i, j), t));
            }
        }
    }
    fill_ghosts(grid, field, data, policy, t)
}

/// Fills only the ghost layer.
pub fn fill_ghosts(
    grid: &Grid,
    field: &mut Field,
    data: Option<&dyn BoundaryData>,
    policy: GhostPolicy,
    t: f64,
) -> Result<()> {
    let layout = grid.layout();
    let (nx, ny) = (layout.nx as isize, layout.ny as isize);
    for (i, j) in layout.all_nodes() {
        if layout.is_interior(i, j) {
            continue;
        }
        let value = if grid.is_periodic() {
            field.get(grid.wrap_i(i), j)
        } else {
            match (policy, data) {
                (GhostPolicy::Exact, Some(data)) => data.boundary_value(grid.coord(i, j), t),
                (GhostPolicy::Exact, None) => {
                    return Err(Error::Config(
                        "exact ghost policy without boundary data".into(),
                    ))
                }
                (GhostPolicy::ExtrapolateConstant, _) => {
                    field.get(i.clamp(0, nx - 1), j.clamp(0, ny - 1))
                }
            }
        };
        field.set(i, j, value);
    }
    Ok(())
}

/// Writes interior values as CSV: a `# t=<time>` header, then
/// `i,x,value` (1D) or `i,j,x,y,value` (2D) rows in storage order.
pub fn write_snapshot<W: Write>(
    grid: &Grid,
    field: &Field,
    t: f64,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "# t={t}")?;
    for (i, j) in grid.layout().interior_nodes() {
        let p = grid.coord(i, j);
        let value = field.get(i, j);
        match grid.dim() {
            Dim::One => writeln!(out, "{i},{},{value}", p[0])?,
            Dim::Two => writeln!(out, "{i},{j},{},{},{value}", p[0], p[1])?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid_1d(lo: f64, hi: f64, nodes: usize) -> Grid {
        build_grid(GridSpec::on_interval(Dim::One, lo, hi, nodes, 2, 1.0, 1)).unwrap()
    }

    #[test]
    fn smooth_case_interval_endpoints() {
        let g = grid_1d(-PI / 2.0, 3.5 * PI, 200);
        assert!((g.x(0) + PI / 2.0).abs() < 1e-15);
        assert!((g.x(200) - 3.5 * PI).abs() < 1e-12);
        assert_eq!(g.layout().nx, 201);
    }

    #[test]
    fn two_node_grid() {
        let spec = GridSpec {
            dim: Dim::One,
            origin: [0.0, 0.0],
            h: 1.0,
            nodes: 1,
            ghost_width: 0,
            time: TimeSteps::Uniform {
                tau: 1.0,
                n_steps: 1,
            },
            periodic_x: false,
        };
        let g = build_grid(spec).unwrap();
        let xs: Vec<f64> = g.layout().interior_nodes().map(|(i, _)| g.x(i)).collect();
        assert_eq!(xs, vec![0.0, 1.0]);
    }

    #[test]
    fn square_grid_extents() {
        let g = build_grid(GridSpec::on_interval(Dim::Two, -0.5, 0.5, 64, 2, 1.0, 4)).unwrap();
        assert_eq!(g.h(), 1.0 / 64.0);
        assert_eq!(g.layout().interior_len(), 65 * 65);
        assert_eq!(g.layout().len(), 69 * 69);
    }

    #[test]
    fn rejects_bad_steps() {
        let mut spec = GridSpec::on_interval(Dim::One, 0.0, 1.0, 10, 2, 1.0, 1);
        spec.h = 0.0;
        assert!(matches!(build_grid(spec), Err(Error::Config(_))));
        let mut spec = GridSpec::on_interval(Dim::One, 0.0, 1.0, 10, 2, 1.0, 1);
        spec.time = TimeSteps::Uniform {
            tau: -1.0,
            n_steps: 1,
        };
        assert!(matches!(build_grid(spec), Err(Error::Config(_))));
    }

    #[test]
    fn coordinate_round_trip_includes_ghosts() {
        let g = build_grid(GridSpec::on_interval(Dim::Two, -1.0, 1.0, 40, 3, 1.0, 4)).unwrap();
        for (i, j) in g.layout().all_nodes() {
            assert_eq!(g.node_at(g.coord(i, j)), (i, j));
            assert_eq!(g.layout().node(g.layout().idx(i, j)), (i, j));
        }
    }

    #[test]
    fn courant_scaling() {
        let g = grid_1d(0.0, 1.0, 10);
        let vel = VelocitySamples::from_fn(&g, |_| [1.0, 0.0]);
        let c = courant_numbers(&g, &vel, 5.0 * g.h());
        assert!(c.c.iter().all(|&v| (v - 5.0).abs() < 1e-12));
        let c2 = courant_numbers(&g, &vel, 10.0 * g.h());
        for (a, b) in c.c.iter().zip(&c2.c) {
            assert_eq!(2.0 * a, *b);
        }
        let zero = VelocitySamples::from_fn(&g, |_| [0.0, 0.0]);
        assert_eq!(courant_numbers(&g, &zero, 1.0).max_abs(), 0.0);
    }

    #[test]
    fn courant_reproduces_velocity() {
        let g = build_grid(GridSpec::on_interval(Dim::Two, -0.5, 0.5, 16, 2, 1.0, 4)).unwrap();
        let vel = VelocitySamples::from_fn(&g, |p| [-p[1], p[0]]);
        let tau = 0.3;
        let c = courant_numbers(&g, &vel, tau);
        for k in 0..vel.u.len() {
            assert!((c.c[k] * g.h() / tau - vel.u[k]).abs() < 1e-14);
            assert!((c.d[k] * g.h() / tau - vel.v[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn inflow_node_gets_boundary_value() {
        let g = grid_1d(0.0, 1.0, 10);
        let vel = VelocitySamples::from_fn(&g, |_| [1.0, 0.0]);
        let c = courant_numbers(&g, &vel, 0.1);
        let mut f = g.sample(|_| 0.0);
        let exact = |p: [f64; 2], t: f64| p[0] + t;
        inject_boundary(&g, &mut f, &c, Some(&exact), GhostPolicy::Exact, 2.0).unwrap();
        assert_eq!(f.get(0, 0), 2.0);
        assert_eq!(f.get(10, 0), 0.0);
        assert!((f.get(-1, 0) - (2.0 - 0.1)).abs() < 1e-12);
        assert!((f.get(12, 0) - 3.2).abs() < 1e-12);
        let snapshot = f.clone();
        inject_boundary(&g, &mut f, &c, Some(&exact), GhostPolicy::Exact, 2.0).unwrap();
        assert_eq!(f, snapshot);
    }

    #[test]
    fn missing_inflow_data_is_config_error() {
        let g = grid_1d(0.0, 1.0, 10);
        let vel = VelocitySamples::from_fn(&g, |_| [-1.0, 0.0]);
        let c = courant_numbers(&g, &vel, 0.1);
        let mut f = g.sample(|p| p[0]);
        let err = inject_boundary(&g, &mut f, &c, None, GhostPolicy::ExtrapolateConstant, 0.0);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn extrapolated_ghosts_copy_edges() {
        let g = build_grid(GridSpec::on_interval(Dim::Two, 0.0, 1.0, 4, 2, 1.0, 1)).unwrap();
        let zero = CourantField::uniform(g.layout(), 0.0, 0.0);
        let mut f = g.sample(|p| p[0] + 10.0 * p[1]);
        inject_boundary(
            &g,
            &mut f,
            &zero,
            None,
            GhostPolicy::ExtrapolateConstant,
            0.0,
        )
        .unwrap();
        assert_eq!(f.get(-2, -1), f.get(0, 0));
        assert_eq!(f.get(6, 2), f.get(4, 2));
    }

    #[test]
    fn snapshot_format() {
        let g = build_grid(GridSpec::on_interval(Dim::Two, 0.0, 1.0, 1, 1, 1.0, 1)).unwrap();
        let f = g.sample(|p| p[0] + p[1]);
        let mut buf = Vec::new();
        write_snapshot(&g, &f, 0.5, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# t=0.5");
        assert_eq!(lines[1], "0,0,0,0,0");
        assert_eq!(lines[2], "0,1,0,1,1");
        assert_eq!(lines.len(), 5);
    }
}
