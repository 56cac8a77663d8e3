//! Linearization of the normal-speed term: velocity `u + delta * grad / |grad|`
//! with the gradient taken from `Phi^{n-1}` by a WENO-type upwind rule.

use crate::grid::{Dim, Field, Grid, VelocitySamples};
use crate::schemes_1d::Axis;

/// External velocity plus constant normal speed.
#[derive(Clone, Copy)]
pub struct VelocityModel<'a> {
    pub external: &'a (dyn Fn([f64; 2]) -> [f64; 2] + Sync),
    pub delta: f64,
    pub epsilon_weno: f64,
}

impl std::fmt::Debug for VelocityModel<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VelocityModel")
            .field("delta", &self.delta)
            .field("epsilon_weno", &self.epsilon_weno)
            .finish_non_exhaustive()
    }
}

pub const DEFAULT_EPSILON_WENO: f64 = 1e-7;

impl<'a> VelocityModel<'a> {
    pub fn new(external: &'a (dyn Fn([f64; 2]) -> [f64; 2] + Sync), delta: f64) -> Self {
        VelocityModel {
            external,
            delta,
            epsilon_weno: DEFAULT_EPSILON_WENO,
        }
    }
}

/// Reconstructed value at the neighbour `(i, j) + dir` along `axis`
/// (`dir = ±1`), blending the centred and the one-sided parabola.
pub fn weno_one_sided(
    field: &Field,
    (i, j): (isize, isize),
    dir: i32,
    axis: Axis,
    eps: f64,
) -> f64 {
    let at = |k: i32| {
        let (di, dj) = axis.offset(k);
        field.get(i + di as isize, j + dj as isize)
    };
    let p0 = at(0);
    let (pm, pp) = (at(-1), at(1));
    let p1 = at(dir);
    let p2 = at(2 * dir);
    let side = (p2 - 2.0 * p1 + p0).powi(2);
    let centre = (pp - 2.0 * p0 + pm).powi(2);
    let r = (eps + side) / (eps + centre);
    let w = 1.0 / (1.0 + 2.0 * r * r);
    let d = dir as f64;
    p0 + d * 0.5 * (1.0 - w) * (pp - pm) + 0.5 * w * (-3.0 * p0 + 4.0 * p1 - p2)
}

/// Upwind difference (`h` times the derivative) along one axis at an
/// interior node.
pub fn upwind_difference(field: &Field, node: (isize, isize), axis: Axis, eps: f64) -> f64 {
    let p = field.get(node.0, node.1);
    let lo = weno_one_sided(field, node, -1, axis, eps);
    let hi = weno_one_sided(field, node, 1, axis, eps);
    if lo < p.min(hi) {
        p - lo
    } else if hi < p.min(lo) {
        hi - p
    } else {
        0.0
    }
}

/// Upwind gradients `[gx, gy]` (scaled by `h`) at interior nodes, in interior
/// storage order.
pub fn upwind_gradient(grid: &Grid, field: &Field, eps: f64) -> Vec<[f64; 2]> {
    grid.layout()
        .interior_nodes()
        .map(|node| {
            let gx = upwind_difference(field, node, Axis::X, eps);
            let gy = match grid.dim() {
                Dim::One => 0.0,
                Dim::Two => upwind_difference(field, node, Axis::Y, eps),
            };
            [gx, gy]
        })
        .collect()
}

/// Unit normal term from a gradient; zero when the gradient vanishes.
#[inline]
pub fn unit_normal(g: [f64; 2]) -> [f64; 2] {
    let norm = g[0].hypot(g[1]);
    if norm == 0.0 {
        [0.0, 0.0]
    } else {
        [g[0] / norm, g[1] / norm]
    }
}

/// Velocity `u + delta n` at every node. Ghost nodes take the normal term of
/// the nearest interior node. With `delta = 0` the external field is sampled
/// directly.
pub fn assemble_velocity(grid: &Grid, prev: &Field, model: &VelocityModel) -> VelocitySamples {
    let mut vel = VelocitySamples::from_fn(grid, model.external);
    if model.delta == 0.0 {
        return vel;
    }
    let layout = grid.layout();
    let grads = upwind_gradient(grid, prev, model.epsilon_weno);
    let (nx, ny) = (layout.nx as isize, layout.ny as isize);
    for (i, j) in layout.all_nodes() {
        let (ci, cj) = (i.clamp(0, nx - 1), j.clamp(0, ny - 1));
        let n = unit_normal(grads[layout.interior_idx(ci, cj)]);
        let k = layout.idx(i, j);
        vel.u[k] += model.delta * n[0];
        if grid.dim() == Dim::Two {
            vel.v[k] += model.delta * n[1];
        }
    }
    vel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, GridSpec};

    fn line(f: impl Fn(f64) -> f64) -> (Grid, Field) {
        let g = build_grid(GridSpec::on_interval(Dim::One, -1.0, 1.0, 20, 2, 1.0, 1)).unwrap();
        let field = g.sample(|p| f(p[0]));
        (g, field)
    }

    #[test]
    fn linear_data_reconstructed_exactly() {
        let (g, f) = line(|x| 3.0 * x + 1.0);
        for i in 0..=20 {
            for dir in [-1, 1] {
                let rec = weno_one_sided(&f, (i, 0), dir, Axis::X, DEFAULT_EPSILON_WENO);
                let exact = 3.0 * g.x(i + dir as isize) + 1.0;
                assert!((rec - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_data_uses_one_third_weight() {
        // Equal curvatures => r = 1 => w = 1/3; both sub-stencils give
        // Phi_i +- h phi'(x_i) exactly on parabolas.
        let (g, f) = line(|x| x * x);
        for dir in [-1.0, 1.0] {
            let rec = weno_one_sided(&f, (7, 0), dir as i32, Axis::X, 0.0);
            let x = g.x(7);
            assert!((rec - (x * x + dir * 2.0 * x * g.h())).abs() < 1e-12);
        }
    }

    #[test]
    fn minimum_and_peak_give_zero() {
        // Exactly symmetric samples, so that ties are real ties.
        for sign in [1.0, -1.0] {
            let (_, mut f) = line(|_| 0.0);
            for i in -2..23 {
                f.set(i, 0, sign * (i - 10).abs() as f64);
            }
            assert_eq!(
                upwind_difference(&f, (10, 0), Axis::X, DEFAULT_EPSILON_WENO),
                0.0
            );
        }
    }

    #[test]
    fn difference_points_downhill() {
        let (g, f) = line(|x| (2.0 * x).sin());
        for i in 0..=20 {
            let d = upwind_difference(&f, (i, 0), Axis::X, DEFAULT_EPSILON_WENO);
            let slope = 2.0 * (2.0 * g.x(i)).cos() * g.h();
            assert!(d == 0.0 || d * slope > 0.0);
        }
    }

    #[test]
    fn zero_delta_is_bypass() {
        let g = build_grid(GridSpec::on_interval(Dim::Two, -1.0, 1.0, 8, 2, 1.0, 1)).unwrap();
        let f = g.sample(|p| p[0].hypot(p[1]));
        let rot = |p: [f64; 2]| [-p[1], p[0]];
        let model = VelocityModel::new(&rot, 0.0);
        assert_eq!(
            assemble_velocity(&g, &f, &model),
            VelocitySamples::from_fn(&g, rot)
        );
    }

    #[test]
    fn normal_speed_adds_unit_vector() {
        let g = build_grid(GridSpec::on_interval(Dim::Two, -1.0, 1.0, 16, 2, 1.0, 1)).unwrap();
        let f = g.sample(|p| (p[0] - 0.05).hypot(p[1] - 0.03));
        let zero = |_: [f64; 2]| [0.0, 0.0];
        let model = VelocityModel::new(&zero, -0.5);
        let vel = assemble_velocity(&g, &f, &model);
        let l = g.layout();
        let k = l.idx(13, 4);
        assert!((vel.u[k].hypot(vel.v[k]) - 0.5).abs() < 1e-12);
        // Inward: velocity points against the radial direction.
        let p = g.coord(13, 4);
        assert!(vel.u[k] * (p[0] - 0.05) + vel.v[k] * (p[1] - 0.03) < 0.0);
    }
}
