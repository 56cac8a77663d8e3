//! High-resolution step with the predictor and the limiter evaluated node by
//! node inside the sweeps.

use crate::error::Result;
use crate::grid::{Dim, Field};
use crate::schemes_1d::{
    add_high_resolution, add_second_order_fitted, indicator, limited_slope, preferred_weight,
    upwind_sign, Axis, LimiterParams, LimiterState,
};
use crate::stencil::{LocalRelation, StepInputs};
use crate::sweep::SweepSchedule;

/// Where the HR predictor comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HrPredictor {
    /// A separate preferred-weight solve for the whole level, followed by the
    /// limiter pipeline and one corrector solve.
    Global,
    /// Predictor, indicator and slope evaluated at each node inside the
    /// sweeps, from the already corrected upwind values.
    InSweep,
}

impl HrPredictor {
    /// `Global` in 1D. In 2D the preferred-weight predictor system is not
    /// stable at the benchmark Courant numbers, so `InSweep`.
    pub fn default_for(dim: Dim) -> Self {
        match dim {
            Dim::One => HrPredictor::Global,
            Dim::Two => HrPredictor::InSweep,
        }
    }
}

impl std::str::FromStr for HrPredictor {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(HrPredictor::Global),
            "in-sweep" => Ok(HrPredictor::InSweep),
            _ => Err(crate::error::Error::Config(format!(
                "unknown predictor '{s}' (expected global or in-sweep)"
            ))),
        }
    }
}

/// Limiter states of an in-sweep step, one per axis, indexed like the
/// interior nodes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeLimiter {
    pub x: LimiterState,
    pub y: Option<LimiterState>,
}

impl NodeLimiter {
    pub fn violations(&self, inp: &StepInputs) -> usize {
        let layout = inp.grid.layout();
        let c: Vec<f64> = layout
            .interior_nodes()
            .map(|(i, j)| inp.courant.c_at(i, j))
            .collect();
        let mut n = self.x.violations(&c);
        if let Some(y) = &self.y {
            let d: Vec<f64> = layout
                .interior_nodes()
                .map(|(i, j)| inp.courant.d_at(i, j))
                .collect();
            n += y.violations(&d);
        }
        n
    }
}

fn zeroed(n: usize) -> LimiterState {
    LimiterState {
        r_p: vec![0.0; n],
        s_p: vec![0.0; n],
        l: vec![0.0; n],
        l_upwind: vec![0.0; n],
        psi: vec![0.0; n],
    }
}

fn solve_local(inp: &StepInputs, field: &Field, rel: &LocalRelation, i: isize, j: isize) -> f64 {
    let mut acc = rel.source;
    for (off, e) in rel.explicit.iter() {
        acc += e * inp.at(&inp.prev.values, i, j, off);
    }
    let mut diag = 0.0;
    for (off, a) in rel.implicit.iter() {
        if off == (0, 0) {
            diag += a;
        } else {
            acc -= a * inp.at(&field.values, i, j, off);
        }
    }
    acc / diag
}

/// HR step whose predictor `Q_i` solves the preferred-weight relation at the
/// node with the current iterate as neighbours. The indicator then uses the
/// same iterate upwind. Nodes without a far-upwind neighbour fall back to the
/// preferred form with `r = 0`; nodes without an upwind neighbour use first order.
pub fn high_resolution_in_sweep_step(
    inp: &StepInputs,
    sweeps: usize,
    schedule: &SweepSchedule,
    params: LimiterParams,
) -> Result<(Field, NodeLimiter)> {
    let grid = inp.grid;
    let layout = grid.layout();
    let axes: &[Axis] = match grid.dim() {
        Dim::One => &[Axis::X],
        Dim::Two => &[Axis::X, Axis::Y],
    };
    let courant = |axis: Axis, i: isize, j: isize| match axis {
        Axis::X => inp.courant.c_at(i, j),
        Axis::Y => inp.courant.d_at(i, j),
    };
    let mut states: Vec<LimiterState> =
        axes.iter().map(|_| zeroed(layout.interior_len())).collect();
    let mut field = inp.initial_guess();

    for pass in 0..sweeps {
        schedule
            .ordering(pass)
            .for_each(layout.nx, layout.ny, |i, j| {
                let (i, j) = (i as isize, j as isize);
                if inp.is_fixed(i, j) {
                    return;
                }
                let node = layout.interior_idx(i, j);
                let mut pred = LocalRelation::identity();
                for &axis in axes {
                    let c = courant(axis, i, j);
                    add_second_order_fitted(inp, &mut pred, axis, (i, j), c, preferred_weight(c));
                }
                let q = solve_local(inp, &field, &pred, i, j);

                let mut rel = LocalRelation::identity();
                for (ax, &axis) in axes.iter().enumerate() {
                    let c = courant(axis, i, j);
                    let s = upwind_sign(c);
                    if !inp.has(i, j, axis.offset(s)) {
                        add_second_order_fitted(inp, &mut rel, axis, (i, j), c, 1.0);
                        continue;
                    }
                    let old = |k: i32| inp.at(&inp.prev.values, i, j, axis.offset(k * s));
                    let new = |k: i32| inp.at(&field.values, i, j, axis.offset(k * s));
                    let r = if inp.has(i, j, axis.offset(-2 * s)) {
                        indicator(
                            old(0) - old(-1) - new(-1) + new(-2),
                            old(1) - old(0) - q + new(-1),
                            params,
                        )
                    } else {
                        0.0
                    };
                    let (di, dj) = axis.offset(-s);
                    let (ui, uj) = (grid.wrap_i(i + di as isize), j + dj as isize);
                    let st = &mut states[ax];
                    let l_up = if layout.is_interior(ui, uj)
                        && !inp.is_fixed(ui, uj)
                        && upwind_sign(courant(axis, ui, uj)) == s
                    {
                        st.l[layout.interior_idx(ui, uj)]
                    } else {
                        0.0
                    };
                    let (s_p, l) = limited_slope(c, r, l_up, params);
                    st.r_p[node] = r;
                    st.s_p[node] = s_p;
                    st.l[node] = l;
                    st.l_upwind[node] = l_up;
                    add_high_resolution(&mut rel, axis, c, l, q);
                }
                let v = solve_local(inp, &field, &rel, i, j);
                field.set(i, j, v);
            });
    }
    let mut states = states.into_iter();
    let x = states.next().unwrap_or_default();
    Ok((
        field,
        NodeLimiter {
            x,
            y: states.next(),
        },
    ))
}
