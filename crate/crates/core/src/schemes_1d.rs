//! One-dimensional compact semi-implicit schemes.
//!
//! Every scheme couples `Phi^n` only at the node itself and at its upwind
//! neighbours `i - s`, `i - 2s` with `s = sgn(C_i)`, so the system for a
//! velocity of one sign is triangular. The axis-generic term builders here are
//! reused by the two-dimensional schemes.

use crate::error::Result;
use crate::grid::{Field, Layout};
use crate::stencil::{LocalRelation, Offset, StencilSystem, StepInputs};
use crate::sweep::{sweep_solve, SweepSchedule};

/// Upwind orientation of a Courant number; zero counts as positive.
#[inline]
pub fn upwind_sign(c: f64) -> i32 {
    if c < 0.0 {
        -1
    } else {
        1
    }
}

/// The weight that makes the second-order scheme third-order accurate for
/// constant velocity.
#[inline]
pub fn preferred_weight(c: f64) -> f64 {
    (2.0 + c.abs()) / 6.0
}

/// Weight parameter of the parametric second-order scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Preferred,
    Fixed(f64),
}

impl Weight {
    #[inline]
    pub fn at(self, c: f64) -> f64 {
        match self {
            Weight::Preferred => preferred_weight(c),
            Weight::Fixed(w) => w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    #[inline]
    pub fn offset(self, k: i32) -> Offset {
        match self {
            Axis::X => (k, 0),
            Axis::Y => (0, k),
        }
    }
}

/// Adds the parametric second-order terms for one axis:
///
/// ```text
/// |C| ( P_i - P_{i-s} + (1-w)/2 (O_{i+s} - O_i - P_i + P_{i-s})
///                     + w/2     (O_i - O_{i-s} - P_{i-s} + P_{i-2s}) )
/// ```
///
/// with `P = Phi^n`, `O = Phi^{n-1}`.
pub fn add_second_order(rel: &mut LocalRelation, axis: Axis, c: f64, w: f64) {
    let s = upwind_sign(c);
    let a = c.abs();
    let o = |k: i32| axis.offset(k * s);
    let half_lo = 0.5 * (1.0 - w);
    let half_w = 0.5 * w;

    rel.lhs_new(o(0), a * (1.0 - half_lo));
    rel.lhs_new(o(-1), a * (-1.0 + half_lo - half_w));
    rel.lhs_new(o(-2), a * half_w);

    rel.lhs_old(o(1), a * half_lo);
    rel.lhs_old(o(0), a * (half_w - half_lo));
    rel.lhs_old(o(-1), -a * half_w);
}

/// Adds the third-order terms for one axis; `c_up` is the Courant number at
/// the upwind neighbour `i - s`.
pub fn add_third_order(rel: &mut LocalRelation, axis: Axis, c: f64, c_up: f64) {
    let s = upwind_sign(c);
    let a = c.abs();
    let o = |k: i32| axis.offset(k * s);
    let k = a / 12.0;

    rel.lhs_new(o(0), 9.0 * k);
    rel.lhs_new(o(-1), -12.0 * k);
    rel.lhs_new(o(-2), 3.0 * k);
    rel.lhs_old(o(1), 4.0 * k);
    rel.lhs_old(o(0), -3.0 * k);
    rel.lhs_old(o(-2), -k);

    // |C| (P_i - P_{i-s} - O_i + O_{i-s})
    rel.lhs_increment(o(0), k * a);
    rel.lhs_increment(o(-1), -k * a);

    // -s C_{i-s} (P_{i-s} - P_{i-2s} - O_{i-s} + O_{i-2s})
    let up = -(s as f64) * c_up;
    rel.lhs_increment(o(-1), k * up);
    rel.lhs_increment(o(-2), -k * up);
}

/// Adds the limited high-resolution terms for one axis:
///
/// ```text
/// |C| ( P_i - P_{i-s} + l/2 (O_{i+s} - O_i - Q_i + P_{i-s}) )
/// ```
///
/// where `Q_i` is the predicted value at the node, moved to the right-hand side.
pub fn add_high_resolution(rel: &mut LocalRelation, axis: Axis, c: f64, l: f64, predicted: f64) {
    let s = upwind_sign(c);
    let a = c.abs();
    let o = |k: i32| axis.offset(k * s);
    let half_l = 0.5 * l;

    rel.lhs_new(o(0), a);
    rel.lhs_new(o(-1), a * (half_l - 1.0));
    rel.lhs_old(o(1), a * half_l);
    rel.lhs_old(o(0), -a * half_l);
    rel.source += a * half_l * predicted;
}

pub fn second_order_relation(c: f64, w: f64) -> LocalRelation {
    let mut rel = LocalRelation::identity();
    add_second_order(&mut rel, Axis::X, c, w);
    rel
}

pub fn third_order_relation(c: f64, c_up: f64) -> LocalRelation {
    let mut rel = LocalRelation::identity();
    add_third_order(&mut rel, Axis::X, c, c_up);
    rel
}

pub fn high_resolution_relation(c: f64, l: f64, predicted: f64) -> LocalRelation {
    let mut rel = LocalRelation::identity();
    add_high_resolution(&mut rel, Axis::X, c, l, predicted);
    rel
}

/// Second-order weight restricted to the stencil that is actually available:
/// `w = 0` drops `i - 2s`, `w = 1` drops `i + s`. `None` means only the
/// first-order upwind relation fits.
pub(crate) fn reduced_weight(w: f64, has_far_upwind: bool, has_downwind: bool) -> Option<f64> {
    match (has_far_upwind, has_downwind) {
        (true, true) => Some(w),
        (false, true) => Some(0.0),
        (true, false) => Some(1.0),
        (false, false) => None,
    }
}

/// Second-order terms with boundary fallback to the reduced stencils.
pub(crate) fn add_second_order_fitted(
    inp: &StepInputs,
    rel: &mut LocalRelation,
    axis: Axis,
    (i, j): (isize, isize),
    c: f64,
    w: f64,
) {
    let s = upwind_sign(c);
    let far = inp.has(i, j, axis.offset(-2 * s));
    let down = inp.has(i, j, axis.offset(s));
    match reduced_weight(w, far, down) {
        Some(w) => add_second_order(rel, axis, c, w),
        None => add_high_resolution(rel, axis, c, 0.0, 0.0),
    }
}

fn third_order_fits(inp: &StepInputs, axis: Axis, i: isize, j: isize, s: i32) -> bool {
    inp.has(i, j, axis.offset(-2 * s)) && inp.has(i, j, axis.offset(s))
}

/// Courant number at `(i, j) + offset`, or `fallback` outside the layout.
#[inline]
pub(crate) fn courant_at(
    inp: &StepInputs,
    values: &[f64],
    i: isize,
    j: isize,
    off: Offset,
    fallback: f64,
) -> f64 {
    if inp.has(i, j, off) {
        inp.at(values, i, j, off)
    } else {
        fallback
    }
}

/// Parametric second-order scheme with weight `w`.
pub fn assemble_second_order(inp: &StepInputs, weight: Weight) -> Result<StencilSystem> {
    inp.assemble(|i, j| {
        let c = inp.courant.c_at(i, j);
        let mut rel = LocalRelation::identity();
        add_second_order_fitted(inp, &mut rel, Axis::X, (i, j), c, weight.at(c));
        rel
    })
}

/// Third-order scheme. Nodes whose stencil leaves the ghost layer use the
/// preferred-weight second-order scheme restricted to the available stencil.
pub fn assemble_third_order(inp: &StepInputs) -> Result<StencilSystem> {
    inp.assemble(|i, j| {
        let c = inp.courant.c_at(i, j);
        let s = upwind_sign(c);
        let mut rel = LocalRelation::identity();
        if third_order_fits(inp, Axis::X, i, j, s) {
            let c_up = courant_at(inp, &inp.courant.c, i, j, (-s, 0), c);
            add_third_order(&mut rel, Axis::X, c, c_up);
        } else {
            add_second_order_fitted(inp, &mut rel, Axis::X, (i, j), c, preferred_weight(c));
        }
        rel
    })
}

/// Predictor: the preferred-weight second-order scheme solved with the given
/// number of sweeps.
pub fn predict_step(inp: &StepInputs, sweeps: usize, schedule: &SweepSchedule) -> Result<Field> {
    let system = assemble_second_order(inp, Weight::Preferred)?;
    sweep_solve(&system, &inp.initial_guess(), sweeps, schedule)
}

/// Tuning of the slope limiter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterParams {
    /// Upper clamp of the preliminary slope.
    pub cap: f64,
    /// Relative guard for vanishing indicator denominators.
    pub epsilon_den: f64,
}

impl Default for LimiterParams {
    fn default() -> Self {
        LimiterParams {
            cap: 2.0,
            epsilon_den: 1e-14,
        }
    }
}

/// Limiter quantities along one grid line, indexed by interior position.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LimiterState {
    /// Predicted smoothness indicators `r^p`.
    pub r_p: Vec<f64>,
    /// Raw slopes `s^p = 1 - w + w r^p`.
    pub s_p: Vec<f64>,
    /// Limited slopes.
    pub l: Vec<f64>,
    /// Limited slope of the upwind neighbour used in the bound (0 at run starts).
    pub l_upwind: Vec<f64>,
    /// Upwind differences of the predictor.
    pub psi: Vec<f64>,
}

impl LimiterState {
    /// Number of nodes breaking `0 <= l <= 2` or, where `r^p != 0`,
    /// `0 <= l / r^p <= 2 / |C| + l_upwind` (up to round-off in the division).
    pub fn violations(&self, courant: &[f64]) -> usize {
        (0..self.l.len())
            .filter(|&k| {
                let (l, r) = (self.l[k], self.r_p[k]);
                if !(0.0..=2.0).contains(&l) {
                    return true;
                }
                if r == 0.0 {
                    return false;
                }
                let q = l / r;
                let c = courant[k].abs();
                let bound = if c == 0.0 {
                    f64::INFINITY
                } else {
                    2.0 / c + self.l_upwind[k]
                };
                q < 0.0 || q > bound * (1.0 + 1e-12)
            })
            .count()
    }
}

/// `num / den`, or 0 when the denominator vanishes relative to the numerator.
#[inline]
pub(crate) fn indicator(num: f64, den: f64, params: LimiterParams) -> f64 {
    if den.abs() < params.epsilon_den * (1.0 + num.abs()) {
        0.0
    } else {
        num / den
    }
}

/// Raw slope `s^p` and limited slope `l` at a node with indicator `r` and
/// upwind limited slope `l_up`.
#[inline]
pub(crate) fn limited_slope(c: f64, r: f64, l_up: f64, params: LimiterParams) -> (f64, f64) {
    let w = preferred_weight(c);
    let s_p = 1.0 - w + w * r;
    let l_p = s_p.clamp(0.0, params.cap);
    let bound = if r <= 0.0 {
        0.0
    } else if c == 0.0 {
        f64::INFINITY
    } else {
        (2.0 / c.abs() + l_up) * r
    };
    (s_p, l_p.min(bound).max(0.0))
}

/// A grid line with ghost values: `old`/`pred` have `n + 2 * ghost` entries,
/// `courant` and `fixed` have the `n` interior entries.
pub(crate) struct Line<'a> {
    pub old: &'a [f64],
    pub pred: &'a [f64],
    pub courant: &'a [f64],
    /// Prescribed (inflow) nodes; they carry no slope.
    pub fixed: &'a [bool],
    pub ghost: usize,
}

/// Runs the indicator / slope / limiter recursion on one line.
///
/// Nodes with `C >= 0` are processed left to right, nodes with `C < 0` right
/// to left; the upwind slope is taken from the neighbour only when it belongs
/// to the same monotone run, otherwise it is 0.
pub(crate) fn limit_line(line: &Line, params: LimiterParams) -> LimiterState {
    let n = line.courant.len();
    let g = line.ghost as isize;
    let len = line.old.len() as isize;
    let mut st = LimiterState {
        r_p: vec![0.0; n],
        s_p: vec![0.0; n],
        l: vec![0.0; n],
        l_upwind: vec![0.0; n],
        psi: vec![0.0; n],
    };
    let sign: Vec<i32> = line.courant.iter().map(|&c| upwind_sign(c)).collect();

    let visit = |k: usize, st: &mut LimiterState| {
        if line.fixed[k] {
            return;
        }
        let c = line.courant[k];
        let s = sign[k] as isize;
        let p = k as isize + g;
        let inside = |q: isize| q >= 0 && q < len;

        if inside(p - s) {
            st.psi[k] = line.pred[p as usize] - line.pred[(p - s) as usize];
        }
        let r = if inside(p - 2 * s) && inside(p + s) {
            let o = |q: isize| line.old[q as usize];
            let q = |q: isize| line.pred[q as usize];
            indicator(
                o(p) - o(p - s) - q(p - s) + q(p - 2 * s),
                o(p + s) - o(p) - q(p) + q(p - s),
                params,
            )
        } else {
            0.0
        };
        let up = k as isize - s;
        let l_up = if up >= 0 && (up as usize) < n && sign[up as usize] == sign[k] {
            st.l[up as usize]
        } else {
            0.0
        };
        let (s_p, l) = limited_slope(c, r, l_up, params);
        st.r_p[k] = r;
        st.s_p[k] = s_p;
        st.l_upwind[k] = l_up;
        st.l[k] = l;
    };

    for (k, &sg) in sign.iter().enumerate() {
        if sg > 0 {
            visit(k, &mut st);
        }
    }
    for k in (0..n).rev() {
        if sign[k] < 0 {
            visit(k, &mut st);
        }
    }
    st
}

/// Extracts line `j` (along x) or `i` (along y) of a field, ghosts included.
pub(crate) fn field_line(field: &Field, axis: Axis, fixed_index: isize) -> Vec<f64> {
    let l: Layout = field.layout;
    match axis {
        Axis::X => (-(l.gx as isize)..(l.nx + l.gx) as isize)
            .map(|i| field.get(i, fixed_index))
            .collect(),
        Axis::Y => (-(l.gy as isize)..(l.ny + l.gy) as isize)
            .map(|j| field.get(fixed_index, j))
            .collect(),
    }
}

/// Limiter for a 1D step given the predictor field.
pub fn limiter_pipeline(
    inp: &StepInputs,
    predicted: &Field,
    params: LimiterParams,
) -> LimiterState {
    let layout = inp.grid.layout();
    let old = field_line(inp.prev, Axis::X, 0);
    let pred = field_line(predicted, Axis::X, 0);
    let courant: Vec<f64> = (0..layout.nx as isize)
        .map(|i| inp.courant.c_at(i, 0))
        .collect();
    let fixed: Vec<bool> = (0..layout.nx as isize)
        .map(|i| inp.is_fixed(i, 0))
        .collect();
    limit_line(
        &Line {
            old: &old,
            pred: &pred,
            courant: &courant,
            fixed: &fixed,
            ghost: layout.gx,
        },
        params,
    )
}

/// High-resolution corrector with limited slopes `l` (interior-indexed).
pub fn assemble_high_resolution(
    inp: &StepInputs,
    predicted: &Field,
    l: &[f64],
) -> Result<StencilSystem> {
    let layout = inp.grid.layout();
    inp.assemble(|i, j| {
        let c = inp.courant.c_at(i, j);
        let s = upwind_sign(c);
        let mut rel = LocalRelation::identity();
        if inp.has(i, j, (s, 0)) {
            add_high_resolution(
                &mut rel,
                Axis::X,
                c,
                l[layout.interior_idx(i, j)],
                predicted.get(i, j),
            );
        } else {
            add_second_order_fitted(inp, &mut rel, Axis::X, (i, j), c, 1.0);
        }
        rel
    })
}

/// Predictor, limiter and one corrector solve.
pub fn high_resolution_step(
    inp: &StepInputs,
    sweeps: usize,
    schedule: &SweepSchedule,
    params: LimiterParams,
) -> Result<(Field, LimiterState)> {
    let predicted = predict_step(inp, sweeps, schedule)?;
    let limiter = limiter_pipeline(inp, &predicted, params);
    let system = assemble_high_resolution(inp, &predicted, &limiter.l)?;
    let field = sweep_solve(&system, &inp.initial_guess(), sweeps, schedule)?;
    Ok((field, limiter))
}

/// Upwind differences `Phi_i - Phi_{i-1}` (forward `Phi_{i+1} - Phi_i` where
/// `C < 0`) at interior nodes of a 1D field.
pub fn backward_differences(field: &Field, courant: &[f64]) -> Vec<f64> {
    (0..field.layout.nx as isize)
        .map(|i| {
            if courant[i as usize] < 0.0 {
                field.get(i + 1, 0) - field.get(i, 0)
            } else {
                field.get(i, 0) - field.get(i - 1, 0)
            }
        })
        .collect()
}

/// Numerical flux of the conservative form of the second-order scheme for
/// positive velocity, evaluated at node `i` from differences `Psi`.
pub fn numerical_flux(
    u: f64,
    w: f64,
    psi_new: f64,
    psi_new_up: f64,
    psi_old: f64,
    psi_old_down: f64,
) -> f64 {
    u * (psi_new + 0.5 * ((1.0 - w) * (psi_old_down - psi_new) + w * (psi_old - psi_new_up)))
}
