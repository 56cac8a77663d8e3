//! Two-dimensional schemes: dimension-by-dimension terms plus the mixed
//! corrections of the third-order scheme.
//!
//! First-index shifts follow `sx = sgn(C_ij)`, second-index shifts follow
//! `sy = sgn(D_ij)`, so every implicit offset lies in the upwind quadrant.

use crate::error::Result;
use crate::grid::Field;
use crate::schemes_1d::{
    add_high_resolution, add_second_order, add_second_order_fitted, add_third_order, courant_at,
    field_line, limit_line, preferred_weight, upwind_sign, Axis, LimiterParams, LimiterState, Line,
    Weight,
};
use crate::stencil::{LocalRelation, StencilSystem, StepInputs};
use crate::sweep::{sweep_solve, SweepSchedule};

/// Which Courant sample multiplies the far term of the `|D|`-weighted mixed
/// correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossTermVariant {
    /// `C_{i, j-sy}`: the x/y mirror image of the `|C|`-weighted correction.
    #[default]
    Symmetric,
    /// `C_{i-sx, j}`, the literal subscript of the published formula.
    AsPrinted,
}

/// Adds the mixed corrections of the third-order scheme. `c_left = C_{i-sx,j}`,
/// `d_left = D_{i-sx,j}`, `c_far` is `C_{i,j-sy}` or `C_{i-sx,j}` depending
/// on the variant.
pub fn add_cross_terms(rel: &mut LocalRelation, c: f64, d: f64, d_left: f64, c_far: f64) {
    let sx = upwind_sign(c);
    let sy = upwind_sign(d);
    let at = |a: i32, b: i32| (a * sx, b * sy);

    // sgn(D)|C|/12 ( D_ij (P_ij - P_{i,j-sy} - O_ij + O_{i,j-sy})
    //              - D_{i-sx,j} (P_{i-sx,j} - P_{i-sx,j-sy} - O_{i-sx,j} + O_{i-sx,j-sy}) )
    let kx = sy as f64 * c.abs() / 12.0;
    rel.lhs_increment(at(0, 0), kx * d);
    rel.lhs_increment(at(0, -1), -kx * d);
    rel.lhs_increment(at(-1, 0), -kx * d_left);
    rel.lhs_increment(at(-1, -1), kx * d_left);

    // sgn(C)|D|/12 ( C_ij (P_ij - P_{i-sx,j} - O_ij + O_{i-sx,j})
    //              - C_far (P_{i,j-sy} - P_{i-sx,j-sy} - O_{i,j-sy} + O_{i-sx,j-sy}) )
    let ky = sx as f64 * d.abs() / 12.0;
    rel.lhs_increment(at(0, 0), ky * c);
    rel.lhs_increment(at(-1, 0), -ky * c);
    rel.lhs_increment(at(0, -1), -ky * c_far);
    rel.lhs_increment(at(-1, -1), ky * c_far);
}

pub fn second_order_relation_2d(c: f64, d: f64, wx: f64, wy: f64) -> LocalRelation {
    let mut rel = LocalRelation::identity();
    add_second_order(&mut rel, Axis::X, c, wx);
    add_second_order(&mut rel, Axis::Y, d, wy);
    rel
}

/// Third-order relation for constant Courant numbers.
pub fn third_order_relation_2d(c: f64, d: f64) -> LocalRelation {
    let mut rel = LocalRelation::identity();
    add_third_order(&mut rel, Axis::X, c, c);
    add_third_order(&mut rel, Axis::Y, d, d);
    add_cross_terms(&mut rel, c, d, d, c);
    rel
}

pub fn high_resolution_relation_2d(
    c: f64,
    d: f64,
    lx: f64,
    ly: f64,
    predicted: f64,
) -> LocalRelation {
    let mut rel = LocalRelation::identity();
    add_high_resolution(&mut rel, Axis::X, c, lx, predicted);
    add_high_resolution(&mut rel, Axis::Y, d, ly, predicted);
    rel
}

/// Second-order scheme with independent weights per axis.
pub fn assemble_second_order_2d(inp: &StepInputs, wx: Weight, wy: Weight) -> Result<StencilSystem> {
    inp.assemble(|i, j| {
        let c = inp.courant.c_at(i, j);
        let d = inp.courant.d_at(i, j);
        let mut rel = LocalRelation::identity();
        add_second_order_fitted(inp, &mut rel, Axis::X, (i, j), c, wx.at(c));
        add_second_order_fitted(inp, &mut rel, Axis::Y, (i, j), d, wy.at(d));
        rel
    })
}

/// Third-order scheme with mixed corrections.
pub fn assemble_third_order_2d(
    inp: &StepInputs,
    variant: CrossTermVariant,
) -> Result<StencilSystem> {
    inp.assemble(|i, j| {
        let c = inp.courant.c_at(i, j);
        let d = inp.courant.d_at(i, j);
        let (sx, sy) = (upwind_sign(c), upwind_sign(d));
        let fits = inp.has(i, j, (-2 * sx, -2 * sy)) && inp.has(i, j, (sx, sy));
        let mut rel = LocalRelation::identity();
        if !fits {
            add_second_order_fitted(inp, &mut rel, Axis::X, (i, j), c, preferred_weight(c));
            add_second_order_fitted(inp, &mut rel, Axis::Y, (i, j), d, preferred_weight(d));
            return rel;
        }
        let cc = &inp.courant.c;
        let dd = &inp.courant.d;
        let c_left = courant_at(inp, cc, i, j, (-sx, 0), c);
        let d_left = courant_at(inp, dd, i, j, (-sx, 0), d);
        let d_down = courant_at(inp, dd, i, j, (0, -sy), d);
        let c_far = match variant {
            CrossTermVariant::Symmetric => courant_at(inp, cc, i, j, (0, -sy), c),
            CrossTermVariant::AsPrinted => c_left,
        };
        add_third_order(&mut rel, Axis::X, c, c_left);
        add_third_order(&mut rel, Axis::Y, d, d_down);
        add_cross_terms(&mut rel, c, d, d_left, c_far);
        rel
    })
}

/// Predictor of the 2D corrector: preferred weights on both axes.
pub fn predict_step_2d(inp: &StepInputs, sweeps: usize, schedule: &SweepSchedule) -> Result<Field> {
    let system = assemble_second_order_2d(inp, Weight::Preferred, Weight::Preferred)?;
    sweep_solve(&system, &inp.initial_guess(), sweeps, schedule)
}

/// Limited slopes of a 2D step, computed line by line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Limiter2d {
    /// One state per x-line (fixed `j`), indexed by `i`.
    pub x_lines: Vec<LimiterState>,
    /// One state per y-line (fixed `i`), indexed by `j`.
    pub y_lines: Vec<LimiterState>,
}

impl Limiter2d {
    pub fn lx(&self, i: isize, j: isize) -> f64 {
        self.x_lines[j as usize].l[i as usize]
    }

    pub fn ly(&self, i: isize, j: isize) -> f64 {
        self.y_lines[i as usize].l[j as usize]
    }
}

pub fn limiter_pipeline_2d(
    inp: &StepInputs,
    predicted: &Field,
    params: LimiterParams,
) -> Limiter2d {
    let layout = inp.grid.layout();
    let (nx, ny) = (layout.nx as isize, layout.ny as isize);
    let x_lines = (0..ny)
        .map(|j| {
            let old = field_line(inp.prev, Axis::X, j);
            let pred = field_line(predicted, Axis::X, j);
            let courant: Vec<f64> = (0..nx).map(|i| inp.courant.c_at(i, j)).collect();
            let fixed: Vec<bool> = (0..nx).map(|i| inp.is_fixed(i, j)).collect();
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
        })
        .collect();
    let y_lines = (0..nx)
        .map(|i| {
            let old = field_line(inp.prev, Axis::Y, i);
            let pred = field_line(predicted, Axis::Y, i);
            let courant: Vec<f64> = (0..ny).map(|j| inp.courant.d_at(i, j)).collect();
            let fixed: Vec<bool> = (0..ny).map(|j| inp.is_fixed(i, j)).collect();
            limit_line(
                &Line {
                    old: &old,
                    pred: &pred,
                    courant: &courant,
                    fixed: &fixed,
                    ghost: layout.gy,
                },
                params,
            )
        })
        .collect();
    Limiter2d { x_lines, y_lines }
}

/// High-resolution corrector; both directional corrections share the predictor.
pub fn assemble_high_resolution_2d(
    inp: &StepInputs,
    predicted: &Field,
    limiter: &Limiter2d,
) -> Result<StencilSystem> {
    inp.assemble(|i, j| {
        let c = inp.courant.c_at(i, j);
        let d = inp.courant.d_at(i, j);
        let q = predicted.get(i, j);
        let mut rel = LocalRelation::identity();
        if inp.has(i, j, (upwind_sign(c), 0)) {
            add_high_resolution(&mut rel, Axis::X, c, limiter.lx(i, j), q);
        } else {
            add_second_order_fitted(inp, &mut rel, Axis::X, (i, j), c, 1.0);
        }
        if inp.has(i, j, (0, upwind_sign(d))) {
            add_high_resolution(&mut rel, Axis::Y, d, limiter.ly(i, j), q);
        } else {
            add_second_order_fitted(inp, &mut rel, Axis::Y, (i, j), d, 1.0);
        }
        rel
    })
}

pub fn high_resolution_step_2d(
    inp: &StepInputs,
    sweeps: usize,
    schedule: &SweepSchedule,
    params: LimiterParams,
) -> Result<(Field, Limiter2d)> {
    let predicted = predict_step_2d(inp, sweeps, schedule)?;
    let limiter = limiter_pipeline_2d(inp, &predicted, params);
    let system = assemble_high_resolution_2d(inp, &predicted, &limiter)?;
    let field = sweep_solve(&system, &inp.initial_guess(), sweeps, schedule)?;
    Ok((field, limiter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes_1d::{second_order_relation, third_order_relation};

    #[test]
    fn zero_courant_is_identity() {
        for rel in [
            second_order_relation_2d(0.0, 0.0, 0.5, 0.5),
            third_order_relation_2d(0.0, 0.0),
            high_resolution_relation_2d(0.0, 0.0, 1.0, 1.0, 3.0),
        ] {
            assert_eq!(rel.implicit.coeff((0, 0)), 1.0);
            assert!(rel.implicit.iter().all(|(o, c)| o == (0, 0) || c == 0.0));
            assert!(rel.explicit.iter().all(|(o, c)| o == (0, 0) || c == 0.0));
        }
    }

    #[test]
    fn quadrant_compactness() {
        for (c, d) in [(3.0, 2.0), (-3.0, 2.0), (3.0, -2.0), (-3.0, -2.0)] {
            let (sx, sy) = (upwind_sign(c), upwind_sign(d));
            for rel in [
                third_order_relation_2d(c, d),
                second_order_relation_2d(c, d, 0.5, 0.7),
            ] {
                for (di, dj) in rel.implicit.support() {
                    assert!([0, -sx, -2 * sx].contains(&di), "({di},{dj}) for ({c},{d})");
                    assert!([0, -sy, -2 * sy].contains(&dj), "({di},{dj}) for ({c},{d})");
                }
                assert!(rel.implicit.coeff((0, 0)) >= 1.0);
            }
            let third = third_order_relation_2d(c, d);
            assert!(third.implicit.coeff((-sx, -sy)) != 0.0);
        }
    }

    #[test]
    fn zero_vertical_velocity_reduces_to_1d() {
        for c in [-4.0, 0.7, 9.0] {
            let pairs = [
                (third_order_relation_2d(c, 0.0), third_order_relation(c, c)),
                (
                    second_order_relation_2d(c, 0.0, 0.3, 0.9),
                    second_order_relation(c, 0.3),
                ),
            ];
            for (two, one) in pairs {
                for (off, v) in two.implicit.iter() {
                    assert!((v - one.implicit.coeff(off)).abs() < 1e-15, "{off:?}");
                }
                for (off, v) in two.explicit.iter() {
                    assert!((v - one.explicit.coeff(off)).abs() < 1e-15, "{off:?}");
                }
            }
        }
    }

    #[test]
    fn cross_terms_are_consistent() {
        let mut rel = LocalRelation::default();
        add_cross_terms(&mut rel, 2.0, -3.0, -2.5, 1.5);
        assert!(rel.implicit.sum().abs() < 1e-15);
        assert!(rel.explicit.sum().abs() < 1e-15);
        for (off, v) in rel.implicit.iter() {
            assert_eq!(rel.explicit.coeff(off), v);
        }
    }

    #[test]
    fn swapping_axes_maps_third_order_onto_itself() {
        let (c, d) = (2.5, -1.5);
        let a = third_order_relation_2d(c, d);
        let b = third_order_relation_2d(d, c);
        for ((di, dj), v) in a.implicit.iter() {
            assert!((b.implicit.coeff((dj, di)) - v).abs() < 1e-14);
        }
        for ((di, dj), v) in a.explicit.iter() {
            assert!((b.explicit.coeff((dj, di)) - v).abs() < 1e-14);
        }
    }
}
