//! Fast sweeping solver: Gauss-Seidel passes under alternating orderings.
//!
//! Compact upwind schemes give (block) triangular systems, so a pass in the
//! matching ordering solves a monotone-velocity system exactly. The pass count
//! is fixed by the caller; [`solve_to_tolerance`] exists for diagnostics.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{Dim, Field};
use crate::stencil::StencilSystem;

/// Traversal direction of one Gauss-Seidel pass. `j` (y) is the outer loop,
/// `i` (x) the inner one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ordering {
    pub i_forward: bool,
    pub j_forward: bool,
}

impl Ordering {
    pub const fn new(i_forward: bool, j_forward: bool) -> Self {
        Ordering {
            i_forward,
            j_forward,
        }
    }

    /// Visits every `(i, j)` of an `nx` by `ny` block in this ordering.
    #[inline]
    pub fn for_each(self, nx: usize, ny: usize, mut f: impl FnMut(usize, usize)) {
        for b in 0..ny {
            let j = if self.j_forward { b } else { ny - 1 - b };
            for a in 0..nx {
                let i = if self.i_forward { a } else { nx - 1 - a };
                f(i, j);
            }
        }
    }
}

/// Cyclic list of orderings used by successive passes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSchedule(Vec<Ordering>);

impl SweepSchedule {
    /// 1D: `i` up, `i` down. 2D, written (outer `j`, inner `i`): (up, up),
    /// (up, down), (down, down), (down, up).
    pub fn alternating(dim: Dim) -> Self {
        match dim {
            Dim::One => SweepSchedule(vec![Ordering::new(true, true), Ordering::new(false, true)]),
            Dim::Two => SweepSchedule(vec![
                Ordering::new(true, true),
                Ordering::new(false, true),
                Ordering::new(false, false),
                Ordering::new(true, false),
            ]),
        }
    }

    pub fn new(orderings: Vec<Ordering>) -> Self {
        assert!(!orderings.is_empty(), "empty sweep schedule");
        SweepSchedule(orderings)
    }

    pub fn single(ordering: Ordering) -> Self {
        SweepSchedule(vec![ordering])
    }

    pub fn ordering(&self, pass: usize) -> Ordering {
        self.0[pass % self.0.len()]
    }
}

fn check_diagonal(system: &StencilSystem) -> Result<()> {
    for row in 0..system.len() {
        let (diag, ..) = system.row_parts(row);
        if diag == 0.0 || !diag.is_finite() {
            return Err(Error::ZeroDiagonal { row });
        }
    }
    Ok(())
}

/// One Gauss-Seidel pass over all rows in the given ordering, in place.
pub fn gauss_seidel_pass(system: &StencilSystem, field: &mut Field, ordering: Ordering) {
    let layout = system.layout();
    let ny = layout.ny;
    ordering.for_each(layout.nx, ny, |i, j| {
        let (diag, rhs, cols, vals) = system.row_parts(i * ny + j);
        let mut acc = rhs;
        for (&c, &v) in cols.iter().zip(vals) {
            acc -= v * field.values[c];
        }
        field.values[layout.idx(i as isize, j as isize)] = acc / diag;
    });
}

/// Runs exactly `n_iters` passes starting from `initial` (ghost values are
/// carried over unchanged).
pub fn sweep_solve(
    system: &StencilSystem,
    initial: &Field,
    n_iters: usize,
    schedule: &SweepSchedule,
) -> Result<Field> {
    check_diagonal(system)?;
    let mut field = initial.clone();
    for pass in 0..n_iters {
        gauss_seidel_pass(system, &mut field, schedule.ordering(pass));
    }
    Ok(field)
}

/// Iterates until the residual drops below `tol` or `max_iters` passes ran.
/// Returns the field and the number of passes.
pub fn solve_to_tolerance(
    system: &StencilSystem,
    initial: &Field,
    tol: f64,
    max_iters: usize,
    schedule: &SweepSchedule,
) -> Result<(Field, usize)> {
    check_diagonal(system)?;
    let mut field = initial.clone();
    for pass in 0..max_iters {
        if residual_norm(system, &field) <= tol {
            return Ok((field, pass));
        }
        gauss_seidel_pass(system, &mut field, schedule.ordering(pass));
    }
    Ok((field, max_iters))
}

/// Max-norm of the row residuals `diag*x + sum(a*x) - rhs`.
pub fn residual_norm(system: &StencilSystem, field: &Field) -> f64 {
    let layout = system.layout();
    layout
        .interior_nodes()
        .map(|(i, j)| {
            let (diag, rhs, cols, vals) = system.row_parts(layout.interior_idx(i, j));
            let mut r = diag * field.get(i, j) - rhs;
            for (&c, &v) in cols.iter().zip(vals) {
                r += v * field.values[c];
            }
            r.abs()
        })
        .fold(0.0, f64::max)
}

/// Largest system the dense oracle accepts.
pub const DENSE_ORACLE_LIMIT: usize = 10_000;

/// Solves the system by dense LU factorization. Ghost values are copied from
/// `template`.
pub fn dense_oracle_solve(system: &StencilSystem, template: &Field) -> Result<Field> {
    let layout = system.layout();
    let n = system.len();
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::Oracle(format!(
            "{n} unknowns exceed the dense limit"
        )));
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for row in 0..n {
        let (diag, rhs, cols, vals) = system.row_parts(row);
        a[(row, row)] += diag;
        b[row] = rhs;
        for (&c, &v) in cols.iter().zip(vals) {
            let (ci, cj) = layout.node(c);
            a[(row, layout.interior_idx(ci, cj))] += v;
        }
    }
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Oracle("singular matrix".into()))?;
    let mut field = template.clone();
    for (i, j) in layout.interior_nodes() {
        field.set(i, j, x[layout.interior_idx(i, j)]);
    }
    Ok(field)
}
