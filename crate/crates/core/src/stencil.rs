//! Per-node linear relations and their assembly into a sparse system.
//!
//! A scheme describes node `p` by a [`LocalRelation`]
//!
//! ```text
//! sum_k implicit_k * Phi^n_{p+k} = sum_k explicit_k * Phi^{n-1}_{p+k} + source
//! ```
//!
//! The same relation feeds both the sweeping solver (after assembly) and the
//! frozen-coefficient stability analysis.

use arrayvec::ArrayVec;

use crate::error::{Error, Result};
use crate::grid::{CourantField, Field, Grid, Layout};

/// Node offset `(di, dj)`; 1D relations use `dj = 0`.
pub type Offset = (i32, i32);

const MAX_TERMS: usize = 16;

/// Coefficients keyed by offset; adding to an existing offset accumulates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Terms(ArrayVec<(Offset, f64), MAX_TERMS>);

impl Terms {
    pub fn add(&mut self, offset: Offset, coeff: f64) {
        if let Some(slot) = self.0.iter_mut().find(|(o, _)| *o == offset) {
            slot.1 += coeff;
        } else {
            self.0.push((offset, coeff));
        }
    }

    pub fn coeff(&self, offset: Offset) -> f64 {
        self.0
            .iter()
            .find(|(o, _)| *o == offset)
            .map_or(0.0, |(_, c)| *c)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Offset, f64)> + '_ {
        self.0.iter().copied()
    }

    /// Offsets carrying a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = Offset> + '_ {
        self.0.iter().filter(|(_, c)| *c != 0.0).map(|(o, _)| *o)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().map(|(_, c)| c).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocalRelation {
    /// Coefficients applied to the new time level.
    pub implicit: Terms,
    /// Coefficients applied to the previous time level (right-hand side).
    pub explicit: Terms,
    /// Additional right-hand side contribution (e.g. predictor values).
    pub source: f64,
}

impl LocalRelation {
    /// `Phi^n_p = Phi^{n-1}_p`
    pub fn identity() -> Self {
        let mut rel = LocalRelation::default();
        rel.implicit.add((0, 0), 1.0);
        rel.explicit.add((0, 0), 1.0);
        rel
    }

    /// Adds `coeff * Phi^n_{p+offset}` to the left-hand side.
    #[inline]
    pub fn lhs_new(&mut self, offset: Offset, coeff: f64) {
        self.implicit.add(offset, coeff);
    }

    /// Adds `coeff * Phi^{n-1}_{p+offset}` to the left-hand side.
    #[inline]
    pub fn lhs_old(&mut self, offset: Offset, coeff: f64) {
        self.explicit.add(offset, -coeff);
    }

    /// Adds `coeff * (Phi^n - Phi^{n-1})_{p+offset}` to the left-hand side.
    #[inline]
    pub fn lhs_increment(&mut self, offset: Offset, coeff: f64) {
        self.lhs_new(offset, coeff);
        self.lhs_old(offset, -coeff);
    }
}

/// Sparse linear system over the interior nodes of a grid.
///
/// Rows follow interior storage order. Off-diagonal columns are storage
/// indices into a [`Field`] of the same layout, so the solver can update a
/// field in place. Ghost values never appear as unknowns: they are folded into
/// the right-hand side during assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilSystem {
    layout: Layout,
    diag: Vec<f64>,
    rhs: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// One assembled row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowView {
    pub diag: f64,
    pub rhs: f64,
    /// Off-diagonal couplings as node offsets relative to the row node.
    pub entries: Vec<(Offset, f64)>,
}

impl StencilSystem {
    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    #[inline]
    pub(crate) fn row_parts(&self, row: usize) -> (f64, f64, &[usize], &[f64]) {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        (
            self.diag[row],
            self.rhs[row],
            &self.cols[range.clone()],
            &self.vals[range],
        )
    }

    /// Row of interior node `(i, j)`, with couplings expressed as offsets.
    pub fn row(&self, i: isize, j: isize) -> RowView {
        let row = self.layout.interior_idx(i, j);
        let (diag, rhs, cols, vals) = self.row_parts(row);
        let entries = cols
            .iter()
            .zip(vals)
            .map(|(&col, &v)| {
                let (ci, cj) = self.layout.node(col);
                (((ci - i) as i32, (cj - j) as i32), v)
            })
            .collect();
        RowView { diag, rhs, entries }
    }

    /// Identity system `Phi = rhs` (useful for tests and diagnostics).
    pub fn identity(layout: Layout, rhs: Vec<f64>) -> Self {
        assert_eq!(rhs.len(), layout.interior_len());
        StencilSystem {
            layout,
            diag: vec![1.0; rhs.len()],
            row_ptr: vec![0; rhs.len() + 1],
            rhs,
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }
}

/// Everything a scheme needs to assemble one time step.
#[derive(Debug, Clone, Copy)]
pub struct StepInputs<'a> {
    pub grid: &'a Grid,
    pub courant: &'a CourantField,
    /// `Phi^{n-1}`, ghosts included.
    pub prev: &'a Field,
    /// Prescribed values at `t^n`: ghost nodes and the nodes flagged in `fixed`.
    pub boundary: &'a Field,
    /// Inflow boundary nodes, indexed by [`Layout::interior_idx`].
    pub fixed: &'a [bool],
}

impl StepInputs<'_> {
    /// Initial guess for the sweeps: `Phi^{n-1}` at free nodes, prescribed
    /// values elsewhere.
    pub fn initial_guess(&self) -> Field {
        let layout = self.grid.layout();
        let mut guess = self.boundary.clone();
        for (i, j) in layout.interior_nodes() {
            if !self.fixed[layout.interior_idx(i, j)] {
                guess.set(i, j, self.prev.get(i, j));
            }
        }
        guess
    }

    #[inline]
    pub fn is_fixed(&self, i: isize, j: isize) -> bool {
        self.fixed[self.grid.layout().interior_idx(i, j)]
    }

    /// True when node `(i, j) + offset` exists (after periodic wrapping).
    #[inline]
    pub fn has(&self, i: isize, j: isize, (di, dj): Offset) -> bool {
        self.grid
            .layout()
            .contains(self.grid.wrap_i(i + di as isize), j + dj as isize)
    }

    /// Value of a node-based array at `(i, j) + offset` (after wrapping).
    #[inline]
    pub fn at(&self, values: &[f64], i: isize, j: isize, (di, dj): Offset) -> f64 {
        values[self
            .grid
            .layout()
            .idx(self.grid.wrap_i(i + di as isize), j + dj as isize)]
    }

    pub fn assemble<F>(&self, local: F) -> Result<StencilSystem>
    where
        F: FnMut(isize, isize) -> LocalRelation,
    {
        assemble(self.grid, self.prev, self.boundary, self.fixed, local)
    }
}

/// Assembles the system for one time step.
///
/// * `prev` holds `Phi^{n-1}` (ghosts included).
/// * `next` holds the prescribed values at `t^n`: ghosts and the nodes marked
///   in `fixed` (inflow boundary nodes, indexed by [`Layout::interior_idx`]).
/// * `local(i, j)` yields the scheme relation at an unfixed interior node.
pub fn assemble<F>(
    grid: &Grid,
    prev: &Field,
    next: &Field,
    fixed: &[bool],
    mut local: F,
) -> Result<StencilSystem>
where
    F: FnMut(isize, isize) -> LocalRelation,
{
    let layout = grid.layout();
    let n = layout.interior_len();
    let mut sys = StencilSystem {
        layout,
        diag: Vec::with_capacity(n),
        rhs: Vec::with_capacity(n),
        row_ptr: Vec::with_capacity(n + 1),
        cols: Vec::with_capacity(5 * n),
        vals: Vec::with_capacity(5 * n),
    };
    sys.row_ptr.push(0);

    let locate = |i: isize, j: isize, (di, dj): Offset| -> Result<(isize, isize)> {
        let ti = grid.wrap_i(i + di as isize);
        let tj = j + dj as isize;
        if layout.contains(ti, tj) {
            Ok((ti, tj))
        } else {
            Err(Error::StencilOutOfRange { i, j, di, dj })
        }
    };

    for (i, j) in layout.interior_nodes() {
        if fixed[layout.interior_idx(i, j)] {
            sys.diag.push(1.0);
            sys.rhs.push(next.get(i, j));
            sys.row_ptr.push(sys.cols.len());
            continue;
        }
        let rel = local(i, j);
        let mut rhs = rel.source;
        for (off, coeff) in rel.explicit.iter() {
            if coeff != 0.0 {
                let (ti, tj) = locate(i, j, off)?;
                rhs += coeff * prev.get(ti, tj);
            }
        }
        let mut diag = 0.0;
        for (off, coeff) in rel.implicit.iter() {
            if coeff == 0.0 {
                continue;
            }
            let (ti, tj) = locate(i, j, off)?;
            if (ti, tj) == (i, j) {
                diag += coeff;
            } else if layout.is_interior(ti, tj) {
                sys.cols.push(layout.idx(ti, tj));
                sys.vals.push(coeff);
            } else {
                rhs -= coeff * next.get(ti, tj);
            }
        }
        sys.diag.push(diag);
        sys.rhs.push(rhs);
        sys.row_ptr.push(sys.cols.len());
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, Dim, GridSpec};

    #[test]
    fn terms_accumulate_by_offset() {
        let mut t = Terms::default();
        t.add((1, 0), 2.0);
        t.add((0, 0), 1.0);
        t.add((1, 0), -0.5);
        assert_eq!(t.coeff((1, 0)), 1.5);
        assert_eq!(t.coeff((5, 5)), 0.0);
        assert_eq!(t.sum(), 2.5);
    }

    #[test]
    fn ghost_couplings_fold_into_rhs() {
        let g = build_grid(GridSpec::on_interval(Dim::One, 0.0, 1.0, 3, 2, 1.0, 1)).unwrap();
        let prev = g.sample(|p| p[0]);
        let mut next = g.sample(|_| 0.0);
        next.set(-1, 0, 7.0);
        let fixed = vec![false; 4];
        let sys = assemble(&g, &prev, &next, &fixed, |_, _| {
            let mut rel = LocalRelation::identity();
            rel.lhs_new((-1, 0), -0.5);
            rel.lhs_new((0, 0), 0.5);
            rel
        })
        .unwrap();
        let row0 = sys.row(0, 0);
        assert_eq!(row0.diag, 1.5);
        assert!(row0.entries.is_empty());
        assert_eq!(row0.rhs, 0.0 + 0.5 * 7.0);
        let row2 = sys.row(2, 0);
        assert_eq!(row2.entries, vec![((-1, 0), -0.5)]);
    }

    #[test]
    fn out_of_range_offset_is_reported() {
        let g = build_grid(GridSpec::on_interval(Dim::One, 0.0, 1.0, 3, 1, 1.0, 1)).unwrap();
        let f = g.sample(|_| 0.0);
        let err = assemble(&g, &f, &f, &[false; 4], |_, _| {
            let mut rel = LocalRelation::identity();
            rel.lhs_old((-2, 0), 1.0);
            rel
        });
        assert!(matches!(
            err,
            Err(Error::StencilOutOfRange { i: 0, di: -2, .. })
        ));
    }
}
