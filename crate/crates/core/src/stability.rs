//! Von Neumann analysis of the constant-coefficient schemes.
//!
//! The frozen relation is produced by the same term builders the assemblers
//! use, so the symbol `g = b / a` with
//! `a = sum implicit e^{i(di t1 + dj t2)}` and `b = sum explicit e^{...}` always
//! describes the scheme that is actually solved.
//!
//! Scans cover non-negative Courant numbers only: flipping the sign of `C`
//! mirrors the stencil and maps `g(t1)` to `g(-t1)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Dim;
use crate::schemes_1d::{add_high_resolution, add_second_order, add_third_order, Axis, Weight};
use crate::schemes_2d::add_cross_terms;
use crate::stencil::{LocalRelation, Offset};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeKind {
    /// Implicit first-order upwind (closed limiter).
    FirstOrder,
    /// Parametric second-order scheme.
    SecondOrder(Weight),
    /// High-resolution scheme with a frozen slope and the prediction replaced
    /// by the new level.
    HighResolution(f64),
    ThirdOrder,
}

/// A scheme with constant Courant numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenStencil {
    pub kind: SchemeKind,
    pub dim: Dim,
}

impl FrozenStencil {
    pub fn new(kind: SchemeKind, dim: Dim) -> Self {
        FrozenStencil { kind, dim }
    }

    /// The local relation at an interior node for constant `(C, D)`.
    /// `d` is ignored in 1D.
    pub fn relation(&self, c: f64, d: f64) -> LocalRelation {
        let mut rel = LocalRelation::identity();
        let axes: &[(Axis, f64)] = match self.dim {
            Dim::One => &[(Axis::X, c)],
            Dim::Two => &[(Axis::X, c), (Axis::Y, d)],
        };
        for &(axis, v) in axes {
            match self.kind {
                SchemeKind::FirstOrder => add_high_resolution(&mut rel, axis, v, 0.0, 0.0),
                SchemeKind::SecondOrder(w) => add_second_order(&mut rel, axis, v, w.at(v)),
                SchemeKind::HighResolution(l) => {
                    add_high_resolution(&mut rel, axis, v, l, 0.0);
                    rel.lhs_new((0, 0), -0.5 * v.abs() * l);
                }
                SchemeKind::ThirdOrder => add_third_order(&mut rel, axis, v, v),
            }
        }
        if self.dim == Dim::Two && self.kind == SchemeKind::ThirdOrder {
            add_cross_terms(&mut rel, c, d, d, c);
        }
        rel
    }

    fn symbol(&self, c: f64, d: f64) -> Symbol {
        Symbol::new(&self.relation(c, d))
    }
}

/// Coefficients of `b - a` and `b + a` grouped by offset.
struct Symbol {
    diff: Vec<(Offset, f64)>,
    sum: Vec<(Offset, f64)>,
    /// `b - a` at `theta = 0`; round-off level residuals of consistent
    /// schemes are dropped.
    residual: f64,
}

impl Symbol {
    fn new(rel: &LocalRelation) -> Self {
        let mut offsets: Vec<Offset> = rel
            .implicit
            .iter()
            .chain(rel.explicit.iter())
            .map(|(o, _)| o)
            .collect();
        offsets.sort_unstable();
        offsets.dedup();
        let diff: Vec<(Offset, f64)> = offsets
            .iter()
            .map(|&o| (o, rel.explicit.coeff(o) - rel.implicit.coeff(o)))
            .filter(|(_, v)| *v != 0.0)
            .collect();
        let sum = offsets
            .iter()
            .map(|&o| (o, rel.explicit.coeff(o) + rel.implicit.coeff(o)))
            .filter(|(_, v)| *v != 0.0)
            .collect::<Vec<_>>();
        let residual: f64 = diff.iter().map(|(_, v)| v).sum();
        let scale: f64 = diff.iter().map(|(_, v)| v.abs()).sum();
        let residual = if residual.abs() <= 1e-12 * scale {
            0.0
        } else {
            residual
        };
        Symbol {
            diff,
            sum,
            residual,
        }
    }

    /// `(b - a, b + a)`. The difference uses `e^{ix} - 1` in a cancellation
    /// free form so that `|g|^2 - 1` stays accurate at low frequencies of
    /// consistent schemes.
    fn eval(&self, t1: f64, t2: f64) -> (Complex64, Complex64) {
        let phase = |(di, dj): Offset| di as f64 * t1 + dj as f64 * t2;
        let mut diff = Complex64::new(0.0, 0.0);
        for &(o, v) in &self.diff {
            let x = phase(o);
            let s = (0.5 * x).sin();
            diff += v * Complex64::new(-2.0 * s * s, x.sin());
        }
        diff += self.residual;
        let mut sum = Complex64::new(0.0, 0.0);
        for &(o, v) in &self.sum {
            sum += v * Complex64::from_polar(1.0, phase(o));
        }
        (diff, sum)
    }

    fn amplification(&self, t1: f64, t2: f64) -> Option<Complex64> {
        let (diff, sum) = self.eval(t1, t2);
        let a = 0.5 * (sum - diff);
        let b = 0.5 * (sum + diff);
        (a.norm() > DEGENERATE_TOL).then(|| b / a)
    }

    /// `|g|^2 - 1`, or `None` for a degenerate symbol.
    fn excess(&self, t1: f64, t2: f64) -> Option<f64> {
        let (diff, sum) = self.eval(t1, t2);
        let a = 0.5 * (sum - diff);
        let a2 = a.norm_sqr();
        (a.norm() > DEGENERATE_TOL).then(|| (diff * sum.conj()).re / a2)
    }
}

const DEGENERATE_TOL: f64 = 1e-12;

/// `g(theta)` for constant Courant numbers; `d` and `theta2` are ignored in 1D.
pub fn amplification_factor(
    stencil: &FrozenStencil,
    c: f64,
    d: f64,
    theta1: f64,
    theta2: f64,
) -> Result<Complex64> {
    let (d, theta2) = match stencil.dim {
        Dim::One => (0.0, 0.0),
        Dim::Two => (d, theta2),
    };
    stencil
        .symbol(c, d)
        .amplification(theta1, theta2)
        .ok_or(Error::DegenerateSymbol {
            c,
            d,
            theta1,
            theta2,
        })
}

/// Sampling of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub c_min: f64,
    pub c_max: f64,
    /// Courant samples per axis, logarithmic in `[c_min, c_max]`.
    pub courant_samples: usize,
    /// Frequency samples per axis on `(-pi, pi]`.
    pub theta_samples: usize,
    pub refine_rounds: usize,
    /// Window shrink factor per refinement round.
    pub shrink: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            c_min: 1e-2,
            c_max: 1e2,
            courant_samples: 48,
            theta_samples: 512,
            refine_rounds: 4,
            shrink: 8.0,
        }
    }
}

impl ScanConfig {
    pub fn up_to(c_max: f64) -> Self {
        ScanConfig {
            c_max,
            ..Default::default()
        }
    }

    fn courant_grid(&self) -> Vec<f64> {
        if self.c_max <= 0.0 {
            return vec![0.0];
        }
        let lo = self.c_min.min(self.c_max);
        let n = self.courant_samples.max(1);
        if n == 1 || lo == self.c_max {
            return vec![self.c_max];
        }
        let (a, b) = (lo.ln(), self.c_max.ln());
        (0..n)
            .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
            .collect()
    }

    fn theta_grid(&self) -> Vec<f64> {
        let n = self.theta_samples.max(1);
        let pi = std::f64::consts::PI;
        (1..=n)
            .map(|k| -pi + 2.0 * pi * k as f64 / n as f64)
            .collect()
    }
}

/// Maximum of `|g|` over frequencies at one Courant sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub c: f64,
    pub d: f64,
    pub max_abs_g: f64,
    pub theta1: f64,
    pub theta2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationReport {
    pub stencil: FrozenStencil,
    pub config: ScanConfig,
    /// Coarse per-sample maxima in scan order (`C` outer, `D` inner).
    pub rows: Vec<ScanRow>,
    /// Refined global maximum and where it is attained.
    pub max: ScanRow,
    /// Global maximum after the coarse scan and after each refinement round.
    pub history: Vec<f64>,
}

impl AmplificationReport {
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "C,D,max_abs_g,theta1,theta2")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.c, r.d, r.max_abs_g, r.theta1, r.theta2
            )?;
        }
        let m = self.max;
        writeln!(
            out,
            "# max,{},{},{},{},{}",
            m.c, m.d, m.max_abs_g, m.theta1, m.theta2
        )
    }
}

/// Scores `|g|^2 - 1` (optionally divided by `min(1, |theta|^2)^2`) over a
/// frequency grid; returns the best `(score, t1, t2)`, first index winning ties.
fn best_on_grid(
    sym: &Symbol,
    t1s: &[f64],
    t2s: &[f64],
    score: impl Fn(f64, f64, f64) -> Option<f64>,
    (c, d): (f64, f64),
) -> Result<(f64, f64, f64)> {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for &t1 in t1s {
        for &t2 in t2s {
            let e = sym.excess(t1, t2).ok_or(Error::DegenerateSymbol {
                c,
                d,
                theta1: t1,
                theta2: t2,
            })?;
            if let Some(s) = score(e, t1, t2) {
                if s > best.0 {
                    best = (s, t1, t2);
                }
            }
        }
    }
    Ok(best)
}

fn best_on_points(
    sym: &Symbol,
    points: &[(f64, f64)],
    score: impl Fn(f64, f64, f64) -> Option<f64>,
    (c, d): (f64, f64),
) -> Result<(f64, f64, f64)> {
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for &(t1, t2) in points {
        let e = sym.excess(t1, t2).ok_or(Error::DegenerateSymbol {
            c,
            d,
            theta1: t1,
            theta2: t2,
        })?;
        if let Some(s) = score(e, t1, t2) {
            if s > best.0 {
                best = (s, t1, t2);
            }
        }
    }
    Ok(best)
}

/// Frequencies on a log-polar grid: `n` radii from `floor` to `pi` (`pi * sqrt(2)`
/// in 2D) times `n` directions over a half plane, which conjugate symmetry
/// extends to all directions.
fn polar_points(n: usize, floor: f64, two_d: bool) -> Vec<(f64, f64)> {
    let pi = std::f64::consts::PI;
    let top = if two_d {
        pi * std::f64::consts::SQRT_2
    } else {
        pi
    };
    let n = n.max(2);
    let radii: Vec<f64> = (0..n)
        .map(|k| floor * (top / floor).powf(k as f64 / (n - 1) as f64))
        .collect();
    if !two_d {
        return radii.into_iter().map(|r| (r, 0.0)).collect();
    }
    radii
        .iter()
        .flat_map(|&r| {
            (0..n).map(move |k| {
                let a = pi * k as f64 / n as f64;
                (r * a.cos(), r * a.sin())
            })
        })
        .collect()
}

fn raw_score(e: f64, _: f64, _: f64) -> Option<f64> {
    Some(e)
}

fn window(center: f64, half: f64, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    if m == 0 || half == 0.0 {
        return vec![center];
    }
    let mut v: Vec<f64> = (0..=2 * m)
        .map(|k| (center + half * (k as f64 - m as f64) / m as f64).clamp(lo, hi))
        .collect();
    v.dedup();
    v
}

/// Zooms a `(C, D, theta1, theta2)` window around the running argmax,
/// shrinking it after every round.
#[allow(clippy::too_many_arguments)]
fn refine<F>(
    stencil: &FrozenStencil,
    start: (f64, f64, f64, f64),
    start_score: f64,
    courant_half: f64,
    theta_half: f64,
    bounds: [(f64, f64); 2],
    rounds: usize,
    shrink: f64,
    score: F,
    mut on_round: impl FnMut(f64),
) -> Result<(f64, (f64, f64, f64, f64))>
where
    F: Fn(f64, f64, f64) -> Option<f64> + Sync,
{
    let pi = std::f64::consts::PI;
    let two_d = stencil.dim == Dim::Two;
    let (mut best_score, mut best) = (start_score, start);
    let (mut ch, mut th) = (courant_half, theta_half);
    let m = 4;
    for _ in 0..rounds {
        let (c0, d0, t10, t20) = best;
        let cs = window(c0, ch, m, bounds[0].0, bounds[0].1);
        let ds = if two_d {
            window(d0, ch, m, bounds[1].0, bounds[1].1)
        } else {
            vec![0.0]
        };
        let t1s = window(t10, th, m, -pi, pi);
        let t2s = if two_d {
            window(t20, th, m, -pi, pi)
        } else {
            vec![0.0]
        };
        let pairs: Vec<(f64, f64)> = cs
            .iter()
            .flat_map(|&c| ds.iter().map(move |&d| (c, d)))
            .collect();
        let results: Vec<Result<(f64, f64, f64)>> = pairs
            .par_iter()
            .map(|&(c, d)| best_on_grid(&stencil.symbol(c, d), &t1s, &t2s, &score, (c, d)))
            .collect();
        for (&(c, d), r) in pairs.iter().zip(results) {
            let (s, t1, t2) = r?;
            if s > best_score {
                best_score = s;
                best = (c, d, t1, t2);
            }
        }
        on_round(best_score);
        ch /= shrink;
        th /= shrink;
    }
    Ok((best_score, best))
}

fn to_abs_g(excess: f64) -> f64 {
    (1.0 + excess).max(0.0).sqrt()
}

/// Coarse scan over Courant samples and frequencies, then local refinement
/// around the running argmax.
pub fn scan_max_magnitude(
    stencil: &FrozenStencil,
    config: &ScanConfig,
) -> Result<AmplificationReport> {
    let two_d = stencil.dim == Dim::Two;
    let cs = config.courant_grid();
    let thetas = config.theta_grid();
    let t2s = if two_d { thetas.clone() } else { vec![0.0] };
    let pairs: Vec<(f64, f64)> = if two_d {
        cs.iter()
            .flat_map(|&c| cs.iter().map(move |&d| (c, d)))
            .collect()
    } else {
        cs.iter().map(|&c| (c, 0.0)).collect()
    };

    let results: Vec<Result<(f64, f64, f64)>> = pairs
        .par_iter()
        .map(|&(c, d)| best_on_grid(&stencil.symbol(c, d), &thetas, &t2s, raw_score, (c, d)))
        .collect();
    let mut rows = Vec::with_capacity(pairs.len());
    let mut best = (f64::NEG_INFINITY, (0.0, 0.0, 0.0, 0.0));
    for (&(c, d), r) in pairs.iter().zip(results) {
        let (s, t1, t2) = r?;
        rows.push(ScanRow {
            c,
            d,
            max_abs_g: to_abs_g(s),
            theta1: t1,
            theta2: t2,
        });
        if s > best.0 {
            best = (s, (c, d, t1, t2));
        }
    }

    let mut history = vec![to_abs_g(best.0)];
    if config.c_max > 0.0 {
        // Courant window: spacing of the log grid next to the argmax.
        let k = cs.iter().position(|&c| c == best.1 .0).unwrap_or(0);
        let courant_half = match (cs.get(k + 1), k.checked_sub(1).map(|p| cs[p])) {
            (Some(next), _) => next - cs[k],
            (None, Some(prev)) => cs[k] - prev,
            (None, None) => 0.0,
        };
        let theta_half = 2.0 * std::f64::consts::PI / thetas.len() as f64;
        let lo = config.c_min.min(config.c_max);
        best = refine(
            stencil,
            best.1,
            best.0,
            courant_half,
            theta_half,
            [(lo, config.c_max); 2],
            config.refine_rounds,
            config.shrink,
            raw_score,
            |s| history.push(to_abs_g(s)),
        )?;
    }
    let (c, d, t1, t2) = best.1;
    Ok(AmplificationReport {
        stencil: *stencil,
        config: config.clone(),
        rows,
        max: ScanRow {
            c,
            d,
            max_abs_g: to_abs_g(best.0),
            theta1: t1,
            theta2: t2,
        },
        history,
    })
}

/// Settings of the instability-onset search.
#[derive(Debug, Clone, PartialEq)]
pub struct OnsetConfig {
    /// Courant samples along each edge.
    pub courant_samples: usize,
    pub theta_samples: usize,
    pub refine_rounds: usize,
    /// Frequencies with `|theta|` below this are skipped (round-off floor of
    /// the low-frequency score).
    pub theta_floor: f64,
    /// A box counts as unstable when the normalized excess exceeds this.
    pub tolerance: f64,
    /// Width of the final bracket.
    pub bracket: f64,
    /// Box sizes probed before bisection.
    pub scan_samples: usize,
}

impl Default for OnsetConfig {
    fn default() -> Self {
        OnsetConfig {
            courant_samples: 24,
            theta_samples: 64,
            refine_rounds: 5,
            theta_floor: 1e-2,
            tolerance: 1e-9,
            bracket: 1e-4,
            scan_samples: 64,
        }
    }
}

/// Largest normalized excess `(|g|^2 - 1) / min(1, |theta|^2)^2` over the
/// edge `max(|C|, |D|) = c` of the Courant box, with the location where it is
/// attained. The normalization keeps the low-frequency part of the symbol
/// visible, where instability of consistent schemes first appears.
pub fn edge_excess(
    stencil: &FrozenStencil,
    c: f64,
    config: &OnsetConfig,
) -> Result<(f64, (f64, f64, f64, f64))> {
    let two_d = stencil.dim == Dim::Two;
    let pi = std::f64::consts::PI;
    let floor = config.theta_floor;
    let score = move |e: f64, t1: f64, t2: f64| {
        let r2 = t1 * t1 + t2 * t2;
        (r2 >= floor * floor).then(|| e / r2.min(1.0).powi(2))
    };
    let n = config.courant_samples.max(1);
    let nt = config.theta_samples.max(1);
    let points = polar_points(nt, floor, two_d);
    // Axis-parallel configurations are 1D schemes and are scanned as such.
    let along: Vec<f64> = (1..=n).map(|k| c * k as f64 / n as f64).collect();
    let edges: Vec<[(f64, f64); 2]> = if two_d {
        vec![[(0.0, c), (c, c)], [(c, c), (0.0, c)]]
    } else {
        vec![[(c, c), (0.0, 0.0)]]
    };

    let mut best = (f64::NEG_INFINITY, (c, 0.0, 0.0, 0.0));
    for bounds in edges {
        let pairs: Vec<(f64, f64)> = match (two_d, bounds[0].0 == bounds[0].1) {
            (false, _) => vec![(c, 0.0)],
            (true, true) => along.iter().map(|&d| (c, d)).collect(),
            (true, false) => along.iter().map(|&a| (a, c)).collect(),
        };
        let results: Vec<Result<(f64, f64, f64)>> = pairs
            .par_iter()
            .map(|&(a, b)| best_on_points(&stencil.symbol(a, b), &points, score, (a, b)))
            .collect();
        let mut edge_best = (f64::NEG_INFINITY, (c, 0.0, 0.0, 0.0));
        for (&(a, b), r) in pairs.iter().zip(results) {
            let (s, t1, t2) = r?;
            if s > edge_best.0 {
                edge_best = (s, (a, b, t1, t2));
            }
        }
        let refined = refine(
            stencil,
            edge_best.1,
            edge_best.0,
            c / n as f64,
            2.0 * pi / nt as f64,
            bounds,
            config.refine_rounds,
            4.0,
            score,
            |_| {},
        )?;
        if refined.0 > best.0 {
            best = refined;
        }
    }
    Ok(best)
}

/// Smallest `c` in `(0, c_max]` for which some configuration with
/// `max(|C|, |D|) <= c` is unstable, or `None` when there is none.
///
/// Edges are scanned on `scan_samples` values of `c`; the first unstable
/// sample is bracketed against its predecessor and bisected.
pub fn instability_onset(
    stencil: &FrozenStencil,
    c_max: f64,
    config: &OnsetConfig,
) -> Result<Option<f64>> {
    if c_max <= 0.0 {
        return Ok(None);
    }
    let unstable =
        |c: f64| -> Result<bool> { Ok(edge_excess(stencil, c, config)?.0 > config.tolerance) };
    let n = config.scan_samples.max(1);
    let mut lo = 0.0;
    for k in 1..=n {
        let c = c_max * k as f64 / n as f64;
        if unstable(c)? {
            let mut hi = c;
            while hi - lo > config.bracket {
                let mid = 0.5 * (lo + hi);
                if unstable(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        lo = c;
    }
    Ok(None)
}
