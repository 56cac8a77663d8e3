//! Benchmark cases with closed-form solutions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::grid::Dim;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    Ex1dSmooth,
    Ex1dNonsmooth,
    Ex2dQuartic,
    Ex2dSquareShrink,
    Ex2dSquareExpand,
    Ex2dCircleShrink,
    Ex2dCircleExpand,
    Ex2dExpInflow,
    Ex2dExpFixed,
    Ex2dSevenCircles,
}

impl CaseId {
    pub const ALL: [CaseId; 10] = [
        CaseId::Ex1dSmooth,
        CaseId::Ex1dNonsmooth,
        CaseId::Ex2dQuartic,
        CaseId::Ex2dSquareShrink,
        CaseId::Ex2dSquareExpand,
        CaseId::Ex2dCircleShrink,
        CaseId::Ex2dCircleExpand,
        CaseId::Ex2dExpInflow,
        CaseId::Ex2dExpFixed,
        CaseId::Ex2dSevenCircles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Ex1dSmooth => "ex1d-smooth",
            CaseId::Ex1dNonsmooth => "ex1d-nonsmooth",
            CaseId::Ex2dQuartic => "ex2d-quartic",
            CaseId::Ex2dSquareShrink => "ex2d-square-shrink",
            CaseId::Ex2dSquareExpand => "ex2d-square-expand",
            CaseId::Ex2dCircleShrink => "ex2d-circle-shrink",
            CaseId::Ex2dCircleExpand => "ex2d-circle-expand",
            CaseId::Ex2dExpInflow => "ex2d-exp-inflow",
            CaseId::Ex2dExpFixed => "ex2d-exp-fixed",
            CaseId::Ex2dSevenCircles => "ex2d-seven-circles",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown case '{s}'")))
    }
}

/// Resolution ladder with a fixed Courant number: `(I, N)` pairs, each
/// halving `h` and `tau`. `pre` is one extra coarser level used only to give
/// the first listed level an EOC.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub name: &'static str,
    pub levels: Vec<(usize, usize)>,
    pub pre: Option<(usize, usize)>,
}

impl Ladder {
    fn new(name: &'static str, levels: &[(usize, usize)], pre: (usize, usize)) -> Self {
        Ladder {
            name,
            levels: levels.to_vec(),
            pre: Some(pre),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

/// Default geometry of the seven-circle case: equal circles on a ring.
pub fn default_circles() -> Vec<Circle> {
    (0..7)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / 7.0;
            Circle {
                center: [0.5 * a.cos(), 0.5 * a.sin()],
                radius: 0.05,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentCase {
    pub id: CaseId,
    pub dim: Dim,
    /// Domain `[lo, hi]` on every axis.
    pub lo: f64,
    pub hi: f64,
    pub t_final: f64,
    /// Normal speed.
    pub delta: f64,
    pub default_sweeps: usize,
    /// The first ladder is the default.
    pub ladders: Vec<Ladder>,
    /// Only used by the seven-circle case.
    pub circles: Vec<Circle>,
}

const SQUARE_DELTA: f64 = 0.1 / PI;

pub fn exact_solution_catalog() -> Vec<ExperimentCase> {
    CaseId::ALL.into_iter().map(case).collect()
}

pub fn case(id: CaseId) -> ExperimentCase {
    let base = ExperimentCase {
        id,
        dim: Dim::Two,
        lo: -1.0,
        hi: 1.0,
        t_final: PI,
        delta: 0.0,
        default_sweeps: 8,
        ladders: Vec::new(),
        circles: Vec::new(),
    };
    let rotation_ladders = || {
        vec![Ladder::new(
            "c13.5",
            &[(64, 8), (128, 16), (256, 32)],
            (32, 4),
        )]
    };
    let circle_ladders = || {
        vec![
            Ladder::new("c27", &[(64, 4), (128, 8), (256, 16)], (32, 2)),
            Ladder::new("c13.5", &[(64, 8), (128, 16), (256, 32)], (32, 4)),
        ]
    };
    let exp_ladders = |fixed: bool| {
        let mut l = vec![
            Ladder::new("c10.9", &[(80, 80), (160, 160), (320, 320)], (40, 40)),
            Ladder::new("c109", &[(80, 8), (160, 16), (320, 32)], (40, 4)),
        ];
        if !fixed {
            l.push(Ladder::new("c436", &[(80, 2), (160, 4), (320, 8)], (40, 1)));
        }
        l
    };
    match id {
        CaseId::Ex1dSmooth => ExperimentCase {
            dim: Dim::One,
            lo: -0.5 * PI,
            hi: 3.5 * PI,
            t_final: 2.0,
            default_sweeps: 6,
            ladders: vec![Ladder::new(
                "c32",
                &[(400, 2), (800, 4), (1600, 8), (3200, 16)],
                (200, 1),
            )],
            ..base
        },
        CaseId::Ex1dNonsmooth => ExperimentCase {
            dim: Dim::One,
            t_final: 2.0,
            default_sweeps: 2,
            ladders: vec![Ladder::new(
                "c5",
                &[(160, 32), (320, 64), (640, 128), (1280, 256)],
                (80, 16),
            )],
            ..base
        },
        CaseId::Ex2dQuartic => ExperimentCase {
            ladders: vec![Ladder::new(
                "c16",
                &[(80, 8), (160, 16), (320, 32)],
                (40, 4),
            )],
            ..base
        },
        CaseId::Ex2dSquareShrink => ExperimentCase {
            lo: -0.5,
            hi: 0.5,
            delta: -SQUARE_DELTA,
            ladders: rotation_ladders(),
            ..base
        },
        CaseId::Ex2dSquareExpand => ExperimentCase {
            lo: -0.5,
            hi: 0.5,
            delta: SQUARE_DELTA,
            ladders: rotation_ladders(),
            ..base
        },
        CaseId::Ex2dCircleShrink => ExperimentCase {
            lo: -0.5,
            hi: 0.5,
            delta: -SQUARE_DELTA,
            ladders: circle_ladders(),
            ..base
        },
        CaseId::Ex2dCircleExpand => ExperimentCase {
            lo: -0.5,
            hi: 0.5,
            delta: SQUARE_DELTA,
            ladders: circle_ladders(),
            ..base
        },
        CaseId::Ex2dExpInflow => ExperimentCase {
            t_final: 0.4,
            ladders: exp_ladders(false),
            ..base
        },
        CaseId::Ex2dExpFixed => ExperimentCase {
            t_final: 0.4,
            ladders: exp_ladders(true),
            ..base
        },
        CaseId::Ex2dSevenCircles => ExperimentCase {
            // Two steps of size pi/96.
            t_final: PI / 48.0,
            ladders: vec![Ladder {
                name: "two-steps",
                levels: vec![(248, 2)],
                pre: None,
            }],
            circles: default_circles(),
            ..base
        },
    }
}

/// Rotated coordinates with the offset of the rotating cases.
#[inline]
fn rotated(p: [f64; 2], t: f64, shift: f64) -> (f64, f64) {
    let (s, c) = t.sin_cos();
    (p[0] * c + p[1] * s + shift, p[1] * c - p[0] * s)
}

/// Periodic profile with kinks and a jump in the derivative, on `[-1, 1)`.
pub fn nonsmooth_profile(x: f64) -> f64 {
    let x = (x + 1.0).rem_euclid(2.0) - 1.0;
    let c = 3f64.sqrt() / 2.0 + 4.5 + 2.0 * PI / 3.0;
    let part = if x < -1.0 / 3.0 {
        2.0 * (1.5 * PI * x * x).cos() - 3f64.sqrt()
    } else if x < 0.0 {
        1.5 + 3.0 * (2.0 * PI * x).cos()
    } else if x < 1.0 / 3.0 {
        7.5 - 3.0 * (2.0 * PI * x).cos()
    } else {
        6.0 * PI * x * (x - 1.0) + (28.0 + 4.0 * PI + (3.0 * PI * x).cos()) / 3.0
    };
    part - c * (x + 1.0)
}

/// Solution of `phi_t + sin(x) phi_x = 0` with `phi(x, 0) = sin x`, i.e.
/// `sin(2 atan(tan(x/2) e^{-t}))`, written without the poles of `tan`.
pub fn smooth_1d(x: f64, t: f64) -> f64 {
    let (s, c) = (0.5 * x).sin_cos();
    let e = (-t).exp();
    2.0 * s * c * e / (c * c + s * s * e * e)
}

/// Distance in the max norm grown by `r` (rotated-square shrink family).
fn square_shrink(xt: f64, yt: f64, dt: f64) -> f64 {
    xt.abs().max(yt.abs()) - dt
}

/// Max-norm distance eroded by a disk of radius `dt >= 0`.
pub fn square_expand(xt: f64, yt: f64, dt: f64) -> f64 {
    let (x, y) = (xt, yt);
    let in2 = x <= -dt && x + dt <= y && y <= -x - dt;
    let in3 = x >= dt && -x + dt <= y && y <= x - dt;
    let in4 = y <= -dt && y + dt <= x && x <= -y - dt;
    let in5 = y >= dt && -y + dt <= x && x <= y - dt;
    let corner = |sx: f64, sy: f64| {
        // Corner disk centre at (sx d, sy d) on the diagonal.
        let (u, v) = (sx * x, sy * y);
        let d = 0.5 * (u + v - (2.0 * dt * dt - (u - v).powi(2)).max(0.0).sqrt());
        (u - d).hypot(v - d) - dt + d
    };
    if x * x + y * y <= dt * dt {
        0.0
    } else if in2 {
        -x - dt
    } else if in3 {
        x - dt
    } else if in4 {
        -y - dt
    } else if in5 {
        y - dt
    } else if x > 0.0 && y > 0.0 {
        corner(1.0, 1.0)
    } else if x > 0.0 && y < 0.0 {
        corner(1.0, -1.0)
    } else if x < 0.0 && y < 0.0 {
        corner(-1.0, -1.0)
    } else {
        corner(-1.0, 1.0)
    }
}

#[inline]
fn exp_speed(p: [f64; 2]) -> f64 {
    (2.0 * (p[1] - p[0])).exp()
}

#[inline]
fn corner_distance(x: f64, y: f64) -> f64 {
    (x + 1.0).hypot(y + 1.0)
}

impl ExperimentCase {
    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    pub fn ladder(&self, name: Option<&str>) -> Result<&Ladder, Error> {
        match name {
            None => self
                .ladders
                .first()
                .ok_or_else(|| Error::Config(format!("{} has no ladder", self.id))),
            Some(n) => self.ladders.iter().find(|l| l.name == n).ok_or_else(|| {
                let known: Vec<&str> = self.ladders.iter().map(|l| l.name).collect();
                Error::Config(format!(
                    "unknown ladder '{n}' for {} (known: {})",
                    self.id,
                    known.join(", ")
                ))
            }),
        }
    }

    /// External (linear) part of the velocity.
    pub fn external_velocity(&self, p: [f64; 2]) -> [f64; 2] {
        match self.id {
            CaseId::Ex1dSmooth => [p[0].sin(), 0.0],
            CaseId::Ex1dNonsmooth => [1.0, 0.0],
            CaseId::Ex2dExpInflow | CaseId::Ex2dExpFixed => {
                let u = exp_speed(p);
                [u, u]
            }
            _ => [-p[1], p[0]],
        }
    }

    /// Exact solution; also the source of boundary and ghost values.
    pub fn exact(&self, p: [f64; 2], t: f64) -> f64 {
        let dt = self.delta * t;
        match self.id {
            CaseId::Ex1dSmooth => smooth_1d(p[0], t),
            CaseId::Ex1dNonsmooth => nonsmooth_profile(p[0] - 0.5 - t),
            CaseId::Ex2dQuartic => {
                let (x, y) = rotated(p, t, 0.25);
                x.powi(4) + y.powi(4)
            }
            CaseId::Ex2dSquareShrink => {
                let (x, y) = rotated(p, t, 0.25);
                square_shrink(x, y, dt)
            }
            CaseId::Ex2dSquareExpand => {
                let (x, y) = rotated(p, t, 0.25);
                square_expand(x, y, dt)
            }
            CaseId::Ex2dCircleShrink | CaseId::Ex2dCircleExpand => {
                let (x, y) = rotated(p, t, 0.25);
                (x.hypot(y) - dt).max(0.0)
            }
            CaseId::Ex2dExpInflow => {
                let s = t * exp_speed(p);
                corner_distance(p[0] - s, p[1] - s)
            }
            CaseId::Ex2dExpFixed => {
                let (x, y) = (p[0], p[1]);
                let s = t * exp_speed(p);
                if y >= x {
                    if x - s >= -1.0 {
                        corner_distance(x - s, y - s)
                    } else {
                        corner_distance(-1.0, y - x - 1.0)
                    }
                } else if y - s >= -1.0 {
                    corner_distance(x - s, y - s)
                } else {
                    corner_distance(x - 1.0 - y, -1.0)
                }
            }
            CaseId::Ex2dSevenCircles => {
                let (x, y) = rotated(p, t, 0.0);
                self.circles
                    .iter()
                    .map(|c| (x - c.center[0]).hypot(y - c.center[1]) - c.radius)
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}
