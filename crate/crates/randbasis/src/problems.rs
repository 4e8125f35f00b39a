//! Built-in benchmark problems.
//!
//! Five ready-made problem definitions exercise the main regimes of the
//! solver: pulsed point sources (example1), the three-stove heat problem
//! (example2), pure advection-diffusion on a thin strip (example3a/3b), and
//! a rough, time-switched conductivity field with Neumann inflow
//! (example4_synthetic). Each comes at its reference resolution via
//! [`builtin_problem`] or at a caller-chosen resolution via
//! [`builtin_problem_with_mesh`].

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::grid_fem::{
    BoundarySegment, BoundaryTag, CoefficientField, ProblemSpec, Side, SpatialField,
    StructuredGrid, TimeSignal,
};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("unknown problem '{0}' (see `problem list` for available names)")]
    UnknownProblem(String),
}

/// Names accepted by [`builtin_problem`], with a short description each.
pub const BUILTIN_PROBLEMS: &[(&str, &str)] = &[
    (
        "example1",
        "heat equation on the unit square, two pulsed box sources",
    ),
    (
        "example2",
        "heat equation on the unit square, three stoves switched on/off in time",
    ),
    (
        "example3a(b1)",
        "advection-diffusion on a thin strip, constant advection b=(b1,0), no source",
    ),
    (
        "example3b",
        "advection-diffusion on a thin strip, b=(0.3,0), kappa=0.01, pulsed source",
    ),
    (
        "example4_synthetic",
        "rough layered conductivity with switched high-conductivity channels and Neumann inflow",
    ),
];

/// Builds a named problem at its reference mesh resolution.
///
/// `example3a` takes the advection strength in parentheses, e.g.
/// `example3a(100)`.
pub fn builtin_problem(name: &str) -> Result<ProblemSpec, ProblemError> {
    let default = match parse_name(name)? {
        Parsed::Example1 => 50,
        Parsed::Example2 => 100,
        Parsed::Example3a(_) | Parsed::Example3b => 300,
        Parsed::Example4Synthetic => 100,
    };
    builtin_problem_with_mesh(name, default)
}

/// Builds a named problem with mesh size `1/cells_per_unit` in both
/// directions; the time grid is unaffected by the mesh choice.
pub fn builtin_problem_with_mesh(
    name: &str,
    cells_per_unit: usize,
) -> Result<ProblemSpec, ProblemError> {
    let parsed = parse_name(name)?;
    Ok(match parsed {
        Parsed::Example1 => example1(cells_per_unit),
        Parsed::Example2 => example2(cells_per_unit),
        Parsed::Example3a(b1) => example3a(cells_per_unit, b1),
        Parsed::Example3b => example3b(cells_per_unit),
        Parsed::Example4Synthetic => example4_synthetic(cells_per_unit),
    })
}

enum Parsed {
    Example1,
    Example2,
    Example3a(f64),
    Example3b,
    Example4Synthetic,
}

fn parse_name(name: &str) -> Result<Parsed, ProblemError> {
    let trimmed = name.trim();
    match trimmed {
        "example1" => return Ok(Parsed::Example1),
        "example2" => return Ok(Parsed::Example2),
        "example3b" => return Ok(Parsed::Example3b),
        "example4_synthetic" => return Ok(Parsed::Example4Synthetic),
        _ => {}
    }
    if let Some(rest) = trimmed.strip_prefix("example3a") {
        let inner = rest
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .map(str::trim);
        if let Some(arg) = inner {
            if let Ok(b1) = arg.parse::<f64>() {
                return Ok(Parsed::Example3a(b1));
            }
        }
        return Err(ProblemError::UnknownProblem(trimmed.to_string()));
    }
    Err(ProblemError::UnknownProblem(trimmed.to_string()))
}

fn rounded_cells(length: f64, cells_per_unit: usize) -> usize {
    ((length * cells_per_unit as f64).round() as usize).max(2)
}

/// Initial hump Σ_{i=1..3} sin(iπx) sin(iπy), used by example2 and example3b.
fn sine_sum_initial() -> SpatialField {
    SpatialField::Analytic(Arc::new(|x, y| {
        (1..=3)
            .map(|i| (i as f64 * PI * x).sin() * (i as f64 * PI * y).sin())
            .sum()
    }))
}

/// Heat equation on (0,1)^2 over (0,10) with homogeneous Dirichlet walls,
/// zero initial data, and two box sources pulsed at disjoint times:
/// amplitude 4 on (0.2,0.3)^2 for t in [1,4] and amplitude 1 on (0.7,0.8)^2
/// for t in [6,9].
fn example1(cells_per_unit: usize) -> ProblemSpec {
    let n = rounded_cells(1.0, cells_per_unit);
    ProblemSpec {
        grid: StructuredGrid::unit_square_dirichlet(n),
        t_final: 10.0,
        n_time_points: 301,
        kappa: CoefficientField::Constant(1.0),
        b_x: CoefficientField::Constant(0.0),
        b_y: CoefficientField::Constant(0.0),
        c: CoefficientField::Constant(0.0),
        f: CoefficientField::SeparableSum(vec![
            (
                TimeSignal::Boxcar {
                    t_on: 1.0,
                    t_off: 4.0,
                    value: 4.0,
                },
                SpatialField::box_indicator(0.2, 0.3, 0.2, 0.3),
            ),
            (
                TimeSignal::Boxcar {
                    t_on: 6.0,
                    t_off: 9.0,
                    value: 1.0,
                },
                SpatialField::box_indicator(0.7, 0.8, 0.7, 0.8),
            ),
        ]),
        g_n: CoefficientField::Constant(0.0),
        u0: SpatialField::Constant(0.0),
    }
}

/// Heat equation on (0,1)^2 over (0,10) with three spatially disjoint
/// "stove" sources switched on and off one after another, and a smooth
/// sine-sum initial condition. The last stove is only active late in the
/// simulation, which is what makes short-horizon snapshot baselines fail.
fn example2(cells_per_unit: usize) -> ProblemSpec {
    let n = rounded_cells(1.0, cells_per_unit);
    ProblemSpec {
        grid: StructuredGrid::unit_square_dirichlet(n),
        t_final: 10.0,
        n_time_points: 301,
        kappa: CoefficientField::Constant(1.0),
        b_x: CoefficientField::Constant(0.0),
        b_y: CoefficientField::Constant(0.0),
        c: CoefficientField::Constant(0.0),
        f: CoefficientField::SeparableSum(vec![
            (
                TimeSignal::Trapezoid {
                    t0: 0.5,
                    t1: 1.5,
                    t2: 1.5,
                    t3: 2.5,
                    value: 30.0,
                },
                SpatialField::box_indicator(0.2, 0.3, 0.2, 0.3),
            ),
            (
                TimeSignal::Trapezoid {
                    t0: 3.5,
                    t1: 4.5,
                    t2: 4.5,
                    t3: 5.5,
                    value: 20.0,
                },
                SpatialField::box_indicator(0.45, 0.55, 0.45, 0.55),
            ),
            (
                TimeSignal::Trapezoid {
                    t0: 6.5,
                    t1: 7.5,
                    t2: 7.5,
                    t3: 8.5,
                    value: 10.0,
                },
                SpatialField::box_indicator(0.65, 0.8, 0.65, 0.8),
            ),
        ]),
        g_n: CoefficientField::Constant(0.0),
        u0: sine_sum_initial(),
    }
}

fn thin_strip_grid(cells_per_unit: usize) -> StructuredGrid {
    StructuredGrid::new(
        (0.0, 1.0),
        (0.0, 0.3),
        rounded_cells(1.0, cells_per_unit),
        rounded_cells(0.3, cells_per_unit),
        BoundaryTag::Dirichlet,
        Vec::new(),
    )
    .expect("thin strip grid is valid")
}

/// Advection-diffusion on the strip (0,1)x(0,0.3) over (0,5) with constant
/// advection (b1, 0), unit diffusion, and no source. Used to study how the
/// local solution spaces shrink as advection strength grows.
fn example3a(cells_per_unit: usize, b1: f64) -> ProblemSpec {
    ProblemSpec {
        grid: thin_strip_grid(cells_per_unit),
        t_final: 5.0,
        n_time_points: 501,
        kappa: CoefficientField::Constant(1.0),
        b_x: CoefficientField::Constant(b1),
        b_y: CoefficientField::Constant(0.0),
        c: CoefficientField::Constant(0.0),
        f: CoefficientField::Constant(0.0),
        g_n: CoefficientField::Constant(0.0),
        u0: SpatialField::Constant(0.0),
    }
}

/// Advection-diffusion on the strip with b=(0.3,0), kappa=0.01, the
/// sine-sum initial condition, and one pulsed box source near the inflow:
/// amplitude 40 on (0.1,0.2)x(0.1,0.2) for t in [0.5,1]. The solution keeps
/// drifting right long after the source is gone, so time sampling based on
/// the source alone misses most of the dynamics.
fn example3b(cells_per_unit: usize) -> ProblemSpec {
    ProblemSpec {
        grid: thin_strip_grid(cells_per_unit),
        t_final: 5.0,
        n_time_points: 501,
        kappa: CoefficientField::Constant(0.01),
        b_x: CoefficientField::Constant(0.3),
        b_y: CoefficientField::Constant(0.0),
        c: CoefficientField::Constant(0.0),
        f: CoefficientField::separable(
            TimeSignal::Boxcar {
                t_on: 0.5,
                t_off: 1.0,
                value: 40.0,
            },
            SpatialField::box_indicator(0.1, 0.2, 0.1, 0.2),
        ),
        g_n: CoefficientField::Constant(0.0),
        u0: sine_sum_initial(),
    }
}

/// Seed for the synthetic rough conductivity layer field of
/// example4_synthetic; fixed so the problem is reproducible.
const ROUGH_FIELD_SEED: u64 = 0x5eed_0004;

/// Cell-wise conductivity background: horizontal layers whose magnitude is
/// log-uniform in [1e-2, 1e1], with per-cell log-uniform jitter of up to
/// half an order of magnitude. Rough in space, constant in time, strictly
/// positive.
fn rough_layered_field(nx: usize, ny: usize) -> SpatialField {
    let mut rng = ChaCha12Rng::seed_from_u64(ROUGH_FIELD_SEED);
    let mut cells = vec![0.0; nx * ny];
    for cy in 0..ny {
        let layer_exp = rng.gen_range(-2.0..1.0);
        for cx in 0..nx {
            let jitter = rng.gen_range(-0.5..0.5);
            cells[cy * nx + cx] = 10f64.powf(layer_exp + jitter);
        }
    }
    SpatialField::Cells(cells)
}

fn channel_indicator(ranges: &'static [(f64, f64)]) -> SpatialField {
    SpatialField::Analytic(Arc::new(move |x, y| {
        if y >= 0.2 && y <= 0.6 && ranges.iter().any(|&(a, b)| x >= a && x <= b) {
            1.0
        } else {
            0.0
        }
    }))
}

/// Heat equation on the wide strip (0,2.2)x(0,0.6) over (0,10). The
/// conductivity is a rough layered background plus vertical
/// high-conductivity channels (value 1e3) that are switched in time: two
/// channels active on [3,7.5] and [8,10], a third channel only on [8,10].
/// Heat enters through a time-dependent Neumann inflow on the top edge over
/// x in (0.4,1.8); the bottom edge is Dirichlet on the same x-range and the
/// rest of the boundary is zero-flux Neumann.
fn example4_synthetic(cells_per_unit: usize) -> ProblemSpec {
    let nx = rounded_cells(2.2, cells_per_unit);
    let ny = rounded_cells(0.6, cells_per_unit);
    let grid = StructuredGrid::new(
        (0.0, 2.2),
        (0.0, 0.6),
        nx,
        ny,
        BoundaryTag::Neumann,
        vec![BoundarySegment {
            side: Side::Bottom,
            lo: 0.4,
            hi: 1.8,
            tag: BoundaryTag::Dirichlet,
        }],
    )
    .expect("wide strip grid is valid");
    // Top-edge strip carrying the inflow; the y-window only matches the top
    // boundary so the same indicator is safe on all Neumann edges.
    let inflow_strip = SpatialField::box_indicator(0.4, 1.8, 0.59, 0.61);
    ProblemSpec {
        grid,
        t_final: 10.0,
        n_time_points: 501,
        kappa: CoefficientField::SeparableSum(vec![
            (
                TimeSignal::Constant(1.0),
                rough_layered_field(nx, ny),
            ),
            (
                TimeSignal::Boxcar {
                    t_on: 3.0,
                    t_off: 7.5,
                    value: 1e3,
                },
                channel_indicator(&[(0.5, 0.6), (1.0, 1.1)]),
            ),
            (
                TimeSignal::Boxcar {
                    t_on: 8.0,
                    t_off: 10.0,
                    value: 1e3,
                },
                channel_indicator(&[(0.5, 0.6), (1.0, 1.1)]),
            ),
            (
                TimeSignal::Boxcar {
                    t_on: 8.0,
                    t_off: 10.0,
                    value: 1e3,
                },
                channel_indicator(&[(1.6, 1.7)]),
            ),
        ]),
        b_x: CoefficientField::Constant(0.0),
        b_y: CoefficientField::Constant(0.0),
        c: CoefficientField::Constant(0.0),
        f: CoefficientField::Constant(0.0),
        g_n: CoefficientField::SeparableSum(vec![
            (
                TimeSignal::Boxcar {
                    t_on: 1.0,
                    t_off: 5.5,
                    value: 1.0,
                },
                inflow_strip.clone(),
            ),
            (
                TimeSignal::Boxcar {
                    t_on: 8.0,
                    t_off: 9.0,
                    value: 5.0,
                },
                inflow_strip,
            ),
        ]),
        u0: SpatialField::box_indicator(0.5, 0.7, 0.3, 0.4),
    }
}
