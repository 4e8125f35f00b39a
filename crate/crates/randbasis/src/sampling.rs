//! Time-point sampling: data matrices built from the problem's right-hand
//! sides or diffusion coefficient, probability distributions over the time
//! grid (uniform, squared column norm, leverage scores), multi-distribution
//! drawing, and column-subset projection errors.

use crate::linalg::{svd, DenseMatrix, LinalgError, Vector};
use crate::timestep::{DiscreteProblem, StepError};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_distr::StandardNormal;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("data matrix is identically zero")]
    ZeroMatrix,
    #[error("requested leverage rank {r} exceeds numerical rank {rank}")]
    RankTooLarge { r: usize, rank: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    /// Columns are the assembled right-hand sides F_l.
    Rhs,
    /// Columns are the cell-wise diffusion values at each time point.
    Kappa,
}

/// Time-dependent problem data, one column per time point.
#[derive(Debug, Clone)]
pub struct DataMatrix {
    pub b: DenseMatrix,
    pub kind: DataKind,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistRecipe {
    Uniform,
    SquaredNorm,
    Leverage(usize),
}

/// Probability distribution over time-grid indices.
#[derive(Debug, Clone)]
pub struct TimeSamplingDist {
    pub p: Vec<f64>,
    pub recipe: DistRecipe,
}

impl TimeSamplingDist {
    pub fn n_points(&self) -> usize {
        self.p.len()
    }
}

/// Assemble the data matrix for a problem: per-time right-hand sides or
/// per-cell diffusion values.
pub fn build_data_matrix(
    problem: &DiscreteProblem,
    kind: DataKind,
) -> Result<DataMatrix, SamplingError> {
    let n_i = problem.n_time_points();
    let b = match kind {
        DataKind::Rhs => {
            let cols: Vec<Vector> = (0..n_i).map(|l| problem.rhs(l).as_ref().clone()).collect();
            DenseMatrix::from_columns(&cols)
        }
        DataKind::Kappa => {
            let spec = problem.spec();
            let grid = &spec.grid;
            let (hx, hy) = (grid.hx(), grid.hy());
            let n_cells = grid.n_cells();
            DenseMatrix::from_fn(n_cells, n_i, |cell, l| {
                let cx = cell % grid.nx;
                let cy = cell / grid.nx;
                let x = grid.x0 + (cx as f64 + 0.5) * hx;
                let y = grid.y0 + (cy as f64 + 0.5) * hy;
                spec.kappa.eval(l, spec.time(l), cell, x, y)
            })
        }
    };
    Ok(DataMatrix {
        b,
        kind,
        description: format!("{kind:?} data matrix"),
    })
}

/// p_i = 1 / N_I.
pub fn uniform_dist(n_i: usize) -> TimeSamplingDist {
    assert!(n_i >= 1);
    TimeSamplingDist {
        p: vec![1.0 / n_i as f64; n_i],
        recipe: DistRecipe::Uniform,
    }
}

/// p_i proportional to the squared norm of column i.
pub fn squared_norm_dist(b: &DenseMatrix) -> Result<TimeSamplingDist, SamplingError> {
    let total: f64 = b.iter().map(|v| v * v).sum();
    if total == 0.0 {
        return Err(SamplingError::ZeroMatrix);
    }
    let p = (0..b.ncols())
        .map(|i| b.column(i).norm_squared() / total)
        .collect();
    Ok(TimeSamplingDist {
        p,
        recipe: DistRecipe::SquaredNorm,
    })
}

/// Leverage scores of rank r: p_i = (1/r) sum over the r leading right
/// singular vectors of their squared i-th entry.
pub fn leverage_score_dist(b: &DenseMatrix, r: usize) -> Result<TimeSamplingDist, SamplingError> {
    assert!(r >= 1);
    let (_, sigma, vt) = svd(b)?;
    if sigma[0] == 0.0 {
        return Err(SamplingError::ZeroMatrix);
    }
    let rank = sigma.iter().filter(|&&s| s > 1e-12 * sigma[0]).count();
    if r > rank {
        return Err(SamplingError::RankTooLarge { r, rank });
    }
    let p = leverage_from_vt(&vt, r);
    Ok(TimeSamplingDist {
        p,
        recipe: DistRecipe::Leverage(r),
    })
}

fn leverage_from_vt(vt: &DenseMatrix, r: usize) -> Vec<f64> {
    (0..vt.ncols())
        .map(|i| (0..r).map(|j| vt[(j, i)] * vt[(j, i)]).sum::<f64>() / r as f64)
        .collect()
}

/// Sketch-based leverage scores for large data matrices: a Gaussian range
/// finder on B^T followed by a small SVD. Validated against the dense path
/// in the tests; intended for matrices where a full SVD is too costly.
pub fn leverage_score_dist_randomized(
    b: &DenseMatrix,
    r: usize,
    oversampling: usize,
    rng: &mut impl Rng,
) -> Result<TimeSamplingDist, SamplingError> {
    assert!(r >= 1);
    let k = (r + oversampling).min(b.ncols()).min(b.nrows());
    let g = DenseMatrix::from_fn(b.nrows(), k, |_, _| rng.sample::<f64, _>(StandardNormal));
    // orthonormal basis of the dominant row space
    let y = b.transpose() * &g;
    let q = y.qr().q();
    let small = b * &q;
    let (_, sigma, wt) = svd(&small)?;
    if sigma[0] == 0.0 {
        return Err(SamplingError::ZeroMatrix);
    }
    // right singular vectors of B are approximately Q * W
    let v_approx = q * wt.transpose();
    let mut p: Vec<f64> = (0..v_approx.nrows())
        .map(|i| (0..r).map(|j| v_approx[(i, j)] * v_approx[(i, j)]).sum::<f64>() / r as f64)
        .collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    Ok(TimeSamplingDist {
        p,
        recipe: DistRecipe::Leverage(r),
    })
}

/// Draw time indices from one or more distributions, with replacement and
/// per-distribution counts, then discard indices <= n_t so every survivor
/// admits a full window of n_t preceding steps. Duplicates are retained
/// unless `dedupe` is set.
pub fn draw_time_indices(
    dists: &[(&TimeSamplingDist, usize)],
    n_t: usize,
    dedupe: bool,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let mut out = Vec::new();
    for (dist, count) in dists {
        if *count == 0 {
            continue;
        }
        let weighted = WeightedIndex::new(&dist.p).expect("valid distribution");
        for _ in 0..*count {
            let idx = weighted.sample(rng);
            if idx > n_t {
                out.push(idx);
            }
        }
    }
    if dedupe {
        let mut seen = std::collections::HashSet::new();
        out.retain(|&i| seen.insert(i));
    }
    out
}

/// Frobenius norm of B - C C^+ B where C consists of the selected columns;
/// the pseudoinverse projection is realized by an SVD of C.
pub fn column_subset_error(b: &DenseMatrix, cols: &[usize]) -> Result<f64, SamplingError> {
    assert!(!cols.is_empty(), "column subset must be nonempty");
    let c_cols: Vec<Vector> = cols.iter().map(|&i| b.column(i).into_owned()).collect();
    let c = DenseMatrix::from_columns(&c_cols);
    let (u, sigma, _) = svd(&c)?;
    if sigma[0] == 0.0 {
        // zero columns span nothing
        return Ok(b.norm());
    }
    let rank = sigma.iter().filter(|&&s| s > 1e-12 * sigma[0]).count();
    let ur = u.columns(0, rank);
    let residual = b - &ur * (ur.transpose() * b);
    Ok(residual.norm())
}

/// Write a distribution as CSV with columns (time_index, probability).
pub fn export_dist_csv(dist: &TimeSamplingDist, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "time_index,probability")?;
    for (i, p) in dist.p.iter().enumerate() {
        writeln!(out, "{i},{p:.16e}")?;
    }
    Ok(())
}
