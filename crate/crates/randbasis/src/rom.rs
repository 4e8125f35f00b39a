//! Galerkin projection of the full discretization onto a reduced basis,
//! reduced implicit Euler stepping with lifting back to the full space, and
//! the error metrics used to judge basis quality.

use crate::linalg::{DenseMatrix, SparseOperator, Vector};
use crate::rbgen::ReducedBasis;
use crate::timestep::{DiscreteProblem, StepError, Trajectory};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RomError {
    #[error("reduced step matrix is singular at time index {0}")]
    SingularReducedMatrix(usize),
    #[error("reference trajectory has zero norm")]
    ZeroDenominator,
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// The projected system: reduced mass and stiffness matrices, reduced loads
/// and the projected initial state.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub basis: DenseMatrix,
    pub m_red: DenseMatrix,
    /// One entry when the stiffness is time-independent, otherwise one per
    /// time index 1..N_I-1 (entry 0 unused by the stepping).
    a_red: Vec<DenseMatrix>,
    f_red: Vec<Vector>,
    pub u_red_0: Vector,
    pub dt: f64,
    pub n_time_points: usize,
    stiffness_const: bool,
    rhs_const: bool,
}

impl ReducedSystem {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn a_red(&self, l: usize) -> &DenseMatrix {
        if self.stiffness_const {
            &self.a_red[0]
        } else {
            &self.a_red[l]
        }
    }

    pub fn f_red(&self, l: usize) -> &Vector {
        if self.rhs_const {
            &self.f_red[0]
        } else {
            &self.f_red[l]
        }
    }
}

/// Galerkin projection of the problem onto the basis: M_red = U^T M U,
/// A_red,l = U^T A_l U, F_red,l = U^T F_l, and
/// u_red,0 = M_red^{-1} U^T M u_0 (the M-orthogonal projection of u_0).
pub fn project(problem: &DiscreteProblem, basis: &ReducedBasis) -> Result<ReducedSystem, RomError> {
    let u = &basis.u_red;
    let n_i = problem.n_time_points();
    let m_u = sparse_times_dense(problem.mass(), u);
    let m_red = u.transpose() * &m_u;

    let stiffness_const = problem.spec().stiffness_time_independent();
    let stiffness_indices: Vec<usize> = if stiffness_const { vec![0] } else { (0..n_i).collect() };
    let mut a_red = Vec::with_capacity(stiffness_indices.len());
    for l in stiffness_indices {
        let a = problem.stiffness(l)?;
        a_red.push(u.transpose() * sparse_times_dense(&a, u));
    }

    let rhs_const = problem.spec().f.is_time_independent() && problem.spec().g_n.is_time_independent();
    let rhs_indices: Vec<usize> = if rhs_const { vec![0] } else { (0..n_i).collect() };
    let f_red = rhs_indices
        .into_iter()
        .map(|l| u.transpose() * problem.rhs(l).as_ref())
        .collect();

    let rhs0 = u.transpose() * problem.mass().matvec(problem.u0());
    let u_red_0 = m_red
        .clone()
        .lu()
        .solve(&rhs0)
        .ok_or(RomError::SingularReducedMatrix(0))?;
    Ok(ReducedSystem {
        basis: u.clone(),
        m_red,
        a_red,
        f_red,
        u_red_0,
        dt: problem.dt(),
        n_time_points: n_i,
        stiffness_const,
        rhs_const,
    })
}

fn sparse_times_dense(s: &SparseOperator, d: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(s.n_rows(), d.ncols());
    for (i, j, v) in s.entries() {
        for c in 0..d.ncols() {
            out[(i, c)] += v * d[(j, c)];
        }
    }
    out
}

/// March the reduced system over the whole time grid and lift every state
/// back to the full space.
pub fn solve_reduced(system: &ReducedSystem) -> Result<(Trajectory, Trajectory), RomError> {
    let n_i = system.n_time_points;
    let mut reduced = Vec::with_capacity(n_i);
    reduced.push(system.u_red_0.clone());
    for l in 1..n_i {
        let s = &system.m_red + system.a_red(l) * system.dt;
        let rhs = &system.m_red * reduced.last().unwrap() + system.f_red(l) * system.dt;
        let u = s
            .lu()
            .solve(&rhs)
            .ok_or(RomError::SingularReducedMatrix(l))?;
        reduced.push(u);
    }
    let lifted = reduced.iter().map(|c| &system.basis * c).collect();
    Ok((
        Trajectory { start: 0, states: reduced },
        Trajectory { start: 0, states: lifted },
    ))
}

/// Relative space-time error in the H1-weighted norm:
/// sqrt(sum_l dt <e_l, e_l>_H1) / sqrt(sum_l dt <u_l, u_l>_H1), including
/// the t = 0 term.
pub fn rel_l2h1_error(
    full: &Trajectory,
    lifted: &Trajectory,
    h1: &SparseOperator,
    dt: f64,
) -> Result<f64, RomError> {
    assert_eq!(full.states.len(), lifted.states.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for (u, v) in full.states.iter().zip(&lifted.states) {
        let e = u - v;
        num += dt * h1.bilinear(&e, &e);
        den += dt * h1.bilinear(u, u);
    }
    if den == 0.0 {
        return Err(RomError::ZeroDenominator);
    }
    Ok((num / den).sqrt())
}

/// Per-time-index relative error in the M-weighted norm. Entries where the
/// reference state vanishes are undefined and returned as None.
pub fn rel_l2t_error(
    full: &Trajectory,
    lifted: &Trajectory,
    mass: &SparseOperator,
) -> Vec<Option<f64>> {
    assert_eq!(full.states.len(), lifted.states.len());
    full.states
        .iter()
        .zip(&lifted.states)
        .map(|(u, v)| {
            let den = mass.bilinear(u, u);
            if den == 0.0 {
                None
            } else {
                let e = u - v;
                Some((mass.bilinear(&e, &e) / den).sqrt())
            }
        })
        .collect()
}

/// Error summary of one reduced-order solve.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub rel_l2h1: f64,
    pub rel_l2t: Vec<Option<f64>>,
    pub basis_dim: usize,
}

impl ErrorReport {
    pub fn compute(
        full: &Trajectory,
        lifted: &Trajectory,
        h1: &SparseOperator,
        mass: &SparseOperator,
        dt: f64,
        basis_dim: usize,
    ) -> Result<Self, RomError> {
        Ok(Self {
            rel_l2h1: rel_l2h1_error(full, lifted, h1, dt)?,
            rel_l2t: rel_l2t_error(full, lifted, mass),
            basis_dim,
        })
    }

    /// CSV: one row per time index, then summary rows for the space-time
    /// error and basis dimension.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "row,value")?;
        for (l, e) in self.rel_l2t.iter().enumerate() {
            match e {
                Some(v) => writeln!(out, "rel_l2t_{l},{v:.16e}")?,
                None => writeln!(out, "rel_l2t_{l},NaN")?,
            }
        }
        writeln!(out, "rel_l2h1,{:.16e}", self.rel_l2h1)?;
        writeln!(out, "basis_dim,{}", self.basis_dim)?;
        Ok(())
    }
}
