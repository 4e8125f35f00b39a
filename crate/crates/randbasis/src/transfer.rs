//! Discrete transfer operator in time: the linear map sending a state at
//! time index i to the source-free implicit Euler solution at index j.
//! Provides application, dense materialization, optimal local spaces from
//! its SVD, randomized range approximation from random initial conditions,
//! projection errors and the probabilistic a priori error bound.

use crate::linalg::{factorize, svd, DenseMatrix, Factorization, LinalgError, SparseOperator, Vector};
use crate::timestep::{DiscreteProblem, StepError};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

/// Default guard against materializing transfer operators column by column
/// on large grids.
pub const DEFAULT_MATERIALIZE_CAP: usize = 5000;

#[derive(Debug, Error)]
pub enum TransferError {
    #[error("materialization needs {n_dofs} transfer applications, cap is {cap}")]
    CapExceeded { n_dofs: usize, cap: usize },
    #[error("a priori bound needs n >= 4, got {0}")]
    InsufficientN(usize),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Transfer operator from time index i to j of a discretized problem.
#[derive(Clone, Copy)]
pub struct TransferHandle<'a> {
    pub problem: &'a DiscreteProblem,
    pub i: usize,
    pub j: usize,
}

impl<'a> TransferHandle<'a> {
    pub fn new(problem: &'a DiscreteProblem, i: usize, j: usize) -> Self {
        assert!(i < j, "transfer needs i < j");
        Self { problem, i, j }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceOrigin {
    Optimal,
    Randomized,
}

/// Orthonormal basis of a local-in-time approximation space.
#[derive(Debug, Clone)]
pub struct LocalSpace {
    pub basis: DenseMatrix,
    /// For optimal spaces: leading n+1 singular values of the transfer
    /// operator. For randomized spaces: singular values of the image block.
    pub singular_values: Vec<f64>,
    pub origin: SpaceOrigin,
    /// Set when requested dimension could not be reached because images were
    /// numerically dependent.
    pub rank_deficient: bool,
}

impl LocalSpace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Apply the transfer operator to one state vector.
pub fn apply_transfer(h: &TransferHandle, xi: &Vector) -> Result<Vector, TransferError> {
    let traj = h.problem.solve_trajectory(h.i, h.j, xi, false)?;
    Ok(traj.last().clone())
}

/// Dense matrix of the transfer operator, built column by column from unit
/// vectors. Guarded by `DEFAULT_MATERIALIZE_CAP`.
pub fn materialize_transfer(h: &TransferHandle) -> Result<DenseMatrix, TransferError> {
    materialize_transfer_with_cap(h, DEFAULT_MATERIALIZE_CAP)
}

pub fn materialize_transfer_with_cap(
    h: &TransferHandle,
    cap: usize,
) -> Result<DenseMatrix, TransferError> {
    let n = h.problem.n_dofs();
    if n > cap {
        return Err(TransferError::CapExceeded { n_dofs: n, cap });
    }
    // warm the factorization cache sequentially so the parallel columns
    // only read it
    for l in (h.i + 1)..=h.j {
        h.problem.step_factorization(l)?;
    }
    let columns: Result<Vec<Vector>, TransferError> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut e = Vector::zeros(n);
            e[k] = 1.0;
            apply_transfer(h, &e)
        })
        .collect();
    let columns = columns?;
    Ok(DenseMatrix::from_columns(&columns))
}

/// Optimal n-dimensional local space: the n leading left singular vectors of
/// the materialized transfer operator. `singular_values` holds the leading
/// n+1 values, so the attainable projection error sits at index n.
pub fn optimal_space(h: &TransferHandle, n: usize) -> Result<LocalSpace, TransferError> {
    assert!(n >= 1);
    let t = materialize_transfer(h)?;
    let (u, sigma, _) = svd(&t)?;
    let keep = n.min(u.ncols());
    Ok(LocalSpace {
        basis: u.columns(0, keep).into_owned(),
        singular_values: sigma.iter().copied().take(n + 1).collect(),
        origin: SpaceOrigin::Optimal,
        rank_deficient: keep < n,
    })
}

/// One random initial condition r ~ N(0, (A^T A)^{-1}), realized as
/// x = A^{-1} g with g standard normal.
pub fn draw_random_initial(
    a_i: &SparseOperator,
    rng: &mut impl Rng,
) -> Result<Vector, TransferError> {
    let fact = factorize(a_i)?;
    Ok(draw_random_initial_with(&fact, rng))
}

/// Same draw reusing an existing factorization of A.
pub fn draw_random_initial_with(fact: &Factorization, rng: &mut impl Rng) -> Vector {
    let mut g = Vector::from_fn(fact.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
    fact.solve_in_place(&mut g);
    g
}

/// Randomized n-dimensional space: transfer images of n independent random
/// initial conditions, orthonormalized by an SVD of the image block.
/// Directions below 1e-12 of the largest image singular value are dropped.
pub fn randomized_range(
    h: &TransferHandle,
    n: usize,
    rng: &mut impl Rng,
) -> Result<LocalSpace, TransferError> {
    assert!(n >= 1);
    let a_i = h.problem.stiffness(h.i)?;
    let fact = factorize(&a_i)?;
    // draw sequentially so the result is independent of scheduling
    let draws: Vec<Vector> = (0..n)
        .map(|_| draw_random_initial_with(&fact, rng))
        .collect();
    for l in (h.i + 1)..=h.j {
        h.problem.step_factorization(l)?;
    }
    let images: Result<Vec<Vector>, TransferError> = draws
        .into_par_iter()
        .map(|xi| apply_transfer(h, &xi))
        .collect();
    let block = DenseMatrix::from_columns(&images?);
    let (u, sigma, _) = svd(&block)?;
    let cutoff = 1e-12 * sigma[0];
    let keep = sigma.iter().take_while(|&&s| s > cutoff).count().max(1);
    Ok(LocalSpace {
        basis: u.columns(0, keep).into_owned(),
        singular_values: sigma.iter().copied().collect(),
        origin: SpaceOrigin::Randomized,
        rank_deficient: keep < n,
    })
}

/// Spectral-norm error of projecting the columns of T onto the space:
/// largest singular value of (I - B B^T) T.
pub fn projection_error(t: &DenseMatrix, space: &LocalSpace) -> f64 {
    if space.basis.ncols() == 0 {
        return crate::linalg::singular_values(t).map(|s| s[0]).unwrap_or(0.0);
    }
    assert_eq!(t.nrows(), space.basis.nrows());
    let b = &space.basis;
    let deflated = t - b * (b.transpose() * t);
    crate::linalg::singular_values(&deflated)
        .map(|s| s[0])
        .unwrap_or(0.0)
}

/// Probabilistic a priori bound on the expected randomized projection error:
/// min over m + s = n, m >= 2, s >= 2 of
/// kappa_const * [(1 + sqrt(m/(s-1))) sigma_{m+1} + (e sqrt(n)/s) (sum_{l>m} sigma_l^2)^{1/2}].
pub fn apriori_bound(sigma: &[f64], n: usize, kappa_const: f64) -> Result<f64, TransferError> {
    if n < 4 {
        return Err(TransferError::InsufficientN(n));
    }
    let tail_sq = |m: usize| -> f64 { sigma.iter().skip(m + 1).map(|s| s * s).sum::<f64>() };
    let mut best = f64::INFINITY;
    for m in 2..=(n - 2) {
        let s = n - m;
        let sigma_m1 = sigma.get(m).copied().unwrap_or(0.0);
        let head = (1.0 + (m as f64 / (s as f64 - 1.0)).sqrt()) * sigma_m1;
        let tail = (std::f64::consts::E * (n as f64).sqrt() / s as f64) * tail_sq(m).sqrt();
        best = best.min(kappa_const * (head + tail));
    }
    Ok(best)
}

/// The condition-number-like constant of the a priori bound:
/// (sigma_max(A_i) * lambda_max(M)) / (sigma_min(A_i) * lambda_min(M)).
/// Computed densely; intended for desk-scale instances only.
pub fn kappa_constant(mass: &SparseOperator, a_i: &SparseOperator) -> Result<f64, TransferError> {
    let sv = crate::linalg::singular_values(&a_i.to_dense())?;
    let sigma_max = sv[0];
    let sigma_min = sv[sv.len() - 1];
    let eigs = mass.to_dense().symmetric_eigen().eigenvalues;
    let lambda_max = eigs.iter().cloned().fold(f64::MIN, f64::max);
    let lambda_min = eigs.iter().cloned().fold(f64::MAX, f64::min);
    Ok((sigma_max * lambda_max) / (sigma_min * lambda_min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fem::{CoefficientField, ProblemSpec, SpatialField, StructuredGrid, TimeSignal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::sync::Arc;

    fn heat_problem(n: usize, n_time: usize, t_final: f64) -> DiscreteProblem {
        DiscreteProblem::new(ProblemSpec {
            grid: StructuredGrid::unit_square_dirichlet(n),
            t_final,
            n_time_points: n_time,
            kappa: CoefficientField::Constant(1.0),
            b_x: CoefficientField::Constant(0.0),
            b_y: CoefficientField::Constant(0.0),
            c: CoefficientField::Constant(0.0),
            f: CoefficientField::Constant(0.0),
            g_n: CoefficientField::Constant(0.0),
            u0: SpatialField::Constant(0.0),
        })
    }

    /// Heat problem with three disjoint boxcar sources, small mesh.
    fn stove_problem(n: usize) -> DiscreteProblem {
        let stoves = vec![
            (
                TimeSignal::Boxcar { t_on: 0.5, t_off: 2.5, value: 30.0 },
                SpatialField::box_indicator(0.2, 0.3, 0.2, 0.3),
            ),
            (
                TimeSignal::Boxcar { t_on: 3.5, t_off: 5.5, value: 20.0 },
                SpatialField::box_indicator(0.45, 0.55, 0.45, 0.55),
            ),
            (
                TimeSignal::Boxcar { t_on: 6.5, t_off: 8.5, value: 10.0 },
                SpatialField::box_indicator(0.65, 0.8, 0.65, 0.8),
            ),
        ];
        DiscreteProblem::new(ProblemSpec {
            grid: StructuredGrid::unit_square_dirichlet(n),
            t_final: 10.0,
            n_time_points: 301,
            kappa: CoefficientField::Constant(1.0),
            b_x: CoefficientField::Constant(0.0),
            b_y: CoefficientField::Constant(0.0),
            c: CoefficientField::Constant(0.0),
            f: CoefficientField::SeparableSum(stoves),
            g_n: CoefficientField::Constant(0.0),
            u0: SpatialField::Analytic(Arc::new(|x, y| {
                let pi = std::f64::consts::PI;
                (1..=3)
                    .map(|i| (i as f64 * pi * x).sin() * (i as f64 * pi * y).sin())
                    .sum()
            })),
        })
    }

    #[test]
    fn transfer_of_zero_is_zero() {
        let p = heat_problem(5, 20, 1.0);
        let h = TransferHandle::new(&p, 2, 8);
        let out = apply_transfer(&h, &Vector::zeros(p.n_dofs())).unwrap();
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn transfer_is_homogeneous() {
        let p = heat_problem(5, 20, 1.0);
        let h = TransferHandle::new(&p, 0, 6);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let xi = Vector::from_fn(p.n_dofs(), |_, _| rng.gen_range(-1.0..1.0));
        let t1 = apply_transfer(&h, &xi).unwrap();
        let t2 = apply_transfer(&h, &(&xi * 2.0)).unwrap();
        assert!((&t2 - &t1 * 2.0).norm() <= 1e-12 * t1.norm());
    }

    #[test]
    fn apply_matches_materialized_matrix() {
        let p = heat_problem(6, 20, 1.0); // N_D = 25
        let h = TransferHandle::new(&p, 1, 7);
        let t = materialize_transfer(&h).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let xi = Vector::from_fn(p.n_dofs(), |_, _| rng.gen_range(-1.0..1.0));
        let direct = apply_transfer(&h, &xi).unwrap();
        let via_matrix = &t * &xi;
        assert!((direct - &via_matrix).norm() <= 1e-11 * via_matrix.norm());
    }

    #[test]
    fn one_step_transfer_is_inverse_step_matrix_times_mass() {
        let p = heat_problem(5, 20, 1.0);
        let h = TransferHandle::new(&p, 3, 4);
        let t = materialize_transfer(&h).unwrap();
        let a = p.stiffness(4).unwrap();
        let s = p.mass().to_dense() + a.to_dense() * p.dt();
        let oracle = s.lu().solve(&p.mass().to_dense()).unwrap();
        assert!((&t - &oracle).norm() <= 1e-11 * oracle.norm());
    }

    #[test]
    fn transfer_composes_across_intermediate_index() {
        let p = heat_problem(5, 20, 1.0);
        let full = materialize_transfer(&TransferHandle::new(&p, 1, 9)).unwrap();
        let first = materialize_transfer(&TransferHandle::new(&p, 1, 5)).unwrap();
        let second = materialize_transfer(&TransferHandle::new(&p, 5, 9)).unwrap();
        let composed = &second * &first;
        assert!((&full - &composed).norm() <= 1e-10 * full.norm());
    }

    #[test]
    fn heat_transfer_spectral_radius_below_one() {
        let p = heat_problem(5, 20, 1.0);
        let t = materialize_transfer(&TransferHandle::new(&p, 0, 4)).unwrap();
        let radius = t
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        assert!(radius < 1.0);
    }

    #[test]
    fn materialize_cap_is_enforced() {
        let p = heat_problem(8, 20, 1.0);
        let h = TransferHandle::new(&p, 0, 3);
        assert!(matches!(
            materialize_transfer_with_cap(&h, 10),
            Err(TransferError::CapExceeded { .. })
        ));
    }

    #[test]
    fn numerically_rank_one_transfer_is_captured_by_one_vector() {
        // a long heat window damps everything beyond the first mode
        let p = heat_problem(4, 40, 40.0);
        let h = TransferHandle::new(&p, 0, 39);
        let t = materialize_transfer(&h).unwrap();
        let space = optimal_space(&h, 1).unwrap();
        let err = projection_error(&t, &space);
        assert!(err <= 1e-10 * space.singular_values[0]);
    }

    #[test]
    fn stove_window_singular_values_decay_exponentially() {
        let p = stove_problem(20);
        let h = TransferHandle::new(&p, 100, 115); // n_t = 15 window
        let space = optimal_space(&h, 15).unwrap();
        let sv = &space.singular_values;
        assert!(sv[0] / sv[14] >= 1e8);
    }

    #[test]
    fn optimal_space_singular_values_match_gram_eigen_oracle() {
        let p = heat_problem(6, 20, 1.0);
        let h = TransferHandle::new(&p, 2, 8);
        let t = materialize_transfer(&h).unwrap();
        let space = optimal_space(&h, 6).unwrap();
        // independent oracle: sqrt of eigenvalues of T^T T
        let mut eigs: Vec<f64> = (t.transpose() * &t)
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (k, s) in space.singular_values.iter().enumerate() {
            assert!((s - eigs[k].max(0.0).sqrt()).abs() <= 1e-10 * space.singular_values[0]);
        }
    }

    #[test]
    fn projection_error_is_eckart_young_optimal() {
        let p = heat_problem(6, 20, 1.0);
        let h = TransferHandle::new(&p, 2, 8);
        let t = materialize_transfer(&h).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..=6 {
            let space = optimal_space(&h, n).unwrap();
            let err = projection_error(&t, &space);
            let sigma_next = space.singular_values[n];
            assert!((err - sigma_next).abs() <= 1e-9 * space.singular_values[0]);
            assert!(err <= prev + 1e-14);
            prev = err;
        }
    }

    #[test]
    fn identity_draw_is_standard_normal() {
        let id = SparseOperator::identity(4);
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let n_draws = 20_000;
        let mut cov = DenseMatrix::zeros(4, 4);
        for _ in 0..n_draws {
            let x = draw_random_initial(&id, &mut rng).unwrap();
            cov += &x * x.transpose();
        }
        cov /= n_draws as f64;
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((cov[(i, j)] - expect).abs() < 0.05);
            }
        }
    }

    #[test]
    fn transformed_draw_has_whitened_covariance() {
        // Cov(A x) should be the identity when x ~ N(0, (A^T A)^{-1})
        let a = SparseOperator::from_triplets(
            4,
            4,
            &[
                (0, 0, 2.0),
                (0, 1, -0.5),
                (1, 1, 1.5),
                (2, 2, 3.0),
                (2, 3, 1.0),
                (3, 3, 0.8),
                (3, 0, 0.3),
            ],
        );
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let a_dense = a.to_dense();
        let n_draws = 20_000;
        let mut cov = DenseMatrix::zeros(4, 4);
        for _ in 0..n_draws {
            let x = draw_random_initial(&a, &mut rng).unwrap();
            let ax = &a_dense * &x;
            cov += &ax * ax.transpose();
        }
        cov /= n_draws as f64;
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((cov[(i, j)] - expect).abs() < 0.05);
            }
        }
    }

    #[test]
    fn draws_are_seed_deterministic() {
        let id = SparseOperator::identity(6);
        let mut r1 = ChaCha12Rng::seed_from_u64(9);
        let mut r2 = ChaCha12Rng::seed_from_u64(9);
        let x1 = draw_random_initial(&id, &mut r1).unwrap();
        let x2 = draw_random_initial(&id, &mut r2).unwrap();
        assert_eq!(x1, x2);
    }

    #[test]
    fn randomized_space_captures_numerically_rank_one_operator() {
        let p = heat_problem(4, 40, 40.0);
        let h = TransferHandle::new(&p, 0, 39);
        let t = materialize_transfer(&h).unwrap();
        let sigma = crate::linalg::singular_values(&t).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let space = randomized_range(&h, 1, &mut rng).unwrap();
        assert!(projection_error(&t, &space) <= 1e-10 * sigma[0]);
    }

    #[test]
    fn randomized_error_never_beats_optimal() {
        let p = heat_problem(6, 20, 1.0);
        let h = TransferHandle::new(&p, 2, 8);
        let t = materialize_transfer(&h).unwrap();
        let sigma = crate::linalg::singular_values(&t).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in [2usize, 4, 6] {
            for _ in 0..5 {
                let space = randomized_range(&h, n, &mut rng).unwrap();
                let err = projection_error(&t, &space);
                assert!(err >= sigma[space.dim()] * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn mean_randomized_error_within_apriori_bound() {
        let p = heat_problem(8, 30, 1.0);
        let h = TransferHandle::new(&p, 3, 8);
        let t = materialize_transfer(&h).unwrap();
        let sigma: Vec<f64> = crate::linalg::singular_values(&t).unwrap().iter().copied().collect();
        let a_i = p.stiffness(h.i).unwrap();
        let kappa = kappa_constant(p.mass(), &a_i).unwrap();
        let n = 6;
        let bound = apriori_bound(&sigma, n, kappa).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let trials = 100;
        let mut total = 0.0;
        for _ in 0..trials {
            let space = randomized_range(&h, n, &mut rng).unwrap();
            total += projection_error(&t, &space);
        }
        assert!(total / trials as f64 <= bound);
    }

    #[test]
    fn randomized_error_within_bound_in_ninety_percent_of_trials() {
        // the bound holds in expectation; with n = m + 2 it should also
        // hold per trial in the vast majority of cases
        let p = heat_problem(8, 30, 1.0);
        let h = TransferHandle::new(&p, 3, 8);
        let t = materialize_transfer(&h).unwrap();
        let sigma: Vec<f64> = crate::linalg::singular_values(&t).unwrap().iter().copied().collect();
        let a_i = p.stiffness(h.i).unwrap();
        let kappa = kappa_constant(p.mass(), &a_i).unwrap();
        let n = 6;
        let bound = apriori_bound(&sigma, n, kappa).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let trials = 200;
        let mut within = 0;
        for _ in 0..trials {
            let space = randomized_range(&h, n, &mut rng).unwrap();
            if projection_error(&t, &space) <= bound {
                within += 1;
            }
        }
        assert!(within >= 180, "bound held in only {within}/{trials} trials");
    }

    #[test]
    fn projection_onto_full_basis_is_exact() {
        let p = heat_problem(5, 20, 1.0);
        let h = TransferHandle::new(&p, 0, 5);
        let t = materialize_transfer(&h).unwrap();
        let n = t.ncols();
        let space = optimal_space(&h, n).unwrap();
        assert!(projection_error(&t, &space) <= 1e-11 * space.singular_values[0]);
    }

    #[test]
    fn empty_space_projection_error_is_largest_singular_value() {
        let p = heat_problem(5, 20, 1.0);
        let h = TransferHandle::new(&p, 0, 5);
        let t = materialize_transfer(&h).unwrap();
        let sigma = crate::linalg::singular_values(&t).unwrap();
        let empty = LocalSpace {
            basis: DenseMatrix::zeros(t.nrows(), 0),
            singular_values: vec![],
            origin: SpaceOrigin::Optimal,
            rank_deficient: false,
        };
        assert!((projection_error(&t, &empty) - sigma[0]).abs() <= 1e-12 * sigma[0]);
    }

    #[test]
    fn projection_error_matches_power_iteration_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let t = DenseMatrix::from_fn(25, 25, |_, _| rng.gen_range(-1.0..1.0));
        // random orthonormal B from a QR factorization
        let g = DenseMatrix::from_fn(25, 5, |_, _| rng.gen_range(-1.0..1.0));
        let b = g.qr().q();
        let space = LocalSpace {
            basis: b.clone(),
            singular_values: vec![],
            origin: SpaceOrigin::Randomized,
            rank_deficient: false,
        };
        let err = projection_error(&t, &space);

        // power iteration on D^T D, D = (I - B B^T) T
        let d = &t - &b * (b.transpose() * &t);
        let mut v = Vector::from_fn(25, |_, _| rng.gen_range(-1.0..1.0));
        v /= v.norm();
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let w = d.transpose() * (&d * &v);
            lambda = w.norm();
            v = w / lambda;
        }
        assert!((err - lambda.sqrt()).abs() <= 1e-8 * err);
    }

    #[test]
    fn apriori_bound_is_zero_for_exact_rank_one() {
        let sigma = vec![1.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(apriori_bound(&sigma, 4, 7.0).unwrap(), 0.0);
    }

    #[test]
    fn apriori_bound_scales_linearly_in_kappa() {
        let sigma: Vec<f64> = (0..10).map(|k| 0.5f64.powi(k)).collect();
        let b1 = apriori_bound(&sigma, 6, 1.0).unwrap();
        let b2 = apriori_bound(&sigma, 6, 2.0).unwrap();
        assert!((b2 - 2.0 * b1).abs() <= 1e-14 * b2);
    }

    #[test]
    fn apriori_bound_matches_exhaustive_partition_oracle() {
        let sigma: Vec<f64> = (0..12).map(|k| 0.5f64.powi(k)).collect();
        let n = 6;
        let kappa = 3.0;
        let bound = apriori_bound(&sigma, n, kappa).unwrap();
        // independent exhaustive enumeration of (m, s) partitions
        let mut oracle = f64::INFINITY;
        for m in 2..=n {
            let s = n as i64 - m as i64;
            if s < 2 {
                continue;
            }
            let s = s as usize;
            let tail: f64 = sigma[(m + 1)..].iter().map(|x| x * x).sum::<f64>().sqrt();
            let val = kappa
                * ((1.0 + (m as f64 / (s as f64 - 1.0)).sqrt()) * sigma[m]
                    + std::f64::consts::E * (n as f64).sqrt() / s as f64 * tail);
            oracle = oracle.min(val);
        }
        assert!((bound - oracle).abs() <= 1e-14 * oracle);
    }

    #[test]
    fn apriori_bound_rejects_small_n() {
        assert!(matches!(
            apriori_bound(&[1.0, 0.5], 3, 1.0),
            Err(TransferError::InsufficientN(3))
        ));
    }
}
