//! Implicit Euler propagation, global and local in time, on top of a
//! discretized problem that caches assembled operators and factorizations
//! per time index.
//!
//! One step solves (M + dt * A_l) u_l = dt * F_l + M * u_{l-1}.

use crate::grid_fem::{assemble_mass, assemble_rhs, assemble_stiffness, h1_product};
use crate::grid_fem::{DofMap, FemError, ProblemSpec};
use crate::linalg::{factorize, Factorization, LinalgError, SparseOperator, Vector};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StepError {
    #[error("time index range [{i}, {j}] invalid for {n_time_points} time points")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        n_time_points: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Fem(#[from] FemError),
}

/// States u_i..u_j of one implicit Euler sweep.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub start: usize,
    pub states: Vec<Vector>,
}

impl Trajectory {
    pub fn end(&self) -> usize {
        self.start + self.states.len() - 1
    }

    /// State at absolute time index l.
    pub fn state(&self, l: usize) -> &Vector {
        &self.states[l - self.start]
    }

    pub fn last(&self) -> &Vector {
        self.states.last().expect("trajectory never empty")
    }
}

/// Per-time-index cache of step-matrix factorizations. When the stiffness
/// matrix is time-independent a single factorization serves every index.
pub struct StepCache {
    slots: Mutex<HashMap<usize, Arc<Factorization>>>,
    time_independent: bool,
}

impl StepCache {
    pub fn new(time_independent: bool) -> Self {
        Self {
            slots: Mutex::new(HashMap::new()),
            time_independent,
        }
    }

    fn key(&self, l: usize) -> usize {
        if self.time_independent {
            0
        } else {
            l
        }
    }

    pub fn get(&self, l: usize) -> Option<Arc<Factorization>> {
        self.slots.lock().unwrap().get(&self.key(l)).cloned()
    }

    /// Insert-once: if another worker raced us, keep the first entry.
    pub fn insert(&self, l: usize, fact: Arc<Factorization>) -> Arc<Factorization> {
        let mut slots = self.slots.lock().unwrap();
        slots.entry(self.key(l)).or_insert(fact).clone()
    }

    pub fn len(&self) -> usize {
        self.slots.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One implicit Euler step given the factorization of (M + dt * A_l).
pub fn step(
    fact: &Factorization,
    mass: &SparseOperator,
    f_l: &Vector,
    dt: f64,
    u_prev: &Vector,
) -> Vector {
    let mut rhs = mass.matvec(u_prev);
    if dt != 0.0 {
        rhs.axpy(dt, f_l, 1.0);
    }
    fact.solve_in_place(&mut rhs);
    rhs
}

/// A problem discretized in space: assembled operators, right-hand sides and
/// step factorizations, each cached per time index and shared across
/// threads.
pub struct DiscreteProblem {
    spec: ProblemSpec,
    dofmap: DofMap,
    mass: SparseOperator,
    u0: Vector,
    stiffness_const: bool,
    rhs_const: bool,
    step_cache: StepCache,
    stiffness_cache: Mutex<HashMap<usize, Arc<SparseOperator>>>,
    rhs_cache: Mutex<HashMap<usize, Arc<Vector>>>,
    h1: Mutex<Option<Arc<SparseOperator>>>,
}

impl DiscreteProblem {
    /// Discretize with an explicit initial coefficient vector instead of
    /// interpolating the spec's initial condition.
    pub fn new_with_u0(spec: ProblemSpec, u0: Vector) -> Self {
        let mut p = Self::new(spec);
        assert_eq!(u0.len(), p.n_dofs());
        p.u0 = u0;
        p
    }

    pub fn new(spec: ProblemSpec) -> Self {
        let dofmap = DofMap::new(&spec.grid);
        let mass = assemble_mass(&spec.grid, &dofmap);
        let u0 = spec.discrete_u0(&dofmap);
        let stiffness_const = spec.stiffness_time_independent();
        let rhs_const = spec.f.is_time_independent() && spec.g_n.is_time_independent();
        Self {
            step_cache: StepCache::new(stiffness_const),
            stiffness_cache: Mutex::new(HashMap::new()),
            rhs_cache: Mutex::new(HashMap::new()),
            h1: Mutex::new(None),
            spec,
            dofmap,
            mass,
            u0,
            stiffness_const,
            rhs_const,
        }
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn dofmap(&self) -> &DofMap {
        &self.dofmap
    }

    pub fn n_dofs(&self) -> usize {
        self.dofmap.n_dofs()
    }

    pub fn n_time_points(&self) -> usize {
        self.spec.n_time_points
    }

    pub fn dt(&self) -> f64 {
        self.spec.dt()
    }

    pub fn mass(&self) -> &SparseOperator {
        &self.mass
    }

    pub fn u0(&self) -> &Vector {
        &self.u0
    }

    pub fn h1_product(&self) -> Arc<SparseOperator> {
        let mut slot = self.h1.lock().unwrap();
        slot.get_or_insert_with(|| Arc::new(h1_product(&self.spec.grid, &self.dofmap)))
            .clone()
    }

    /// Stiffness matrix A_l, cached.
    pub fn stiffness(&self, l: usize) -> Result<Arc<SparseOperator>, StepError> {
        let key = if self.stiffness_const { 0 } else { l };
        if let Some(a) = self.stiffness_cache.lock().unwrap().get(&key) {
            return Ok(a.clone());
        }
        let a = Arc::new(assemble_stiffness(
            &self.spec.grid,
            &self.dofmap,
            &self.spec.kappa,
            &self.spec.b_x,
            &self.spec.b_y,
            &self.spec.c,
            l,
            self.spec.time(l),
        )?);
        Ok(self
            .stiffness_cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(a)
            .clone())
    }

    /// Right-hand side F_l, cached.
    pub fn rhs(&self, l: usize) -> Arc<Vector> {
        let key = if self.rhs_const { 0 } else { l };
        if let Some(f) = self.rhs_cache.lock().unwrap().get(&key) {
            return f.clone();
        }
        let f = Arc::new(assemble_rhs(
            &self.spec.grid,
            &self.dofmap,
            &self.spec.f,
            &self.spec.g_n,
            l,
            self.spec.time(l),
        ));
        self.rhs_cache.lock().unwrap().entry(key).or_insert(f).clone()
    }

    /// Factorization of (M + dt * A_l), cached.
    pub fn step_factorization(&self, l: usize) -> Result<Arc<Factorization>, StepError> {
        if let Some(f) = self.step_cache.get(l) {
            return Ok(f);
        }
        let a = self.stiffness(l)?;
        let s = self.mass.add_scaled(self.dt(), &a);
        let fact = Arc::new(factorize(&s)?);
        Ok(self.step_cache.insert(l, fact))
    }

    /// Implicit Euler from index i to j starting at `u_init`. With
    /// `with_source = false` the right-hand side is dropped entirely
    /// (transfer-operator mode).
    pub fn solve_trajectory(
        &self,
        i: usize,
        j: usize,
        u_init: &Vector,
        with_source: bool,
    ) -> Result<Trajectory, StepError> {
        if i >= j || j > self.spec.n_time_points - 1 {
            return Err(StepError::IndexOutOfRange {
                i,
                j,
                n_time_points: self.spec.n_time_points,
            });
        }
        assert_eq!(u_init.len(), self.n_dofs());
        let dt = self.dt();
        let zero = Vector::zeros(self.n_dofs());
        let mut states = Vec::with_capacity(j - i + 1);
        states.push(u_init.clone());
        for l in (i + 1)..=j {
            let fact = self.step_factorization(l)?;
            let f_l = if with_source { self.rhs(l) } else { Arc::new(zero.clone()) };
            let u = step(&fact, &self.mass, &f_l, dt, states.last().unwrap());
            states.push(u);
        }
        Ok(Trajectory { start: i, states })
    }

    /// The global solution: all time points starting from the discrete
    /// initial condition, source active.
    pub fn solve_full(&self) -> Result<Trajectory, StepError> {
        let u0 = self.u0.clone();
        self.solve_trajectory(0, self.spec.n_time_points - 1, &u0, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fem::{CoefficientField, SpatialField, StructuredGrid};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::sync::Arc as StdArc;

    fn heat_problem(n: usize, n_time: usize, t_final: f64) -> ProblemSpec {
        ProblemSpec {
            grid: StructuredGrid::unit_square_dirichlet(n),
            t_final,
            n_time_points: n_time,
            kappa: CoefficientField::Constant(1.0),
            b_x: CoefficientField::Constant(0.0),
            b_y: CoefficientField::Constant(0.0),
            c: CoefficientField::Constant(0.0),
            f: CoefficientField::Constant(0.0),
            g_n: CoefficientField::Constant(0.0),
            u0: SpatialField::Analytic(StdArc::new(|x, y| {
                (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).sin()
            })),
        }
    }

    fn random_vector(n: usize, rng: &mut impl Rng) -> Vector {
        Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn zero_source_zero_state_stays_zero() {
        let p = DiscreteProblem::new(heat_problem(4, 10, 1.0));
        let zero = Vector::zeros(p.n_dofs());
        let traj = p.solve_trajectory(0, 5, &zero, true).unwrap();
        for s in &traj.states {
            assert_eq!(s.norm(), 0.0);
        }
    }

    #[test]
    fn heat_step_contracts_in_mass_norm() {
        let p = DiscreteProblem::new(heat_problem(5, 20, 1.0));
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let u_prev = random_vector(p.n_dofs(), &mut rng);
        let fact = p.step_factorization(1).unwrap();
        let zero = Vector::zeros(p.n_dofs());
        let u = step(&fact, p.mass(), &zero, p.dt(), &u_prev);
        let norm_new = p.mass().bilinear(&u, &u);
        let norm_old = p.mass().bilinear(&u_prev, &u_prev);
        assert!(norm_new <= norm_old);
    }

    #[test]
    fn step_matches_dense_solve_oracle() {
        // small problem with advection and reaction, random data
        let mut spec = heat_problem(4, 10, 1.0);
        spec.b_x = CoefficientField::Constant(2.0);
        spec.c = CoefficientField::Constant(0.5);
        spec.f = CoefficientField::Constant(1.0);
        let p = DiscreteProblem::new(spec);
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let u_prev = random_vector(p.n_dofs(), &mut rng);

        let fact = p.step_factorization(3).unwrap();
        let f_l = p.rhs(3);
        let u = step(&fact, p.mass(), &f_l, p.dt(), &u_prev);

        let a = p.stiffness(3).unwrap();
        let s_dense = p.mass().to_dense() + a.to_dense() * p.dt();
        let rhs: Vector = p.mass().matvec(&u_prev) + f_l.as_ref() * p.dt();
        let u_ref = s_dense.lu().solve(&rhs).unwrap();
        assert!((&u - &u_ref).norm() <= 1e-10 * u_ref.norm());
    }

    #[test]
    fn full_trajectory_satisfies_step_equation() {
        let mut spec = heat_problem(4, 8, 1.0);
        spec.f = CoefficientField::Constant(1.0);
        let p = DiscreteProblem::new(spec);
        let traj = p.solve_full().unwrap();
        assert_eq!(traj.start, 0);
        assert_eq!(traj.end(), 7);
        for l in 1..=7 {
            let a = p.stiffness(l).unwrap();
            let s = p.mass().add_scaled(p.dt(), &a);
            let lhs = s.matvec(traj.state(l));
            let rhs: Vector =
                p.mass().matvec(traj.state(l - 1)) + p.rhs(l).as_ref() * p.dt();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn source_free_zero_initial_gives_zero_trajectory() {
        let mut spec = heat_problem(4, 10, 1.0);
        spec.f = CoefficientField::Constant(3.0);
        let p = DiscreteProblem::new(spec);
        let zero = Vector::zeros(p.n_dofs());
        let traj = p.solve_trajectory(2, 7, &zero, false).unwrap();
        for s in &traj.states {
            assert_eq!(s.norm(), 0.0);
        }
    }

    #[test]
    fn superposition_of_source_and_initial_condition() {
        let mut spec = heat_problem(5, 12, 1.0);
        spec.f = CoefficientField::separable(
            crate::grid_fem::TimeSignal::Boxcar {
                t_on: 0.0,
                t_off: 0.6,
                value: 2.0,
            },
            SpatialField::box_indicator(0.2, 0.6, 0.2, 0.6),
        );
        let p = DiscreteProblem::new(spec);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let u_init = random_vector(p.n_dofs(), &mut rng);
        let zero = Vector::zeros(p.n_dofs());

        let both = p.solve_trajectory(1, 9, &u_init, true).unwrap();
        let ic_only = p.solve_trajectory(1, 9, &u_init, false).unwrap();
        let src_only = p.solve_trajectory(1, 9, &zero, true).unwrap();
        for l in 1..=9 {
            let combined = ic_only.state(l) + src_only.state(l);
            assert!((both.state(l) - combined).norm() <= 1e-10 * both.state(l).norm().max(1.0));
        }
    }

    #[test]
    fn index_out_of_range_is_reported() {
        let p = DiscreteProblem::new(heat_problem(4, 10, 1.0));
        let zero = Vector::zeros(p.n_dofs());
        assert!(matches!(
            p.solve_trajectory(3, 3, &zero, true),
            Err(StepError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            p.solve_trajectory(0, 10, &zero, true),
            Err(StepError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn time_independent_stiffness_uses_one_factorization() {
        let p = DiscreteProblem::new(heat_problem(4, 30, 1.0));
        let _ = p.solve_full().unwrap();
        assert_eq!(p.step_cache.len(), 1);
    }

    #[test]
    fn time_dependent_stiffness_caches_per_index() {
        let mut spec = heat_problem(4, 6, 1.0);
        spec.kappa = CoefficientField::SeparableSum(vec![
            (crate::grid_fem::TimeSignal::Constant(1.0), SpatialField::Constant(1.0)),
            (
                crate::grid_fem::TimeSignal::Boxcar {
                    t_on: 0.4,
                    t_off: 1.0,
                    value: 1.0,
                },
                SpatialField::Constant(1.0),
            ),
        ]);
        let p = DiscreteProblem::new(spec);
        let _ = p.solve_full().unwrap();
        assert_eq!(p.step_cache.len(), 5);
    }

    #[test]
    fn trajectories_are_deterministic() {
        let p = DiscreteProblem::new(heat_problem(5, 15, 1.0));
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let u_init = random_vector(p.n_dofs(), &mut rng);
        let t1 = p.solve_trajectory(2, 10, &u_init, false).unwrap();
        let t2 = p.solve_trajectory(2, 10, &u_init, false).unwrap();
        for l in 2..=10 {
            assert_eq!(t1.state(l), t2.state(l));
        }
    }

    #[test]
    fn discrete_caccioppoli_inequality_holds_with_slack_two() {
        let p = DiscreteProblem::new(heat_problem(6, 40, 2.0));
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let dt = p.dt();
        for _ in 0..20 {
            let i = rng.gen_range(0..20);
            let j = i + rng.gen_range(5..19);
            let w0 = random_vector(p.n_dofs(), &mut rng);
            let traj = p.solve_trajectory(i, j, &w0, false).unwrap();
            let terminal = p.mass().bilinear(traj.last(), traj.last());
            let time_integral: f64 = traj
                .states
                .iter()
                .map(|w| dt * p.mass().bilinear(w, w))
                .sum();
            let window = (j - i) as f64 * dt;
            assert!(terminal <= 2.0 * (2.0 / window) * time_integral);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        // source-free propagation is linear in the initial state
        #[test]
        fn source_free_propagation_is_linear(
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
            seed in 0u64..u64::MAX,
        ) {
            let p = DiscreteProblem::new(heat_problem(4, 12, 1.0));
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let x = random_vector(p.n_dofs(), &mut rng);
            let y = random_vector(p.n_dofs(), &mut rng);
            let combo = &x * alpha + &y * beta;

            let tx = p.solve_trajectory(0, 6, &x, false).unwrap();
            let ty = p.solve_trajectory(0, 6, &y, false).unwrap();
            let tc = p.solve_trajectory(0, 6, &combo, false).unwrap();
            for l in 0..=6 {
                let expect = tx.state(l) * alpha + ty.state(l) * beta;
                let scale = expect.norm().max(1.0);
                prop_assert!((tc.state(l) - expect).norm() <= 1e-9 * scale);
            }
        }
    }
}
