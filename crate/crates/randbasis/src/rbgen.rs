//! Reduced basis generation by randomized time sampling: draw time points
//! from a sampling distribution, run short local-in-time solves with random
//! initial conditions in parallel, harvest the late-window states together
//! with the evolution of the initial condition, and compress everything with
//! a truncated SVD. Also provides the sequential POD baseline and basis
//! persistence.

use crate::linalg::{factorize, truncated_svd, DenseMatrix, Factorization, LinalgError, Vector};
use crate::sampling::{draw_time_indices, TimeSamplingDist};
use crate::timestep::{DiscreteProblem, StepError};
use crate::transfer::draw_random_initial_with;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RbError {
    #[error("all drawn time indices were at or below the window length; enlarge the draw count")]
    EmptySampling,
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed basis file: {0}")]
    MalformedBasisFile(String),
}

/// Parameters of the randomized generation algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbParams {
    /// Window length in implicit Euler steps.
    pub n_t: usize,
    /// First window step whose state is harvested (1 <= k <= n_t).
    pub k: usize,
    /// Relative SVD truncation tolerance.
    pub tol: f64,
    /// Random initial conditions per drawn time point.
    pub n_ic: usize,
    /// Split each window into one source-driven zero-IC solve plus n_ic
    /// source-free solves instead of n_ic combined solves.
    pub separate_source: bool,
    /// Retain only the first occurrence of duplicate drawn indices.
    pub dedupe: bool,
    pub seed: u64,
}

impl RbParams {
    pub fn validate(&self) {
        assert!(self.n_t >= 1, "window length must be positive");
        assert!(1 <= self.k && self.k <= self.n_t, "need 1 <= k <= n_t");
        assert!(self.tol > 0.0 && self.tol <= 1.0, "tol must lie in (0, 1]");
        assert!(self.n_ic >= 1, "need at least one initial condition");
    }

    /// Sensible defaults: window of 15 steps, harvest the last 3 states.
    pub fn default_diffusion(seed: u64) -> Self {
        Self {
            n_t: 15,
            k: 13,
            tol: 1e-8,
            n_ic: 1,
            separate_source: false,
            dedupe: false,
            seed,
        }
    }

    /// Advection-dominated default: longer harvest range (k = n_t - 6).
    pub fn default_advection(seed: u64) -> Self {
        Self {
            n_t: 15,
            k: 9,
            tol: 1e-8,
            n_ic: 1,
            separate_source: false,
            dedupe: false,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotOrigin {
    /// Harvested from the local solve ending at the drawn index.
    Window { window_ordinal: usize },
    /// From the evolution of the initial condition over the first steps.
    U0Evolution,
}

/// Column-stacked snapshot vectors with provenance metadata.
#[derive(Debug, Clone)]
pub struct SnapshotSet {
    pub columns: Vec<Vector>,
    pub meta: Vec<SnapshotMeta>,
}

#[derive(Debug, Clone, Copy)]
pub struct SnapshotMeta {
    pub origin: SnapshotOrigin,
    /// Absolute time index of the window end (or of the snapshot itself for
    /// the u0 evolution).
    pub end_index: usize,
    /// Step offset of the snapshot within its window.
    pub offset: usize,
}

impl SnapshotSet {
    pub fn to_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_columns(&self.columns)
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

/// Orthonormal reduced basis with its generation record.
#[derive(Debug, Clone)]
pub struct ReducedBasis {
    pub u_red: DenseMatrix,
    pub params: RbParams,
    pub drawn_indices: Vec<usize>,
    /// Singular values of the snapshot matrix.
    pub singular_values: Vec<f64>,
    /// Total implicit Euler steps executed during generation.
    pub budget_steps: usize,
    pub n_snapshots: usize,
}

impl ReducedBasis {
    pub fn dim(&self) -> usize {
        self.u_red.ncols()
    }
}

/// Run the randomized generation algorithm end to end.
///
/// Indices are drawn from the given (distribution, count) pairs, draws at or
/// below n_t are discarded, and each survivor idx yields the window
/// [idx - n_t, idx]. Each window is solved n_ic times from random initial
/// conditions (plus one source-driven zero-IC solve when separate_source),
/// harvesting the states at window steps k..n_t. The evolution of u0 over
/// the first n_t steps is appended, and the stacked snapshots are compressed
/// by a truncated SVD.
pub fn generate(
    problem: &DiscreteProblem,
    params: RbParams,
    dists: &[(&TimeSamplingDist, usize)],
) -> Result<ReducedBasis, RbError> {
    params.validate();
    assert!(
        params.n_t < problem.n_time_points(),
        "window length must fit in the time grid"
    );
    let mut rng = ChaCha12Rng::seed_from_u64(params.seed);
    let drawn = draw_time_indices(dists, params.n_t, params.dedupe, &mut rng);
    let requested: usize = dists.iter().map(|(_, c)| c).sum();
    if drawn.is_empty() && requested > 0 {
        return Err(RbError::EmptySampling);
    }
    let snapshots = collect_snapshots(problem, &params, &drawn)?;
    let s = snapshots.to_matrix();
    let (u_red, sigma) = truncated_svd(&s, params.tol)?;
    let runs_per_window = if params.separate_source {
        params.n_ic + 1
    } else {
        params.n_ic
    };
    Ok(ReducedBasis {
        u_red,
        params,
        drawn_indices: drawn.clone(),
        singular_values: sigma.iter().copied().collect(),
        budget_steps: drawn.len() * params.n_t * runs_per_window + params.n_t,
        n_snapshots: snapshots.len(),
    })
}

/// Window solves plus the u0 evolution, in a deterministic column order
/// (window ordinal, then run ordinal, then step offset) independent of the
/// parallel schedule.
pub fn collect_snapshots(
    problem: &DiscreteProblem,
    params: &RbParams,
    drawn: &[usize],
) -> Result<SnapshotSet, RbError> {
    // runs: (window ordinal, run ordinal); run 0 is the source run when
    // separate_source is on, random-IC runs follow
    let runs_per_window = if params.separate_source {
        params.n_ic + 1
    } else {
        params.n_ic
    };
    let mut tasks = Vec::new();
    for (w, &idx) in drawn.iter().enumerate() {
        for run in 0..runs_per_window {
            tasks.push((w, idx, run));
        }
    }
    // factorizations of the window-start stiffness matrices, shared across
    // duplicate windows (one shared slot when the stiffness is constant)
    let draw_facts: Mutex<HashMap<usize, Arc<Factorization>>> = Mutex::new(HashMap::new());
    let stiffness_const = problem.spec().stiffness_time_independent();
    let draw_fact = |start: usize| -> Result<Arc<Factorization>, RbError> {
        let key = if stiffness_const { 0 } else { start };
        if let Some(f) = draw_facts.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let a = problem.stiffness(start)?;
        let f = Arc::new(factorize(&a)?);
        Ok(draw_facts.lock().unwrap().entry(key).or_insert(f).clone())
    };
    // warm the step factorization cache sequentially; the parallel solves
    // then only read shared state
    for &idx in drawn {
        for l in (idx - params.n_t + 1)..=idx {
            problem.step_factorization(l)?;
        }
    }
    for l in 1..=params.n_t {
        problem.step_factorization(l)?;
    }

    let window_results: Result<Vec<Vec<Vector>>, RbError> = tasks
        .par_iter()
        .map(|&(w, idx, run)| {
            let start = idx - params.n_t;
            let source_run = params.separate_source && run == 0;
            let u_init = if source_run {
                Vector::zeros(problem.n_dofs())
            } else {
                let ic_ordinal = if params.separate_source { run - 1 } else { run };
                let mut task_rng = ChaCha12Rng::seed_from_u64(params.seed);
                task_rng.set_stream(1 + (w as u64) * params.n_ic as u64 + ic_ordinal as u64);
                let fact = draw_fact(start)?;
                draw_random_initial_with(fact.as_ref(), &mut task_rng)
            };
            let with_source = source_run || !params.separate_source;
            let traj = problem.solve_trajectory(start, idx, &u_init, with_source)?;
            Ok((params.k..=params.n_t)
                .map(|off| traj.state(start + off).clone())
                .collect())
        })
        .collect();
    let window_results = window_results?;

    let u0_traj = problem.solve_trajectory(0, params.n_t, &problem.u0().clone(), true)?;

    let mut columns = Vec::new();
    let mut meta = Vec::new();
    for (t, states) in window_results.into_iter().enumerate() {
        let (w, idx, _) = tasks[t];
        for (o, state) in states.into_iter().enumerate() {
            columns.push(state);
            meta.push(SnapshotMeta {
                origin: SnapshotOrigin::Window { window_ordinal: w },
                end_index: idx,
                offset: params.k + o,
            });
        }
    }
    for (off, state) in u0_traj.states.iter().enumerate() {
        columns.push(state.clone());
        meta.push(SnapshotMeta {
            origin: SnapshotOrigin::U0Evolution,
            end_index: off,
            offset: off,
        });
    }
    Ok(SnapshotSet { columns, meta })
}

/// Sequential POD baseline: truncated SVD of the solution trajectory over
/// the first n_steps implicit Euler steps (initial state included).
pub fn pod_baseline(
    problem: &DiscreteProblem,
    n_steps: usize,
    tol: f64,
) -> Result<ReducedBasis, RbError> {
    assert!(
        n_steps >= 1 && n_steps <= problem.n_time_points() - 1,
        "n_steps out of range"
    );
    let traj = problem.solve_trajectory(0, n_steps, &problem.u0().clone(), true)?;
    let s = DenseMatrix::from_columns(&traj.states);
    let (u_red, sigma) = truncated_svd(&s, tol)?;
    Ok(ReducedBasis {
        u_red,
        params: RbParams {
            n_t: n_steps,
            k: 1,
            tol,
            n_ic: 1,
            separate_source: false,
            dedupe: false,
            seed: 0,
        },
        drawn_indices: vec![],
        singular_values: sigma.iter().copied().collect(),
        budget_steps: n_steps,
        n_snapshots: n_steps + 1,
    })
}

const BASIS_MAGIC: &[u8; 8] = b"RBASIS01";

/// Persist a basis: fixed header, then column-major doubles, all little
/// endian.
pub fn save_basis(path: &Path, basis: &ReducedBasis) -> Result<(), RbError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(BASIS_MAGIC)?;
    let p = &basis.params;
    for v in [
        basis.u_red.nrows() as u64,
        basis.u_red.ncols() as u64,
        p.seed,
        p.n_t as u64,
        p.k as u64,
        p.n_ic as u64,
        (p.separate_source as u64) | ((p.dedupe as u64) << 1),
    ] {
        f.write_all(&v.to_le_bytes())?;
    }
    f.write_all(&p.tol.to_le_bytes())?;
    for v in basis.u_red.iter() {
        f.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Read back a basis written by `save_basis`. Generation provenance that is
/// not stored (drawn indices, singular values, budget) comes back empty.
pub fn load_basis(path: &Path) -> Result<ReducedBasis, RbError> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    f.read_exact(&mut magic)?;
    if &magic != BASIS_MAGIC {
        return Err(RbError::MalformedBasisFile("bad magic".into()));
    }
    let mut u64s = [0u64; 7];
    for slot in &mut u64s {
        let mut buf = [0u8; 8];
        f.read_exact(&mut buf)?;
        *slot = u64::from_le_bytes(buf);
    }
    let mut buf = [0u8; 8];
    f.read_exact(&mut buf)?;
    let tol = f64::from_le_bytes(buf);
    let (n_rows, n_cols) = (u64s[0] as usize, u64s[1] as usize);
    let mut values = Vec::with_capacity(n_rows * n_cols);
    for _ in 0..n_rows * n_cols {
        let mut b = [0u8; 8];
        f.read_exact(&mut b)?;
        values.push(f64::from_le_bytes(b));
    }
    Ok(ReducedBasis {
        u_red: DenseMatrix::from_vec(n_rows, n_cols, values),
        params: RbParams {
            n_t: u64s[3] as usize,
            k: u64s[4] as usize,
            tol,
            n_ic: u64s[5] as usize,
            separate_source: u64s[6] & 1 != 0,
            dedupe: u64s[6] & 2 != 0,
            seed: u64s[2],
        },
        drawn_indices: vec![],
        singular_values: vec![],
        budget_steps: 0,
        n_snapshots: n_cols,
    })
}

/// Sidecar CSV of the snapshot singular values.
pub fn write_singular_values_csv(path: &Path, basis: &ReducedBasis) -> Result<(), RbError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "index,singular_value")?;
    for (i, s) in basis.singular_values.iter().enumerate() {
        writeln!(f, "{i},{s:.16e}")?;
    }
    Ok(())
}
