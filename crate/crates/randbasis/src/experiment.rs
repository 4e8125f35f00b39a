//! Config-driven experiment runner.
//!
//! An experiment repeats randomized basis generation over many seeds on one
//! problem, measures the reduction error of every realization against the
//! sequential reference solution, and writes quantile tables plus per-seed
//! CSVs for external plotting. Configs are flat `key = value` text files
//! with namespaced keys (`problem.*`, `rb.*`, `dist.*`, `run.*`).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::grid_fem::ProblemSpec;
use crate::problems::{builtin_problem, builtin_problem_with_mesh, ProblemError};
use crate::rbgen::{self, RbParams};
use crate::rom::{self, ErrorReport};
use crate::sampling::{
    build_data_matrix, leverage_score_dist, squared_norm_dist, uniform_dist, DataKind, DistRecipe,
    TimeSamplingDist,
};
use crate::timestep::DiscreteProblem;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("full-order solve failed: {0}")]
    Step(#[from] crate::timestep::StepError),
    #[error("sampling failed: {0}")]
    Sampling(#[from] crate::sampling::SamplingError),
    #[error("basis generation failed: {0}")]
    Rb(#[from] crate::rbgen::RbError),
    #[error("reduced solve failed: {0}")]
    Rom(#[from] crate::rom::RomError),
    #[error("all {0} realizations failed")]
    AllSeedsFailed(usize),
}

/// One time-sampling distribution with the number of indices drawn from it.
#[derive(Debug, Clone)]
pub struct DistSpec {
    pub recipe: DistRecipe,
    pub data: DataKind,
    pub count: usize,
}

/// Parsed experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Built-in problem name, e.g. `example2` or `example3a(100)`.
    pub problem: String,
    /// Cells per unit length; `None` keeps the problem's reference mesh.
    pub mesh: Option<usize>,
    /// Basis generation parameters; the seed field is ignored in favour of
    /// `run.seed` + realization index.
    pub rb: RbParams,
    pub dists: Vec<DistSpec>,
    pub realizations: usize,
    pub base_seed: u64,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
    /// Steps of the sequential trajectory given to the POD baseline; `None`
    /// skips the comparison.
    pub pod_steps: Option<usize>,
    pub pod_tol: f64,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Parses the flat key-value format. Lines are `key = value`; blank
    /// lines and `#` comments are ignored. Unknown keys are an error so
    /// typos do not silently fall back to defaults.
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let bad = |msg: String| ExperimentError::Config(msg);
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(bad(format!("duplicate key `{key}`")));
            }
        }

        let mut take = |k: &str| map.remove(k);
        let problem = take("problem.name")
            .ok_or_else(|| bad("missing required key `problem.name`".into()))?;
        let mesh = take("problem.mesh")
            .map(|v| parse_num::<usize>("problem.mesh", &v))
            .transpose()?;

        let n_t = take("rb.n_t").map_or(Ok(15), |v| parse_num("rb.n_t", &v))?;
        let rb = RbParams {
            n_t,
            k: take("rb.k").map_or(Ok(n_t.saturating_sub(2).max(1)), |v| parse_num("rb.k", &v))?,
            tol: take("rb.tol").map_or(Ok(1e-8), |v| parse_num("rb.tol", &v))?,
            n_ic: take("rb.n_ic").map_or(Ok(1), |v| parse_num("rb.n_ic", &v))?,
            separate_source: take("rb.separate_source")
                .map_or(Ok(false), |v| parse_bool("rb.separate_source", &v))?,
            dedupe: take("rb.dedupe").map_or(Ok(false), |v| parse_bool("rb.dedupe", &v))?,
            seed: 0,
        };

        // dist.<i>.kind / rank / data / count, ordered by <i>
        let mut dist_ids: Vec<usize> = map
            .keys()
            .filter_map(|k| {
                k.strip_prefix("dist.")
                    .and_then(|rest| rest.split('.').next())
                    .and_then(|id| id.parse::<usize>().ok())
            })
            .collect();
        dist_ids.sort_unstable();
        dist_ids.dedup();
        let mut dists = Vec::new();
        for id in dist_ids {
            let mut take = |field: &str| map.remove(&format!("dist.{id}.{field}"));
            let kind = take("kind")
                .ok_or_else(|| bad(format!("missing `dist.{id}.kind`")))?;
            let recipe = match kind.as_str() {
                "uniform" => DistRecipe::Uniform,
                "squared_norm" => DistRecipe::SquaredNorm,
                "leverage" => {
                    let rank = take("rank")
                        .ok_or_else(|| bad(format!("`dist.{id}.kind = leverage` needs `dist.{id}.rank`")))?;
                    DistRecipe::Leverage(parse_num(&format!("dist.{id}.rank"), &rank)?)
                }
                other => return Err(bad(format!("dist.{id}.kind: unknown kind `{other}`"))),
            };
            let data = match take("data").as_deref() {
                None | Some("rhs") => DataKind::Rhs,
                Some("kappa") => DataKind::Kappa,
                Some(other) => return Err(bad(format!("dist.{id}.data: unknown data `{other}`"))),
            };
            let count = take("count")
                .map_or(Ok(10), |v| parse_num(&format!("dist.{id}.count"), &v))?;
            dists.push(DistSpec {
                recipe,
                data,
                count,
            });
        }
        if dists.is_empty() {
            return Err(bad("at least one `dist.<i>.kind` entry is required".into()));
        }

        let mut take = |k: &str| map.remove(k);
        let realizations =
            take("run.realizations").map_or(Ok(1), |v| parse_num("run.realizations", &v))?;
        if realizations < 1 {
            return Err(bad("run.realizations must be at least 1".into()));
        }
        let config = ExperimentConfig {
            problem,
            mesh,
            rb,
            dists,
            realizations,
            base_seed: take("run.seed").map_or(Ok(0), |v| parse_num("run.seed", &v))?,
            out_dir: PathBuf::from(take("run.out").unwrap_or_else(|| "outputs".into())),
            threads: take("run.threads")
                .map(|v| parse_num::<usize>("run.threads", &v))
                .transpose()?,
            pod_steps: take("run.pod_steps")
                .map(|v| parse_num::<usize>("run.pod_steps", &v))
                .transpose()?,
            pod_tol: take("run.pod_tol").map_or(Ok(1e-8), |v| parse_num("run.pod_tol", &v))?,
        };
        if let Some(key) = map.keys().next() {
            return Err(bad(format!("unknown key `{key}`")));
        }
        Ok(config)
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec, ProblemError> {
        match self.mesh {
            Some(m) => builtin_problem_with_mesh(&self.problem, m),
            None => builtin_problem(&self.problem),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ExperimentError> {
    value
        .parse()
        .map_err(|_| ExperimentError::Config(format!("{key}: cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ExperimentError> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(ExperimentError::Config(format!(
            "{key}: expected a boolean, got `{value}`"
        ))),
    }
}

/// Quantile levels reported in every table, as (label, percent).
/// `None` percent means the sample minimum / maximum.
const QUANTILE_LEVELS: &[(&str, Option<f64>)] = &[
    ("min", None),
    ("5", Some(5.0)),
    ("25", Some(25.0)),
    ("50", Some(50.0)),
    ("75", Some(75.0)),
    ("90", Some(90.0)),
    ("95", Some(95.0)),
    ("97", Some(97.0)),
    ("98", Some(98.0)),
    ("99", Some(99.0)),
    ("max", Some(100.0)),
];

/// Nearest-rank quantiles of a metric over all successful realizations.
#[derive(Debug, Clone)]
pub struct QuantileTable {
    pub metric: String,
    pub levels: Vec<&'static str>,
    pub values: Vec<f64>,
}

impl QuantileTable {
    /// Builds the table with the nearest-rank estimator: the p-percent
    /// quantile of n sorted samples is the entry at rank ceil(p*n/100).
    pub fn from_samples(metric: &str, samples: &[f64]) -> Self {
        assert!(!samples.is_empty(), "need at least one sample");
        let mut sorted = samples.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN metrics"));
        let n = sorted.len();
        let mut levels = Vec::new();
        let mut values = Vec::new();
        for &(label, percent) in QUANTILE_LEVELS {
            let idx = match percent {
                None => 0,
                Some(p) => {
                    let rank = (p / 100.0 * n as f64).ceil() as usize;
                    rank.clamp(1, n) - 1
                }
            };
            levels.push(label);
            values.push(sorted[idx]);
        }
        QuantileTable {
            metric: metric.to_string(),
            levels,
            values,
        }
    }

    pub fn value(&self, label: &str) -> Option<f64> {
        self.levels
            .iter()
            .position(|&l| l == label)
            .map(|i| self.values[i])
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "level,{}", self.metric)?;
        for (label, value) in self.levels.iter().zip(&self.values) {
            writeln!(out, "{label},{value:.16e}")?;
        }
        Ok(())
    }
}

/// Builds the concrete sampling distributions for a problem, caching the
/// data matrices by kind.
pub fn resolve_dists(
    problem: &DiscreteProblem,
    specs: &[DistSpec],
) -> Result<Vec<TimeSamplingDist>, ExperimentError> {
    let mut rhs_matrix = None;
    let mut kappa_matrix = None;
    let mut out = Vec::new();
    for spec in specs {
        let dist = match spec.recipe {
            DistRecipe::Uniform => uniform_dist(problem.n_time_points()),
            recipe => {
                let cache = match spec.data {
                    DataKind::Rhs => &mut rhs_matrix,
                    DataKind::Kappa => &mut kappa_matrix,
                };
                if cache.is_none() {
                    *cache = Some(build_data_matrix(problem, spec.data)?);
                }
                let b = &cache.as_ref().unwrap().b;
                match recipe {
                    DistRecipe::SquaredNorm => squared_norm_dist(b)?,
                    DistRecipe::Leverage(r) => leverage_score_dist(b, r)?,
                    DistRecipe::Uniform => unreachable!(),
                }
            }
        };
        out.push(dist);
    }
    Ok(out)
}

/// Result of one realization.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: u64,
    pub rel_l2h1: f64,
    pub basis_dim: usize,
    pub budget_steps: usize,
    pub drawn_indices: Vec<usize>,
}

/// Aggregated results of a full experiment run.
#[derive(Debug)]
pub struct ExperimentSummary {
    pub outcomes: Vec<SeedOutcome>,
    pub failures: Vec<(u64, String)>,
    pub quantiles_rel_l2h1: QuantileTable,
    pub quantiles_dim: QuantileTable,
    pub out_dir: PathBuf,
}

/// Runs an experiment end to end and writes all output files into
/// `config.out_dir`: per-seed error and singular-value CSVs, quantile
/// tables, an optional POD comparison, and a manifest sufficient to
/// reproduce every emitted number.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary, ExperimentError> {
    match config.threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(|| run_experiment_inner(config)),
        _ => run_experiment_inner(config),
    }
}

fn run_experiment_inner(config: &ExperimentConfig) -> Result<ExperimentSummary, ExperimentError> {
    let spec = config.problem_spec()?;
    let problem = DiscreteProblem::new(spec);
    let full = problem.solve_full()?;
    let dists = resolve_dists(&problem, &config.dists)?;
    let dist_pairs: Vec<(&TimeSamplingDist, usize)> = dists
        .iter()
        .zip(&config.dists)
        .map(|(d, s)| (d, s.count))
        .collect();
    let h1 = problem.h1_product();
    let mass = problem.mass();

    let seeds: Vec<u64> = (0..config.realizations as u64)
        .map(|j| config.base_seed.wrapping_add(j))
        .collect();
    let results: Vec<(u64, Result<(SeedOutcome, ErrorReport, Vec<f64>), String>)> = seeds
        .par_iter()
        .map(|&seed| {
            let run = || -> Result<(SeedOutcome, ErrorReport, Vec<f64>), ExperimentError> {
                let mut params = config.rb;
                params.seed = seed;
                let basis = rbgen::generate(&problem, params, &dist_pairs)?;
                let system = rom::project(&problem, &basis)?;
                let (_, lifted) = rom::solve_reduced(&system)?;
                let report =
                    ErrorReport::compute(&full, &lifted, &h1, mass, problem.dt(), basis.dim())?;
                let outcome = SeedOutcome {
                    seed,
                    rel_l2h1: report.rel_l2h1,
                    basis_dim: basis.dim(),
                    budget_steps: basis.budget_steps,
                    drawn_indices: basis.drawn_indices.clone(),
                };
                Ok((outcome, report, basis.singular_values))
            };
            (seed, run().map_err(|e| e.to_string()))
        })
        .collect();

    fs::create_dir_all(&config.out_dir)?;
    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for (seed, result) in results {
        match result {
            Ok((outcome, report, sigma)) => {
                let mut f =
                    fs::File::create(config.out_dir.join(format!("errors_seed{seed}.csv")))?;
                report.write_csv(&mut f)?;
                let mut f = fs::File::create(
                    config.out_dir.join(format!("singular_values_seed{seed}.csv")),
                )?;
                writeln!(f, "index,singular_value")?;
                for (i, s) in sigma.iter().enumerate() {
                    writeln!(f, "{i},{s:.16e}")?;
                }
                outcomes.push(outcome);
            }
            Err(msg) => failures.push((seed, msg)),
        }
    }
    if outcomes.is_empty() {
        return Err(ExperimentError::AllSeedsFailed(config.realizations));
    }

    let errors: Vec<f64> = outcomes.iter().map(|o| o.rel_l2h1).collect();
    let dims: Vec<f64> = outcomes.iter().map(|o| o.basis_dim as f64).collect();
    let quantiles_rel_l2h1 = QuantileTable::from_samples("rel_l2h1", &errors);
    let quantiles_dim = QuantileTable::from_samples("reduced_dimension", &dims);
    let mut f = fs::File::create(config.out_dir.join("quantiles_rel_l2h1.csv"))?;
    quantiles_rel_l2h1.write_csv(&mut f)?;
    let mut f = fs::File::create(config.out_dir.join("quantiles_reduced_dimension.csv"))?;
    quantiles_dim.write_csv(&mut f)?;

    if let Some(n_steps) = config.pod_steps {
        let pod = rbgen::pod_baseline(&problem, n_steps, config.pod_tol)?;
        let system = rom::project(&problem, &pod)?;
        let (_, lifted) = rom::solve_reduced(&system)?;
        let report = ErrorReport::compute(&full, &lifted, &h1, mass, problem.dt(), pod.dim())?;
        let mut f = fs::File::create(config.out_dir.join("errors_pod.csv"))?;
        report.write_csv(&mut f)?;
    }

    write_manifest(config, &problem, &outcomes, &failures)?;

    Ok(ExperimentSummary {
        outcomes,
        failures,
        quantiles_rel_l2h1,
        quantiles_dim,
        out_dir: config.out_dir.clone(),
    })
}

fn write_manifest(
    config: &ExperimentConfig,
    problem: &DiscreteProblem,
    outcomes: &[SeedOutcome],
    failures: &[(u64, String)],
) -> Result<(), ExperimentError> {
    let mut f = fs::File::create(config.out_dir.join("manifest.txt"))?;
    writeln!(f, "randbasis {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(f)?;
    writeln!(f, "problem.name = {}", config.problem)?;
    match config.mesh {
        Some(m) => writeln!(f, "problem.mesh = {m}")?,
        None => writeln!(f, "problem.mesh = (reference)")?,
    }
    let spec = problem.spec();
    writeln!(f, "grid = {}x{} cells, {} dofs", spec.grid.nx, spec.grid.ny, problem.n_dofs())?;
    writeln!(
        f,
        "time = {} points on (0,{}), dt = {:.16e}",
        problem.n_time_points(),
        spec.t_final,
        problem.dt()
    )?;
    writeln!(f, "rb.n_t = {}", config.rb.n_t)?;
    writeln!(f, "rb.k = {}", config.rb.k)?;
    writeln!(f, "rb.tol = {:.16e}", config.rb.tol)?;
    writeln!(f, "rb.n_ic = {}", config.rb.n_ic)?;
    writeln!(f, "rb.separate_source = {}", config.rb.separate_source)?;
    writeln!(f, "rb.dedupe = {}", config.rb.dedupe)?;
    for (i, d) in config.dists.iter().enumerate() {
        let kind = match d.recipe {
            DistRecipe::Uniform => "uniform".to_string(),
            DistRecipe::SquaredNorm => "squared_norm".to_string(),
            DistRecipe::Leverage(r) => format!("leverage(rank {r})"),
        };
        writeln!(f, "dist.{} = {} from {:?}, count {}", i + 1, kind, d.data, d.count)?;
    }
    writeln!(f, "run.realizations = {}", config.realizations)?;
    writeln!(f, "run.seed = {}", config.base_seed)?;
    match config.pod_steps {
        Some(n) => writeln!(f, "run.pod_steps = {n} (tol {:.16e})", config.pod_tol)?,
        None => writeln!(f, "run.pod_steps = (disabled)")?,
    }
    writeln!(f)?;
    writeln!(f, "seed,rel_l2h1,basis_dim,budget_steps,drawn_indices")?;
    for o in outcomes {
        let drawn: Vec<String> = o.drawn_indices.iter().map(|i| i.to_string()).collect();
        writeln!(
            f,
            "{},{:.16e},{},{},{}",
            o.seed,
            o.rel_l2h1,
            o.basis_dim,
            o.budget_steps,
            drawn.join(" ")
        )?;
    }
    for (seed, msg) in failures {
        writeln!(f, "{seed},FAILED: {msg}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_CONFIG: &str = "
        # three-stove problem at a coarse mesh
        problem.name = example2
        problem.mesh = 10
        rb.n_t = 15
        rb.k = 13
        rb.tol = 1e-8
        dist.1.kind = leverage
        dist.1.rank = 3
        dist.1.data = rhs
        dist.1.count = 10
        run.realizations = 3
        run.seed = 42
    ";

    #[test]
    fn parses_a_full_config() {
        let c = ExperimentConfig::parse(SMALL_CONFIG).unwrap();
        assert_eq!(c.problem, "example2");
        assert_eq!(c.mesh, Some(10));
        assert_eq!(c.rb.n_t, 15);
        assert_eq!(c.rb.k, 13);
        assert_eq!(c.rb.tol, 1e-8);
        assert_eq!(c.dists.len(), 1);
        assert_eq!(c.dists[0].recipe, DistRecipe::Leverage(3));
        assert_eq!(c.dists[0].count, 10);
        assert_eq!(c.realizations, 3);
        assert_eq!(c.base_seed, 42);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(matches!(
            ExperimentConfig::parse("problem.name = example2\ndist.1.kind = uniform\nrun.sed = 1"),
            Err(ExperimentError::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("problem.name = a\nproblem.name = b\ndist.1.kind = uniform"),
            Err(ExperimentError::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::parse("problem.name = example2"),
            Err(ExperimentError::Config(_))
        ));
    }

    #[test]
    fn default_k_follows_window_length() {
        let c = ExperimentConfig::parse(
            "problem.name = example2\nrb.n_t = 20\ndist.1.kind = uniform",
        )
        .unwrap();
        assert_eq!(c.rb.k, 18);
    }

    #[test]
    fn nearest_rank_matches_sort_based_oracle() {
        // oracle: quantile p of sorted x is x[ceil(p*n/100) - 1]
        let samples: Vec<f64> = (1..=37).map(|i| i as f64).collect();
        let table = QuantileTable::from_samples("m", &samples);
        let n = samples.len() as f64;
        for (label, value) in table.levels.iter().zip(&table.values) {
            let expected = match *label {
                "min" => 1.0,
                "max" => 37.0,
                p => {
                    let p: f64 = p.parse().unwrap();
                    let rank = (p / 100.0 * n).ceil() as usize;
                    samples[rank - 1]
                }
            };
            assert_eq!(*value, expected, "level {label}");
        }
        // monotone in level
        for w in table.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn quantiles_of_a_single_sample_are_constant() {
        let table = QuantileTable::from_samples("m", &[2.5]);
        assert!(table.values.iter().all(|&v| v == 2.5));
    }

    #[test]
    fn small_experiment_runs_and_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::parse(SMALL_CONFIG).unwrap();
        config.out_dir = dir.path().join("a");
        let summary = run_experiment(&config).unwrap();
        assert_eq!(summary.outcomes.len(), 3);
        assert!(summary.failures.is_empty());
        assert!(summary.quantiles_rel_l2h1.value("50").unwrap() < 1.0);
        for file in [
            "quantiles_rel_l2h1.csv",
            "quantiles_reduced_dimension.csv",
            "errors_seed42.csv",
            "singular_values_seed42.csv",
            "manifest.txt",
        ] {
            assert!(config.out_dir.join(file).exists(), "missing {file}");
        }

        // identical seed, fresh directory: byte-identical quantile tables
        config.out_dir = dir.path().join("b");
        run_experiment(&config).unwrap();
        for file in ["quantiles_rel_l2h1.csv", "quantiles_reduced_dimension.csv"] {
            let a = fs::read(dir.path().join("a").join(file)).unwrap();
            let b = fs::read(dir.path().join("b").join(file)).unwrap();
            assert_eq!(a, b, "{file} differs between runs");
        }
    }

    #[test]
    fn pod_comparison_file_is_written_when_requested() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::parse(SMALL_CONFIG).unwrap();
        config.out_dir = dir.path().to_path_buf();
        config.realizations = 1;
        config.pod_steps = Some(30);
        run_experiment(&config).unwrap();
        assert!(dir.path().join("errors_pod.csv").exists());
    }
}
