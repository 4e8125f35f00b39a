//! Command-line front end: run experiments from config files, list the
//! built-in problems, and export time-sampling distributions as CSV.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use randbasis::experiment::{run_experiment, DistSpec, ExperimentConfig};
use randbasis::problems::BUILTIN_PROBLEMS;
use randbasis::sampling::{export_dist_csv, DataKind, DistRecipe};
use randbasis::timestep::DiscreteProblem;

#[derive(Parser)]
#[command(name = "randbasis", version, about = "Randomized reduced-basis generation for time-dependent PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a config file.
    Run {
        /// Path to a flat key=value config file.
        config: PathBuf,
        /// Override run.seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override run.realizations.
        #[arg(long)]
        realizations: Option<usize>,
        /// Override run.out.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override run.threads (0 = use all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Inspect the built-in problem library.
    Problem {
        #[command(subcommand)]
        command: ProblemCommand,
    },
    /// Work with time-sampling distributions.
    Dist {
        #[command(subcommand)]
        command: DistCommand,
    },
}

#[derive(Subcommand)]
enum ProblemCommand {
    /// List the built-in problems.
    List,
}

#[derive(Subcommand)]
enum DistCommand {
    /// Export a time-sampling distribution for a config's problem as CSV.
    Export {
        /// Path to a flat key=value config file.
        config: PathBuf,
        /// Distribution kind: uniform, squared_norm, or leverage.
        kind: String,
        /// Output directory (defaults to run.out from the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            seed,
            realizations,
            out,
            threads,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(r) = realizations {
                cfg.realizations = r;
            }
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            if let Some(t) = threads {
                cfg.threads = Some(t);
            }
            let summary = run_experiment(&cfg)?;
            println!(
                "{} realizations ({} failed), outputs in {}",
                summary.outcomes.len(),
                summary.failures.len(),
                summary.out_dir.display()
            );
            println!(
                "rel_l2h1: median {:.3e}, p75 {:.3e}, max {:.3e}",
                summary.quantiles_rel_l2h1.value("50").unwrap(),
                summary.quantiles_rel_l2h1.value("75").unwrap(),
                summary.quantiles_rel_l2h1.value("max").unwrap()
            );
            println!(
                "reduced dimension: median {}, max {}",
                summary.quantiles_dim.value("50").unwrap(),
                summary.quantiles_dim.value("max").unwrap()
            );
            Ok(())
        }
        Command::Problem {
            command: ProblemCommand::List,
        } => {
            for (name, description) in BUILTIN_PROBLEMS {
                println!("{name:22} {description}");
            }
            Ok(())
        }
        Command::Dist {
            command: DistCommand::Export { config, kind, out },
        } => {
            let cfg = ExperimentConfig::from_file(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let spec = pick_dist_spec(&cfg, &kind)?;
            let problem = DiscreteProblem::new(cfg.problem_spec()?);
            let dists = randbasis::experiment::resolve_dists(&problem, &[spec])?;
            let out_dir = out.unwrap_or_else(|| cfg.out_dir.clone());
            fs::create_dir_all(&out_dir)?;
            let path = out_dir.join(format!("dist_{kind}.csv"));
            let mut f = fs::File::create(&path)?;
            export_dist_csv(&dists[0], &mut f)?;
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

/// Picks the configured distribution entry matching `kind`, or a sensible
/// default (rank-3 leverage, right-hand-side data) when the config does not
/// mention that kind.
fn pick_dist_spec(cfg: &ExperimentConfig, kind: &str) -> Result<DistSpec> {
    let matches_kind = |recipe: &DistRecipe| match (kind, recipe) {
        ("uniform", DistRecipe::Uniform) => true,
        ("squared_norm", DistRecipe::SquaredNorm) => true,
        ("leverage", DistRecipe::Leverage(_)) => true,
        _ => false,
    };
    if let Some(spec) = cfg.dists.iter().find(|d| matches_kind(&d.recipe)) {
        return Ok(spec.clone());
    }
    let recipe = match kind {
        "uniform" => DistRecipe::Uniform,
        "squared_norm" => DistRecipe::SquaredNorm,
        "leverage" => DistRecipe::Leverage(3),
        other => bail!("unknown distribution kind `{other}` (expected uniform, squared_norm, or leverage)"),
    };
    Ok(DistSpec {
        recipe,
        data: DataKind::Rhs,
        count: 0,
    })
}
