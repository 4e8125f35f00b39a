//! Data-dependent probability distributions over the time grid.
//!
//! Assembles the per-time right-hand-side matrix of the three-stove problem
//! and derives the uniform, squared-norm, and rank-3 leverage score
//! distributions used to pick the start points of local solves. Prints a
//! coarse sketch of each distribution over time.
//!
//! Run with: cargo run --release --example sampling_distributions

use randbasis::problems::builtin_problem_with_mesh;
use randbasis::sampling::{
    build_data_matrix, leverage_score_dist, squared_norm_dist, uniform_dist, DataKind,
    TimeSamplingDist,
};
use randbasis::timestep::DiscreteProblem;

fn sketch(label: &str, dist: &TimeSamplingDist) {
    // aggregate the 301 time points into 30 buckets and draw a bar chart
    let buckets = 30;
    let n = dist.p.len();
    print!("{label:>14} ");
    for b in 0..buckets {
        let lo = b * n / buckets;
        let hi = ((b + 1) * n / buckets).min(n);
        let mass: f64 = dist.p[lo..hi].iter().sum();
        let bar = (mass * buckets as f64 * 4.0).round() as usize;
        print!("{}", [".", "-", "=", "#"].get(bar.min(3)).unwrap());
    }
    println!();
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = builtin_problem_with_mesh("example2", 20)?;
    let problem = DiscreteProblem::new(spec);
    let data = build_data_matrix(&problem, DataKind::Rhs)?;
    println!(
        "right-hand-side data matrix: {} x {}",
        data.b.nrows(),
        data.b.ncols()
    );

    let uniform = uniform_dist(problem.n_time_points());
    let sq = squared_norm_dist(&data.b)?;
    let lev = leverage_score_dist(&data.b, 3)?;

    println!("probability mass over time (left = t0, right = T):");
    sketch("uniform", &uniform);
    sketch("squared norm", &sq);
    sketch("leverage r=3", &lev);

    // squared-norm mass concentrates on the strongest stove; leverage
    // weights all three source modes equally
    let window_mass = |d: &TimeSamplingDist, lo: usize, hi: usize| -> f64 {
        d.p[lo..hi].iter().sum()
    };
    println!();
    for (name, d) in [("squared norm", &sq), ("leverage r=3", &lev)] {
        println!(
            "{name:>14}: stove1 {:.3}, stove2 {:.3}, stove3 {:.3}",
            window_mass(d, 15, 76),
            window_mass(d, 105, 166),
            window_mass(d, 195, 256)
        );
    }
    Ok(())
}
