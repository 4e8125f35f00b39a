//! Randomized local spaces versus the a priori error bound.
//!
//! Builds n-dimensional spaces from transfer images of random initial
//! conditions (no SVD of the full operator needed) and compares their
//! projection error, averaged over trials, against the optimal error
//! sigma(n+1) and the computable a priori bound.
//!
//! Run with: cargo run --release --example randomized_range_quality

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use randbasis::linalg::singular_values;
use randbasis::problems::builtin_problem_with_mesh;
use randbasis::timestep::DiscreteProblem;
use randbasis::transfer::{
    apriori_bound, kappa_constant, materialize_transfer, projection_error, randomized_range,
    TransferHandle,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = builtin_problem_with_mesh("example2", 20)?;
    let problem = DiscreteProblem::new(spec);
    let handle = TransferHandle::new(&problem, 30, 45);

    let t = materialize_transfer(&handle)?;
    let sigma: Vec<f64> = singular_values(&t)?.iter().copied().collect();
    let a_i = problem.stiffness(30)?;
    let kappa = kappa_constant(problem.mass(), &a_i)?;
    println!("condition constant of the bound: {kappa:.3e}");

    let trials = 20;
    println!(
        "{:>3}  {:>13}  {:>13}  {:>13}",
        "n", "mean error", "optimal", "a priori"
    );
    for n in [4, 6, 8, 10] {
        let mut mean = 0.0;
        for trial in 0..trials {
            let mut rng = ChaCha12Rng::seed_from_u64(1000 * n as u64 + trial);
            let space = randomized_range(&handle, n, &mut rng)?;
            mean += projection_error(&t, &space);
        }
        mean /= trials as f64;
        let bound = apriori_bound(&sigma, n, kappa)?;
        println!("{n:>3}  {mean:>13.6e}  {:>13.6e}  {bound:>13.6e}", sigma[n]);
    }
    Ok(())
}
