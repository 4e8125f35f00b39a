//! Optimal local-in-time approximation spaces from the transfer operator.
//!
//! Materializes the operator that maps an arbitrary state at time index i to
//! the source-free solution at index j on a small heat problem, builds the
//! optimal n-dimensional spaces from its leading left singular vectors, and
//! shows that the projection error of each space equals the next singular
//! value (the best any n-dimensional space can do).
//!
//! Run with: cargo run --release --example optimal_local_spaces

use randbasis::problems::builtin_problem_with_mesh;
use randbasis::timestep::DiscreteProblem;
use randbasis::transfer::{materialize_transfer, optimal_space, projection_error, TransferHandle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = builtin_problem_with_mesh("example2", 20)?;
    let problem = DiscreteProblem::new(spec);

    // window of 15 implicit Euler steps starting at time index 30
    let handle = TransferHandle::new(&problem, 30, 45);
    let t = materialize_transfer(&handle)?;
    println!(
        "transfer operator for indices 30 -> 45: {} x {}",
        t.nrows(),
        t.ncols()
    );

    println!("{:>3}  {:>13}  {:>13}", "n", "proj error", "sigma(n+1)");
    for n in 1..=8 {
        let space = optimal_space(&handle, n)?;
        let err = projection_error(&t, &space);
        let next_sigma = space.singular_values[n];
        println!("{n:>3}  {err:>13.6e}  {next_sigma:>13.6e}");
    }
    Ok(())
}
