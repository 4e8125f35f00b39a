//! Singular value decay of transfer operators, with and without advection.
//!
//! The decay rate of the transfer operator's singular values governs how
//! few dimensions a local space needs. Diffusion alone already gives
//! exponential decay; adding advection pushes states out of the domain and
//! makes the decay even faster.
//!
//! Run with: cargo run --release --example singular_value_decay

use randbasis::linalg::singular_values;
use randbasis::problems::builtin_problem_with_mesh;
use randbasis::timestep::DiscreteProblem;
use randbasis::transfer::{materialize_transfer, TransferHandle};

fn decay(name: &str, problem: &DiscreteProblem, i: usize, j: usize) {
    let handle = TransferHandle::new(problem, i, j);
    let t = materialize_transfer(&handle).expect("materialize");
    let sigma = singular_values(&t).expect("svd");
    print!("{name:>22}:");
    for s in sigma.iter().take(10) {
        print!(" {:.1e}", s / sigma[0]);
    }
    println!();
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("normalized singular values sigma(n)/sigma(1), n = 1..10");

    let heat = DiscreteProblem::new(builtin_problem_with_mesh("example2", 20)?);
    decay("heat, 15-step window", &heat, 30, 45);

    for b1 in [0.0, 10.0, 50.0] {
        let name = format!("example3a({b1})");
        let spec = builtin_problem_with_mesh(&name, 60)?;
        let problem = DiscreteProblem::new(spec);
        // window of 10 steps = 0.1 time units
        decay(&format!("advection b1 = {b1:>4}"), &problem, 100, 110);
    }
    Ok(())
}
