//! Galerkin reduction onto a randomized basis and its error in time.
//!
//! Generates a basis for the three-stove problem, projects the full system
//! onto it, solves the small reduced system over all 300 steps, and reports
//! the relative errors against the sequential full-order reference.
//!
//! Run with: cargo run --release --example reduced_order_solve

use randbasis::problems::builtin_problem_with_mesh;
use randbasis::rbgen::{generate, RbParams};
use randbasis::rom::{project, solve_reduced, ErrorReport};
use randbasis::sampling::{build_data_matrix, leverage_score_dist, DataKind};
use randbasis::timestep::DiscreteProblem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = builtin_problem_with_mesh("example2", 20)?;
    let problem = DiscreteProblem::new(spec);
    println!(
        "full order: {} dofs x {} time points",
        problem.n_dofs(),
        problem.n_time_points()
    );

    let data = build_data_matrix(&problem, DataKind::Rhs)?;
    let dist = leverage_score_dist(&data.b, 3)?;
    let basis = generate(&problem, RbParams::default_diffusion(3), &[(&dist, 10)])?;
    println!("reduced order: {}", basis.dim());

    let system = project(&problem, &basis)?;
    let (_, lifted) = solve_reduced(&system)?;
    let full = problem.solve_full()?;

    let report = ErrorReport::compute(
        &full,
        &lifted,
        &problem.h1_product(),
        problem.mass(),
        problem.dt(),
        basis.dim(),
    )?;
    println!("relative space-time error: {:.6e}", report.rel_l2h1);

    // per-time errors, coarsely sampled
    println!("{:>6}  {:>13}", "t", "rel error");
    for l in (0..problem.n_time_points()).step_by(30) {
        match report.rel_l2t[l] {
            Some(e) => println!("{:>6.2}  {e:>13.6e}", problem.spec().time(l)),
            None => println!("{:>6.2}  (zero state)", problem.spec().time(l)),
        }
    }
    Ok(())
}
