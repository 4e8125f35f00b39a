//! Randomized reduced-basis generation, end to end.
//!
//! Draws start points in time from a leverage score distribution, solves
//! short local problems with random initial conditions in parallel, and
//! compresses the harvested states into an orthonormal basis with a
//! truncated SVD. The basis is saved to disk and loaded back.
//!
//! Run with: cargo run --release --example generate_basis

use randbasis::problems::builtin_problem_with_mesh;
use randbasis::rbgen::{generate, load_basis, save_basis, RbParams};
use randbasis::sampling::{build_data_matrix, leverage_score_dist, DataKind};
use randbasis::timestep::DiscreteProblem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = builtin_problem_with_mesh("example2", 20)?;
    let problem = DiscreteProblem::new(spec);

    let data = build_data_matrix(&problem, DataKind::Rhs)?;
    let dist = leverage_score_dist(&data.b, 3)?;

    let params = RbParams::default_diffusion(7);
    let basis = generate(&problem, params, &[(&dist, 10)])?;

    println!("drawn time indices: {:?}", basis.drawn_indices);
    println!(
        "snapshots: {}, basis dimension: {}, time-step budget: {}",
        basis.n_snapshots,
        basis.dim(),
        basis.budget_steps
    );
    println!("leading singular values of the snapshot matrix:");
    for (i, s) in basis.singular_values.iter().take(basis.dim() + 3).enumerate() {
        println!("  sigma[{i}] = {s:.6e}");
    }

    let dir = std::env::temp_dir().join("randbasis_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("basis.bin");
    save_basis(&path, &basis)?;
    let loaded = load_basis(&path)?;
    assert_eq!(loaded.u_red, basis.u_red);
    println!("basis round-tripped through {}", path.display());
    Ok(())
}
