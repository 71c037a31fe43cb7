//! Assembles one linearized system and solves it directly.

use std::sync::Arc;
use std::time::Instant;

use cavity_fem::assembly::{assemble_newton_system, no_forcing};
use cavity_fem::boundary::interpolate_boundary_data;
use cavity_fem::solver::solve_saddle;
use cavity_fem::{build_uniform_square_mesh, ElementPair, LidBoundaryData, MixedSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = Arc::new(build_uniform_square_mesh(32)?);
    for pair in ElementPair::ALL {
        let space = MixedSpace::new(mesh.clone(), pair);
        let trace = interpolate_boundary_data(&LidBoundaryData::default(), &space.velocity);
        let t = Instant::now();
        let system = assemble_newton_system(&space, 1.0, None, &no_forcing, &trace)?;
        let assembled = t.elapsed();
        let solution = solve_saddle(&system)?;
        println!(
            "{pair:12} size {:6} nnz {:8} asymmetry {:.1e} assemble {assembled:.2?} total {:.2?} residual {:.1e} multiplier {:+.1e}",
            system.size(),
            system.matrix.nnz(),
            system.matrix.max_asymmetry(),
            t.elapsed(),
            solution.residual,
            solution.multiplier
        );
    }
    Ok(())
}
