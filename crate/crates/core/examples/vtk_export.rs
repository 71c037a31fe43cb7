//! Solves the cavity and writes velocity and pressure to a VTK file.
//!
//! cargo run --example vtk_export -- [path] [n_div] [element]

use std::path::PathBuf;
use std::sync::Arc;

use cavity_fem::vtk::export_vtk;
use cavity_fem::{build_uniform_square_mesh, newton_solve, ElementPair, NewtonConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map_or_else(|| PathBuf::from("cavity.vtk"), PathBuf::from);
    let n_div = args.next().map_or(Ok(32), |s| s.parse())?;
    let pair: ElementPair = args.next().map_or(Ok(ElementPair::TaylorHood), |s| s.parse())?;
    let mesh = Arc::new(build_uniform_square_mesh(n_div)?);
    let report = newton_solve(&NewtonConfig { pair, ..Default::default() }, &mesh)?;
    export_vtk(&report.velocity, &report.pressure, &path)?;
    println!("wrote {} ({} points, {} triangles)", path.display(), mesh.n_vertices(), mesh.n_triangles());
    Ok(())
}
