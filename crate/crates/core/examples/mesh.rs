//! Structured triangulations of [-1, 1]^2 and their refinement.
//!
//! cargo run --example mesh -- [n_div]

use cavity_fem::mesh::mesh_quality;
use cavity_fem::{build_uniform_square_mesh, refine_uniform};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_div = std::env::args().nth(1).map_or(Ok(4), |s| s.parse())?;
    let mut mesh = build_uniform_square_mesh(n_div)?;
    println!("{:>6} {:>8} {:>10} {:>8} {:>10} {:>10}", "n_div", "nv", "triangles", "edges", "h", "min angle");
    for _ in 0..4 {
        println!(
            "{:>6} {:>8} {:>10} {:>8} {:>10.5} {:>10.1}",
            mesh.n_div().unwrap_or(0),
            mesh.n_vertices(),
            mesh.n_triangles(),
            mesh.edges().len(),
            mesh.h(),
            mesh_quality(&mesh)?
        );
        mesh = refine_uniform(&mesh)?;
    }
    let p = [0.3, -0.71];
    let t = build_uniform_square_mesh(n_div)?.locate(p)?;
    println!("({}, {}) lies in triangle {t}", p[0], p[1]);
    Ok(())
}
