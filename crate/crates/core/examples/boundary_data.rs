//! Interpolated lid data: zero net flux and the h^(1/2) trace error.
//!
//! cargo run --example boundary_data -- [element]

use std::sync::Arc;

use cavity_fem::boundary::{boundary_l2_error, compatibility_integral, interpolate_boundary_data};
use cavity_fem::elements::build_dofmap;
use cavity_fem::postprocess::compute_eoc;
use cavity_fem::{build_uniform_square_mesh, CornerConvention, ElementPair, LidBoundaryData};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pair: ElementPair = std::env::args().nth(1).map_or(Ok(ElementPair::Mini), |s| s.parse())?;
    for corner in CornerConvention::ALL {
        let data = LidBoundaryData::new(corner);
        let (mut errors, mut hs) = (vec![], vec![]);
        println!("{pair}, {corner} corners");
        for n in [8, 16, 32, 64, 128] {
            let mesh = Arc::new(build_uniform_square_mesh(n)?);
            let (velocity, _) = build_dofmap(&mesh, pair);
            let trace = interpolate_boundary_data(&data, &velocity);
            let e = boundary_l2_error(&data, &trace);
            println!("  n_div {n:4}: |g - g_h| = {e:.6e}, flux = {:+.1e}", compatibility_integral(&trace));
            errors.push(e);
            hs.push(mesh.h());
        }
        println!("  eoc {:.6?}", compute_eoc(&errors, &hs)?);
    }
    Ok(())
}
