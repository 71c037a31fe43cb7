//! Discrete inf-sup constants under refinement. Equal-order P1/P1 without
//! stabilization has spurious pressure modes, so its constant is zero.

use std::sync::Arc;

use cavity_fem::postprocess::discrete_infsup;
use cavity_fem::{build_uniform_square_mesh, ElementPair};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>12} {:>12} {:>12}", "n_div", "taylor-hood", "mini", "p1/p1");
    for n in [2, 4, 8, 16] {
        let mesh = Arc::new(build_uniform_square_mesh(n)?);
        let b: Vec<f64> = ElementPair::ALL.iter().map(|&p| discrete_infsup(&mesh, p)).collect::<Result<_, _>>()?;
        println!("{n:>6} {:>12.6} {:>12.6} {:>12.6}", b[0], b[1], b[2]);
    }
    Ok(())
}
