//! Newton iteration on the lid-driven cavity: increments per step and the
//! observed convergence order.
//!
//! cargo run --example newton_cavity -- [n_div] [element] [nu]

use std::sync::Arc;
use std::time::Instant;

use cavity_fem::{build_uniform_square_mesh, newton_solve, ElementPair, NewtonConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n_div = args.first().map_or(Ok(32), |s| s.parse())?;
    let pair: ElementPair = args.get(1).map_or(Ok(ElementPair::TaylorHood), |s| s.parse())?;
    let nu = args.get(2).map_or(Ok(1.0), |s| s.parse())?;

    let mesh = Arc::new(build_uniform_square_mesh(n_div)?);
    let config = NewtonConfig { nu, pair, ..Default::default() };
    let start = Instant::now();
    let report = newton_solve(&config, &mesh)?;
    for (k, (abs, rel)) in report.increments.iter().zip(&report.relative_increments).enumerate() {
        println!("iter {:2}  |du|_H1 = {abs:.3e}  relative = {rel:.3e}", k + 1);
    }
    println!(
        "{pair}, n_div = {n_div}, nu = {nu}: converged = {}, iterations = {}, order = {}, {:.2?}",
        report.converged,
        report.iterations,
        report.convergence_order().map_or("-".into(), |q| format!("{q:.2}")),
        start.elapsed()
    );
    Ok(())
}
