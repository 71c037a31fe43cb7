//! Reference-element shape functions and triangle quadrature.

use cavity_fem::elements::{quadrature_rule, Family, ReferenceBasis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let point = [0.2, 0.5, 0.3];
    for family in [Family::P1, Family::P2, Family::P1Bubble] {
        let basis = ReferenceBasis::new(family);
        let v = basis.eval(point)?;
        let values: Vec<String> = v.values.iter().map(|x| format!("{x:+.4}")).collect();
        println!("{family:?} ({} functions) at {point:?}: [{}]", basis.n_local(), values.join(", "));
    }

    // int x^4 y^2 over the reference triangle = 4! 2! / 8!
    let exact = 24.0 * 2.0 / 40320.0;
    for degree in [2, 4, 6, 8] {
        let rule = quadrature_rule(degree)?;
        let q = rule.integrate(|x, y| x.powi(4) * y.powi(2));
        println!("degree {degree}: {:2} points, error {:.2e}", rule.len(), (q - exact).abs());
    }
    Ok(())
}
