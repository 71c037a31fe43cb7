//! Evaluation of coarse fields on nested refinements and successive errors.

use crate::elements::{QuadratureRule, Tabulation};
use crate::error::{Error, Result};
use crate::field::{ElementGeometry, FeFunction, PointValue};
use crate::mesh::Mesh;
use crate::postprocess::norms::norm_rule;

/// Triangle of the structured coarse mesh (`n_div = n`) containing fine
/// triangle `tf` of its uniform refinement.
fn parent(n: usize, tf: usize) -> usize {
    let nf = 2 * n;
    let (cell, k) = (tf / 2, tf % 2);
    let (i, j) = (cell % nf, cell / nf);
    // sub-cells on the coarse diagonal are split by it; the other two lie
    // entirely below (right) or above (left) of it
    let kc = match (i % 2, j % 2) {
        (1, 0) => 0,
        (0, 1) => 1,
        _ => k,
    };
    2 * ((j / 2) * n + i / 2) + kc
}

fn check_nested(coarse: &Mesh, fine: &Mesh) -> Result<usize> {
    let (n, nf) = match (coarse.n_div(), fine.n_div()) {
        (Some(n), Some(nf)) => (n, nf),
        _ => return Err(Error::NotStructured),
    };
    if nf != 2 * n {
        return Err(Error::NotNested { coarse: n, fine: nf });
    }
    Ok(n)
}

/// Values and gradients of `coarse` at the points of `rule` on every triangle
/// of `fine_mesh`, ordered triangle by triangle. The fine mesh must be the
/// uniform refinement of the coarse one; each fine triangle is mapped to its
/// parent by index arithmetic.
pub fn evaluate_on_refined(coarse: &FeFunction, fine_mesh: &Mesh, rule: &QuadratureRule) -> Result<Vec<PointValue>> {
    let cmesh = coarse.mesh();
    let n = check_nested(cmesh, fine_mesh)?;
    let basis = coarse.dofmap().basis();
    let nl = basis.n_local();
    let mut values = [0.0; 6];
    let mut grads = [[0.0; 2]; 6];
    let mut out = Vec::with_capacity(fine_mesh.n_triangles() * rule.len());
    for tf in 0..fine_mesh.n_triangles() {
        let tc = parent(n, tf);
        let geo = ElementGeometry::of(cmesh, tc);
        let corners = fine_mesh.triangle_points(tf).map(|p| cmesh.barycentric(tc, p));
        if corners.iter().flatten().any(|&l| l < -1e-12) {
            return Err(Error::NotNested {
                coarse: n,
                fine: 2 * n,
            });
        }
        for lf in &rule.points {
            let mut l = [0.0; 3];
            for (c, &w) in corners.iter().zip(lf) {
                for k in 0..3 {
                    l[k] += w * c[k];
                }
            }
            basis.eval_into(l, &mut values[..nl], &mut grads[..nl]);
            out.push(coarse.eval_tabulated(tc, &geo, &values[..nl], &grads[..nl]));
        }
    }
    Ok(out)
}

/// Values of `u` at the points of `rule` on its own mesh, in the same order
/// as [`evaluate_on_refined`].
pub fn evaluate_at_points(u: &FeFunction, rule: &QuadratureRule) -> Vec<PointValue> {
    let tab = Tabulation::new(u.dofmap().basis(), rule);
    let mesh = u.mesh();
    let mut out = Vec::with_capacity(mesh.n_triangles() * rule.len());
    for t in 0..mesh.n_triangles() {
        let geo = ElementGeometry::of(mesh, t);
        for q in 0..rule.len() {
            out.push(u.eval_tabulated(t, &geo, tab.values(q), tab.grads(q)));
        }
    }
    out
}

/// Quadrature weights (Jacobian included) matching [`evaluate_at_points`].
pub fn point_weights(mesh: &Mesh, rule: &QuadratureRule) -> Vec<f64> {
    let mut out = Vec::with_capacity(mesh.n_triangles() * rule.len());
    for t in 0..mesh.n_triangles() {
        let det = ElementGeometry::of(mesh, t).det;
        out.extend(rule.weights.iter().map(|w| w * det));
    }
    out
}

/// L4 norm of `a - b` for pointwise samples with weights `w`.
pub fn l4_difference(a: &[PointValue], b: &[PointValue], w: &[f64]) -> f64 {
    assert!(a.len() == b.len() && a.len() == w.len());
    let mut sum = 0.0;
    for ((a, b), w) in a.iter().zip(b).zip(w) {
        let dx = a.value[0] - b.value[0];
        let dy = a.value[1] - b.value[1];
        let m2 = dx * dx + dy * dy;
        sum += w * m2 * m2;
    }
    sum.max(0.0).sqrt().sqrt()
}

/// `||u_h - u_{h/2}||_{L4}` integrated on the fine mesh with the norm rule.
pub fn successive_l4_error(coarse: &FeFunction, fine: &FeFunction) -> Result<f64> {
    if coarse.n_components() != fine.n_components() || coarse.dofmap().family() != fine.dofmap().family() {
        return Err(Error::Mismatch("successive fields from different element families".into()));
    }
    let rule = norm_rule();
    let fine_mesh = fine.mesh();
    let transported = evaluate_on_refined(coarse, fine_mesh, &rule)?;
    let own = evaluate_at_points(fine, &rule);
    Ok(l4_difference(&transported, &own, &point_weights(fine_mesh, &rule)))
}
