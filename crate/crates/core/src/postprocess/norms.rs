//! Quadrature norms of discrete fields.

use serde::{Deserialize, Serialize};

use crate::elements::{quadrature_rule, QuadratureRule, Tabulation, NORM_QUADRATURE_DEGREE};
use crate::field::{ElementGeometry, FeFunction, PointValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    L4,
    H1Semi,
    H1,
}

impl NormKind {
    pub const ALL: [NormKind; 4] = [NormKind::L2, NormKind::L4, NormKind::H1Semi, NormKind::H1];

    /// Integrand whose integral is the `p`-th power of the norm.
    fn density(self, v: &PointValue) -> f64 {
        let mag2 = v.value[0] * v.value[0] + v.value[1] * v.value[1];
        let grad2: f64 = v.grad.iter().flatten().map(|g| g * g).sum();
        match self {
            NormKind::L2 => mag2,
            NormKind::L4 => mag2 * mag2,
            NormKind::H1Semi => grad2,
            NormKind::H1 => mag2 + grad2,
        }
    }

    fn root(self, integral: f64) -> f64 {
        let s = integral.max(0.0);
        match self {
            NormKind::L4 => s.sqrt().sqrt(),
            _ => s.sqrt(),
        }
    }
}

pub(crate) fn norm_rule() -> QuadratureRule {
    quadrature_rule(NORM_QUADRATURE_DEGREE).expect("norm quadrature rule available")
}

/// Calls `visit(t, q, weight, value)` for every quadrature point of the
/// degree-8 rule on every triangle. `weight` includes the Jacobian.
pub(crate) fn for_each_point(u: &FeFunction, rule: &QuadratureRule, mut visit: impl FnMut(usize, usize, f64, PointValue)) {
    let tab = Tabulation::new(u.dofmap().basis(), rule);
    let mesh = u.mesh();
    for t in 0..mesh.n_triangles() {
        let geo = ElementGeometry::of(mesh, t);
        for q in 0..rule.len() {
            let v = u.eval_tabulated(t, &geo, tab.values(q), tab.grads(q));
            visit(t, q, rule.weights[q] * geo.det, v);
        }
    }
}

/// L2, L4 (Euclidean magnitude), H1-seminorm or full H1 norm of `u`.
pub fn field_norm(u: &FeFunction, kind: NormKind) -> f64 {
    let rule = norm_rule();
    let mut sum = 0.0;
    for_each_point(u, &rule, |_, _, w, v| sum += w * kind.density(&v));
    kind.root(sum)
}

/// Norm of `u - exact`, where `exact` returns value and gradient.
pub fn error_norm(u: &FeFunction, exact: impl Fn([f64; 2]) -> PointValue, kind: NormKind) -> f64 {
    let rule = norm_rule();
    let mesh = u.mesh().clone();
    let mut sum = 0.0;
    for_each_point(u, &rule, |t, q, w, v| {
        let p = mesh.map_point(t, rule.points[q]);
        let e = exact(p);
        let mut d = PointValue::default();
        for c in 0..2 {
            d.value[c] = v.value[c] - e.value[c];
            for k in 0..2 {
                d.grad[c][k] = v.grad[c][k] - e.grad[c][k];
            }
        }
        sum += w * kind.density(&d);
    });
    kind.root(sum)
}

/// Integral of the first component of `u` over the domain.
pub fn integrate_scalar(u: &FeFunction) -> f64 {
    let rule = norm_rule();
    let mut sum = 0.0;
    for_each_point(u, &rule, |_, _, w, v| sum += w * v.value[0]);
    sum
}
