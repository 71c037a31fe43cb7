//! Discrete fields and affine element geometry.

use std::sync::Arc;

use crate::elements::DofMap;
use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Affine map data of one triangle.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    /// Jacobian determinant, twice the signed area.
    pub det: f64,
    inv_jt: [[f64; 2]; 2],
}

impl ElementGeometry {
    pub fn new(p: [[f64; 2]; 3]) -> Self {
        let j = [[p[1][0] - p[0][0], p[2][0] - p[0][0]], [p[1][1] - p[0][1], p[2][1] - p[0][1]]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let inv_jt = [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]];
        ElementGeometry { det, inv_jt }
    }

    pub fn of(mesh: &Mesh, t: usize) -> Self {
        Self::new(mesh.triangle_points(t))
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }

    #[inline]
    pub fn physical_grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_jt[0][0] * g[0] + self.inv_jt[0][1] * g[1],
            self.inv_jt[1][0] * g[0] + self.inv_jt[1][1] * g[1],
        ]
    }
}

/// Value and gradient of a field with at most two components at a point.
/// `grad[c][d]` is the derivative of component `c` along coordinate `d`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointValue {
    pub value: [f64; 2],
    pub grad: [[f64; 2]; 2],
}

/// Coefficient vector bound to a DOF map.
#[derive(Clone, Debug)]
pub struct FeFunction {
    dofmap: Arc<DofMap>,
    coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn new(dofmap: Arc<DofMap>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != dofmap.n_dofs() {
            return Err(Error::Mismatch(format!(
                "coefficient vector of length {} for {} dofs",
                coeffs.len(),
                dofmap.n_dofs()
            )));
        }
        Ok(FeFunction { dofmap, coeffs })
    }

    pub fn zeros(dofmap: Arc<DofMap>) -> Self {
        let n = dofmap.n_dofs();
        FeFunction {
            dofmap,
            coeffs: vec![0.0; n],
        }
    }

    /// Nodal interpolant of `f`. Bubble coefficients are chosen so that the
    /// interpolant also matches `f` at each barycenter.
    pub fn interpolate(dofmap: Arc<DofMap>, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let mut coeffs = vec![0.0; dofmap.n_dofs()];
        let nc = dofmap.n_components();
        let nv = dofmap.mesh().n_vertices();
        for (node, &p) in dofmap.node_coords().iter().enumerate() {
            let v = f(p);
            for (c, vc) in v.iter().enumerate().take(nc) {
                coeffs[dofmap.dof(node, c)] = *vc;
            }
        }
        if dofmap.family() == crate::elements::Family::P1Bubble {
            let mesh = dofmap.mesh().clone();
            for t in 0..mesh.n_triangles() {
                let tri = mesh.triangles()[t];
                for c in 0..nc {
                    let linear: f64 = tri.iter().map(|&v| coeffs[dofmap.dof(v, c)]).sum::<f64>() / 3.0;
                    coeffs[dofmap.dof(nv + t, c)] -= linear;
                }
            }
        }
        FeFunction { dofmap, coeffs }
    }

    pub fn dofmap(&self) -> &Arc<DofMap> {
        &self.dofmap
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.dofmap.mesh()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn n_components(&self) -> usize {
        self.dofmap.n_components()
    }

    /// Evaluates the field on triangle `t` from tabulated reference values
    /// and gradients.
    #[inline]
    pub fn eval_tabulated(&self, t: usize, geo: &ElementGeometry, values: &[f64], ref_grads: &[[f64; 2]]) -> PointValue {
        let nodes = self.dofmap.cell_nodes(t);
        let mut out = PointValue::default();
        for c in 0..self.n_components() {
            for (a, &node) in nodes.iter().enumerate() {
                let coef = self.coeffs[self.dofmap.dof(node, c)];
                out.value[c] += coef * values[a];
                let g = geo.physical_grad(ref_grads[a]);
                out.grad[c][0] += coef * g[0];
                out.grad[c][1] += coef * g[1];
            }
        }
        out
    }

    /// Evaluates the field at barycentric coordinates `bary` of triangle `t`.
    pub fn eval(&self, t: usize, bary: [f64; 3]) -> PointValue {
        let basis = self.dofmap.basis();
        let nl = basis.n_local();
        let mut values = [0.0; 6];
        let mut grads = [[0.0; 2]; 6];
        basis.eval_into(bary, &mut values[..nl], &mut grads[..nl]);
        let geo = ElementGeometry::of(self.mesh(), t);
        self.eval_tabulated(t, &geo, &values[..nl], &grads[..nl])
    }

    /// Value at the vertex `v` (every family stores vertex values directly).
    pub fn vertex_value(&self, v: usize) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (c, o) in out.iter_mut().enumerate().take(self.n_components()) {
            *o = self.coeffs[self.dofmap.dof(v, c)];
        }
        out
    }

    /// `alpha * self` on the same space.
    pub fn scaled(&self, alpha: f64) -> Self {
        FeFunction {
            dofmap: self.dofmap.clone(),
            coeffs: self.coeffs.iter().map(|c| alpha * c).collect(),
        }
    }

    /// `self - other` on the same space.
    pub fn difference(&self, other: &FeFunction) -> Result<Self> {
        if self.coeffs.len() != other.coeffs.len() || self.dofmap.family() != other.dofmap.family() {
            return Err(Error::Mismatch("fields live on different spaces".into()));
        }
        Ok(FeFunction {
            dofmap: self.dofmap.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }
}
