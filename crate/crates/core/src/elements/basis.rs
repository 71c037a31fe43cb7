//! Shape functions on the reference triangle, written in barycentric
//! coordinates `l0 = 1 - x - y`, `l1 = x`, `l2 = y`.
//!
//! Local numbering: vertices first; P2 edge nodes follow
//! [`crate::mesh::LOCAL_EDGES`] (midpoints of 01, 12, 20); the P1-bubble
//! function `27 l0 l1 l2` is last.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::elements::quadrature::QuadratureRule;

const GRAD_LAMBDA: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// Tolerance for accepting barycentric points on the closed triangle.
pub const BARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    P1,
    P2,
    P1Bubble,
    P0,
}

impl Family {
    pub fn n_local(self) -> usize {
        match self {
            Family::P0 => 1,
            Family::P1 => 3,
            Family::P1Bubble => 4,
            Family::P2 => 6,
        }
    }

    /// Polynomial degree of the local space.
    pub fn degree(self) -> usize {
        match self {
            Family::P0 => 0,
            Family::P1 => 1,
            Family::P2 => 2,
            Family::P1Bubble => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceBasis {
    pub family: Family,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisValues {
    pub values: Vec<f64>,
    /// Gradients with respect to the reference coordinates `(x, y)`.
    pub grads: Vec<[f64; 2]>,
}

impl ReferenceBasis {
    pub fn new(family: Family) -> Self {
        ReferenceBasis { family }
    }

    pub fn n_local(&self) -> usize {
        self.family.n_local()
    }

    /// Values and reference gradients of all local shape functions at a
    /// barycentric point of the closed reference triangle.
    pub fn eval(&self, bary: [f64; 3]) -> Result<BasisValues> {
        let sum: f64 = bary.iter().sum();
        if bary.iter().any(|&l| l < -BARY_TOL) || (sum - 1.0).abs() > BARY_TOL {
            return Err(Error::OutsideReferenceTriangle { point: bary });
        }
        let n = self.n_local();
        let mut values = vec![0.0; n];
        let mut grads = vec![[0.0; 2]; n];
        self.eval_into(bary, &mut values, &mut grads);
        Ok(BasisValues { values, grads })
    }

    /// Unchecked evaluation into caller-provided buffers of length `n_local`.
    pub fn eval_into(&self, l: [f64; 3], values: &mut [f64], grads: &mut [[f64; 2]]) {
        let g = GRAD_LAMBDA;
        match self.family {
            Family::P0 => {
                values[0] = 1.0;
                grads[0] = [0.0, 0.0];
            }
            Family::P1 | Family::P1Bubble => {
                for i in 0..3 {
                    values[i] = l[i];
                    grads[i] = g[i];
                }
                if self.family == Family::P1Bubble {
                    values[3] = 27.0 * l[0] * l[1] * l[2];
                    for d in 0..2 {
                        grads[3][d] = 27.0
                            * (g[0][d] * l[1] * l[2] + l[0] * g[1][d] * l[2] + l[0] * l[1] * g[2][d]);
                    }
                }
            }
            Family::P2 => {
                for i in 0..3 {
                    values[i] = l[i] * (2.0 * l[i] - 1.0);
                    let s = 4.0 * l[i] - 1.0;
                    grads[i] = [s * g[i][0], s * g[i][1]];
                }
                for (k, [i, j]) in crate::mesh::LOCAL_EDGES.iter().copied().enumerate() {
                    values[3 + k] = 4.0 * l[i] * l[j];
                    for d in 0..2 {
                        grads[3 + k][d] = 4.0 * (g[i][d] * l[j] + l[i] * g[j][d]);
                    }
                }
            }
        }
    }

    /// Barycentric coordinates of the nodes of a nodal family.
    pub fn nodes(&self) -> Vec<[f64; 3]> {
        let vertices = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        match self.family {
            Family::P0 => vec![[1.0 / 3.0; 3]],
            Family::P1 => vertices.to_vec(),
            Family::P1Bubble => {
                let mut v = vertices.to_vec();
                v.push([1.0 / 3.0; 3]);
                v
            }
            Family::P2 => {
                let mut v = vertices.to_vec();
                v.extend([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]);
                v
            }
        }
    }
}

/// Shape function values and reference gradients tabulated at the points of
/// a quadrature rule.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub n_points: usize,
    pub n_local: usize,
    values: Vec<f64>,
    grads: Vec<[f64; 2]>,
}

impl Tabulation {
    pub fn new(basis: ReferenceBasis, rule: &QuadratureRule) -> Self {
        let n_local = basis.n_local();
        let n_points = rule.len();
        let mut values = vec![0.0; n_points * n_local];
        let mut grads = vec![[0.0; 2]; n_points * n_local];
        for (q, &p) in rule.points.iter().enumerate() {
            let r = q * n_local..(q + 1) * n_local;
            basis.eval_into(p, &mut values[r.clone()], &mut grads[r]);
        }
        Tabulation {
            n_points,
            n_local,
            values,
            grads,
        }
    }

    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_local..(q + 1) * self.n_local]
    }

    pub fn grads(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.n_local..(q + 1) * self.n_local]
    }
}
