//! Lid-driven cavity boundary data and its nodal interpolant on the
//! velocity trace space.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::elements::quadrature::gauss_legendre_unit;
use crate::elements::{DofMap, Family};
use crate::error::{Error, Result};
use crate::field::FeFunction;
use crate::mesh::{BoundaryEdge, WallTag};

const ON_BOUNDARY_TOL: f64 = 1e-12;

/// Value given to the two top corners, where the lid meets the side walls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CornerConvention {
    /// Corners move with the lid: `(1, 0)`.
    #[default]
    Leaky,
    /// Corners stick to the walls: `(0, 0)`.
    Sealed,
}

impl CornerConvention {
    pub const ALL: [CornerConvention; 2] = [CornerConvention::Leaky, CornerConvention::Sealed];

    pub fn name(self) -> &'static str {
        match self {
            CornerConvention::Leaky => "leaky",
            CornerConvention::Sealed => "sealed",
        }
    }
}

impl fmt::Display for CornerConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CornerConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leaky" => Ok(CornerConvention::Leaky),
            "sealed" => Ok(CornerConvention::Sealed),
            _ => Err(Error::InvalidInput(format!("unknown corner convention `{s}`"))),
        }
    }
}

/// Unit tangential velocity on the top wall, no-slip on the other three.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LidBoundaryData {
    pub corner: CornerConvention,
}

impl LidBoundaryData {
    pub fn new(corner: CornerConvention) -> Self {
        LidBoundaryData { corner }
    }

    /// Wall value on the open side `tag`.
    pub fn wall_value(&self, tag: WallTag) -> [f64; 2] {
        match tag {
            WallTag::Top => [1.0, 0.0],
            _ => [0.0, 0.0],
        }
    }
}

pub fn evaluate_lid_data(data: &LidBoundaryData, point: [f64; 2]) -> Result<[f64; 2]> {
    let [x, y] = point;
    let tag = WallTag::of_point(point, ON_BOUNDARY_TOL).ok_or(Error::NotOnBoundary { x, y })?;
    if tag == WallTag::Top && (x.abs() - 1.0).abs() <= ON_BOUNDARY_TOL {
        return Ok(match data.corner {
            CornerConvention::Leaky => [1.0, 0.0],
            CornerConvention::Sealed => [0.0, 0.0],
        });
    }
    Ok(data.wall_value(tag))
}

/// Prescribed values of the boundary velocity DOFs (the discrete data `g_h`).
#[derive(Clone, Debug)]
pub struct BoundaryTrace {
    dofmap: Arc<DofMap>,
    /// Aligned with `dofmap.boundary_dofs()`.
    values: Vec<f64>,
}

impl BoundaryTrace {
    /// Trace obtained by evaluating `f` at every boundary node.
    pub fn from_fn(dofmap: Arc<DofMap>, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let n = dofmap.n_nodes();
        let values = dofmap
            .boundary_dofs()
            .iter()
            .map(|&dof| f(dofmap.node_coords()[dof % n])[dof / n])
            .collect();
        BoundaryTrace { dofmap, values }
    }

    pub fn zero(dofmap: Arc<DofMap>) -> Self {
        let values = vec![0.0; dofmap.boundary_dofs().len()];
        BoundaryTrace { dofmap, values }
    }

    pub fn dofmap(&self) -> &Arc<DofMap> {
        &self.dofmap
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(dof, value)` pairs in increasing DOF order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.dofmap.boundary_dofs().iter().copied().zip(self.values.iter().copied())
    }

    pub fn value(&self, dof: usize) -> Option<f64> {
        self.dofmap
            .boundary_dofs()
            .binary_search(&dof)
            .ok()
            .map(|i| self.values[i])
    }

    /// Field equal to the trace on the boundary and zero at interior DOFs.
    pub fn lift(&self) -> FeFunction {
        let mut u = FeFunction::zeros(self.dofmap.clone());
        for (dof, v) in self.iter() {
            u.coeffs_mut()[dof] = v;
        }
        u
    }

    /// Trace restricted to the boundary edge `edge`, evaluated at the edge
    /// parameter `s` in `[0, 1]` running from `edge.vertices[0]` to `[1]`.
    pub fn eval_on_edge(&self, edge: &BoundaryEdge, s: f64) -> [f64; 2] {
        let dm = &self.dofmap;
        let nv = dm.mesh().n_vertices();
        let [a, b] = edge.vertices;
        let mut out = [0.0; 2];
        for (c, o) in out.iter_mut().enumerate() {
            let ga = self.value(dm.dof(a, c)).unwrap_or(0.0);
            let gb = self.value(dm.dof(b, c)).unwrap_or(0.0);
            *o = match dm.family() {
                Family::P2 => {
                    let gm = self.value(dm.dof(nv + edge.edge, c)).unwrap_or(0.0);
                    ga * (1.0 - s) * (1.0 - 2.0 * s) + gb * s * (2.0 * s - 1.0) + gm * 4.0 * s * (1.0 - s)
                }
                _ => ga * (1.0 - s) + gb * s,
            };
        }
        out
    }
}

/// Nodal (Lagrange) interpolant of the lid data on the velocity trace space.
pub fn interpolate_boundary_data(data: &LidBoundaryData, vmap: &Arc<DofMap>) -> BoundaryTrace {
    BoundaryTrace::from_fn(vmap.clone(), |p| {
        evaluate_lid_data(data, p).expect("boundary node off the boundary")
    })
}

fn edge_length(trace: &BoundaryTrace, edge: &BoundaryEdge) -> (f64, [f64; 2], [f64; 2]) {
    let v = trace.dofmap.mesh().vertices();
    let (pa, pb) = (v[edge.vertices[0]], v[edge.vertices[1]]);
    let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
    (len, pa, pb)
}

/// Net flux `\oint g_h . n` through the boundary, exact for the trace degree.
pub fn compatibility_integral(trace: &BoundaryTrace) -> f64 {
    let (s, w) = gauss_legendre_unit(3);
    trace
        .dofmap
        .mesh()
        .boundary_edges()
        .iter()
        .map(|edge| {
            let (len, pa, pb) = edge_length(trace, edge);
            let normal = [(pb[1] - pa[1]) / len, (pa[0] - pb[0]) / len];
            s.iter()
                .zip(&w)
                .map(|(&s, &w)| {
                    let g = trace.eval_on_edge(edge, s);
                    w * (g[0] * normal[0] + g[1] * normal[1])
                })
                .sum::<f64>()
                * len
        })
        .sum()
}

/// `|| g - g_h ||` in `L^2` of the boundary for data `g` evaluated at
/// edge-interior points.
pub fn boundary_l2_error_with(trace: &BoundaryTrace, g: impl Fn([f64; 2], WallTag) -> [f64; 2]) -> f64 {
    let (s, w) = gauss_legendre_unit(5);
    trace
        .dofmap
        .mesh()
        .boundary_edges()
        .iter()
        .map(|edge| {
            let (len, pa, pb) = edge_length(trace, edge);
            s.iter()
                .zip(&w)
                .map(|(&s, &w)| {
                    let p = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
                    let gv = g(p, edge.tag);
                    let gh = trace.eval_on_edge(edge, s);
                    w * ((gv[0] - gh[0]).powi(2) + (gv[1] - gh[1]).powi(2))
                })
                .sum::<f64>()
                * len
        })
        .sum::<f64>()
        .sqrt()
}

/// `|| g - g_h ||` in `L^2` of the boundary for the lid data. On each edge
/// `g` is the constant wall value, so the integrand is a polynomial and the
/// five-point Gauss rule is exact.
pub fn boundary_l2_error(data: &LidBoundaryData, trace: &BoundaryTrace) -> f64 {
    boundary_l2_error_with(trace, |_, tag| data.wall_value(tag))
}
