//! Structured triangulations of the square `[-1, 1]^2`.
//!
//! Every square cell of an `n_div x n_div` grid is split along its
//! bottom-left to top-right diagonal. Vertex coordinates are computed as
//! `-1 + 2 i / n_div`, which makes the vertex set of a mesh an exact subset of
//! the vertex set of its uniform refinement.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side of the square a boundary edge lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WallTag {
    Bottom,
    Top,
    Left,
    Right,
}

impl WallTag {
    pub const ALL: [WallTag; 4] = [WallTag::Bottom, WallTag::Top, WallTag::Left, WallTag::Right];

    /// Outward unit normal of the wall.
    pub fn normal(self) -> [f64; 2] {
        match self {
            WallTag::Bottom => [0.0, -1.0],
            WallTag::Top => [0.0, 1.0],
            WallTag::Left => [-1.0, 0.0],
            WallTag::Right => [1.0, 0.0],
        }
    }

    /// Tag of the square side containing `point`, if any.
    ///
    /// Points on the top or bottom side take precedence, so corners are
    /// classified as `Top` / `Bottom`.
    pub fn of_point(point: [f64; 2], tol: f64) -> Option<WallTag> {
        let [x, y] = point;
        if x.abs() > 1.0 + tol || y.abs() > 1.0 + tol {
            return None;
        }
        if (y - 1.0).abs() <= tol {
            Some(WallTag::Top)
        } else if (y + 1.0).abs() <= tol {
            Some(WallTag::Bottom)
        } else if (x + 1.0).abs() <= tol {
            Some(WallTag::Left)
        } else if (x - 1.0).abs() <= tol {
            Some(WallTag::Right)
        } else {
            None
        }
    }
}

/// A boundary edge, oriented counterclockwise with respect to its triangle
/// so that the outward normal is the edge direction rotated clockwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    /// Index into [`Mesh::edges`].
    pub edge: usize,
    pub tag: WallTag,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    n_div: Option<usize>,
}

/// Local edge `k` of a triangle joins local vertices `LOCAL_EDGES[k]`.
pub const LOCAL_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

/// Builds the structured `n_div x n_div` triangulation of `[-1, 1]^2`.
pub fn build_uniform_square_mesh(n_div: usize) -> Result<Mesh> {
    if n_div == 0 {
        return Err(Error::ZeroSubdivisions);
    }
    let n = n_div;
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([coord(i), coord(j)]);
        }
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let mut mesh = Mesh::from_parts(vertices, triangles, |mid| {
        WallTag::of_point(mid, 1e-12).expect("boundary edge of the square mesh off the square")
    });
    mesh.n_div = Some(n);
    Ok(mesh)
}

/// Uniform refinement: the structured mesh with twice as many subdivisions.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    let n = mesh.n_div.ok_or(Error::NotStructured)?;
    build_uniform_square_mesh(2 * n)
}

/// Smallest interior angle over all triangles, in degrees.
pub fn mesh_quality(mesh: &Mesh) -> Result<f64> {
    let mut min_angle = f64::INFINITY;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = tri.map(|v| mesh.vertices[v]);
        let area2 = signed_area2(p);
        let longest = (0..3)
            .map(|k| dist2(p[k], p[(k + 1) % 3]))
            .fold(0.0, f64::max);
        if area2 <= 1e-8 * longest {
            return Err(Error::DegenerateTriangle {
                index: t,
                area: 0.5 * area2,
            });
        }
        for k in 0..3 {
            let a = p[k];
            let b = p[(k + 1) % 3];
            let c = p[(k + 2) % 3];
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - a[0], c[1] - a[1]];
            let cross = u[0] * v[1] - u[1] * v[0];
            let dot = u[0] * v[0] + u[1] * v[1];
            min_angle = min_angle.min(cross.abs().atan2(dot).to_degrees());
        }
    }
    Ok(min_angle)
}

fn signed_area2(p: [[f64; 2]; 3]) -> f64 {
    (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

impl Mesh {
    /// Assembles a mesh from raw vertices and counterclockwise triangles.
    ///
    /// Edges owned by a single triangle become boundary edges, tagged by
    /// `tag_of` evaluated at the edge midpoint.
    pub fn from_parts(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        tag_of: impl Fn([f64; 2]) -> WallTag,
    ) -> Mesh {
        let mut index: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut edges = Vec::new();
        let mut owners: Vec<u8> = Vec::new();
        let mut first_owner: Vec<(usize, usize)> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for (k, [a, b]) in LOCAL_EDGES.iter().enumerate() {
                let (va, vb) = (tri[*a], tri[*b]);
                let key = (va.min(vb), va.max(vb));
                let e = *index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    owners.push(0);
                    first_owner.push((t, k));
                    edges.len() - 1
                });
                owners[e] += 1;
                te[k] = e;
            }
            triangle_edges.push(te);
        }
        let boundary_edges = (0..edges.len())
            .filter(|&e| owners[e] == 1)
            .map(|e| {
                let (t, k) = first_owner[e];
                let [a, b] = LOCAL_EDGES[k];
                let vertices_ab = [triangles[t][a], triangles[t][b]];
                let pa = vertices[vertices_ab[0]];
                let pb = vertices[vertices_ab[1]];
                let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                BoundaryEdge {
                    vertices: vertices_ab,
                    edge: e,
                    tag: tag_of(mid),
                }
            })
            .collect();
        Mesh {
            vertices,
            triangles,
            edges,
            triangle_edges,
            boundary_edges,
            n_div: None,
        }
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Unique edges as sorted vertex pairs, in first-seen order.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Global edge indices of each triangle, following [`LOCAL_EDGES`].
    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn n_div(&self) -> Option<usize> {
        self.n_div
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Mesh size. For structured meshes this is the cell side `2 / n_div`,
    /// otherwise the longest edge.
    pub fn h(&self) -> f64 {
        match self.n_div {
            Some(n) => 2.0 / n as f64,
            None => self
                .edges
                .iter()
                .map(|&[a, b]| dist2(self.vertices[a], self.vertices[b]).sqrt())
                .fold(0.0, f64::max),
        }
    }

    pub fn triangle_points(&self, t: usize) -> [[f64; 2]; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * signed_area2(self.triangle_points(t))
    }

    /// Affine map of triangle `t`: the point with barycentric coordinates `bary`.
    pub fn map_point(&self, t: usize, bary: [f64; 3]) -> [f64; 2] {
        let p = self.triangle_points(t);
        [
            bary[0] * p[0][0] + bary[1] * p[1][0] + bary[2] * p[2][0],
            bary[0] * p[0][1] + bary[1] * p[1][1] + bary[2] * p[2][1],
        ]
    }

    /// Barycentric coordinates of `point` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, point: [f64; 2]) -> [f64; 3] {
        let p = self.triangle_points(t);
        let det = signed_area2(p);
        let l1 = ((point[0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (point[1] - p[0][1])) / det;
        let l2 = ((p[1][0] - p[0][0]) * (point[1] - p[0][1]) - (point[0] - p[0][0]) * (p[1][1] - p[0][1])) / det;
        [1.0 - l1 - l2, l1, l2]
    }

    /// Triangle of a structured mesh containing `point`, found by index
    /// arithmetic. Points on shared edges resolve to one of the neighbours.
    pub fn locate(&self, point: [f64; 2]) -> Result<usize> {
        let n = self.n_div.ok_or(Error::NotStructured)?;
        let cell = |c: f64| -> usize {
            let s = ((c + 1.0) * 0.5 * n as f64).floor();
            (s.max(0.0) as usize).min(n - 1)
        };
        let (i, j) = (cell(point[0]), cell(point[1]));
        let x0 = -1.0 + 2.0 * i as f64 / n as f64;
        let y0 = -1.0 + 2.0 * j as f64 / n as f64;
        let base = 2 * (j * n + i);
        // lower-right triangle holds points below the diagonal
        if point[1] - y0 <= point[0] - x0 {
            Ok(base)
        } else {
            Ok(base + 1)
        }
    }

    /// Total area of all triangles.
    pub fn area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.triangle_area(t)).sum()
    }
}
