use std::sync::Arc;

use crate::elements::basis::{Family, ReferenceBasis};
use crate::elements::ElementPair;
use crate::mesh::Mesh;

/// Global numbering of the degrees of freedom of one (possibly vector
/// valued) finite element space.
///
/// Scalar nodes are numbered vertices first, then edge midpoints (P2) or cell
/// bubbles (P1-bubble). Vector DOFs are blocked by component:
/// `dof = component * n_nodes + node`.
#[derive(Clone, Debug)]
pub struct DofMap {
    mesh: Arc<Mesh>,
    family: Family,
    n_components: usize,
    n_nodes: usize,
    cell_nodes: Vec<usize>,
    node_coords: Vec<[f64; 2]>,
    boundary_node: Vec<bool>,
    boundary_dofs: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: Arc<Mesh>, family: Family, n_components: usize) -> Self {
        let nv = mesh.n_vertices();
        let nl = family.n_local();
        let mut cell_nodes = Vec::with_capacity(nl * mesh.n_triangles());
        let mut node_coords: Vec<[f64; 2]> = Vec::new();
        let n_nodes = match family {
            Family::P0 => {
                cell_nodes.extend(0..mesh.n_triangles());
                node_coords.extend((0..mesh.n_triangles()).map(|t| mesh.map_point(t, [1.0 / 3.0; 3])));
                mesh.n_triangles()
            }
            Family::P1 => {
                for tri in mesh.triangles() {
                    cell_nodes.extend_from_slice(tri);
                }
                node_coords.extend_from_slice(mesh.vertices());
                nv
            }
            Family::P2 => {
                for (tri, te) in mesh.triangles().iter().zip(mesh.triangle_edges()) {
                    cell_nodes.extend_from_slice(tri);
                    cell_nodes.extend(te.iter().map(|e| nv + e));
                }
                node_coords.extend_from_slice(mesh.vertices());
                node_coords.extend(mesh.edges().iter().map(|&[a, b]| {
                    let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
                    [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
                }));
                nv + mesh.edges().len()
            }
            Family::P1Bubble => {
                for (t, tri) in mesh.triangles().iter().enumerate() {
                    cell_nodes.extend_from_slice(tri);
                    cell_nodes.push(nv + t);
                }
                node_coords.extend_from_slice(mesh.vertices());
                node_coords.extend((0..mesh.n_triangles()).map(|t| mesh.map_point(t, [1.0 / 3.0; 3])));
                nv + mesh.n_triangles()
            }
        };

        let mut boundary_node = vec![false; n_nodes];
        if family != Family::P0 {
            for be in mesh.boundary_edges() {
                for v in be.vertices {
                    boundary_node[v] = true;
                }
                if family == Family::P2 {
                    boundary_node[nv + be.edge] = true;
                }
            }
        }
        let boundary_dofs = (0..n_components)
            .flat_map(|c| {
                boundary_node
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(move |(node, _)| c * n_nodes + node)
            })
            .collect();

        DofMap {
            mesh,
            family,
            n_components,
            n_nodes,
            cell_nodes,
            node_coords,
            boundary_node,
            boundary_dofs,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn basis(&self) -> ReferenceBasis {
        ReferenceBasis::new(self.family)
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_dofs(&self) -> usize {
        self.n_nodes * self.n_components
    }

    pub fn n_local(&self) -> usize {
        self.family.n_local()
    }

    /// Scalar node indices of triangle `t` in local order.
    pub fn cell_nodes(&self, t: usize) -> &[usize] {
        let nl = self.n_local();
        &self.cell_nodes[t * nl..(t + 1) * nl]
    }

    #[inline]
    pub fn dof(&self, node: usize, component: usize) -> usize {
        component * self.n_nodes + node
    }

    /// Position of a scalar node; bubble nodes report the barycenter.
    pub fn node_coords(&self) -> &[[f64; 2]] {
        &self.node_coords
    }

    pub fn is_boundary_node(&self, node: usize) -> bool {
        self.boundary_node[node]
    }

    /// Sorted DOFs of nodes on the boundary, all components.
    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn is_boundary_dof(&self, dof: usize) -> bool {
        self.boundary_node[dof % self.n_nodes]
    }

    /// Whether the shape function of this scalar node is nodal (interpolates
    /// point values). Bubble nodes are not.
    pub fn is_nodal(&self, node: usize) -> bool {
        !(self.family == Family::P1Bubble && node >= self.mesh.n_vertices())
    }
}

/// Velocity and pressure DOF maps of an element pair.
pub fn build_dofmap(mesh: &Arc<Mesh>, pair: ElementPair) -> (Arc<DofMap>, Arc<DofMap>) {
    (
        Arc::new(DofMap::new(mesh.clone(), pair.velocity_family(), 2)),
        Arc::new(DofMap::new(mesh.clone(), pair.pressure_family(), 1)),
    )
}
