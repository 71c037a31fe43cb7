//! Legacy ASCII VTK output of vertex fields.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FeFunction;

/// Writes the mesh, vertex velocities (higher-order DOFs dropped) and vertex
/// pressures as an unstructured grid of triangles.
pub fn export_vtk(u: &FeFunction, p: &FeFunction, path: &Path) -> Result<()> {
    if !Arc::ptr_eq(u.mesh(), p.mesh()) {
        return Err(Error::Mismatch("velocity and pressure on different meshes".into()));
    }
    fs::write(path, vtk_text(u, p)).map_err(|e| Error::io(path, e))
}

pub fn vtk_text(u: &FeFunction, p: &FeFunction) -> String {
    let mesh = u.mesh();
    let (nv, nt) = (mesh.n_vertices(), mesh.n_triangles());
    let mut s = String::with_capacity(120 * nv + 40 * nt);
    s.push_str("# vtk DataFile Version 3.0\nmixed finite element solution\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {nv} double");
    for v in mesh.vertices() {
        let _ = writeln!(s, "{:.16e} {:.16e} 0", v[0], v[1]);
    }
    let _ = writeln!(s, "CELLS {nt} {}", 4 * nt);
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        s.push_str("5\n");
    }
    let _ = writeln!(s, "POINT_DATA {nv}\nVECTORS velocity double");
    for v in 0..nv {
        let [a, b] = u.vertex_value(v);
        let _ = writeln!(s, "{a:.16e} {b:.16e} 0");
    }
    s.push_str("SCALARS pressure double 1\nLOOKUP_TABLE default\n");
    for v in 0..nv {
        let _ = writeln!(s, "{:.16e}", p.vertex_value(v)[0]);
    }
    s
}
