//! Element-loop assembly of the mixed Navier-Stokes forms.
//!
//! Forms, for velocity fields `u, v, w` and pressures `p, q`:
//!
//! * `a(u, v) = nu * int grad u : grad v`
//! * `b(v, q) = int q div v`
//! * `c(u, v, w) = int (u . grad) v . w`
//! * `G(p, q) = int (p - P p)(q - P q)`, with `P` the elementwise mean.
//!
//! The monolithic system is ordered `[velocity | pressure | multiplier]`.
//! Continuity rows carry the sign that makes the Stokes operator symmetric:
//!
//! ```text
//! | A + N   -B^T   0 | |u|   |f + c(w, w, .)|
//! | -B      -G     m | |p| = |      0       |
//! |  0       m^T   0 | |l|   |      0       |
//! ```
//!
//! where `N` is the Newton linearization of the convection term around the
//! previous iterate `w` and `m_k = int q_k` enforces a zero-mean pressure.
//! The continuity rows read `b(u, q) + G(p, q) = 0`: with this sign, testing
//! with `(u, p)` gives `a(u, u) + G(p, p) = (f, u)`, which is what makes the
//! equal-order pair stable. The opposite sign destroys that estimate.

use std::sync::Arc;

use rayon::prelude::*;

use crate::boundary::BoundaryTrace;
use crate::elements::{build_dofmap, quadrature_rule, DofMap, ElementPair, Family, QuadratureRule, Tabulation};
use crate::error::{Error, Result};
use crate::field::{ElementGeometry, PointValue};
use crate::mesh::Mesh;
use crate::sparse::CsrMatrix;

pub use crate::field::FeFunction;

/// Forcing term evaluated at physical points.
pub type Forcing<'a> = &'a (dyn Fn([f64; 2]) -> [f64; 2] + Sync);

/// Zero body force.
pub fn no_forcing(_: [f64; 2]) -> [f64; 2] {
    [0.0, 0.0]
}

/// Tolerance on the Dirichlet trace of the linearization point.
const TRACE_TOL: f64 = 1e-12;

/// Element loops either run strictly in mesh order, or compute element
/// matrices in parallel and scatter them in mesh order. Both give
/// bit-identical results.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AssemblyMode {
    #[default]
    Sequential,
    Parallel,
}

/// Velocity/pressure spaces of one element pair on one mesh.
#[derive(Clone, Debug)]
pub struct MixedSpace {
    pub mesh: Arc<Mesh>,
    pub pair: ElementPair,
    pub velocity: Arc<DofMap>,
    pub pressure: Arc<DofMap>,
}

impl MixedSpace {
    pub fn new(mesh: Arc<Mesh>, pair: ElementPair) -> Self {
        let (velocity, pressure) = build_dofmap(&mesh, pair);
        MixedSpace {
            mesh,
            pair,
            velocity,
            pressure,
        }
    }

    pub fn n_velocity(&self) -> usize {
        self.velocity.n_dofs()
    }

    pub fn n_pressure(&self) -> usize {
        self.pressure.n_dofs()
    }

    /// Velocity + pressure + one mean-pressure multiplier.
    pub fn n_total(&self) -> usize {
        self.n_velocity() + self.n_pressure() + 1
    }

    pub fn multiplier_index(&self) -> usize {
        self.n_velocity() + self.n_pressure()
    }
}

/// Sparse block system of one linear(ized) mixed problem.
#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub n_velocity: usize,
    pub n_pressure: usize,
    /// Eliminated Dirichlet DOFs and their values, sorted by DOF.
    pub eliminated: Vec<(usize, f64)>,
    pub stabilized: bool,
}

impl SaddleSystem {
    pub fn size(&self) -> usize {
        self.rhs.len()
    }

    pub fn multiplier_index(&self) -> usize {
        self.n_velocity + self.n_pressure
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Overrides the pair's default quadrature degree.
    pub quadrature_degree: Option<usize>,
    pub mode: AssemblyMode,
}

/// Assembles `rows x cols` element contributions into a sparse matrix.
///
/// `kernel(t, local)` fills the row-major dense element matrix, whose rows
/// follow `row_dofs(t)` and columns `col_dofs(t)`.
fn assemble_block<K>(
    n_rows: usize,
    n_cols: usize,
    n_elements: usize,
    row_dofs: impl Fn(usize, &mut Vec<usize>) + Sync,
    col_dofs: impl Fn(usize, &mut Vec<usize>) + Sync,
    kernel: K,
) -> CsrMatrix
where
    K: Fn(usize, &mut [f64]) + Sync,
{
    let mut lists = vec![Vec::new(); n_rows];
    let (mut r, mut c) = (Vec::new(), Vec::new());
    for t in 0..n_elements {
        row_dofs(t, &mut r);
        col_dofs(t, &mut c);
        for &i in &r {
            lists[i].extend_from_slice(&c);
        }
    }
    let mut m = CsrMatrix::from_row_lists(n_cols, lists);
    let mut local = Vec::new();
    for t in 0..n_elements {
        row_dofs(t, &mut r);
        col_dofs(t, &mut c);
        local.clear();
        local.resize(r.len() * c.len(), 0.0);
        kernel(t, &mut local);
        for (li, &i) in r.iter().enumerate() {
            for (lj, &j) in c.iter().enumerate() {
                m.add(i, j, local[li * c.len() + lj]);
            }
        }
    }
    m
}

fn element_dofs(map: &DofMap) -> impl Fn(usize, &mut Vec<usize>) + Sync + '_ {
    move |t, out| {
        out.clear();
        let nodes = map.cell_nodes(t);
        for c in 0..map.n_components() {
            out.extend(nodes.iter().map(|&n| map.dof(n, c)));
        }
    }
}

fn physical_grads(geo: &ElementGeometry, tab: &Tabulation, q: usize, out: &mut [[f64; 2]]) {
    for (o, g) in out.iter_mut().zip(tab.grads(q)) {
        *o = geo.physical_grad(*g);
    }
}

fn check_same_mesh(a: &DofMap, b: &DofMap) -> Result<()> {
    if !Arc::ptr_eq(a.mesh(), b.mesh()) {
        return Err(Error::Mismatch("DOF maps built on different meshes".into()));
    }
    Ok(())
}

/// Matrix of `a(u, v) = nu int grad u : grad v` on a vector (or scalar)
/// space. Component blocks are decoupled.
pub fn assemble_viscous(vmap: &DofMap, nu: f64) -> Result<CsrMatrix> {
    if nu <= 0.0 {
        return Err(Error::InvalidInput(format!("viscosity must be positive, got {nu}")));
    }
    let rule = quadrature_rule(2 * vmap.family().degree())?;
    let tab = Tabulation::new(vmap.basis(), &rule);
    let mesh = vmap.mesh();
    let nl = vmap.n_local();
    let nc = vmap.n_components();
    Ok(assemble_block(
        vmap.n_dofs(),
        vmap.n_dofs(),
        mesh.n_triangles(),
        element_dofs(vmap),
        element_dofs(vmap),
        |t, local| {
            let geo = ElementGeometry::of(mesh, t);
            let mut g = [[0.0; 2]; 6];
            let n = nc * nl;
            for q in 0..rule.len() {
                let w = rule.weights[q] * geo.det * nu;
                physical_grads(&geo, &tab, q, &mut g[..nl]);
                for b in 0..nl {
                    for a in 0..nl {
                        let v = w * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                        for c in 0..nc {
                            local[(c * nl + b) * n + c * nl + a] += v;
                        }
                    }
                }
            }
        },
    ))
}

/// Matrix of `b(v, q) = int q div v`; rows are pressure DOFs, columns
/// velocity DOFs.
pub fn assemble_divergence(vmap: &DofMap, pmap: &DofMap) -> Result<CsrMatrix> {
    check_same_mesh(vmap, pmap)?;
    let rule = quadrature_rule(vmap.family().degree() + pmap.family().degree())?;
    let vtab = Tabulation::new(vmap.basis(), &rule);
    let ptab = Tabulation::new(pmap.basis(), &rule);
    let mesh = vmap.mesh();
    let nl = vmap.n_local();
    let n = 2 * nl;
    Ok(assemble_block(
        pmap.n_dofs(),
        vmap.n_dofs(),
        mesh.n_triangles(),
        element_dofs(pmap),
        element_dofs(vmap),
        |t, local| {
            let geo = ElementGeometry::of(mesh, t);
            let mut g = [[0.0; 2]; 6];
            for q in 0..rule.len() {
                let w = rule.weights[q] * geo.det;
                physical_grads(&geo, &vtab, q, &mut g[..nl]);
                for (k, chi) in ptab.values(q).iter().enumerate() {
                    for a in 0..nl {
                        for c in 0..2 {
                            local[k * n + c * nl + a] += w * chi * g[a][c];
                        }
                    }
                }
            }
        },
    ))
}

/// Mass matrix `int u . v` of a scalar or vector space.
pub fn assemble_mass(map: &DofMap) -> Result<CsrMatrix> {
    let rule = quadrature_rule(2 * map.family().degree())?;
    let tab = Tabulation::new(map.basis(), &rule);
    let mesh = map.mesh();
    let nl = map.n_local();
    let nc = map.n_components();
    let n = nc * nl;
    Ok(assemble_block(
        map.n_dofs(),
        map.n_dofs(),
        mesh.n_triangles(),
        element_dofs(map),
        element_dofs(map),
        |t, local| {
            let geo = ElementGeometry::of(mesh, t);
            for q in 0..rule.len() {
                let w = rule.weights[q] * geo.det;
                let v = tab.values(q);
                for b in 0..nl {
                    for a in 0..nl {
                        for c in 0..nc {
                            local[(c * nl + b) * n + c * nl + a] += w * v[a] * v[b];
                        }
                    }
                }
            }
        },
    ))
}

fn local_stabilization(mesh: &Mesh, rule: &QuadratureRule, tab: &Tabulation, t: usize, local: &mut [f64]) {
    let geo = ElementGeometry::of(mesh, t);
    let nl = tab.n_local;
    let mut means = [0.0; 3];
    for q in 0..rule.len() {
        let w = rule.weights[q] * geo.det;
        let v = tab.values(q);
        for k in 0..nl {
            means[k] += w * v[k];
            for l in 0..nl {
                local[k * nl + l] += w * v[k] * v[l];
            }
        }
    }
    let area = geo.area();
    for k in 0..nl {
        for l in 0..nl {
            local[k * nl + l] -= means[k] * means[l] / area;
        }
    }
}

/// Matrix of `G(p, q) = int (p - P p)(q - P q)` on the P1 pressure space.
pub fn assemble_stabilization(pmap: &DofMap) -> Result<CsrMatrix> {
    if pmap.family() != Family::P1 || pmap.n_components() != 1 {
        return Err(Error::InvalidInput("stabilization requires a scalar P1 space".into()));
    }
    let rule = quadrature_rule(2)?;
    let tab = Tabulation::new(pmap.basis(), &rule);
    let mesh = pmap.mesh();
    Ok(assemble_block(
        pmap.n_dofs(),
        pmap.n_dofs(),
        mesh.n_triangles(),
        element_dofs(pmap),
        element_dofs(pmap),
        |t, local| local_stabilization(mesh, &rule, &tab, t, local),
    ))
}

/// `c(u, v, w) = int (u . grad) v . w` by quadrature of degree `degree`
/// (default: the norm degree 8, exact for every pair).
pub fn trilinear_form_with_degree(u: &FeFunction, v: &FeFunction, w: &FeFunction, degree: usize) -> Result<f64> {
    let mesh = u.mesh();
    if !Arc::ptr_eq(mesh, v.mesh()) || !Arc::ptr_eq(mesh, w.mesh()) {
        return Err(Error::Mismatch("trilinear form arguments on different meshes".into()));
    }
    let rule = quadrature_rule(degree)?;
    let tabs: Vec<Tabulation> = [u, v, w].iter().map(|f| Tabulation::new(f.dofmap().basis(), &rule)).collect();
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let geo = ElementGeometry::of(mesh, t);
        for q in 0..rule.len() {
            let uq = u.eval_tabulated(t, &geo, tabs[0].values(q), tabs[0].grads(q));
            let vq = v.eval_tabulated(t, &geo, tabs[1].values(q), tabs[1].grads(q));
            let wq = w.eval_tabulated(t, &geo, tabs[2].values(q), tabs[2].grads(q));
            let mut s = 0.0;
            for i in 0..2 {
                s += (uq.value[0] * vq.grad[i][0] + uq.value[1] * vq.grad[i][1]) * wq.value[i];
            }
            total += rule.weights[q] * geo.det * s;
        }
    }
    Ok(total)
}

pub fn trilinear_form(u: &FeFunction, v: &FeFunction, w: &FeFunction) -> Result<f64> {
    trilinear_form_with_degree(u, v, w, crate::elements::NORM_QUADRATURE_DEGREE)
}

/// Assembler of the monolithic (linearized) system on a fixed space. The
/// sparsity pattern is computed once and reused for every assembly.
#[derive(Clone, Debug)]
pub struct SaddleAssembler {
    space: MixedSpace,
    pattern: CsrMatrix,
    rule: QuadratureRule,
    vtab: Tabulation,
    ptab: Tabulation,
    mode: AssemblyMode,
}

impl SaddleAssembler {
    pub fn new(space: MixedSpace, options: AssemblyOptions) -> Result<Self> {
        let degree = options.quadrature_degree.unwrap_or(space.pair.quadrature_degree());
        let rule = quadrature_rule(degree)?;
        let vtab = Tabulation::new(space.velocity.basis(), &rule);
        let ptab = Tabulation::new(space.pressure.basis(), &rule);
        let n = space.n_total();
        let mut lists = vec![Vec::new(); n];
        let mut dofs = Vec::new();
        let stabilized = space.pair.is_stabilized();
        let np = space.pressure.n_local();
        for t in 0..space.mesh.n_triangles() {
            local_dofs(&space, t, &mut dofs);
            let nvl = dofs.len() - np - 1;
            for (li, &i) in dofs.iter().enumerate() {
                let row = &mut lists[i];
                if li < nvl {
                    row.extend_from_slice(&dofs[..nvl + np]);
                } else if li < nvl + np {
                    row.extend_from_slice(&dofs[..nvl]);
                    if stabilized {
                        row.extend_from_slice(&dofs[nvl..nvl + np]);
                    }
                    row.push(dofs[nvl + np]);
                } else {
                    row.extend_from_slice(&dofs[nvl..nvl + np]);
                }
            }
        }
        // keep every diagonal so that Dirichlet rows can become identity rows
        for (i, row) in lists.iter_mut().enumerate().take(space.n_velocity()) {
            row.push(i);
        }
        let pattern = CsrMatrix::from_row_lists(n, lists);
        Ok(SaddleAssembler {
            space,
            pattern,
            rule,
            vtab,
            ptab,
            mode: options.mode,
        })
    }

    pub fn space(&self) -> &MixedSpace {
        &self.space
    }

    /// Element matrix and right-hand side of triangle `t`, in the local
    /// ordering of [`local_dofs`].
    fn element(&self, t: usize, nu: f64, prev: Option<&FeFunction>, forcing: Forcing<'_>, mat: &mut [f64], rhs: &mut [f64]) {
        let mesh = &self.space.mesh;
        let nl = self.space.velocity.n_local();
        let np = self.space.pressure.n_local();
        let pbase = 2 * nl;
        let lm = pbase + np;
        let n = lm + 1;
        mat.fill(0.0);
        rhs.fill(0.0);
        let geo = ElementGeometry::of(mesh, t);
        let mut g = [[0.0; 2]; 6];
        let mut means = [0.0; 3];
        for q in 0..self.rule.len() {
            let w = self.rule.weights[q] * geo.det;
            let psi = self.vtab.values(q);
            let chi = self.ptab.values(q);
            physical_grads(&geo, &self.vtab, q, &mut g[..nl]);
            let wq = match prev {
                Some(f) => f.eval_tabulated(t, &geo, psi, self.vtab.grads(q)),
                None => PointValue::default(),
            };
            let x = mesh.map_point(t, self.rule.points[q]);
            let f = forcing(x);
            let mut load = [0.0; 2];
            for (d, l) in load.iter_mut().enumerate() {
                *l = f[d] + wq.value[0] * wq.grad[d][0] + wq.value[1] * wq.grad[d][1];
            }
            for b in 0..nl {
                for a in 0..nl {
                    let diag = nu * (g[a][0] * g[b][0] + g[a][1] * g[b][1])
                        + (wq.value[0] * g[a][0] + wq.value[1] * g[a][1]) * psi[b];
                    let pp = psi[a] * psi[b];
                    for d in 0..2 {
                        let row = (d * nl + b) * n;
                        mat[row + d * nl + a] += w * diag;
                        for c in 0..2 {
                            mat[row + c * nl + a] += w * pp * wq.grad[d][c];
                        }
                    }
                }
                for d in 0..2 {
                    rhs[d * nl + b] += w * psi[b] * load[d];
                    for (k, &ck) in chi.iter().enumerate() {
                        let v = -w * ck * g[b][d];
                        mat[(d * nl + b) * n + pbase + k] += v;
                        mat[(pbase + k) * n + d * nl + b] += v;
                    }
                }
            }
            for (k, &ck) in chi.iter().enumerate() {
                means[k] += w * ck;
            }
        }
        for k in 0..np {
            mat[lm * n + pbase + k] += means[k];
            mat[(pbase + k) * n + lm] += means[k];
        }
        if self.space.pair.is_stabilized() {
            let mut local = [0.0; 9];
            local_stabilization(mesh, &self.rule, &self.ptab, t, &mut local);
            for k in 0..np {
                for l in 0..np {
                    mat[(pbase + k) * n + pbase + l] -= local[k * np + l];
                }
            }
        }
    }

    /// Linearized system around `prev` before Dirichlet elimination. With
    /// `prev = None` the convection terms vanish (Stokes).
    pub fn assemble(&self, nu: f64, prev: Option<&FeFunction>, forcing: Forcing<'_>) -> Result<SaddleSystem> {
        if nu <= 0.0 {
            return Err(Error::InvalidInput(format!("viscosity must be positive, got {nu}")));
        }
        if let Some(p) = prev {
            if p.coeffs().len() != self.space.n_velocity() || p.dofmap().family() != self.space.velocity.family() {
                return Err(Error::Mismatch("linearization point not in the velocity space".into()));
            }
        }
        let nl = self.space.velocity.n_local();
        let n = 2 * nl + self.space.pressure.n_local() + 1;
        let mut matrix = self.pattern.zeroed();
        let mut rhs = vec![0.0; self.space.n_total()];
        let mut dofs = Vec::with_capacity(n);
        let mut scatter = |t: usize, mat: &[f64], loc_rhs: &[f64], dofs: &mut Vec<usize>| {
            local_dofs(&self.space, t, dofs);
            for (li, &i) in dofs.iter().enumerate() {
                rhs[i] += loc_rhs[li];
                for (lj, &j) in dofs.iter().enumerate() {
                    let v = mat[li * n + lj];
                    if v != 0.0 {
                        matrix.add(i, j, v);
                    }
                }
            }
        };
        let n_elem = self.space.mesh.n_triangles();
        match self.mode {
            AssemblyMode::Sequential => {
                let mut mat = vec![0.0; n * n];
                let mut loc_rhs = vec![0.0; n];
                for t in 0..n_elem {
                    self.element(t, nu, prev, forcing, &mut mat, &mut loc_rhs);
                    scatter(t, &mat, &loc_rhs, &mut dofs);
                }
            }
            AssemblyMode::Parallel => {
                const CHUNK: usize = 2048;
                for start in (0..n_elem).step_by(CHUNK) {
                    let end = (start + CHUNK).min(n_elem);
                    let locals: Vec<(Vec<f64>, Vec<f64>)> = (start..end)
                        .into_par_iter()
                        .map(|t| {
                            let mut mat = vec![0.0; n * n];
                            let mut loc_rhs = vec![0.0; n];
                            self.element(t, nu, prev, forcing, &mut mat, &mut loc_rhs);
                            (mat, loc_rhs)
                        })
                        .collect();
                    for (t, (mat, loc_rhs)) in (start..end).zip(locals) {
                        scatter(t, &mat, &loc_rhs, &mut dofs);
                    }
                }
            }
        }
        Ok(SaddleSystem {
            matrix,
            rhs,
            n_velocity: self.space.n_velocity(),
            n_pressure: self.space.n_pressure(),
            eliminated: Vec::new(),
            stabilized: self.space.pair.is_stabilized(),
        })
    }

    /// Newton system around `prev` with the Dirichlet trace eliminated.
    pub fn newton_system(&self, nu: f64, prev: Option<&FeFunction>, forcing: Forcing<'_>, trace: &BoundaryTrace) -> Result<SaddleSystem> {
        check_trace_space(&self.space, trace)?;
        if let Some(p) = prev {
            for (dof, g) in trace.iter() {
                let found = p.coeffs()[dof];
                if (found - g).abs() > TRACE_TOL {
                    return Err(Error::TraceViolation { dof, expected: g, found });
                }
            }
        }
        let raw = self.assemble(nu, prev, forcing)?;
        Ok(apply_dirichlet(&raw, trace))
    }
}

fn check_trace_space(space: &MixedSpace, trace: &BoundaryTrace) -> Result<()> {
    let tm = trace.dofmap();
    if !Arc::ptr_eq(tm.mesh(), &space.mesh) || tm.family() != space.velocity.family() || tm.n_dofs() != space.n_velocity() {
        return Err(Error::Mismatch("boundary trace not built on the velocity space".into()));
    }
    Ok(())
}

/// Global DOFs of triangle `t`: velocity (component-major), pressure, then
/// the multiplier.
pub fn local_dofs(space: &MixedSpace, t: usize, out: &mut Vec<usize>) {
    out.clear();
    let v = &space.velocity;
    let nodes = v.cell_nodes(t);
    for c in 0..2 {
        out.extend(nodes.iter().map(|&n| v.dof(n, c)));
    }
    let nv = space.n_velocity();
    out.extend(space.pressure.cell_nodes(t).iter().map(|&n| nv + n));
    out.push(space.multiplier_index());
}

/// Linearized Navier-Stokes system around `u_prev` (Stokes when `None`), with
/// Dirichlet elimination and the mean-pressure multiplier.
pub fn assemble_newton_system(
    space: &MixedSpace,
    nu: f64,
    u_prev: Option<&FeFunction>,
    forcing: Forcing<'_>,
    trace: &BoundaryTrace,
) -> Result<SaddleSystem> {
    SaddleAssembler::new(space.clone(), AssemblyOptions::default())?.newton_system(nu, u_prev, forcing, trace)
}

/// Eliminates the trace DOFs symmetrically: their columns are moved to the
/// right-hand side and their rows become identity rows carrying the trace
/// value. Eliminated entries are dropped from the pattern.
pub fn apply_dirichlet(system: &SaddleSystem, trace: &BoundaryTrace) -> SaddleSystem {
    let n = system.size();
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    for (dof, g) in trace.iter() {
        fixed[dof] = Some(g);
    }
    for &(dof, g) in &system.eliminated {
        fixed[dof] = Some(g);
    }
    let a = &system.matrix;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(a.nnz());
    let mut values = Vec::with_capacity(a.nnz());
    let mut rhs = system.rhs.clone();
    row_ptr.push(0);
    for i in 0..n {
        if let Some(g) = fixed[i] {
            col_idx.push(i);
            values.push(1.0);
            rhs[i] = g;
        } else {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                match fixed[j] {
                    Some(g) => rhs[i] -= v * g,
                    None => {
                        col_idx.push(j);
                        values.push(v);
                    }
                }
            }
        }
        row_ptr.push(col_idx.len());
    }
    let eliminated = fixed.iter().enumerate().filter_map(|(i, g)| g.map(|g| (i, g))).collect();
    SaddleSystem {
        matrix: CsrMatrix::from_raw(n, n, row_ptr, col_idx, values),
        rhs,
        n_velocity: system.n_velocity,
        n_pressure: system.n_pressure,
        eliminated,
        stabilized: system.stabilized,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{interpolate_boundary_data, LidBoundaryData};
    use crate::mesh::{build_uniform_square_mesh, WallTag};

    fn space(n: usize, pair: ElementPair) -> MixedSpace {
        MixedSpace::new(Arc::new(build_uniform_square_mesh(n).unwrap()), pair)
    }

    fn reference_triangle() -> Arc<Mesh> {
        Arc::new(Mesh::from_parts(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![[0, 1, 2]],
            |_| WallTag::Bottom,
        ))
    }

    #[test]
    fn p1_stiffness_on_reference_triangle() {
        let mesh = reference_triangle();
        let map = DofMap::new(mesh, Family::P1, 1);
        let k = assemble_viscous(&map, 1.0).unwrap().to_dense();
        let expected = [[2.0, -1.0, -1.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((k[i][j] - 0.5 * expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn viscous_block_symmetric_and_kills_constants() {
        for pair in ElementPair::ALL {
            let s = space(4, pair);
            let a = assemble_viscous(&s.velocity, 1.3).unwrap();
            assert!(a.max_asymmetry() <= 1e-14);
            let u = FeFunction::interpolate(s.velocity.clone(), |_| [2.0, -1.0]);
            let r = a.matvec(u.coeffs());
            for (i, ri) in r.iter().enumerate() {
                if !s.velocity.is_boundary_dof(i) {
                    assert!(ri.abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn viscous_rejects_nonpositive_viscosity() {
        let s = space(1, ElementPair::P1P1Stab);
        assert!(assemble_viscous(&s.velocity, 0.0).is_err());
    }

    #[test]
    fn divergence_identities() {
        for pair in ElementPair::ALL {
            let s = space(4, pair);
            let b = assemble_divergence(&s.velocity, &s.pressure).unwrap();
            let ones = vec![1.0; s.n_pressure()];
            // q = 1 and v = (x, 0): int div v = area
            let v = FeFunction::interpolate(s.velocity.clone(), |p| [p[0], 0.0]);
            assert!((b.bilinear(&ones, v.coeffs()) - 4.0).abs() < 1e-13);
            // rigid rotation is pointwise divergence free
            let rot = FeFunction::interpolate(s.velocity.clone(), |p| [p[1], -p[0]]);
            assert!(b.matvec(rot.coeffs()).iter().all(|x| x.abs() < 1e-13));
            // any field vanishing on the boundary has zero net divergence
            let bubble = FeFunction::interpolate(s.velocity.clone(), |p| {
                let w = (1.0 - p[0] * p[0]) * (1.0 - p[1] * p[1]);
                [w * (3.0 * p[1]).sin(), w * p[0].exp()]
            });
            assert!(b.bilinear(&ones, bubble.coeffs()).abs() < 1e-13);
        }
    }

    #[test]
    fn stabilization_on_reference_triangle() {
        let mesh = reference_triangle();
        let map = DofMap::new(mesh, Family::P1, 1);
        let g = assemble_stabilization(&map).unwrap();
        // p = x has nodal values (0, 1, 0)
        let p = [0.0, 1.0, 0.0];
        assert!((g.bilinear(&p, &p) - 1.0 / 36.0).abs() < 1e-15);
        assert!(g.bilinear(&[1.0; 3], &[1.0; 3]).abs() < 1e-15);
    }

    #[test]
    fn stabilization_kernel_and_symmetry() {
        let s = space(4, ElementPair::P1P1Stab);
        let g = assemble_stabilization(&s.pressure).unwrap();
        assert!(g.max_asymmetry() <= 1e-15);
        // a globally continuous P1 field that is constant per element must be
        // globally constant
        let c = vec![0.7; s.n_pressure()];
        assert!(g.bilinear(&c, &c).abs() < 1e-14);
        assert!(assemble_stabilization(&s.velocity).is_err());
    }

    #[test]
    fn trilinear_zero_first_argument() {
        let s = space(3, ElementPair::TaylorHood);
        let zero = FeFunction::zeros(s.velocity.clone());
        let v = FeFunction::interpolate(s.velocity.clone(), |p| [p[0] * p[1], p[1]]);
        assert_eq!(trilinear_form(&zero, &v, &v).unwrap(), 0.0);
    }

    /// Dense brute-force integration of the convection blocks on one element.
    #[test]
    fn convection_block_matches_brute_force() {
        let mesh = Arc::new(Mesh::from_parts(
            vec![[-0.3, -0.2], [0.9, 0.1], [0.2, 0.8]],
            vec![[0, 1, 2]],
            |_| WallTag::Bottom,
        ));
        let s = MixedSpace::new(mesh.clone(), ElementPair::P1P1Stab);
        let w = FeFunction::interpolate(s.velocity.clone(), |p| [p[1], -p[0]]);
        let asm = SaddleAssembler::new(s.clone(), AssemblyOptions::default()).unwrap();
        let with = asm.assemble(1.0, Some(&w), &no_forcing).unwrap();
        let without = asm.assemble(1.0, None, &no_forcing).unwrap();

        // oracle: edge-midpoint rule (exact to degree 2, which covers every
        // integrand here) with hand-written P1 functions in physical space
        let p = mesh.triangle_points(0);
        let area = mesh.triangle_area(0);
        let lambda_grad: Vec<[f64; 2]> = (0..3)
            .map(|k| {
                let (a, b) = (p[(k + 1) % 3], p[(k + 2) % 3]);
                [(a[1] - b[1]) / (2.0 * area), (b[0] - a[0]) / (2.0 * area)]
            })
            .collect();
        let field = |x: [f64; 2]| [x[1], -x[0]];
        let field_grad = [[0.0, 1.0], [-1.0, 0.0]];
        let mut block = [[0.0; 6]; 6];
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            let x = [0.5 * (p[i][0] + p[j][0]), 0.5 * (p[i][1] + p[j][1])];
            let lam = mesh.barycentric(0, x);
            let wv = field(x);
            for b in 0..3 {
                for a in 0..3 {
                    let adv = wv[0] * lambda_grad[a][0] + wv[1] * lambda_grad[a][1];
                    for d in 0..2 {
                        for c in 0..2 {
                            let mut v = lam[a] * field_grad[d][c] * lam[b];
                            if c == d {
                                v += adv * lam[b];
                            }
                            block[d * 3 + b][c * 3 + a] += area / 3.0 * v;
                        }
                    }
                }
            }
        }
        let (wd, wo) = (with.matrix.to_dense(), without.matrix.to_dense());
        for r in 0..6 {
            for c in 0..6 {
                let diff = wd[r][c] - wo[r][c];
                assert!((diff - block[r][c]).abs() < 1e-13, "({r},{c}): {diff} vs {}", block[r][c]);
            }
        }
    }

    #[test]
    fn zero_previous_iterate_gives_stokes() {
        for pair in ElementPair::ALL {
            let s = space(3, pair);
            let asm = SaddleAssembler::new(s.clone(), AssemblyOptions::default()).unwrap();
            let zero = FeFunction::zeros(s.velocity.clone());
            let a = asm.assemble(0.7, Some(&zero), &no_forcing).unwrap();
            let b = asm.assemble(0.7, None, &no_forcing).unwrap();
            assert!(a.matrix.same_pattern(&b.matrix));
            for (x, y) in a.matrix.values().iter().zip(b.matrix.values()) {
                assert!((x - y).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn stokes_operator_is_symmetric() {
        for pair in ElementPair::ALL {
            let s = space(3, pair);
            let asm = SaddleAssembler::new(s.clone(), AssemblyOptions::default()).unwrap();
            let sys = asm.assemble(1.0, None, &no_forcing).unwrap();
            assert!(sys.matrix.max_asymmetry() < 1e-14, "{pair:?}");
        }
    }

    #[test]
    fn multiplier_row_integrates_pressure() {
        let s = space(4, ElementPair::Mini);
        let asm = SaddleAssembler::new(s.clone(), AssemblyOptions::default()).unwrap();
        let sys = asm.assemble(1.0, None, &no_forcing).unwrap();
        let (cols, vals) = sys.matrix.row(s.multiplier_index());
        let total: f64 = vals.iter().sum();
        assert!((total - 4.0).abs() < 1e-13);
        assert!(cols.iter().all(|&c| c >= s.n_velocity() && c < s.multiplier_index()));
    }

    #[test]
    fn stabilization_block_only_for_p1p1() {
        for pair in ElementPair::ALL {
            let s = space(2, pair);
            let asm = SaddleAssembler::new(s.clone(), AssemblyOptions::default()).unwrap();
            let sys = asm.assemble(1.0, None, &no_forcing).unwrap();
            let nv = s.n_velocity();
            let has_pp = (nv..nv + s.n_pressure()).any(|i| {
                let (cols, vals) = sys.matrix.row(i);
                cols.iter().zip(vals).any(|(&c, &v)| c >= nv && c < nv + s.n_pressure() && v != 0.0)
            });
            assert_eq!(has_pp, pair.is_stabilized());
            assert_eq!(sys.stabilized, pair.is_stabilized());
        }
    }

    #[test]
    fn stabilization_enters_with_negative_sign() {
        let s = space(3, ElementPair::P1P1Stab);
        let sys = SaddleAssembler::new(s.clone(), AssemblyOptions::default())
            .unwrap()
            .assemble(1.0, None, &no_forcing)
            .unwrap();
        let g = assemble_stabilization(&s.pressure).unwrap();
        let nv = s.n_velocity();
        for i in 0..s.n_pressure() {
            for j in 0..s.n_pressure() {
                assert!((sys.matrix.get(nv + i, nv + j) + g.get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn parallel_assembly_is_bit_identical() {
        let s = space(8, ElementPair::TaylorHood);
        let w = FeFunction::interpolate(s.velocity.clone(), |p| [p[1] * p[0], (2.0 * p[0]).sin()]);
        let seq = SaddleAssembler::new(s.clone(), AssemblyOptions::default()).unwrap();
        let par = SaddleAssembler::new(
            s.clone(),
            AssemblyOptions {
                mode: AssemblyMode::Parallel,
                ..Default::default()
            },
        )
        .unwrap();
        let a = seq.assemble(1.0, Some(&w), &no_forcing).unwrap();
        let b = par.assemble(1.0, Some(&w), &no_forcing).unwrap();
        let c = seq.assemble(1.0, Some(&w), &no_forcing).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.matrix, c.matrix);
        assert_eq!(a.rhs, b.rhs);
    }

    #[test]
    fn zero_trace_elimination_gives_identity_rows() {
        let s = space(2, ElementPair::TaylorHood);
        let trace = BoundaryTrace::zero(s.velocity.clone());
        let sys = assemble_newton_system(&s, 1.0, None, &no_forcing, &trace).unwrap();
        for &dof in s.velocity.boundary_dofs() {
            let (cols, vals) = sys.matrix.row(dof);
            assert_eq!(cols, &[dof]);
            assert_eq!(vals, &[1.0]);
            assert_eq!(sys.rhs[dof], 0.0);
        }
        // eliminated columns are gone from interior rows
        for i in 0..sys.size() {
            if s.velocity.boundary_dofs().binary_search(&i).is_err() {
                let (cols, _) = sys.matrix.row(i);
                assert!(cols.iter().all(|c| s.velocity.boundary_dofs().binary_search(c).is_err()));
            }
        }
    }

    #[test]
    fn elimination_preserves_interior_residual() {
        let s = space(2, ElementPair::TaylorHood);
        let data = LidBoundaryData::default();
        let trace = interpolate_boundary_data(&data, &s.velocity);
        let asm = SaddleAssembler::new(s.clone(), AssemblyOptions::default()).unwrap();
        let w = trace.lift();
        let raw = asm.assemble(1.0, Some(&w), &no_forcing).unwrap();
        let elim = apply_dirichlet(&raw, &trace);
        let mut x: Vec<f64> = (0..raw.size()).map(|i| ((i * 7919) % 13) as f64 * 0.1 - 0.6).collect();
        for (dof, g) in trace.iter() {
            x[dof] = g;
        }
        let r_raw: Vec<f64> = raw.matrix.matvec(&x).iter().zip(&raw.rhs).map(|(a, b)| a - b).collect();
        let r_elim: Vec<f64> = elim.matrix.matvec(&x).iter().zip(&elim.rhs).map(|(a, b)| a - b).collect();
        for i in 0..raw.size() {
            if trace.value(i).is_none() {
                assert!((r_raw[i] - r_elim[i]).abs() < 1e-13);
            } else {
                assert_eq!(r_elim[i], 0.0);
            }
        }
    }

    #[test]
    fn trace_violation_reported() {
        let s = space(2, ElementPair::P1P1Stab);
        let trace = interpolate_boundary_data(&LidBoundaryData::default(), &s.velocity);
        let zero = FeFunction::zeros(s.velocity.clone());
        let err = assemble_newton_system(&s, 1.0, Some(&zero), &no_forcing, &trace).unwrap_err();
        assert!(matches!(err, Error::TraceViolation { .. }));
    }

    #[test]
    fn mismatched_spaces_reported() {
        let s = space(2, ElementPair::P1P1Stab);
        let other = space(2, ElementPair::TaylorHood);
        let trace = BoundaryTrace::zero(other.velocity.clone());
        assert!(matches!(
            assemble_newton_system(&s, 1.0, None, &no_forcing, &trace),
            Err(Error::Mismatch(_))
        ));
    }
}
