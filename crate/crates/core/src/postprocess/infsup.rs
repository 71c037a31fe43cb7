//! Discrete inf-sup constant of a velocity/pressure pair.
//!
//! `beta_h^2` is the smallest eigenvalue of `B A^{-1} B^T q = lambda M q` on
//! pressures orthogonal to constants, with `A` the H1 Gram matrix of the
//! velocities vanishing on the boundary and `M` the pressure mass matrix.
//! Stabilization terms play no part: the number measures the spaces alone.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::assembly::{assemble_divergence, assemble_mass, assemble_viscous};
use crate::elements::{build_dofmap, ElementPair};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::sparse::CsrMatrix;

fn dense_block(m: &CsrMatrix, rows: &[usize], cols: &[usize]) -> Mat<f64> {
    let mut col_pos = vec![usize::MAX; m.ncols()];
    for (k, &j) in cols.iter().enumerate() {
        col_pos[j] = k;
    }
    let mut out = Mat::<f64>::zeros(rows.len(), cols.len());
    for (r, &i) in rows.iter().enumerate() {
        let (cs, vs) = m.row(i);
        for (&j, &v) in cs.iter().zip(vs) {
            if col_pos[j] != usize::MAX {
                out[(r, col_pos[j])] = v;
            }
        }
    }
    out
}

/// Inf-sup constant of `pair` on `mesh`. Intended for small meshes: the
/// computation is dense.
pub fn discrete_infsup(mesh: &Arc<Mesh>, pair: ElementPair) -> Result<f64> {
    let (vmap, pmap) = build_dofmap(mesh, pair);
    let interior: Vec<usize> = (0..vmap.n_dofs()).filter(|&d| !vmap.is_boundary_dof(d)).collect();
    if interior.is_empty() {
        return Ok(0.0);
    }
    let pressures: Vec<usize> = (0..pmap.n_dofs()).collect();
    let np = pressures.len();

    let stiffness = assemble_viscous(&vmap, 1.0)?;
    let vmass = assemble_mass(&vmap)?;
    let a = &dense_block(&stiffness, &interior, &interior) + &dense_block(&vmass, &interior, &interior);
    let b = dense_block(&assemble_divergence(&vmap, &pmap)?, &pressures, &interior);
    let m = dense_block(&assemble_mass(&pmap)?, &pressures, &pressures);

    let a_llt = a.llt(Side::Lower).map_err(|e| Error::Eigen(format!("velocity Gram matrix not positive definite: {e:?}")))?;
    let mut x = b.transpose().to_owned();
    a_llt.solve_in_place(x.as_mut());
    let s = &b * &x;

    // symmetric square root of M turns the generalized problem into a
    // standard one: C = M^{-1/2} S M^{-1/2}
    let m_eig = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let (mu, qm) = (m_eig.S().column_vector(), m_eig.U());
    if (0..np).any(|i| !(mu[i] > 0.0)) {
        return Err(Error::Eigen("pressure mass matrix not positive definite".into()));
    }
    let scale = |f: fn(f64) -> f64| {
        let mut d = qm.to_owned();
        for j in 0..np {
            let s = f(mu[j]);
            for i in 0..np {
                d[(i, j)] *= s;
            }
        }
        &d * qm.transpose()
    };
    let m_inv_half = scale(|x| 1.0 / x.sqrt());
    let m_half = scale(f64::sqrt);
    let mut c = &(&m_inv_half * &s) * &m_inv_half;

    // constants form the kernel of B^T; move that mode above the spectrum
    let mut w = &m_half * Mat::<f64>::from_fn(np, 1, |_, _| 1.0);
    let wn = (0..np).map(|i| w[(i, 0)] * w[(i, 0)]).sum::<f64>().sqrt();
    for i in 0..np {
        w[(i, 0)] /= wn;
    }
    let p = Mat::<f64>::from_fn(np, np, |i, j| f64::from(u8::from(i == j)) - w[(i, 0)] * w[(j, 0)]);
    c = &(&p * &c) * &p;
    let sigma = (0..np).map(|i| c[(i, i)]).sum::<f64>() + 1.0;
    for i in 0..np {
        for j in 0..np {
            c[(i, j)] += sigma * w[(i, 0)] * w[(j, 0)];
        }
    }
    // symmetrize against round-off
    let c = Mat::<f64>::from_fn(np, np, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let eig = c.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let lambda = eig.first().copied().ok_or_else(|| Error::Eigen("empty pressure space".into()))?;
    if !lambda.is_finite() {
        return Err(Error::Eigen(format!("non-finite eigenvalue {lambda}")));
    }
    Ok(lambda.max(0.0).sqrt())
}
