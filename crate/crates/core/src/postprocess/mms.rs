//! Manufactured smooth solution and discretization errors against it.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assembly::MixedSpace;
use crate::boundary::BoundaryTrace;
use crate::elements::ElementPair;
use crate::error::{Error, Result};
use crate::field::PointValue;
use crate::mesh::build_uniform_square_mesh;
use crate::postprocess::norms::{error_norm, NormKind};
use crate::solver::{newton_iterate, FlowProblem, NewtonConfig, NewtonReport};

/// Stream function `psi = sin^2(pi x) sin^2(pi y)`, velocity
/// `u = (d psi / dy, -d psi / dx)`, pressure `p = sin(pi x) sin(pi y)` and
/// the matching body force `f = -nu lap u + (u . grad) u + grad p`.
///
/// `u` vanishes on the boundary of `[-1, 1]^2` and `p` has zero mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MmsProblem {
    pub nu: f64,
}

impl MmsProblem {
    pub fn new(nu: f64) -> Self {
        MmsProblem { nu }
    }

    pub fn velocity(&self, [x, y]: [f64; 2]) -> [f64; 2] {
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        [PI * sx * sx * (2.0 * PI * y).sin(), -PI * (2.0 * PI * x).sin() * sy * sy]
    }

    /// `grad[c][d] = d u_c / d x_d`.
    pub fn velocity_gradient(&self, [x, y]: [f64; 2]) -> [[f64; 2]; 2] {
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        let (s2x, s2y) = ((2.0 * PI * x).sin(), (2.0 * PI * y).sin());
        let (c2x, c2y) = ((2.0 * PI * x).cos(), (2.0 * PI * y).cos());
        let p2 = PI * PI;
        [
            [p2 * s2x * s2y, 2.0 * p2 * sx * sx * c2y],
            [-2.0 * p2 * c2x * sy * sy, -p2 * s2x * s2y],
        ]
    }

    pub fn velocity_laplacian(&self, [x, y]: [f64; 2]) -> [f64; 2] {
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        let p3 = 2.0 * PI * PI * PI;
        [
            p3 * (2.0 * PI * y).sin() * (1.0 - 4.0 * sx * sx),
            -p3 * (2.0 * PI * x).sin() * (1.0 - 4.0 * sy * sy),
        ]
    }

    pub fn pressure(&self, [x, y]: [f64; 2]) -> f64 {
        (PI * x).sin() * (PI * y).sin()
    }

    pub fn pressure_gradient(&self, [x, y]: [f64; 2]) -> [f64; 2] {
        [PI * (PI * x).cos() * (PI * y).sin(), PI * (PI * x).sin() * (PI * y).cos()]
    }

    pub fn forcing(&self, p: [f64; 2]) -> [f64; 2] {
        let u = self.velocity(p);
        let g = self.velocity_gradient(p);
        let lap = self.velocity_laplacian(p);
        let gp = self.pressure_gradient(p);
        [0, 1].map(|c| -self.nu * lap[c] + u[0] * g[c][0] + u[1] * g[c][1] + gp[c])
    }

    pub fn exact_velocity(&self, p: [f64; 2]) -> PointValue {
        PointValue {
            value: self.velocity(p),
            grad: self.velocity_gradient(p),
        }
    }

    pub fn exact_pressure(&self, p: [f64; 2]) -> PointValue {
        let g = self.pressure_gradient(p);
        PointValue {
            value: [self.pressure(p), 0.0],
            grad: [g, [0.0; 2]],
        }
    }
}

/// Errors of the discrete solution on one level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmsErrors {
    pub n_div: usize,
    pub nv: usize,
    pub h: f64,
    pub h1_semi_velocity: f64,
    pub l2_velocity: f64,
    pub l2_pressure: f64,
    pub newton_iterations: usize,
}

/// Solves the manufactured problem on one structured level.
pub fn mms_level(config: &NewtonConfig, n_div: usize) -> Result<MmsErrors> {
    mms_solve(config, n_div).map(|(e, _)| e)
}

/// As [`mms_level`], also returning the discrete solution.
pub fn mms_solve(config: &NewtonConfig, n_div: usize) -> Result<(MmsErrors, NewtonReport)> {
    let mms = MmsProblem::new(config.nu);
    let mesh = Arc::new(build_uniform_square_mesh(n_div)?);
    let space = MixedSpace::new(mesh.clone(), config.pair);
    let trace = BoundaryTrace::from_fn(space.velocity.clone(), |p| mms.velocity(p));
    let forcing = move |p: [f64; 2]| mms.forcing(p);
    let report = newton_iterate(
        &FlowProblem {
            space: &space,
            forcing: &forcing,
            trace: &trace,
        },
        config,
    )?;
    if !report.converged {
        return Err(Error::StudyFailed {
            n_div,
            reason: format!("Newton iteration stopped after {} iterations without converging", report.iterations),
        });
    }
    let errors = MmsErrors {
        n_div,
        nv: mesh.n_vertices(),
        h: mesh.h(),
        h1_semi_velocity: error_norm(&report.velocity, |p| mms.exact_velocity(p), NormKind::H1Semi),
        l2_velocity: error_norm(&report.velocity, |p| mms.exact_velocity(p), NormKind::L2),
        l2_pressure: error_norm(&report.pressure, |p| mms.exact_pressure(p), NormKind::L2),
        newton_iterations: report.iterations,
    };
    Ok((errors, report))
}

/// Manufactured-solution errors for `pair` on each level `n_div`.
pub fn mms_errors(pair: ElementPair, nu: f64, levels: &[usize]) -> Result<Vec<MmsErrors>> {
    let config = NewtonConfig {
        pair,
        nu,
        ..Default::default()
    };
    levels.iter().map(|&n| mms_level(&config, n)).collect()
}
