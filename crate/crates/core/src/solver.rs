//! Direct solution of the saddle-point systems and the Newton iteration.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::assembly::{no_forcing, AssemblyMode, AssemblyOptions, FeFunction, Forcing, MixedSpace, SaddleAssembler, SaddleSystem};
use crate::boundary::{interpolate_boundary_data, BoundaryTrace, CornerConvention, LidBoundaryData};
use crate::elements::ElementPair;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::postprocess::norms::{field_norm, NormKind};
use crate::sparse::CsrMatrix;

/// Maximum accepted relative algebraic residual of a direct solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Solution of a saddle system split into its blocks.
#[derive(Clone, Debug)]
pub struct SaddleSolution {
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
    pub multiplier: f64,
    /// `||A x - b|| / ||b||` (absolute when `b = 0`).
    pub residual: f64,
}

/// Sparse LU factorization of a square CSR matrix, held as the factorization
/// of its transpose (the CSR arrays of `A` are the CSC arrays of `A^T`).
struct Factored {
    lu: Lu<usize, f64>,
    n: usize,
}

impl Factored {
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        self.lu.solve_transpose_in_place(x.as_mut());
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }
}

/// Sparse LU solver that reuses its symbolic analysis while the sparsity
/// pattern does not change.
///
/// Systems with a zero-mean pressure multiplier are solved as bordered
/// systems: the dense multiplier row would otherwise couple every pressure
/// column in the symbolic analysis. One pressure DOF is pinned, the sparse
/// velocity-pressure block is factored, and the multiplier and the pressure
/// constant are recovered afterwards. The full residual is always checked;
/// if the bordered solve does not meet it, the whole matrix is factored.
#[derive(Default)]
pub struct SaddleSolver {
    symbolic: Vec<(Vec<usize>, Vec<usize>, SymbolicLu<usize>)>,
}

impl SaddleSolver {
    pub fn new() -> Self {
        Self::default()
    }

    fn factor(&mut self, a: &CsrMatrix) -> Result<Factored> {
        let n = a.nrows();
        let sym_t = SymbolicSparseColMatRef::new_checked(n, n, a.row_ptr(), None, a.col_idx());
        let mat_t = SparseColMatRef::new(sym_t, a.values());
        let cached = self.symbolic.iter().position(|(rp, ci, _)| rp == a.row_ptr() && ci == a.col_idx());
        let k = match cached {
            Some(k) => k,
            None => {
                let symbolic = SymbolicLu::try_new(sym_t).map_err(|e| Error::Factorization(format!("symbolic analysis: {e:?}")))?;
                self.symbolic.push((a.row_ptr().to_vec(), a.col_idx().to_vec(), symbolic));
                self.symbolic.len() - 1
            }
        };
        let lu = Lu::try_new_with_symbolic(self.symbolic[k].2.clone(), mat_t)
            .map_err(|e| Error::Factorization(format!("numeric factorization: {e:?}")))?;
        Ok(Factored { lu, n })
    }

    pub fn solve(&mut self, system: &SaddleSystem) -> Result<SaddleSolution> {
        let a = &system.matrix;
        let n = system.size();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::Mismatch(format!("{}x{} matrix with {n} right-hand side entries", a.nrows(), a.ncols())));
        }
        if let Some(bordered) = Bordered::new(system) {
            let f = self.factor(&bordered.reduced)?;
            if let Ok(sol) = refine(system, |r| bordered.solve(&f, r)) {
                return Ok(sol);
            }
        }
        let f = self.factor(a)?;
        refine(system, |r| f.solve(r))
    }
}

/// Bordered form of a system whose last row and column are the pressure
/// mean constraint `m`.
struct Bordered {
    reduced: CsrMatrix,
    /// Constraint weights on the pressure DOFs.
    m: Vec<f64>,
    pinned: usize,
    nv: usize,
}

impl Bordered {
    fn new(system: &SaddleSystem) -> Option<Self> {
        let (nv, np) = (system.n_velocity, system.n_pressure);
        let a = &system.matrix;
        if np == 0 || system.size() != nv + np + 1 {
            return None;
        }
        let mult = nv + np;
        let (cols, vals) = a.row(mult);
        let mut m = vec![0.0; np];
        for (&j, &v) in cols.iter().zip(vals) {
            if j < nv || j == mult {
                // the constraint must act on pressures only
                return None;
            }
            m[j - nv] = v;
        }
        if m.iter().sum::<f64>() == 0.0 {
            return None;
        }
        let pinned = nv + (0..np).max_by(|&i, &j| m[i].abs().total_cmp(&m[j].abs()))?;
        let mut row_ptr = Vec::with_capacity(mult + 1);
        let mut col_idx = Vec::with_capacity(a.nnz());
        let mut values = Vec::with_capacity(a.nnz());
        row_ptr.push(0);
        for i in 0..mult {
            if i == pinned {
                col_idx.push(i);
                values.push(1.0);
            } else {
                let (cols, vals) = a.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    if j != mult && j != pinned {
                        col_idx.push(j);
                        values.push(v);
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
        Some(Bordered {
            reduced: CsrMatrix::from_raw(mult, mult, row_ptr, col_idx, values),
            m,
            pinned,
            nv,
        })
    }

    fn solve(&self, f: &Factored, rhs: &[f64]) -> Vec<f64> {
        let (nv, np) = (self.nv, self.m.len());
        // constants lie in the kernel of the velocity-pressure block from
        // both sides, so the pressure rows fix the multiplier
        let m_sum: f64 = self.m.iter().sum();
        let lambda = rhs[nv..nv + np].iter().sum::<f64>() / m_sum;
        let mut r: Vec<f64> = rhs[..nv + np].to_vec();
        for (ri, mi) in r[nv..].iter_mut().zip(&self.m) {
            *ri -= lambda * mi;
        }
        r[self.pinned] = 0.0;
        let mut x = f.solve(&r);
        // shift the pressure to satisfy the constraint row
        let shift = (rhs[nv + np] - x[nv..].iter().zip(&self.m).map(|(p, m)| p * m).sum::<f64>()) / m_sum;
        for p in &mut x[nv..] {
            *p += shift;
        }
        x.push(lambda);
        x
    }
}

/// Applies an approximate inverse with up to three steps of iterative
/// refinement and checks the relative residual.
fn refine(system: &SaddleSystem, inverse: impl Fn(&[f64]) -> Vec<f64>) -> Result<SaddleSolution> {
    let a = &system.matrix;
    let b_norm = norm2(&system.rhs);
    let residual_of = |x: &[f64]| -> (Vec<f64>, f64) {
        let ax = a.matvec(x);
        let r: Vec<f64> = system.rhs.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
        let rn = norm2(&r);
        (r, if b_norm > 0.0 { rn / b_norm } else { rn })
    };
    let mut x = inverse(&system.rhs);
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::Factorization(format!("singular matrix: non-finite solution entry at row {i}")));
    }
    let (mut r, mut rel) = residual_of(&x);
    for _ in 0..3 {
        if rel <= 1e-14 {
            break;
        }
        let dx = inverse(&r);
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let (r2, rel2) = residual_of(&candidate);
        if !(rel2 < rel) {
            break;
        }
        x = candidate;
        r = r2;
        rel = rel2;
    }
    if !(rel <= RESIDUAL_TOL) {
        return Err(Error::Residual {
            residual: rel,
            tolerance: RESIDUAL_TOL,
        });
    }
    let (nv, np) = (system.n_velocity, system.n_pressure);
    Ok(SaddleSolution {
        velocity: x[..nv].to_vec(),
        pressure: x[nv..nv + np].to_vec(),
        multiplier: x.get(nv + np).copied().unwrap_or(0.0),
        residual: rel,
    })
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One-shot direct solve of a saddle system.
pub fn solve_saddle(system: &SaddleSystem) -> Result<SaddleSolution> {
    SaddleSolver::new().solve(system)
}

/// Linear Stokes solution with velocity trace `trace` and forcing `forcing`.
pub fn stokes_solve(space: &MixedSpace, nu: f64, forcing: Forcing<'_>, trace: &BoundaryTrace) -> Result<(FeFunction, FeFunction)> {
    let asm = SaddleAssembler::new(space.clone(), AssemblyOptions::default())?;
    let sol = SaddleSolver::new().solve(&asm.newton_system(nu, None, forcing, trace)?)?;
    Ok((
        FeFunction::new(space.velocity.clone(), sol.velocity)?,
        FeFunction::new(space.pressure.clone(), sol.pressure)?,
    ))
}

/// Stokes solution without body force: the default Newton starting point.
pub fn stokes_initial_guess(space: &MixedSpace, nu: f64, trace: &BoundaryTrace) -> Result<(FeFunction, FeFunction)> {
    stokes_solve(space, nu, &no_forcing, trace)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialGuess {
    /// Linear Stokes solve with the same data.
    #[default]
    Stokes,
    /// Boundary trace with zero interior values.
    BoundaryLift,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    pub nu: f64,
    /// Stopping threshold on the relative H1 increment.
    pub tol: f64,
    pub max_iter: usize,
    pub pair: ElementPair,
    pub corner: CornerConvention,
    pub initial_guess: InitialGuess,
    /// Overrides the pair's default assembly quadrature degree.
    pub quadrature_degree: Option<usize>,
    #[serde(skip)]
    pub parallel_assembly: bool,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            nu: 1.0,
            tol: 1e-9,
            max_iter: 50,
            pair: ElementPair::TaylorHood,
            corner: CornerConvention::Leaky,
            initial_guess: InitialGuess::Stokes,
            quadrature_degree: None,
            parallel_assembly: false,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::InvalidInput(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    fn assembly_options(&self) -> AssemblyOptions {
        AssemblyOptions {
            quadrature_degree: self.quadrature_degree,
            mode: if self.parallel_assembly {
                AssemblyMode::Parallel
            } else {
                AssemblyMode::Sequential
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonReport {
    pub converged: bool,
    /// Set when the increments grew three times in a row.
    pub diverged: bool,
    pub iterations: usize,
    /// `||u^n - u^{n-1}||_{H1}` per iteration.
    pub increments: Vec<f64>,
    /// Increments divided by `||u^n||_{H1}`.
    pub relative_increments: Vec<f64>,
    pub velocity: FeFunction,
    pub pressure: FeFunction,
}

impl NewtonReport {
    /// Observed convergence order from the last three increments,
    /// `log(d_{n+1} / d_n) / log(d_n / d_{n-1})`.
    pub fn convergence_order(&self) -> Option<f64> {
        convergence_order(&self.increments)
    }
}

/// Order estimate `log(d3 / d2) / log(d2 / d1)` from the last three entries.
pub fn convergence_order(increments: &[f64]) -> Option<f64> {
    if increments.len() < 3 {
        return None;
    }
    let d = &increments[increments.len() - 3..];
    if d.iter().any(|&x| !(x > 0.0)) {
        return None;
    }
    Some((d[2] / d[1]).ln() / (d[1] / d[0]).ln())
}

/// A steady Navier-Stokes problem on a fixed discrete space.
pub struct FlowProblem<'a> {
    pub space: &'a MixedSpace,
    pub forcing: Forcing<'a>,
    pub trace: &'a BoundaryTrace,
}

/// Newton iteration for a general problem.
pub fn newton_iterate(problem: &FlowProblem<'_>, config: &NewtonConfig) -> Result<NewtonReport> {
    config.validate()?;
    let space = problem.space;
    let asm = SaddleAssembler::new(space.clone(), config.assembly_options())?;
    let mut solver = SaddleSolver::new();

    let (mut u, mut p) = match config.initial_guess {
        InitialGuess::Stokes => {
            let sol = solver.solve(&asm.newton_system(config.nu, None, problem.forcing, problem.trace)?)?;
            (
                FeFunction::new(space.velocity.clone(), sol.velocity)?,
                FeFunction::new(space.pressure.clone(), sol.pressure)?,
            )
        }
        InitialGuess::BoundaryLift => (problem.trace.lift(), FeFunction::zeros(space.pressure.clone())),
    };

    let mut increments = Vec::new();
    let mut relative_increments = Vec::new();
    let mut converged = false;
    let mut diverged = false;
    let mut growth = 0;
    for _ in 0..config.max_iter {
        let system = asm.newton_system(config.nu, Some(&u), problem.forcing, problem.trace)?;
        let sol = solver.solve(&system)?;
        let next = FeFunction::new(space.velocity.clone(), sol.velocity)?;
        let step = field_norm(&next.difference(&u)?, NormKind::H1);
        let size = field_norm(&next, NormKind::H1);
        let rel = if size > 0.0 { step / size } else { step };
        if let Some(&last) = increments.last() {
            growth = if step > last { growth + 1 } else { 0 };
        }
        increments.push(step);
        relative_increments.push(rel);
        u = next;
        p = FeFunction::new(space.pressure.clone(), sol.pressure)?;
        if rel < config.tol {
            converged = true;
            break;
        }
        if growth >= 3 {
            diverged = true;
            break;
        }
    }
    Ok(NewtonReport {
        converged,
        diverged,
        iterations: increments.len(),
        increments,
        relative_increments,
        velocity: u,
        pressure: p,
    })
}

/// Newton solve of the lid-driven cavity (zero forcing) on `mesh`.
pub fn newton_solve(config: &NewtonConfig, mesh: &Arc<Mesh>) -> Result<NewtonReport> {
    let space = MixedSpace::new(mesh.clone(), config.pair);
    let trace = interpolate_boundary_data(&LidBoundaryData::new(config.corner), &space.velocity);
    newton_iterate(
        &FlowProblem {
            space: &space,
            forcing: &no_forcing,
            trace: &trace,
        },
        config,
    )
}
