//! Mixed finite elements for the steady incompressible Navier-Stokes
//! equations on `[-1, 1]^2` with discontinuous Dirichlet data, built around
//! the lid-driven cavity.
//!
//! Three velocity/pressure pairs are available ([`ElementPair`]): Taylor-Hood
//! P2/P1, Mini P1+bubble/P1 and equal-order P1/P1 with local projection
//! stabilization. Nonlinear problems are solved by Newton's method with a
//! sparse direct solver at every step.

pub mod assembly;
pub mod boundary;
pub mod elements;
pub mod error;
pub mod field;
pub mod mesh;
pub mod postprocess;
pub mod solver;
pub mod sparse;
pub mod study;
pub mod vtk;

pub use assembly::{MixedSpace, SaddleSystem};
pub use boundary::{BoundaryTrace, CornerConvention, LidBoundaryData};
pub use elements::ElementPair;
pub use error::{Error, Result};
pub use field::FeFunction;
pub use mesh::{build_uniform_square_mesh, refine_uniform, Mesh};
pub use solver::{newton_solve, NewtonConfig, NewtonReport};
pub use study::{run_cavity_study, run_mms_study, StudyConfig, StudyKind, StudyResult};
