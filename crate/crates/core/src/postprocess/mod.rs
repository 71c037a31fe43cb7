//! Norms, successive errors, convergence orders, the manufactured solution
//! and the inf-sup diagnostic.

pub mod eoc;
pub mod infsup;
pub mod mms;
pub mod norms;
pub mod transfer;

pub use eoc::compute_eoc;
pub use infsup::discrete_infsup;
pub use mms::{mms_errors, mms_level, mms_solve, MmsErrors, MmsProblem};
pub use norms::{error_norm, field_norm, integrate_scalar, NormKind};
pub use transfer::{evaluate_at_points, evaluate_on_refined, l4_difference, point_weights, successive_l4_error};
