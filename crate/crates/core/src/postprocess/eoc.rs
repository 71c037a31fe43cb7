//! Experimental orders of convergence.

use crate::error::{Error, Result};

/// `eoc_i = log(e_{i-1} / e_i) / log(h_{i-1} / h_i)` for consecutive levels.
/// Mesh sizes must halve from one level to the next.
pub fn compute_eoc(errors: &[f64], hs: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != hs.len() {
        return Err(Error::Mismatch(format!("{} errors for {} mesh sizes", errors.len(), hs.len())));
    }
    if errors.len() < 2 {
        return Err(Error::InvalidInput("at least two levels are needed for an order estimate".into()));
    }
    if let Some((index, &value)) = errors.iter().enumerate().find(|(_, e)| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::NonPositiveError { index, value });
    }
    for w in hs.windows(2) {
        if !(w[0] > 0.0 && ((w[0] / w[1]) - 2.0).abs() <= 1e-12) {
            return Err(Error::InvalidInput(format!("mesh sizes {} -> {} do not halve", w[0], w[1])));
        }
    }
    Ok(errors
        .windows(2)
        .zip(hs.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect())
}
