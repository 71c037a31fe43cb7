//! Quadrature on the reference triangle `(0,0), (1,0), (0,1)` and on the
//! unit interval.
//!
//! Degrees 1 and 2 use the classical symmetric rules. Higher degrees use a
//! collapsed (Duffy) tensor product of Gauss-Legendre rules: with
//! `x = s`, `y = (1 - s) t` a polynomial of total degree `d` becomes degree
//! `d + 1` in `s` (Jacobian included) and `d` in `t`, so `m` points per
//! direction integrate total degree `2m - 2` exactly. All weights are
//! positive and all points interior.

use crate::error::{Error, Result};

/// Highest total degree served by [`quadrature_rule`].
pub const MAX_DEGREE: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    /// Barycentric coordinates `(1 - x - y, x, y)`.
    pub points: Vec<[f64; 3]>,
    /// Weights summing to the reference area `1/2`.
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Integrates `f(x, y)` over the reference triangle.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p[1], p[2]))
            .sum()
    }
}

/// A rule exact for polynomials of total degree at least `requested_degree`.
pub fn quadrature_rule(requested_degree: usize) -> Result<QuadratureRule> {
    match requested_degree {
        0 | 1 => Ok(QuadratureRule {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![0.5],
            exact_degree: 1,
        }),
        2 => {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            Ok(QuadratureRule {
                points: vec![[a, b, b], [b, a, b], [b, b, a]],
                weights: vec![1.0 / 6.0; 3],
                exact_degree: 2,
            })
        }
        d if d <= MAX_DEGREE => Ok(collapsed_rule(d.div_ceil(2) + 1)),
        d => Err(Error::UnsupportedQuadratureDegree(d)),
    }
}

fn collapsed_rule(m: usize) -> QuadratureRule {
    let (nodes, weights_1d) = gauss_legendre_unit(m);
    let mut points = Vec::with_capacity(m * m);
    let mut weights = Vec::with_capacity(m * m);
    for (s, ws) in nodes.iter().zip(&weights_1d) {
        for (t, wt) in nodes.iter().zip(&weights_1d) {
            let x = *s;
            let y = (1.0 - s) * t;
            points.push([1.0 - x - y, x, y]);
            weights.push(ws * wt * (1.0 - s));
        }
    }
    QuadratureRule {
        points,
        weights,
        exact_degree: 2 * m - 2,
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]` (weights sum to 1).
pub fn gauss_legendre_unit(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        // Newton on P_m starting from the Chebyshev-like estimate
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `P_m(x)` and `P_m'(x)` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
