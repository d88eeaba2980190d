//! Linearized increment regression. Dividing the Euler increment by
//! `X^gamma sqrt(delta_n)` turns the drift parameters into regression
//! coefficients with homoskedastic Gaussian errors of scale `sigma`:
//!
//! ```text
//! y_i  = (X_{t_i} - X_{t_{i-1}}) / (X_{t_{i-1}}^gamma sqrt(delta_n))
//! z1_i = sqrt(delta_n) / X_{t_{i-1}}^gamma
//! z2_i = -X_{t_{i-1}}^{1-gamma} sqrt(delta_n)
//! y_i  = beta1 z1_i + beta2 z2_i + sigma * noise_i
//! ```
//!
//! At gamma = 1/2 these are the classical square-root-model transforms
//! `z1 = sqrt(delta_n / X)`, `z2 = -sqrt(X delta_n)`.

use crate::error::{Error, Result};
use crate::model::{EstimateTheta, SamplePath};

/// Transformed increments feeding both the least-squares and the
/// divergence-based estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDesign {
    pub y: Vec<f64>,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    pub delta_n: f64,
    pub gamma: f64,
    /// Conditioning states `X_{t_{i-1}}`.
    pub x_prev: Vec<f64>,
}

impl RegressionDesign {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Residual `y_i - b1 z1_i - b2 z2_i`.
    pub fn residual(&self, i: usize, beta1: f64, beta2: f64) -> f64 {
        self.y[i] - beta1 * self.z1[i] - beta2 * self.z2[i]
    }
}

/// Builds the normalized-increment design from a path for known elasticity.
pub fn build_design(path: &SamplePath, gamma: f64) -> Result<RegressionDesign> {
    if !(0.5..=1.0).contains(&gamma) {
        return Err(Error::invalid("gamma must lie in [0.5, 1.0]"));
    }
    let n = path.n();
    if n < 2 {
        return Err(Error::invalid("design needs at least 2 increments"));
    }
    let dt = path.delta_n();
    let sqrt_dt = dt.sqrt();
    let mut y = Vec::with_capacity(n);
    let mut z1 = Vec::with_capacity(n);
    let mut z2 = Vec::with_capacity(n);
    let mut x_prev = Vec::with_capacity(n);
    for i in 1..=n {
        let x = path.values[i - 1];
        if x <= 0.0 || x.is_nan() {
            return Err(Error::invalid("conditioning state must be positive"));
        }
        let xg = x.powf(gamma);
        y.push((path.values[i] - x) / (xg * sqrt_dt));
        z1.push(sqrt_dt / xg);
        z2.push(-x.powf(1.0 - gamma) * sqrt_dt);
        x_prev.push(x);
    }
    Ok(RegressionDesign {
        y,
        z1,
        z2,
        delta_n: dt,
        gamma,
        x_prev,
    })
}

/// Relative determinant guard for the 2x2 normal equations.
const GRAM_DET_REL_TOL: f64 = 1e-12;

/// Closed-form least-squares fit of the two drift coefficients plus the
/// residual scale `sigma_hat = sqrt(mean squared residual)` (divisor `n`).
///
/// Errors when the 2x2 Gram determinant is below `1e-12` times its scale.
pub fn ols_estimate(design: &RegressionDesign) -> Result<EstimateTheta> {
    let n = design.len();
    if n < 2 {
        return Err(Error::invalid("need at least 2 observations"));
    }
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let (z1, z2, y) = (design.z1[i], design.z2[i], design.y[i]);
        s11 += z1 * z1;
        s12 += z1 * z2;
        s22 += z2 * z2;
        b1 += z1 * y;
        b2 += z2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    let scale = s11 * s22;
    if det.abs() < GRAM_DET_REL_TOL * scale || det == 0.0 {
        return Err(Error::SingularDesign(format!(
            "Gram determinant {det:.3e} below {GRAM_DET_REL_TOL:e} of scale {scale:.3e}"
        )));
    }
    let beta1_hat = (b1 * s22 - b2 * s12) / det;
    let beta2_hat = (b2 * s11 - b1 * s12) / det;
    let mut rss = 0.0;
    for i in 0..n {
        let r = design.residual(i, beta1_hat, beta2_hat);
        rss += r * r;
    }
    let sigma_hat = (rss / n as f64).sqrt();
    Ok(EstimateTheta {
        beta1_hat,
        beta2_hat,
        sigma_hat,
        alpha: 0.0,
        converged: true,
        objective_value: rss,
        iterations: 0,
    })
}
