//! Domain types for the mean-reverting jump-diffusion model
//! `dX = (beta1 - beta2 X) dt + sigma X^gamma dW + dJ`, together with the
//! closed-form facts that are fully determined in the square-root
//! (`gamma = 1/2`) special case.
//!
//! Validation is eager: a constructed parameter set always satisfies the
//! standing positivity conditions, so downstream code never re-checks them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Drift/diffusion parameters `(beta1, beta2, sigma, gamma)` of the CKLS
/// dynamics `dX = (beta1 - beta2 X) dt + sigma X^gamma dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    /// Drift level per unit time, > 0.
    pub beta1: f64,
    /// Mean-reversion speed per unit time, > 0.
    pub beta2: f64,
    /// Diffusion scale, > 0.
    pub sigma: f64,
    /// Diffusion elasticity, in [1/2, 1]. The square-root model is gamma = 1/2.
    pub gamma: f64,
}

impl DiffusionParams {
    pub fn new(beta1: f64, beta2: f64, sigma: f64, gamma: f64) -> Result<Self> {
        let p = Self {
            beta1,
            beta2,
            sigma,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    /// Re-checks the construction invariants (useful after deserialization).
    pub fn validate(&self) -> Result<()> {
        if self.beta1 <= 0.0 || !self.beta1.is_finite() {
            return Err(Error::invalid("beta1 must be positive"));
        }
        if self.beta2 <= 0.0 || !self.beta2.is_finite() {
            return Err(Error::invalid("beta2 must be positive"));
        }
        if self.sigma <= 0.0 || !self.sigma.is_finite() {
            return Err(Error::invalid("sigma must be positive"));
        }
        if !(0.5..=1.0).contains(&self.gamma) {
            return Err(Error::invalid("gamma must lie in [0.5, 1.0]"));
        }
        Ok(())
    }

    /// Whether `2 beta1 > sigma^2`, the condition keeping the gamma = 1/2
    /// process strictly away from zero. Only meaningful when `gamma == 0.5`;
    /// for gamma in (1/2, 1] the zero boundary is unattainable regardless.
    pub fn feller_satisfied(&self) -> bool {
        2.0 * self.beta1 > self.sigma * self.sigma
    }

    /// Long-run mean `beta1 / beta2` of the drift fixed point.
    pub fn drift_fixed_point(&self) -> f64 {
        self.beta1 / self.beta2
    }

    pub fn is_square_root(&self) -> bool {
        self.gamma == 0.5
    }
}

/// Compound-Poisson jump specification: intensity `lambda` (jumps per unit
/// time) and Gaussian jump sizes `N(mu_j, sigma_j^2)`. `lambda = 0` encodes
/// the pure-diffusion model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpParams {
    pub lambda: f64,
    pub mu_j: f64,
    pub sigma_j: f64,
}

impl JumpParams {
    pub fn new(lambda: f64, mu_j: f64, sigma_j: f64) -> Result<Self> {
        let j = Self {
            lambda,
            mu_j,
            sigma_j,
        };
        j.validate()?;
        Ok(j)
    }

    /// No jump source at all.
    pub fn none() -> Self {
        Self {
            lambda: 0.0,
            mu_j: 0.0,
            sigma_j: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::invalid("lambda must be nonnegative"));
        }
        if !self.mu_j.is_finite() {
            return Err(Error::invalid("mu_j must be finite"));
        }
        if self.sigma_j < 0.0 || !self.sigma_j.is_finite() {
            return Err(Error::invalid("sigma_j must be nonnegative"));
        }
        Ok(())
    }
}

/// Validates a drift/diffusion and jump parameter pair, returning the inputs
/// unchanged when every constraint holds. The error names the first violated
/// constraint.
pub fn validate_params(p: &DiffusionParams, j: &JumpParams) -> Result<(DiffusionParams, JumpParams)> {
    p.validate()?;
    j.validate()?;
    Ok((*p, *j))
}

/// Equidistant observation grid: `n` increments of mesh `delta_n` starting
/// from state `x0 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingScheme {
    pub n: usize,
    pub delta_n: f64,
    pub x0: f64,
}

impl SamplingScheme {
    pub fn new(n: usize, delta_n: f64, x0: f64) -> Result<Self> {
        let s = Self { n, delta_n, x0 };
        s.validate()?;
        Ok(s)
    }

    /// Infill design `delta_n = n^(-0.55)`: the mesh shrinks while the
    /// horizon `n * delta_n = n^0.45` grows.
    pub fn infill(n: usize, x0: f64) -> Result<Self> {
        Self::new(n, (n as f64).powf(-0.55), x0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n must be at least 2"));
        }
        if self.delta_n <= 0.0 || !self.delta_n.is_finite() {
            return Err(Error::invalid("delta_n must be positive"));
        }
        if self.x0 <= 0.0 || !self.x0.is_finite() {
            return Err(Error::invalid("x0 must be positive"));
        }
        Ok(())
    }

    /// Observation horizon `n * delta_n`.
    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.delta_n
    }
}

/// A discretely observed path: `n + 1` states on the grid `t_i = i delta_n`,
/// plus the per-increment jump contribution (exactly zero where no jump
/// occurred). Increment `i` runs over `(t_{i-1}, t_i]`, i = 1..=n.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub true_jump_increments: Vec<f64>,
    pub scheme: SamplingScheme,
}

impl SamplePath {
    pub fn new(
        times: Vec<f64>,
        values: Vec<f64>,
        true_jump_increments: Vec<f64>,
        scheme: SamplingScheme,
    ) -> Result<Self> {
        if times.len() != scheme.n + 1 {
            return Err(Error::invalid("times must have n + 1 entries"));
        }
        if values.len() != scheme.n + 1 {
            return Err(Error::invalid("values must have n + 1 entries"));
        }
        if true_jump_increments.len() != scheme.n {
            return Err(Error::invalid("true_jump_increments must have n entries"));
        }
        if values.iter().any(|v| *v <= 0.0 || !v.is_finite()) {
            return Err(Error::invalid("path values must be strictly positive"));
        }
        Ok(Self {
            times,
            values,
            true_jump_increments,
            scheme,
        })
    }

    /// Number of increments.
    pub fn n(&self) -> usize {
        self.scheme.n
    }

    pub fn delta_n(&self) -> f64 {
        self.scheme.delta_n
    }

    /// Increment `X_{t_i} - X_{t_{i-1}}` for 1-based increment index `i`.
    pub fn increment(&self, i: usize) -> f64 {
        self.values[i] - self.values[i - 1]
    }
}

/// A drift/scale estimate `(beta1_hat, beta2_hat, sigma_hat)` together with
/// the robustness tuning parameter it was fitted under (`alpha = 0` is the
/// classical least-squares / quasi-likelihood case) and optimizer metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateTheta {
    pub beta1_hat: f64,
    pub beta2_hat: f64,
    pub sigma_hat: f64,
    /// Robustness tuning parameter used for the fit; >= 0.
    pub alpha: f64,
    pub converged: bool,
    /// Value of the criterion the estimator minimized (residual sum of
    /// squares for the closed-form fit, the divergence objective otherwise).
    pub objective_value: f64,
    pub iterations: usize,
}

impl EstimateTheta {
    /// Drift increment `(beta1_hat - beta2_hat x) delta` predicted from state `x`.
    pub fn drift_increment(&self, x: f64, delta_n: f64) -> f64 {
        (self.beta1_hat - self.beta2_hat * x) * delta_n
    }
}

/// Mean, variance, and Gamma shape/rate of the stationary law of the
/// square-root diffusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirStationaryMoments {
    pub mean: f64,
    pub variance: f64,
    pub shape: f64,
    pub rate: f64,
}

/// Stationary moments of the gamma = 1/2 model: the stationary law is
/// Gamma(shape = 2 beta1 / sigma^2, rate = 2 beta2 / sigma^2), so
/// mean = beta1 / beta2 and variance = beta1 sigma^2 / (2 beta2^2).
///
/// Errors when gamma != 1/2 (the general-elasticity stationary density is
/// not carried by this crate) or when the Feller condition fails.
pub fn cir_stationary_moments(p: &DiffusionParams) -> Result<CirStationaryMoments> {
    if !p.is_square_root() {
        return Err(Error::NotAvailable(
            "stationary moments are only provided for gamma = 1/2".into(),
        ));
    }
    if !p.feller_satisfied() {
        return Err(Error::NotAvailable(
            "Feller condition 2*beta1 > sigma^2 fails; zero boundary attainable".into(),
        ));
    }
    let s2 = p.sigma * p.sigma;
    Ok(CirStationaryMoments {
        mean: p.beta1 / p.beta2,
        variance: p.beta1 * s2 / (2.0 * p.beta2 * p.beta2),
        shape: 2.0 * p.beta1 / s2,
        rate: 2.0 * p.beta2 / s2,
    })
}

/// The 2x2 matrix governing the asymptotic covariance of the drift estimator
/// in the gamma = 1/2 case; its inverse scales the limiting normal law.
/// Off-diagonal entries are exactly -1 by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirSigmaMatrix {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

/// `[[beta2 / (beta1 - sigma^2/2), -1], [-1, beta1 / beta2]]` for the
/// gamma = 1/2 model. Errors when gamma != 1/2 or `beta1 <= sigma^2 / 2`
/// (the (1,1) entry would be singular or negative).
pub fn cir_sigma_matrix(p: &DiffusionParams) -> Result<CirSigmaMatrix> {
    if !p.is_square_root() {
        return Err(Error::NotAvailable(
            "the explicit covariance matrix is only provided for gamma = 1/2".into(),
        ));
    }
    let half_s2 = 0.5 * p.sigma * p.sigma;
    if p.beta1 <= half_s2 {
        return Err(Error::NotAvailable(
            "beta1 must exceed sigma^2 / 2 for the covariance matrix".into(),
        ));
    }
    Ok(CirSigmaMatrix {
        a11: p.beta2 / (p.beta1 - half_s2),
        a12: -1.0,
        a21: -1.0,
        a22: p.beta1 / p.beta2,
    })
}
