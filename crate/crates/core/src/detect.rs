//! Jump detection from standardized increments.
//!
//! Each increment is drift-corrected and rescaled by the estimated local
//! diffusion magnitude `sigma_hat X^gamma sqrt(delta_n)`. Off jumps the
//! statistic is asymptotically standard normal, so the maximum over a
//! jump-free stretch of length n grows like `sqrt(2 log n)` and, normalized
//! by the sequences
//!
//! ```text
//! a_n = sqrt(2 log n) - (log log n + log pi) / (2 sqrt(2 log n))
//! b_n = 1 / sqrt(2 log n)
//! ```
//!
//! converges to the Gumbel law `exp(-e^(-x))`. Thresholding |Z| against a
//! Gumbel quantile (or a diverging additive offset) separates jump from
//! diffusion increments.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EstimateTheta, SamplePath, SamplingScheme};
use crate::rng::{substream, DOMAIN_GAUSS_MAX};

/// Standardized increment statistics for one path under one estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ZStatistics {
    /// One entry per increment, 1-based increment `i` stored at `z[i-1]`.
    pub z: Vec<f64>,
    pub theta_used: EstimateTheta,
    pub scheme: SamplingScheme,
    pub gamma: f64,
}

/// How the detection threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ThresholdMode {
    /// `xi = a_n + b_n * (-log(-log(1 - q)))`: the level-q upper quantile of
    /// the limiting Gumbel law of the jump-free maximum.
    GumbelQuantile { q: f64 },
    /// `xi = sqrt(2 log n) + c`: the diverging-offset form.
    Additive { c: f64 },
    /// A user-supplied threshold value, e.g. to reproduce published figures.
    Fixed { value: f64 },
}

/// A resolved detection threshold together with the normalizing constants it
/// was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub mode: ThresholdMode,
    pub n: usize,
    pub resolved_xi: f64,
    pub a_n: f64,
    pub b_n: f64,
}

/// Detection outcome: the exceedance index set, the statistics and threshold
/// that produced it, and (once attached) the estimated jump sizes keyed by
/// exactly the detected indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    /// 1-based increment indices with `|z| > xi`.
    pub detected_set: BTreeSet<usize>,
    pub z_stats: ZStatistics,
    pub threshold: ThresholdSpec,
    pub jump_size_estimates: BTreeMap<usize, f64>,
}

/// Standardizes every increment of a path under the supplied estimate:
/// `z_i = (dX_i - (beta1_hat - beta2_hat X_{t_{i-1}}) delta_n) / (sigma_hat X_{t_{i-1}}^gamma sqrt(delta_n))`.
/// The same formula serves the classical (`theta.alpha = 0`) and robust
/// (`theta.alpha > 0`) estimators.
pub fn compute_z_stats(path: &SamplePath, theta: &EstimateTheta, gamma: f64) -> Result<ZStatistics> {
    if theta.sigma_hat <= 0.0 || theta.sigma_hat.is_nan() {
        return Err(Error::invalid("sigma_hat must be positive"));
    }
    if !theta.beta1_hat.is_finite() || !theta.beta2_hat.is_finite() {
        return Err(Error::invalid("drift estimates must be finite"));
    }
    if !(0.5..=1.0).contains(&gamma) {
        return Err(Error::invalid("gamma must lie in [0.5, 1.0]"));
    }
    let n = path.n();
    let dt = path.delta_n();
    let sqrt_dt = dt.sqrt();
    let mut z = Vec::with_capacity(n);
    for i in 1..=n {
        let x_prev = path.values[i - 1];
        let numerator = path.increment(i) - theta.drift_increment(x_prev, dt);
        z.push(numerator / (theta.sigma_hat * x_prev.powf(gamma) * sqrt_dt));
    }
    Ok(ZStatistics {
        z,
        theta_used: *theta,
        scheme: path.scheme,
        gamma,
    })
}

/// Normalizing constants `(a_n, b_n)` of the Gumbel law of the maximum of n
/// absolute standard normals. Requires `n >= 3` so `log log n` is positive.
pub fn gumbel_constants(n: usize) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::invalid("n must be at least 3 for the normalizing constants"));
    }
    let log_n = (n as f64).ln();
    let root = (2.0 * log_n).sqrt();
    let a_n = root - (log_n.ln() + std::f64::consts::PI.ln()) / (2.0 * root);
    let b_n = 1.0 / root;
    Ok((a_n, b_n))
}

/// Standard Gumbel quantile `G^{-1}(p) = -log(-log p)`.
pub fn gumbel_quantile(p: f64) -> Result<f64> {
    if p <= 0.0 || p >= 1.0 || p.is_nan() {
        return Err(Error::invalid("quantile level must lie in (0, 1)"));
    }
    Ok(-(-p.ln()).ln())
}

/// Resolves a detection threshold for a path of n increments. All modes
/// populate the normalizing constants; the resolved threshold must be
/// positive.
pub fn detection_threshold(n: usize, mode: ThresholdMode) -> Result<ThresholdSpec> {
    let (a_n, b_n) = gumbel_constants(n)?;
    let resolved_xi = match mode {
        ThresholdMode::GumbelQuantile { q } => {
            if q <= 0.0 || q >= 1.0 || q.is_nan() {
                return Err(Error::invalid("q must lie in (0, 1)"));
            }
            a_n + b_n * gumbel_quantile(1.0 - q)?
        }
        ThresholdMode::Additive { c } => {
            if c <= 0.0 || !c.is_finite() {
                return Err(Error::invalid("additive offset c must be positive"));
            }
            (2.0 * (n as f64).ln()).sqrt() + c
        }
        ThresholdMode::Fixed { value } => value,
    };
    if resolved_xi <= 0.0 || !resolved_xi.is_finite() {
        return Err(Error::invalid("resolved threshold must be positive"));
    }
    Ok(ThresholdSpec {
        mode,
        n,
        resolved_xi,
        a_n,
        b_n,
    })
}

/// Classifies increments by strict exceedance: index `i` is declared a jump
/// when `|z_i| > xi`. Jump sizes are not attached here; see
/// [`estimate_jump_sizes`] and [`run_detection`].
pub fn detect_jumps(z_stats: &ZStatistics, threshold: &ThresholdSpec) -> Result<DetectionReport> {
    if z_stats.z.len() != threshold.n {
        return Err(Error::invalid("threshold and statistics disagree on n"));
    }
    let xi = threshold.resolved_xi;
    let detected_set: BTreeSet<usize> = z_stats
        .z
        .iter()
        .enumerate()
        .filter(|(_, z)| z.abs() > xi)
        .map(|(i, _)| i + 1)
        .collect();
    Ok(DetectionReport {
        detected_set,
        z_stats: z_stats.clone(),
        threshold: *threshold,
        jump_size_estimates: BTreeMap::new(),
    })
}

/// Drift-corrected jump magnitudes at the given increment indices:
/// `dJ_hat_i = dX_i - (beta1_hat - beta2_hat X_{t_{i-1}}) delta_n`.
pub fn estimate_jump_sizes(
    path: &SamplePath,
    theta: &EstimateTheta,
    detected: &BTreeSet<usize>,
) -> BTreeMap<usize, f64> {
    debug_assert!(detected.iter().all(|&i| (1..=path.n()).contains(&i)));
    let dt = path.delta_n();
    detected
        .iter()
        .map(|&i| {
            let x_prev = path.values[i - 1];
            (i, path.increment(i) - theta.drift_increment(x_prev, dt))
        })
        .collect()
}

/// Full detection pass: statistics, strict thresholding, and jump-size
/// estimation in one call. The returned report carries sizes keyed by
/// exactly the detected index set.
pub fn run_detection(
    path: &SamplePath,
    theta: &EstimateTheta,
    gamma: f64,
    threshold: &ThresholdSpec,
) -> Result<DetectionReport> {
    let z_stats = compute_z_stats(path, theta, gamma)?;
    let mut report = detect_jumps(&z_stats, threshold)?;
    report.jump_size_estimates = estimate_jump_sizes(path, theta, &report.detected_set);
    Ok(report)
}

/// Summary of a simulation check of the Gumbel law of the normalized maximum
/// of n absolute standard normals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GumbelMaxSummary {
    pub n: usize,
    pub replications: usize,
    /// Kolmogorov–Smirnov distance between the empirical law of
    /// `(M_n - a_n)/b_n` and the Gumbel CDF `exp(-e^(-x))`.
    pub ks_distance: f64,
    /// Empirical CDF at 0; the Gumbel value is `exp(-1)`.
    pub cdf_at_zero: f64,
    /// Median of the normalized maxima; the Gumbel median is `-log log 2`.
    pub median: f64,
    pub a_n: f64,
    pub b_n: f64,
}

/// Simulates `replications` maxima of |xi_1..n| over i.i.d. standard normals
/// (one independent stream per replication), normalizes by `(a_n, b_n)`, and
/// measures the fit to the Gumbel law. Requires `n >= 100` and
/// `replications >= 500` so the empirical distribution is meaningful.
pub fn gumbel_max_check(n: usize, replications: usize, seed: u64) -> Result<GumbelMaxSummary> {
    if n < 100 {
        return Err(Error::invalid("n must be at least 100"));
    }
    if replications < 500 {
        return Err(Error::invalid("replications must be at least 500"));
    }
    let (a_n, b_n) = gumbel_constants(n)?;
    let mut normalized: Vec<f64> = (0..replications)
        .map(|rep| {
            let mut rng = substream(seed, DOMAIN_GAUSS_MAX, rep as u64);
            let mut max_abs = 0.0f64;
            for _ in 0..n {
                let x: f64 = rng.sample(StandardNormal);
                max_abs = max_abs.max(x.abs());
            }
            (max_abs - a_n) / b_n
        })
        .collect();
    normalized.sort_by(f64::total_cmp);

    let m = replications as f64;
    let gumbel_cdf = |x: f64| (-(-x).exp()).exp();
    let mut ks = 0.0f64;
    for (i, x) in normalized.iter().enumerate() {
        let g = gumbel_cdf(*x);
        ks = ks.max(((i + 1) as f64 / m - g).abs());
        ks = ks.max((g - i as f64 / m).abs());
    }
    let cdf_at_zero = normalized.iter().take_while(|x| **x <= 0.0).count() as f64 / m;
    let median = if replications % 2 == 1 {
        normalized[replications / 2]
    } else {
        0.5 * (normalized[replications / 2 - 1] + normalized[replications / 2])
    };
    Ok(GumbelMaxSummary {
        n,
        replications,
        ks_distance: ks,
        cdf_at_zero,
        median,
        a_n,
        b_n,
    })
}
