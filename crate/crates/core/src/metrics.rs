//! Classification and estimation-accuracy metrics comparing detected jumps
//! against ground truth.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::detect::DetectionReport;
use crate::model::SamplePath;
use crate::sim::jump_index_set;

/// Confusion counts over the true set J and detected set J_hat:
/// `tp = |J ∩ J_hat|`, `fn = |J \ J_hat|`, `fp = |J_hat \ J|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassificationCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

pub fn classification_counts(
    true_set: &BTreeSet<usize>,
    detected_set: &BTreeSet<usize>,
    n: usize,
) -> ClassificationCounts {
    debug_assert!(true_set.iter().all(|&i| (1..=n).contains(&i)));
    debug_assert!(detected_set.iter().all(|&i| (1..=n).contains(&i)));
    let tp = true_set.intersection(detected_set).count();
    ClassificationCounts {
        true_positives: tp,
        false_positives: detected_set.len() - tp,
        false_negatives: true_set.len() - tp,
    }
}

impl ClassificationCounts {
    /// `tp / (tp + fp)`; 1 when nothing was detected and nothing was there to
    /// detect falsely (the 0/0 case).
    pub fn precision(&self) -> f64 {
        let denom = self.true_positives + self.false_positives;
        if denom == 0 {
            1.0
        } else {
            self.true_positives as f64 / denom as f64
        }
    }

    /// `tp / (tp + fn)`; 1 when there were no true jumps to recall.
    pub fn recall(&self) -> f64 {
        let denom = self.true_positives + self.false_negatives;
        if denom == 0 {
            1.0
        } else {
            self.true_positives as f64 / denom as f64
        }
    }
}

/// Harmonic mean of precision and recall, totalized: both sets empty scores
/// 1 (nothing to find, nothing claimed), exactly one empty scores 0, and
/// tp = 0 with nonempty sets scores 0.
pub fn f1_score(c: &ClassificationCounts) -> f64 {
    let denom = 2 * c.true_positives + c.false_positives + c.false_negatives;
    if denom == 0 {
        1.0
    } else {
        2.0 * c.true_positives as f64 / denom as f64
    }
}

/// Jump magnitude/frequency summary. `mean` is undefined (None) when the
/// underlying index set is empty. `intensity` counts jumps per increment
/// (`count / n`); `intensity_per_time` is the same count per unit time
/// (`count / (n delta_n)`), kept as a separate field to avoid unit mix-ups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpStats {
    pub mean: Option<f64>,
    pub intensity: f64,
    pub intensity_per_time: f64,
    pub count: usize,
}

/// Realized (ground-truth) jump mean and intensity of a simulated path.
pub fn realized_jump_stats(path: &SamplePath) -> JumpStats {
    let indices = jump_index_set(path);
    let n = path.n();
    let count = indices.len();
    let mean = (count > 0).then(|| {
        indices
            .iter()
            .map(|&i| path.true_jump_increments[i - 1])
            .sum::<f64>()
            / count as f64
    });
    JumpStats {
        mean,
        intensity: count as f64 / n as f64,
        intensity_per_time: count as f64 / (n as f64 * path.delta_n()),
        count,
    }
}

/// Detected-jump mean and intensity from a finalized detection report.
pub fn estimated_jump_stats(report: &DetectionReport, n: usize) -> JumpStats {
    let count = report.detected_set.len();
    let mean = (count > 0).then(|| {
        report.jump_size_estimates.values().sum::<f64>() / report.jump_size_estimates.len() as f64
    });
    JumpStats {
        mean,
        intensity: count as f64 / n as f64,
        intensity_per_time: count as f64 / (n as f64 * report.z_stats.scheme.delta_n),
        count,
    }
}

/// Scaled error metric
/// `sqrt((mean_real/mean_est - 1)^2 + (intensity_real/intensity_est - 1)^2)`:
/// zero iff the estimated jump mean and intensity match the realized ones.
/// Undefined (None) whenever a needed quantity is undefined or a denominator
/// is zero; callers exclude such cases from averages and report their count.
pub fn d_metric(realized: &JumpStats, estimated: &JumpStats) -> Option<f64> {
    let mu_real = realized.mean?;
    let mu_est = estimated.mean?;
    if mu_est == 0.0 || estimated.intensity == 0.0 {
        return None;
    }
    let mu_ratio = mu_real / mu_est - 1.0;
    let intensity_ratio = realized.intensity / estimated.intensity - 1.0;
    Some((mu_ratio * mu_ratio + intensity_ratio * intensity_ratio).sqrt())
}
