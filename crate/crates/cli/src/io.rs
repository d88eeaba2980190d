//! File formats: path CSVs (`index,time,value,true_jump_increment`),
//! detection report CSVs with a JSON metadata header line, and influence
//! CSVs. All numeric output is deterministic; path values are written with
//! 17 significant digits so they round-trip f64 exactly.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use jumpsift_core::{DetectionReport, InfluenceProfile, SamplePath, SamplingScheme, ThresholdMode};

/// 17 significant digits: exact f64 round-trip.
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_path_csv(path: &SamplePath, file: &Path) -> Result<()> {
    let mut out = String::from("index,time,value,true_jump_increment\n");
    for i in 0..=path.n() {
        let jump = if i == 0 {
            0.0
        } else {
            path.true_jump_increments[i - 1]
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            i,
            fmt_full(path.times[i]),
            fmt_full(path.values[i]),
            fmt_full(jump)
        ));
    }
    fs::write(file, out).with_context(|| format!("writing path CSV {}", file.display()))
}

/// Reads a path CSV. The `true_jump_increment` column is optional; without
/// it the ground truth is recorded as all zeros (unknown). Row 0 carries no
/// increment and its jump cell is ignored.
pub fn read_path_csv(file: &Path) -> Result<SamplePath> {
    let text =
        fs::read_to_string(file).with_context(|| format!("reading path CSV {}", file.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("empty path CSV")?;
    let has_jumps = match header.trim() {
        "index,time,value,true_jump_increment" => true,
        "index,time,value" => false,
        other => bail!("unexpected path CSV header: {other}"),
    };

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut jumps = Vec::new();
    for (row, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != if has_jumps { 4 } else { 3 } {
            bail!("row {}: expected {} fields", row + 1, if has_jumps { 4 } else { 3 });
        }
        let index: usize = fields[0].trim().parse().with_context(|| format!("row {}: index", row + 1))?;
        if index != row {
            bail!("row {}: indices must run 0..n without gaps", row + 1);
        }
        times.push(fields[1].trim().parse::<f64>().with_context(|| format!("row {}: time", row + 1))?);
        values.push(fields[2].trim().parse::<f64>().with_context(|| format!("row {}: value", row + 1))?);
        if has_jumps && row > 0 {
            jumps.push(
                fields[3]
                    .trim()
                    .parse::<f64>()
                    .with_context(|| format!("row {}: true_jump_increment", row + 1))?,
            );
        }
    }
    if values.len() < 3 {
        bail!("path CSV must contain at least 3 rows (2 increments)");
    }
    let n = values.len() - 1;
    if !has_jumps {
        jumps = vec![0.0; n];
    }
    let delta_n = times[1] - times[0];
    if delta_n <= 0.0 || delta_n.is_nan() {
        bail!("times must be strictly increasing");
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - delta_n).abs() > 1e-9 * delta_n.max(1.0) {
            bail!("times must form an equidistant grid");
        }
    }
    let scheme = SamplingScheme::new(n, delta_n, values[0])
        .map_err(|e| anyhow::anyhow!("invalid sampling metadata: {e}"))?;
    SamplePath::new(times, values, jumps, scheme).map_err(|e| anyhow::anyhow!("invalid path: {e}"))
}

fn threshold_meta_json(report: &DetectionReport) -> String {
    let t = report.threshold;
    let (mode, q_or_c) = match t.mode {
        ThresholdMode::GumbelQuantile { q } => ("gumbel_quantile", q),
        ThresholdMode::Additive { c } => ("additive", c),
        ThresholdMode::Fixed { value } => ("fixed", value),
    };
    format!(
        "{{\"n\":{},\"mode\":\"{}\",\"q_or_c\":{},\"a_n\":{},\"b_n\":{},\"xi\":{}}}",
        t.n, mode, q_or_c, t.a_n, t.b_n, t.resolved_xi
    )
}

/// Writes a detection report: a one-line JSON threshold header, then the CSV
/// table `index,time,z,abs_z,detected,jump_size_estimate` (size cell empty
/// off the detected set).
pub fn write_report_csv(report: &DetectionReport, times: &[f64], file: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&threshold_meta_json(report));
    out.push('\n');
    out.push_str("index,time,z,abs_z,detected,jump_size_estimate\n");
    for (k, &z) in report.z_stats.z.iter().enumerate() {
        let i = k + 1;
        let detected = report.detected_set.contains(&i);
        let size = report
            .jump_size_estimates
            .get(&i)
            .map(|s| fmt_full(*s))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i,
            fmt_full(times[i]),
            fmt_full(z),
            fmt_full(z.abs()),
            u8::from(detected),
            size
        ));
    }
    fs::write(file, out).with_context(|| format!("writing report CSV {}", file.display()))
}

/// Debug export of a regression design as `y,z1,z2,x_prev`.
pub fn write_design_csv(design: &jumpsift_core::RegressionDesign, file: &Path) -> Result<()> {
    let mut out = String::from("y,z1,z2,x_prev\n");
    for i in 0..design.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_full(design.y[i]),
            fmt_full(design.z1[i]),
            fmt_full(design.z2[i]),
            fmt_full(design.x_prev[i])
        ));
    }
    fs::write(file, out).with_context(|| format!("writing design CSV {}", file.display()))
}

/// Writes one influence profile as `index,residual,contribution,likelihood`.
pub fn write_influence_csv(profile: &InfluenceProfile, file: &Path) -> Result<()> {
    let mut out = String::from("index,residual,contribution,likelihood\n");
    for i in 0..profile.residuals.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            fmt_full(profile.residuals[i]),
            fmt_full(profile.contributions[i]),
            fmt_full(profile.likelihoods[i])
        ));
    }
    fs::write(file, out).with_context(|| format!("writing influence CSV {}", file.display()))
}
