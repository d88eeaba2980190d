//! Replication grid runner: simulate → fit → detect → score over every
//! `(n, lambda, mu_j, alpha)` cell and replication, in parallel, with
//! deterministic output. Work units are independent and their results are
//! merged in (cell, replication) order, so rows.csv and summary.csv are
//! byte-identical across runs and thread counts.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use jumpsift_core::rng::{derive_seed, DOMAIN_EXPERIMENT};
use jumpsift_core::{
    build_design, classification_counts, d_metric, detection_threshold, estimated_jump_stats,
    f1_score, jump_index_set, mdpde_estimate, ols_estimate, realized_jump_stats, run_detection,
    simulate, JumpParams, MdpdeConfig, SamplingScheme, SimConfig,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;

/// One grid point of the experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n: usize,
    pub lambda: f64,
    pub mu_j: f64,
    pub alpha: f64,
}

/// Replication outcome status.
#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    NonConverged,
    Error(String),
}

impl RowStatus {
    fn label(&self) -> String {
        match self {
            RowStatus::Ok => "ok".into(),
            RowStatus::NonConverged => "nonconverged".into(),
            RowStatus::Error(msg) => format!("error:{}", msg.replace([',', '\n'], ";")),
        }
    }
}

/// One (grid point, replication) result row; the in-memory image of one
/// rows.csv line.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResultRow {
    pub point: GridPoint,
    pub delta_n: f64,
    pub seed: u64,
    pub rep: usize,
    pub status: RowStatus,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub mu_real: Option<f64>,
    pub lam_real: f64,
    pub mu_hat: Option<f64>,
    pub lam_hat: f64,
    pub d_m: Option<f64>,
    pub beta1_hat: f64,
    pub beta2_hat: f64,
    pub sigma_hat: f64,
    pub converged: bool,
}

/// Runs the full pipeline for one replication of one grid point:
/// simulate, build the design, fit (least squares at alpha = 0, divergence
/// fit otherwise), standardize, threshold, estimate jump sizes, and score
/// against ground truth. Failures are recorded in the row status and never
/// abort the grid.
pub fn run_single(point: GridPoint, shared: &ExperimentConfig, rep: usize, seed: u64) -> GridResultRow {
    let delta_n = (point.n as f64).powf(-0.55);
    let mut row = GridResultRow {
        point,
        delta_n,
        seed,
        rep,
        status: RowStatus::Ok,
        tp: 0,
        fp: 0,
        fn_: 0,
        precision: f64::NAN,
        recall: f64::NAN,
        f1: f64::NAN,
        mu_real: None,
        lam_real: f64::NAN,
        mu_hat: None,
        lam_hat: f64::NAN,
        d_m: None,
        beta1_hat: f64::NAN,
        beta2_hat: f64::NAN,
        sigma_hat: f64::NAN,
        converged: false,
    };
    let outcome = (|| -> jumpsift_core::Result<()> {
        let gamma = shared.diffusion.gamma;
        let scheme = SamplingScheme::infill(point.n, shared.x0_or_default())?;
        let sim_cfg = SimConfig::new(
            shared.diffusion,
            JumpParams::new(point.lambda, point.mu_j, shared.sigma_j)?,
            scheme,
            seed,
        )?;
        let path = simulate(&sim_cfg);
        let design = build_design(&path, gamma)?;
        let ols = ols_estimate(&design)?;
        let theta = if point.alpha == 0.0 {
            ols
        } else {
            mdpde_estimate(&design, &MdpdeConfig::new(point.alpha, ols))?
        };
        let threshold = detection_threshold(point.n, shared.threshold_mode)?;
        let report = run_detection(&path, &theta, gamma, &threshold)?;

        let truth = jump_index_set(&path);
        let counts = classification_counts(&truth, &report.detected_set, point.n);
        let realized = realized_jump_stats(&path);
        let estimated = estimated_jump_stats(&report, point.n);

        row.tp = counts.true_positives;
        row.fp = counts.false_positives;
        row.fn_ = counts.false_negatives;
        row.precision = counts.precision();
        row.recall = counts.recall();
        row.f1 = f1_score(&counts);
        row.mu_real = realized.mean;
        row.lam_real = realized.intensity;
        row.mu_hat = estimated.mean;
        row.lam_hat = estimated.intensity;
        row.d_m = d_metric(&realized, &estimated);
        row.beta1_hat = theta.beta1_hat;
        row.beta2_hat = theta.beta2_hat;
        row.sigma_hat = theta.sigma_hat;
        row.converged = theta.converged;
        row.status = if theta.converged {
            RowStatus::Ok
        } else {
            RowStatus::NonConverged
        };
        Ok(())
    })();
    if let Err(e) = outcome {
        row.status = RowStatus::Error(e.to_string());
    }
    row
}

/// Per-grid-point aggregate over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSummaryRow {
    pub point: GridPoint,
    pub delta_n: f64,
    pub replications: usize,
    pub mean_f1: f64,
    pub median_f1: f64,
    /// Mean d_M over replications where it is defined.
    pub mean_d_m: Option<f64>,
    pub d_m_defined: usize,
    pub d_m_undefined: usize,
    pub mean_beta1_hat: f64,
    pub mean_beta2_hat: f64,
    pub mean_sigma_hat: f64,
    pub nonconverged: usize,
    pub errors: usize,
}

fn summarize_cell(point: GridPoint, delta_n: f64, rows: &[GridResultRow]) -> GridSummaryRow {
    let usable: Vec<&GridResultRow> = rows
        .iter()
        .filter(|r| !matches!(r.status, RowStatus::Error(_)))
        .collect();
    let mean_of = |f: &dyn Fn(&GridResultRow) -> f64| -> f64 {
        if usable.is_empty() {
            f64::NAN
        } else {
            usable.iter().map(|r| f(r)).sum::<f64>() / usable.len() as f64
        }
    };
    let mut f1s: Vec<f64> = usable.iter().map(|r| r.f1).collect();
    f1s.sort_by(f64::total_cmp);
    let median_f1 = if f1s.is_empty() {
        f64::NAN
    } else if f1s.len() % 2 == 1 {
        f1s[f1s.len() / 2]
    } else {
        0.5 * (f1s[f1s.len() / 2 - 1] + f1s[f1s.len() / 2])
    };
    let defined: Vec<f64> = usable.iter().filter_map(|r| r.d_m).collect();
    let mean_d_m = if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    };
    GridSummaryRow {
        point,
        delta_n,
        replications: rows.len(),
        mean_f1: mean_of(&|r| r.f1),
        median_f1,
        mean_d_m,
        d_m_defined: defined.len(),
        d_m_undefined: usable.len() - defined.len(),
        mean_beta1_hat: mean_of(&|r| r.beta1_hat),
        mean_beta2_hat: mean_of(&|r| r.beta2_hat),
        mean_sigma_hat: mean_of(&|r| r.sigma_hat),
        nonconverged: rows
            .iter()
            .filter(|r| matches!(r.status, RowStatus::NonConverged))
            .count(),
        errors: rows.len() - usable.len(),
    }
}

/// Complete grid output.
#[derive(Debug)]
pub struct GridOutput {
    pub rows: Vec<GridResultRow>,
    pub summaries: Vec<GridSummaryRow>,
}

/// Enumerates grid points in configuration order (n, lambda, mu_j, alpha).
pub fn grid_points(cfg: &ExperimentConfig) -> Vec<GridPoint> {
    let mut points = Vec::with_capacity(cfg.grid_size());
    for &n in &cfg.grid_n {
        for &lambda in &cfg.grid_lambda {
            for &mu_j in &cfg.grid_mu_j {
                for &alpha in &cfg.grid_alpha {
                    points.push(GridPoint {
                        n,
                        lambda,
                        mu_j,
                        alpha,
                    });
                }
            }
        }
    }
    points
}

/// Runs every replication of every grid point. Replications are independent
/// work units executed on the current rayon pool; results are collected in
/// deterministic (cell, replication) order. Each unit gets its own RNG
/// stream derived from the master seed, asserted collision-free.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<GridOutput> {
    cfg.validate()?;
    let points = grid_points(cfg);
    let reps = cfg.replications;
    let mut units: Vec<(usize, GridPoint, usize, u64)> = Vec::with_capacity(points.len() * reps);
    let mut seen = HashSet::with_capacity(points.len() * reps);
    for (cell, point) in points.iter().enumerate() {
        for rep in 0..reps {
            let stream_index = (cell * reps + rep) as u64;
            let seed = derive_seed(cfg.master_seed, DOMAIN_EXPERIMENT, stream_index);
            if !seen.insert(seed) {
                bail!("derived seed collision at cell {cell}, replication {rep}");
            }
            units.push((cell, *point, rep, seed));
        }
    }

    let rows: Vec<GridResultRow> = units
        .par_iter()
        .map(|(_, point, rep, seed)| run_single(*point, cfg, *rep, *seed))
        .collect();

    let summaries: Vec<GridSummaryRow> = rows
        .chunks(reps)
        .zip(&points)
        .map(|(chunk, point)| summarize_cell(*point, chunk[0].delta_n, chunk))
        .collect();

    Ok(GridOutput { rows, summaries })
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v}"),
        None => "NaN".into(),
    }
}

pub const ROWS_HEADER: &str = "n,delta_n,lambda,mu_J,sigma_J,alpha,seed,tp,fp,fn,precision,recall,f1,mu_real,lam_real,mu_hat,lam_hat,d_M,d_M_defined,beta1_hat,beta2_hat,sigma_hat,rep,status";

pub fn rows_to_csv(rows: &[GridResultRow], sigma_j: f64) -> String {
    let mut out = String::from(ROWS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.point.n,
            r.delta_n,
            r.point.lambda,
            r.point.mu_j,
            sigma_j,
            r.point.alpha,
            r.seed,
            r.tp,
            r.fp,
            r.fn_,
            r.precision,
            r.recall,
            r.f1,
            fmt_opt(r.mu_real),
            r.lam_real,
            fmt_opt(r.mu_hat),
            r.lam_hat,
            fmt_opt(r.d_m),
            u8::from(r.d_m.is_some()),
            r.beta1_hat,
            r.beta2_hat,
            r.sigma_hat,
            r.rep,
            r.status.label()
        ));
    }
    out
}

pub const SUMMARY_HEADER: &str = "n,delta_n,lambda,mu_J,sigma_J,alpha,replications,mean_f1,median_f1,mean_d_M,d_M_defined,d_M_undefined,mean_beta1_hat,mean_beta2_hat,mean_sigma_hat,nonconverged,errors";

pub fn summaries_to_csv(summaries: &[GridSummaryRow], sigma_j: f64) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.point.n,
            s.delta_n,
            s.point.lambda,
            s.point.mu_j,
            sigma_j,
            s.point.alpha,
            s.replications,
            s.mean_f1,
            s.median_f1,
            fmt_opt(s.mean_d_m),
            s.d_m_defined,
            s.d_m_undefined,
            s.mean_beta1_hat,
            s.mean_beta2_hat,
            s.mean_sigma_hat,
            s.nonconverged,
            s.errors
        ));
    }
    out
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    version: &'static str,
    grid_points: usize,
    replications: usize,
    rows: usize,
    wall_time_seconds: f64,
}

/// Runs the grid and writes `rows.csv`, `summary.csv`, and `manifest.json`
/// into the output directory.
pub fn run_grid_to_dir(cfg: &ExperimentConfig, dir: &Path) -> Result<GridOutput> {
    let start = Instant::now();
    let output = run_grid(cfg)?;
    fs::create_dir_all(dir).with_context(|| format!("creating output dir {}", dir.display()))?;
    let rows_path = dir.join("rows.csv");
    fs::write(&rows_path, rows_to_csv(&output.rows, cfg.sigma_j))
        .with_context(|| format!("writing {}", rows_path.display()))?;
    let summary_path = dir.join("summary.csv");
    fs::write(&summary_path, summaries_to_csv(&output.summaries, cfg.sigma_j))
        .with_context(|| format!("writing {}", summary_path.display()))?;
    let manifest = Manifest {
        config: cfg,
        version: env!("CARGO_PKG_VERSION"),
        grid_points: cfg.grid_size(),
        replications: cfg.replications,
        rows: output.rows.len(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let manifest_path = dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok(output)
}

/// Builds a rayon pool honoring the `JUMPSIFT_THREADS` cap and runs `f` on
/// it; without the variable the global default pool is used.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var("JUMPSIFT_THREADS") {
        Ok(raw) => {
            let threads: usize = raw
                .trim()
                .parse()
                .with_context(|| format!("JUMPSIFT_THREADS='{raw}' is not a thread count"))?;
            if threads == 0 {
                bail!("JUMPSIFT_THREADS must be at least 1");
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .context("building thread pool")?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}
