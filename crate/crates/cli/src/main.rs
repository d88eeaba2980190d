//! Command-line interface: simulate paths, fit estimators, detect jumps,
//! run replication grids, and validate the extreme-value law.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use jumpsift::config::{parse_threshold_flag, ExperimentConfig};
use jumpsift::grid::{run_grid_to_dir, with_thread_cap};
use jumpsift::io;
use jumpsift_core::{
    build_design, detection_threshold, gumbel_max_check, influence_profile, mdpde_estimate,
    ols_estimate, run_detection, simulate, DiffusionParams, JumpParams, MdpdeConfig, SamplePath,
    SamplingScheme, SimConfig,
};

#[derive(Parser)]
#[command(
    name = "jumpsift",
    version,
    about = "Jump-diffusion simulation, robust estimation, and extreme-value jump detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DiffusionArgs {
    /// Drift level beta1 (> 0)
    #[arg(long, default_value_t = 1.0)]
    beta1: f64,
    /// Mean-reversion speed beta2 (> 0)
    #[arg(long, default_value_t = 0.8)]
    beta2: f64,
    /// Diffusion scale sigma (> 0)
    #[arg(long, default_value_t = 0.3)]
    sigma: f64,
    /// Diffusion elasticity gamma (in [0.5, 1])
    #[arg(long, default_value_t = 0.7)]
    gamma: f64,
}

impl DiffusionArgs {
    fn params(&self) -> Result<DiffusionParams> {
        DiffusionParams::new(self.beta1, self.beta2, self.sigma, self.gamma)
            .map_err(|e| anyhow::anyhow!("{e}"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one jump-diffusion path and write it as CSV
    Simulate {
        #[command(flatten)]
        diffusion: DiffusionArgs,
        /// Number of increments
        #[arg(long)]
        n: usize,
        /// Grid mesh; defaults to the infill design n^(-0.55)
        #[arg(long)]
        delta_n: Option<f64>,
        /// Initial state; defaults to beta1/beta2
        #[arg(long)]
        x0: Option<f64>,
        /// Jump intensity per unit time
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        /// Jump size mean
        #[arg(long, default_value_t = 0.0)]
        mu_j: f64,
        /// Jump size standard deviation
        #[arg(long, default_value_t = 0.0)]
        sigma_j: f64,
        #[arg(long)]
        seed: u64,
        /// Output CSV file
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the drift/scale parameters to a path CSV and print the estimate as JSON
    Estimate {
        /// Input path CSV
        #[arg(long = "in")]
        input: PathBuf,
        /// Diffusion elasticity gamma (known, not estimated)
        #[arg(long)]
        gamma: f64,
        /// Robustness tuning parameter; 0 = least squares
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
    },
    /// Detect jumps on a path CSV and write a detection report CSV
    Detect {
        /// Input path CSV
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Threshold rule: quantile:Q, additive:C, or fixed:VALUE
        #[arg(long, default_value = "quantile:0.05")]
        threshold: String,
        /// Output report CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a replication grid from a JSON config file
    Grid {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Override the config's replication count
        #[arg(long)]
        replications: Option<usize>,
        /// Override the config's master seed
        #[arg(long)]
        master_seed: Option<u64>,
    },
    /// Simulate the law of the maximum of |N(0,1)| samples and report the
    /// Gumbel fit (KS distance, median, CDF at zero)
    GumbelCheck {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        replications: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Write pointwise influence CSVs for a path under a list of alphas
    Influence {
        /// Input path CSV
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        gamma: f64,
        /// Comma-separated robustness parameters, e.g. 0,0.1,0.25
        #[arg(long, default_value = "0,0.05,0.1,0.15,0.2,0.25")]
        alphas: String,
        /// Output prefix; files are named <prefix>_alpha<k>.csv
        #[arg(long, default_value = "influence")]
        out_prefix: String,
    },
}

fn fit(path: &SamplePath, gamma: f64, alpha: f64) -> Result<jumpsift_core::EstimateTheta> {
    let design = build_design(path, gamma).map_err(|e| anyhow::anyhow!("{e}"))?;
    let ols = ols_estimate(&design).map_err(|e| anyhow::anyhow!("{e}"))?;
    if alpha == 0.0 {
        Ok(ols)
    } else {
        mdpde_estimate(&design, &MdpdeConfig::new(alpha, ols)).map_err(|e| anyhow::anyhow!("{e}"))
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate {
            diffusion,
            n,
            delta_n,
            x0,
            lambda,
            mu_j,
            sigma_j,
            seed,
            out,
        } => {
            let params = diffusion.params()?;
            let x0 = x0.unwrap_or(params.drift_fixed_point());
            let scheme = match delta_n {
                Some(dt) => SamplingScheme::new(n, dt, x0),
                None => SamplingScheme::infill(n, x0),
            }
            .map_err(|e| anyhow::anyhow!("{e}"))?;
            let jumps = JumpParams::new(lambda, mu_j, sigma_j).map_err(|e| anyhow::anyhow!("{e}"))?;
            let cfg = SimConfig::new(params, jumps, scheme, seed).map_err(|e| anyhow::anyhow!("{e}"))?;
            let path = simulate(&cfg);
            io::write_path_csv(&path, &out)?;
            eprintln!("wrote {} ({} increments)", out.display(), n);
        }
        Command::Estimate { input, gamma, alpha } => {
            let path = io::read_path_csv(&input)?;
            let estimate = fit(&path, gamma, alpha)?;
            println!("{}", serde_json::to_string_pretty(&estimate)?);
        }
        Command::Detect {
            input,
            gamma,
            alpha,
            threshold,
            out,
        } => {
            let path = io::read_path_csv(&input)?;
            let estimate = fit(&path, gamma, alpha)?;
            let mode = parse_threshold_flag(&threshold)?;
            let spec = detection_threshold(path.n(), mode).map_err(|e| anyhow::anyhow!("{e}"))?;
            let report =
                run_detection(&path, &estimate, gamma, &spec).map_err(|e| anyhow::anyhow!("{e}"))?;
            io::write_report_csv(&report, &path.times, &out)?;
            eprintln!(
                "wrote {} ({} detections at xi = {:.6})",
                out.display(),
                report.detected_set.len(),
                spec.resolved_xi
            );
        }
        Command::Grid {
            config,
            output_dir,
            replications,
            master_seed,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir.to_string_lossy().into_owned();
            }
            if let Some(reps) = replications {
                cfg.replications = reps;
            }
            if let Some(seed) = master_seed {
                cfg.master_seed = seed;
            }
            cfg.validate()?;
            let dir = PathBuf::from(&cfg.output_dir);
            let output = with_thread_cap(|| run_grid_to_dir(&cfg, &dir))??;
            eprintln!(
                "wrote {} rows over {} grid points to {}",
                output.rows.len(),
                output.summaries.len(),
                dir.display()
            );
        }
        Command::GumbelCheck {
            n,
            replications,
            seed,
        } => {
            let summary = gumbel_max_check(n, replications, seed).map_err(|e| anyhow::anyhow!("{e}"))?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Influence {
            input,
            gamma,
            alphas,
            out_prefix,
        } => {
            let path = io::read_path_csv(&input)?;
            let design = build_design(&path, gamma).map_err(|e| anyhow::anyhow!("{e}"))?;
            let alphas: Vec<f64> = alphas
                .split(',')
                .map(|s| s.trim().parse::<f64>().with_context(|| format!("alpha '{s}'")))
                .collect::<Result<_>>()?;
            for alpha in alphas {
                let estimate = fit(&path, gamma, alpha)?;
                let profile = influence_profile(&estimate, &design, alpha);
                let file = PathBuf::from(format!("{out_prefix}_alpha{alpha}.csv"));
                io::write_influence_csv(&profile, &file)?;
                eprintln!("wrote {}", file.display());
            }
        }
    }
    Ok(())
}
