//! Library half of the command-line harness: experiment configuration, CSV
//! and report I/O, and the deterministic replication-grid runner. The binary
//! in `main.rs` is a thin clap front end over these modules.

pub mod config;
pub mod grid;
pub mod io;

pub use config::{parse_threshold_flag, ExperimentConfig};
pub use grid::{
    grid_points, run_grid, run_grid_to_dir, run_single, with_thread_cap, GridOutput, GridPoint,
    GridResultRow, GridSummaryRow, RowStatus,
};
