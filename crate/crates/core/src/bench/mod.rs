//! Benchmark harness: SSBM sweeps over the community gap, parameter scans
//! and partition agreement metrics.

pub mod config;
pub mod metrics;
pub mod scan;
pub mod sweep;

pub use config::{solve_bin_bout, Method, SweepConfig};
pub use metrics::{ari, spearman};
pub use scan::{
    beta2_scan_configs, scan_beta2_modularity, scan_gap_surface, write_beta2_csv, write_gap_csv,
    Beta2Row, GapRow,
};
pub use sweep::{row_seed, run_sweep, summarize, write_csv, write_summary_csv, SummaryRow, SweepRow};
