//! Monte Carlo sweep harness and its CSV output.

pub mod config;
pub mod csv_io;
pub mod sweep;

pub use config::{noise_variance_from_db, Scheme, SimConfig};
pub use csv_io::{emit_csv, emit_csv_with, format_sig12, load_csv, plot_script, read_csv, write_csv, CSV_HEADER};
pub use sweep::{run_sweep, run_sweep_threads, run_sweep_with, GainSource, RayleighSource, SweepRecord};
