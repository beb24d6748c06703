//! Sweep orchestration over the `(N, h)` grid, the on-disk record cache,
//! report assembly and the plot-ready output files.

mod config;
mod output;
mod record;
mod report;
mod sweep;

pub use config::{AlphaGridSpec, SweepConfig, Tolerances};
pub use output::{
    write_all, write_fit_json, write_minima_csv, write_profiles_csv, write_renyi_csv, write_report_json,
    write_spectra_csv, write_verdicts_csv, FitSummary,
};
pub use record::{cache_path, Diagnostics, SweepRecord, FORMAT_VERSION};
pub use report::{build_report, RegionSummary, ReportBundle, SizeReport, VerdictStep};
pub use sweep::{run_sweep, solve_point, PointFailure, SweepOutput};
