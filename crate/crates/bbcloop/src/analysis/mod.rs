//! Time-domain, frequency-domain, and pole-zero characterization.

pub mod expm;
pub mod freq;
pub mod pz;
pub mod step;

pub use freq::{
    bode_table_report, frequency_response, log_grid, stability_margins, BodeRow, FrequencyPoint,
    GainMarginPoint, MarginReport, PhaseMarginPoint, RowKind,
};
pub use pz::{pole_zero_report, Offender, PoleZeroReport, RootKind, StabilityClass, BOUNDARY_TOL};
pub use step::{
    step_metrics, step_metrics_with, step_response, underdamped_overshoot_pct, MetricsConfig,
    StepMetrics, TimeSeries,
};
