//! Data ingestion, preprocessing and Monte Carlo replication grids.

mod grid;
mod ingest;
mod manifest;
mod preprocess;
mod workflow;

pub use grid::{
    default_coefficients, replicate_order_grid, replicate_power_grid, CellRates, ExperimentGrid, GridKind,
    GridTable, GRID_PERIOD,
};
pub use ingest::{ingest_csv, ingest_reader, write_series_csv, ColumnSelector};
pub use manifest::RunManifest;
pub use preprocess::{huber_location, preprocess_log_huber, seasonal_alpha, SeasonalAlpha, HUBER_K};
pub use workflow::{fit_workflow, FitConfig, FitReport};
