//! Portmanteau testing, order identification and Yule–Walker fitting.

mod calibration;
mod fit;
mod order;
mod portmanteau;
pub mod report;

pub use calibration::{CalibrationCache, CalibrationKey, CACHE_DIR_ENV};
pub use fit::{fit_par_yw, residual_series, residuals, ParFit};
pub use order::{
    identify_par_order, identify_pma_order, identify_with_bands, par_bands, par_params, pma_bands, Family,
    OrderResult,
};
pub use portmanteau::{
    calibrate_kappa, kappa_statistics, portmanteau_rejects, portmanteau_test, portmanteau_test_with_null,
    KappaNull, PortmanteauResult,
};
