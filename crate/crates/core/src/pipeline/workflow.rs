//! Identify → fit → residual diagnostics, on one series.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::heavytail::FlocParams;
use crate::inference::{
    fit_par_yw, identify_with_bands, portmanteau_test_with_null, residual_series, CalibrationCache, Family,
    OrderResult, ParFit, PortmanteauResult,
};
use crate::procgen::PeriodicSeries;
use crate::rng::Substreams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub alpha: f64,
    /// `B` of the partial autocorrelation used for identification and fitting.
    pub b_exp: f64,
    pub id_h_max: usize,
    pub d: f64,
    /// Exponents of the residual portmanteau test.
    pub test_params: FlocParams,
    pub test_h_max: usize,
    pub c: f64,
    pub m: usize,
    /// Skip identification and use these seasonal orders.
    pub orders: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub identification: Option<OrderResult>,
    pub fit: ParFit,
    pub residual_test: PortmanteauResult,
}

/// Band calibration uses `seeds.derive(0)`, the residual test `seeds.derive(1)`.
pub fn fit_workflow(series: &PeriodicSeries, cfg: &FitConfig, seeds: Substreams, cache: &CalibrationCache) -> Result<FitReport> {
    let period = series.period();
    let identification = match &cfg.orders {
        Some(_) => None,
        None => {
            let fp = FlocParams::partial(cfg.b_exp, cfg.alpha)?;
            let bands = cache.order_bands(Family::Par, cfg.alpha, &fp, series.len(), period, cfg.id_h_max, cfg.d, cfg.m, seeds.derive(0))?;
            Some(identify_with_bands(series, Family::Par, &bands)?)
        }
    };
    let orders = match (&cfg.orders, &identification) {
        (Some(o), _) => o.clone(),
        (None, Some(r)) => r.seasonal.clone(),
        (None, None) => unreachable!(),
    };
    let fit = fit_par_yw(series, &orders, cfg.b_exp)?;
    let resid = residual_series(series, &fit)?;
    let null = cache.kappa_null(cfg.alpha, resid.len(), period, &cfg.test_params, cfg.test_h_max, cfg.m, seeds.derive(1))?;
    let residual_test = portmanteau_test_with_null(&resid, &null, cfg.c)?;
    Ok(FitReport { identification, fit, residual_test })
}
