//! Seasonal FLOC Yule–Walker estimation of PAR coefficients, and residuals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flocmeasures::FlocEstimator;
use crate::heavytail::FlocParams;
use crate::procgen::PeriodicSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParFit {
    pub period: usize,
    pub b_exp: f64,
    /// `p(v)` for `v = 1..=T`.
    pub orders: Vec<usize>,
    /// `φ̂_1(v) ..= φ̂_{p(v)}(v)`; empty when `p(v) = 0`.
    pub coeffs: Vec<Vec<f64>>,
    /// `e_t` for `t > max_v p(v)`.
    pub residuals: Vec<f64>,
}

impl ParFit {
    pub fn max_order(&self) -> usize {
        self.orders.iter().copied().max().unwrap_or(0)
    }

    /// `φ̂_i(v)`, zero beyond `p(v)`.
    pub fn phi(&self, season: usize, lag: usize) -> f64 {
        self.coeffs[season - 1].get(lag - 1).copied().unwrap_or(0.0)
    }

    /// Coefficient table padded with zeros to the global order, season-major.
    pub fn padded(&self) -> Vec<Vec<f64>> {
        let p = self.max_order();
        (1..=self.period).map(|v| (1..=p).map(|i| self.phi(v, i)).collect()).collect()
    }
}

pub fn fit_par_yw(series: &PeriodicSeries, orders: &[usize], b_exp: f64) -> Result<ParFit> {
    let period = series.period();
    if orders.len() != period {
        return Err(Error::Shape(format!("{} seasonal orders for period {period}", orders.len())));
    }
    let p_max = orders.iter().copied().max().unwrap_or(0);
    let fp = FlocParams::partial(b_exp, f64::INFINITY)?;
    let mut coeffs = vec![Vec::new(); period];
    if p_max > 0 {
        let grid = FlocEstimator::new(series, fp).acvf_grid(p_max)?;
        for (v, &p) in orders.iter().enumerate() {
            if p > 0 {
                coeffs[v] = grid.yule_walker(v + 1, p).map_err(|e| Error::Fit {
                    season: v + 1,
                    reason: e.to_string(),
                })?;
            }
        }
    }
    let mut fit = ParFit { period, b_exp, orders: orders.to_vec(), coeffs, residuals: Vec::new() };
    fit.residuals = residuals(series, &fit);
    Ok(fit)
}

/// `e_t = x_t − Σ_i φ̂_i(t) x_{t−i}` for `t > max_v p(v)`.
pub fn residuals(series: &PeriodicSeries, fit: &ParFit) -> Vec<f64> {
    let x = series.values();
    let p_max = fit.max_order();
    (p_max..x.len())
        .map(|t| {
            let c = &fit.coeffs[t % fit.period];
            c.iter().enumerate().fold(x[t], |acc, (i, phi)| acc - phi * x[t - i - 1])
        })
        .collect()
}

/// Residuals trimmed to whole cycles so that seasons keep their labels.
pub fn residual_series(series: &PeriodicSeries, fit: &ParFit) -> Result<PeriodicSeries> {
    let skip_cycles = fit.max_order().div_ceil(fit.period);
    let skip = skip_cycles * fit.period - fit.max_order();
    let e = residuals(series, fit);
    if skip >= e.len() {
        return Err(Error::InsufficientData("no complete residual cycle".into()));
    }
    PeriodicSeries::new(e[skip..].to_vec(), fit.period)
}
