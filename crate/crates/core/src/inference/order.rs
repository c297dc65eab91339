//! Seasonal order identification for PAR and PMA models from null bands.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flocmeasures::{null_bands, FlocEstimator, Measure, NullBands};
use crate::heavytail::FlocParams;
use crate::procgen::PeriodicSeries;
use crate::rng::Substreams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Par,
    Pma,
}

impl Family {
    pub fn measure(self) -> Measure {
        match self {
            Family::Par => Measure::Peflopacf,
            Family::Pma => Measure::Pefloacf,
        }
    }

    /// `1..=h_max` for PAR, `±1..=±h_max` for PMA.
    pub fn lags(self, h_max: usize) -> Vec<i64> {
        let h = h_max as i64;
        match self {
            Family::Par => (1..=h).collect(),
            Family::Pma => (-h..=h).filter(|&k| k != 0).collect(),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "par" => Ok(Family::Par),
            "pma" => Ok(Family::Pma),
            other => Err(Error::Parameter(format!("unknown model family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderResult {
    pub family: Family,
    /// `p(v)` or `q(v)` for `v = 1..=T`.
    pub seasonal: Vec<usize>,
    pub global: usize,
    pub bands: NullBands,
    /// Sample measure per season, lags in `bands.lags` order. NaN where the system was singular.
    pub values: Vec<Vec<f64>>,
    /// Outside-band flags, same layout as `values`.
    pub per_lag_flags: Vec<Vec<bool>>,
    /// `(v, h)` pairs whose system was singular and counted as inside the band.
    pub singular: Vec<(usize, i64)>,
}

/// Applies precomputed bands to `series`.
pub fn identify_with_bands(series: &PeriodicSeries, family: Family, bands: &NullBands) -> Result<OrderResult> {
    if bands.measure != family.measure() {
        return Err(Error::Parameter(format!("{} bands cannot identify a {family:?} order", bands.measure)));
    }
    if bands.period != series.period() || bands.nt != series.len() {
        return Err(Error::Parameter(format!(
            "bands are for NT={}, T={} but the series has NT={}, T={}",
            bands.nt,
            bands.period,
            series.len(),
            series.period()
        )));
    }
    let est = FlocEstimator::new(series, bands.params);
    let max_lag = bands.lags.iter().map(|h| h.unsigned_abs() as usize).max().unwrap_or(0);
    let grid = est.acf_grid(max_lag)?;
    let period = series.period();
    let (mut values, mut flags, mut seasonal, mut singular) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for v in 1..=period {
        let (mut row, mut row_flags, mut order) = (Vec::new(), Vec::new(), 0usize);
        for &h in &bands.lags {
            let value = match family {
                Family::Pma => grid.get(v as i64, h),
                Family::Par => match grid.partial(v, h as usize) {
                    Ok(z) => z,
                    Err(Error::Singular { condition, .. }) => {
                        warn!("singular partial autocorrelation system at v={v}, h={h} (condition {condition:e}); treated as inside the band");
                        singular.push((v, h));
                        f64::NAN
                    }
                    Err(e) => return Err(e),
                },
            };
            let outside = !value.is_nan() && !bands.contains(h, value).unwrap_or(true);
            if outside {
                order = order.max(h.unsigned_abs() as usize);
            }
            row.push(value);
            row_flags.push(outside);
        }
        values.push(row);
        flags.push(row_flags);
        seasonal.push(order);
    }
    Ok(OrderResult {
        family,
        global: seasonal.iter().copied().max().unwrap_or(0),
        seasonal,
        bands: bands.clone(),
        values,
        per_lag_flags: flags,
        singular,
    })
}

fn check_common(h_max: usize, d: f64) -> Result<()> {
    if h_max == 0 {
        return Err(Error::Parameter("h_max must be at least 1".into()));
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::Parameter(format!("confidence level must lie in (0, 1), got {d}")));
    }
    Ok(())
}

/// Partial-autocorrelation parameters `A = 1`, `B = b_exp`, checked against `α`.
pub fn par_params(alpha: f64, b_exp: f64) -> Result<FlocParams> {
    FlocParams::partial(b_exp, alpha)
}

pub fn par_bands(alpha: f64, b_exp: f64, nt: usize, period: usize, h_max: usize, d: f64, m: usize, seeds: Substreams) -> Result<NullBands> {
    check_common(h_max, d)?;
    let fp = par_params(alpha, b_exp)?;
    null_bands(Measure::Peflopacf, alpha, nt, period, &Family::Par.lags(h_max), &fp, d, m, seeds)
}

pub fn pma_bands(alpha: f64, fp: &FlocParams, nt: usize, period: usize, h_max: usize, d: f64, m: usize, seeds: Substreams) -> Result<NullBands> {
    check_common(h_max, d)?;
    if !(fp.total() < alpha) {
        return Err(Error::Parameter(format!("A + B = {} must be below α = {alpha}", fp.total())));
    }
    null_bands(Measure::Pefloacf, alpha, nt, period, &Family::Pma.lags(h_max), fp, d, m, seeds)
}

#[allow(clippy::too_many_arguments)]
pub fn identify_par_order(series: &PeriodicSeries, alpha: f64, b_exp: f64, h_max: usize, d: f64, m: usize, seeds: Substreams) -> Result<OrderResult> {
    let bands = par_bands(alpha, b_exp, series.len(), series.period(), h_max, d, m, seeds)?;
    identify_with_bands(series, Family::Par, &bands)
}

#[allow(clippy::too_many_arguments)]
pub fn identify_pma_order(series: &PeriodicSeries, alpha: f64, fp: &FlocParams, h_max: usize, d: f64, m: usize, seeds: Substreams) -> Result<OrderResult> {
    let bands = pma_bands(alpha, fp, series.len(), series.period(), h_max, d, m, seeds)?;
    identify_with_bands(series, Family::Pma, &bands)
}
