use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heavytail::estimate_alpha;
use crate::procgen::PeriodicSeries;
use crate::stats::median;

pub const HUBER_K: f64 = 1.345;
const MAD_SCALE: f64 = 1.4826;
const REL_TOL: f64 = 1e-8;
const MAX_ITER: usize = 100;

/// Huber M-estimate of location with MAD scale, by iterative reweighting.
pub fn huber_location(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData("Huber location of an empty sample".into()));
    }
    let mut mu = median(values);
    let dev: Vec<f64> = values.iter().map(|x| (x - mu).abs()).collect();
    let scale = MAD_SCALE * median(&dev);
    if scale == 0.0 {
        // more than half the sample sits at the median
        return Ok(mu);
    }
    let cut = HUBER_K * scale;
    for _ in 0..MAX_ITER {
        let (mut num, mut den) = (0.0, 0.0);
        for &x in values {
            let r = (x - mu).abs();
            let w = if r <= cut { 1.0 } else { cut / r };
            num += w * x;
            den += w;
        }
        let next = num / den;
        let done = (next - mu).abs() <= REL_TOL * next.abs().max(scale);
        mu = next;
        if done {
            break;
        }
    }
    Ok(mu)
}

/// `log x_t` centred by the per-season Huber location of the logs.
pub fn preprocess_log_huber(series: &PeriodicSeries) -> Result<PeriodicSeries> {
    if let Some(i) = series.values().iter().position(|&x| !(x > 0.0)) {
        return Err(Error::Preprocess(format!(
            "value {} at index {} is not positive; the log transform needs positive data",
            series.values()[i],
            i + 1
        )));
    }
    let logs = series.map(f64::ln)?;
    let centres: Vec<f64> = (1..=series.period())
        .map(|v| huber_location(&logs.season_values(v).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let period = series.period();
    let y = logs.values().iter().enumerate().map(|(i, &x)| x - centres[i % period]).collect();
    PeriodicSeries::new(y, period)
}

/// Per-season α estimates. These treat each season's values as an i.i.d.
/// sample, which dependent data are not, so read them as a rough guide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalAlpha {
    pub per_season: Vec<Option<f64>>,
    pub advisory: bool,
}

pub fn seasonal_alpha(series: &PeriodicSeries) -> SeasonalAlpha {
    let per_season = (1..=series.period())
        .map(|v| estimate_alpha(&series.season_values(v).collect::<Vec<_>>()).ok())
        .collect();
    SeasonalAlpha { per_season, advisory: true }
}
