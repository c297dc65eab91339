//! Monte Carlo averaging of sample measures and null confidence bands.

use std::io::Write;

use log::warn;
use serde::{Deserialize, Serialize};

use super::{FlocEstimator, Measure, SeasonalLagTable};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::heavytail::{sample_sym_stable, FlocParams, StableParams};
use crate::io::fmt_f64;
use crate::procgen::{gen_parma, PeriodicModel, PeriodicSeries};
use crate::rng::Substreams;
use crate::stats::{compensated_sum, quantile_sorted, sort_floats};

/// Fraction of dropped trajectories above which a calibration warning is logged.
pub const DROP_WARN_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McAverage {
    pub table: SeasonalLagTable,
    pub used: usize,
    /// Trajectories discarded because a partial-autocorrelation system was singular.
    pub dropped: usize,
}

/// Element-wise mean of a sample measure over `n_traj` simulated trajectories of length `nt`.
pub fn mc_average_table(
    model: &PeriodicModel,
    measure: Measure,
    lags: &[i64],
    fp: &FlocParams,
    n_traj: usize,
    nt: usize,
    seeds: Substreams,
) -> Result<McAverage> {
    if n_traj == 0 {
        return Err(Error::Parameter("at least one trajectory is required".into()));
    }
    let n_cycles = cycles_for(nt, model.period())?;
    let results = map_indexed(n_traj, |i| -> Result<Option<Vec<f64>>> {
        let series = gen_parma(model, n_cycles, &mut seeds.stream(i as u64), None)?;
        match FlocEstimator::new(&series, *fp).table(measure, lags) {
            Ok(t) => Ok(Some(t.values)),
            Err(Error::Singular { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let mut kept = Vec::with_capacity(n_traj);
    for r in results {
        if let Some(v) = r? {
            kept.push(v);
        }
    }
    let dropped = n_traj - kept.len();
    if kept.is_empty() {
        return Err(Error::Estimation("every trajectory produced a singular system".into()));
    }
    if dropped as f64 > DROP_WARN_FRACTION * n_traj as f64 {
        warn!("{dropped} of {n_traj} trajectories dropped for singular systems");
    }
    let width = kept[0].len();
    let values = (0..width)
        .map(|k| compensated_sum(kept.iter().map(|v| v[k])) / kept.len() as f64)
        .collect();
    let table = SeasonalLagTable::from_parts(measure, model.period(), lags.to_vec(), values, *fp)?;
    Ok(McAverage { table, used: kept.len(), dropped })
}

fn cycles_for(nt: usize, period: usize) -> Result<usize> {
    if nt == 0 || !nt.is_multiple_of(period) {
        return Err(Error::Parameter(format!("length {nt} is not a positive multiple of the period {period}")));
    }
    Ok(nt / period)
}

/// Per-lag two-sided empirical bands `(Q_{(1−d)/2}(h), Q_{1−(1−d)/2}(h))` of a
/// sample measure at season 1 under i.i.d. `S(α, 1)` data; reused for every season.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullBands {
    pub measure: Measure,
    pub lags: Vec<i64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
    /// Requested calibration size.
    pub m: usize,
    /// Draws that entered the quantiles (singular systems excluded).
    pub used: usize,
    pub alpha: f64,
    pub nt: usize,
    pub period: usize,
    pub params: FlocParams,
}

impl NullBands {
    pub fn band(&self, lag: i64) -> Option<(f64, f64)> {
        let j = self.lags.iter().position(|&h| h == lag)?;
        Some((self.lower[j], self.upper[j]))
    }

    /// True when `value` lies strictly inside the open band for `lag`.
    pub fn contains(&self, lag: i64, value: f64) -> Option<bool> {
        self.band(lag).map(|(lo, hi)| value > lo && value < hi)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["h", "lower", "upper"])?;
        for (j, h) in self.lags.iter().enumerate() {
            w.write_record([h.to_string(), fmt_f64(self.lower[j]), fmt_f64(self.upper[j])])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sample measure at season 1 for each lag, on one null trajectory.
/// `Ok(None)` marks a singular partial-autocorrelation system.
pub(crate) fn season_one_values(series: &PeriodicSeries, measure: Measure, lags: &[i64], fp: &FlocParams) -> Result<Option<Vec<f64>>> {
    let est = FlocEstimator::new(series, *fp);
    let max_lag = lags.iter().map(|h| h.unsigned_abs() as usize).max().unwrap_or(0);
    let grid = match measure {
        Measure::Pefloacvf => est.acvf_grid(max_lag)?,
        _ => est.acf_grid(max_lag)?,
    };
    let mut out = Vec::with_capacity(lags.len());
    for &h in lags {
        let v = match measure {
            Measure::Peflopacf => match grid.partial(1, h as usize) {
                Ok(v) => v,
                Err(Error::Singular { .. }) => return Ok(None),
                Err(e) => return Err(e),
            },
            _ => grid.get(1, h),
        };
        out.push(v);
    }
    Ok(Some(out))
}

#[allow(clippy::too_many_arguments)]
pub fn null_bands(
    measure: Measure,
    alpha: f64,
    nt: usize,
    period: usize,
    lags: &[i64],
    fp: &FlocParams,
    level: f64,
    m: usize,
    seeds: Substreams,
) -> Result<NullBands> {
    if m < 100 {
        return Err(Error::Parameter(format!("calibration size must be at least 100, got {m}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Parameter(format!("confidence level must lie in (0, 1), got {level}")));
    }
    if lags.is_empty() {
        return Err(Error::Parameter("no lags requested".into()));
    }
    if measure == Measure::Peflopacf && lags.iter().any(|&h| h < 1) {
        return Err(Error::Parameter("partial autocorrelation bands need lags ≥ 1".into()));
    }
    let n_cycles = cycles_for(nt, period)?;
    let law = StableParams::standard(alpha)?;
    let draws = map_indexed(m, |i| {
        let x = sample_sym_stable(&law, n_cycles * period, &mut seeds.stream(i as u64));
        let series = PeriodicSeries::new(x, period)?;
        season_one_values(&series, measure, lags, fp)
    });
    let mut per_lag: Vec<Vec<f64>> = vec![Vec::with_capacity(m); lags.len()];
    for d in draws {
        if let Some(vals) = d? {
            for (slot, v) in per_lag.iter_mut().zip(vals) {
                slot.push(v);
            }
        }
    }
    let used = per_lag[0].len();
    if used == 0 {
        return Err(Error::Estimation("every calibration draw produced a singular system".into()));
    }
    if (m - used) as f64 > DROP_WARN_FRACTION * m as f64 {
        warn!("{} of {m} calibration draws dropped for singular systems", m - used);
    }
    let lo_p = (1.0 - level) / 2.0;
    let hi_p = 1.0 - lo_p;
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    for mut vals in per_lag {
        sort_floats(&mut vals);
        lower.push(quantile_sorted(&vals, lo_p));
        upper.push(quantile_sorted(&vals, hi_p));
    }
    Ok(NullBands {
        measure,
        lags: lags.to_vec(),
        lower,
        upper,
        level,
        m,
        used,
        alpha,
        nt,
        period,
        params: *fp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trajectory_average_equals_sample_measure() {
        let m = PeriodicModel::pma(vec![vec![0.8], vec![-0.3]], 1.7, 1.0).unwrap();
        let fp = FlocParams::for_alpha(0.8, 0.8, 1.7).unwrap();
        let lags: Vec<i64> = (-3..=3).collect();
        let seeds = Substreams::new(10);
        let avg = mc_average_table(&m, Measure::Pefloacf, &lags, &fp, 1, 200, seeds).unwrap();
        let series = gen_parma(&m, 100, &mut seeds.stream(0), None).unwrap();
        let direct = FlocEstimator::new(&series, fp).table(Measure::Pefloacf, &lags).unwrap();
        assert_eq!(avg.table, direct);
        assert_eq!((avg.used, avg.dropped), (1, 0));
    }

    #[test]
    fn bands_widen_with_level() {
        let fp = FlocParams::for_alpha(0.8, 0.8, 1.7).unwrap();
        let lags = [-2, -1, 1, 2];
        let s = Substreams::new(4);
        let b90 = null_bands(Measure::Pefloacf, 1.7, 200, 2, &lags, &fp, 0.90, 400, s).unwrap();
        let b99 = null_bands(Measure::Pefloacf, 1.7, 200, 2, &lags, &fp, 0.99, 400, s).unwrap();
        for j in 0..lags.len() {
            assert!(b90.lower[j] < b90.upper[j]);
            assert!(b99.lower[j] <= b90.lower[j] && b99.upper[j] >= b90.upper[j]);
        }
        assert!(b99.band(-2).is_some() && b99.band(0).is_none());
    }

    #[test]
    fn band_argument_validation() {
        let fp = FlocParams::for_alpha(0.8, 0.8, 1.7).unwrap();
        let s = Substreams::new(1);
        assert!(null_bands(Measure::Pefloacf, 1.7, 200, 2, &[1], &fp, 0.99, 99, s).is_err());
        assert!(null_bands(Measure::Pefloacf, 1.7, 200, 2, &[1], &fp, 1.0, 200, s).is_err());
        assert!(null_bands(Measure::Pefloacf, 1.7, 201, 2, &[1], &fp, 0.9, 200, s).is_err());
        let pfp = FlocParams::partial(0.6, 1.7).unwrap();
        assert!(null_bands(Measure::Peflopacf, 1.7, 200, 2, &[0, 1], &pfp, 0.9, 200, s).is_err());
    }

    #[test]
    fn mode_does_not_change_results() {
        use crate::exec::{set_mode, Mode};
        let fp = FlocParams::partial(0.6, 1.7).unwrap();
        let s = Substreams::new(77);
        set_mode(Mode::Sequential);
        let a = null_bands(Measure::Peflopacf, 1.7, 100, 2, &[1, 2, 3], &fp, 0.95, 200, s).unwrap();
        set_mode(Mode::Parallel);
        let b = null_bands(Measure::Peflopacf, 1.7, 100, 2, &[1, 2, 3], &fp, 0.95, 200, s).unwrap();
        assert_eq!(a, b);
    }
}
