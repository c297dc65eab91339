//! Portmanteau test of periodic white noise against any dependence up to `h_max`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::flocmeasures::{wrap_season, FlocEstimator};
use crate::heavytail::{sample_sym_stable, FlocParams, StableParams};
use crate::procgen::PeriodicSeries;
use crate::rng::Substreams;
use crate::stats::{compensated_sum, quantile_sorted, sort_floats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortmanteauResult {
    /// `κ_v` for `v = 1..=T`.
    pub kappa: Vec<f64>,
    pub critical_value: f64,
    /// Per-subtest level `c / T`.
    pub subtest_level: f64,
    pub reject_any: bool,
    pub reject_by_season: Vec<bool>,
}

/// Null distribution of `κ_1` on i.i.d. `S(α, 1)` data, stored sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaNull {
    pub alpha: f64,
    pub nt: usize,
    pub period: usize,
    pub params: FlocParams,
    pub h_max: usize,
    pub seed: u64,
    pub kappas: Vec<f64>,
}

impl KappaNull {
    pub fn m(&self) -> usize {
        self.kappas.len()
    }

    /// `Q_{1−c/T}`.
    pub fn critical_value(&self, c: f64) -> Result<f64> {
        check_level(c)?;
        Ok(quantile_sorted(&self.kappas, 1.0 - c / self.period as f64))
    }
}

fn check_level(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Parameter(format!("significance level must lie in (0, 1), got {c}")));
    }
    Ok(())
}

fn check_setup(nt: usize, period: usize, alpha: f64, fp: &FlocParams, h_max: usize) -> Result<()> {
    if h_max == 0 {
        return Err(Error::Parameter("h_max must be at least 1".into()));
    }
    if !(fp.total() < alpha) {
        return Err(Error::Parameter(format!("A + B = {} must be below α = {alpha}", fp.total())));
    }
    if nt < 2 * period * h_max {
        return Err(Error::InsufficientData(format!(
            "length {nt} is below 2·T·h_max = {}",
            2 * period * h_max
        )));
    }
    Ok(())
}

fn kappa_at(est: &FlocEstimator<'_>, floms: &[f64], season: usize, h_max: usize) -> Result<f64> {
    let period = floms.len();
    let total = est.params().total();
    let (wa, wb) = (est.params().a_exp() / total, est.params().b_exp() / total);
    let here = floms[season - 1];
    let mut terms = Vec::with_capacity(2 * h_max);
    for h in (-(h_max as i64)..=h_max as i64).filter(|&h| h != 0) {
        let there = floms[wrap_season(season as i64 - h, period) - 1];
        if !(here > 0.0 && there > 0.0) {
            return Err(Error::Degenerate("a season has zero fractional lower-order moment".into()));
        }
        let eta = est.acvf(season, h)? / (here.powf(wa) * there.powf(wb));
        terms.push(eta * eta);
    }
    Ok(est.series().n_cycles() as f64 * compensated_sum(terms))
}

/// `κ_v = N Σ_{0<|h|≤h_max} η̂_v(h)²` for every season.
pub fn kappa_statistics(series: &PeriodicSeries, fp: &FlocParams, h_max: usize) -> Result<Vec<f64>> {
    let est = FlocEstimator::new(series, *fp);
    let floms: Vec<f64> = (1..=series.period()).map(|s| est.flom(s)).collect::<Result<_>>()?;
    (1..=series.period()).map(|v| kappa_at(&est, &floms, v, h_max)).collect()
}

/// Simulates `m` i.i.d. `S(α,1)` sequences of length `nt` and records `κ_1` for each.
pub fn calibrate_kappa(
    alpha: f64,
    nt: usize,
    period: usize,
    fp: &FlocParams,
    h_max: usize,
    m: usize,
    seeds: Substreams,
) -> Result<KappaNull> {
    check_setup(nt, period, alpha, fp, h_max)?;
    if m < 100 {
        return Err(Error::Parameter(format!("calibration size must be at least 100, got {m}")));
    }
    if !nt.is_multiple_of(period) {
        return Err(Error::Parameter(format!("length {nt} is not a multiple of the period {period}")));
    }
    let law = StableParams::standard(alpha)?;
    let draws = map_indexed(m, |i| {
        let x = sample_sym_stable(&law, nt, &mut seeds.stream(i as u64));
        let series = PeriodicSeries::new(x, period)?;
        let est = FlocEstimator::new(&series, *fp);
        let floms: Vec<f64> = (1..=period).map(|s| est.flom(s)).collect::<Result<_>>()?;
        kappa_at(&est, &floms, 1, h_max)
    });
    let mut kappas = draws.into_iter().collect::<Result<Vec<_>>>()?;
    sort_floats(&mut kappas);
    Ok(KappaNull { alpha, nt, period, params: *fp, h_max, seed: seeds.seed(), kappas })
}

/// Runs the test against a precomputed null distribution.
pub fn portmanteau_test_with_null(series: &PeriodicSeries, null: &KappaNull, c: f64) -> Result<PortmanteauResult> {
    if series.len() != null.nt || series.period() != null.period {
        return Err(Error::Parameter(format!(
            "calibration is for NT={}, T={} but the series has NT={}, T={}",
            null.nt,
            null.period,
            series.len(),
            series.period()
        )));
    }
    let critical_value = null.critical_value(c)?;
    let kappa = kappa_statistics(series, &null.params, null.h_max)?;
    let reject_by_season: Vec<bool> = kappa.iter().map(|&k| k > critical_value).collect();
    Ok(PortmanteauResult {
        reject_any: reject_by_season.iter().any(|&r| r),
        kappa,
        critical_value,
        subtest_level: c / series.period() as f64,
        reject_by_season,
    })
}

/// Calibrates on `m` null draws, then tests `series` at global level `c`.
#[allow(clippy::too_many_arguments)]
pub fn portmanteau_test(
    series: &PeriodicSeries,
    alpha: f64,
    fp: &FlocParams,
    h_max: usize,
    c: f64,
    m: usize,
    seeds: Substreams,
) -> Result<PortmanteauResult> {
    check_level(c)?;
    check_setup(series.len(), series.period(), alpha, fp, h_max)?;
    let null = calibrate_kappa(alpha, series.len(), series.period(), fp, h_max, m, seeds)?;
    portmanteau_test_with_null(series, &null, c)
}

/// Sequential form that stops at the first rejecting season.
pub fn portmanteau_rejects(series: &PeriodicSeries, null: &KappaNull, c: f64) -> Result<bool> {
    let q = null.critical_value(c)?;
    let est = FlocEstimator::new(series, null.params);
    let floms: Vec<f64> = (1..=series.period()).map(|s| est.flom(s)).collect::<Result<_>>()?;
    for v in 1..=series.period() {
        if kappa_at(&est, &floms, v, null.h_max)? > q {
            return Ok(true);
        }
    }
    Ok(false)
}
