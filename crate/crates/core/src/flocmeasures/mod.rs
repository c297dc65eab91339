//! Periodic FLOC-based autodependence measures and their sample estimators.
//!
//! For a sample `x_1..x_{NT}` with period `T`:
//!
//! * `ψ̂_v(h) = (1/N) Σ_{n=l_b}^{r_b} x_{nT+v}^<A> · x_{nT+v−h}^<B>` (peFLOACVF), where
//!   `[l_b, r_b]` is the range of cycles for which both indices fall inside the sample.
//!   The divisor stays `N` even when the window is shorter.
//! * `η̂_v(h) = ψ̂_v(h) / (ψ̂_v(0)^{A/(A+B)} · ψ̂_{v−h}(0)^{B/(A+B)})` (peFLOACF), a
//!   FLOM-standardised, scale-invariant version.
//! * `ζ̂_v(h)` (peFLOPACF): last component of the solution of the `h × h` system
//!   `H_{v,h} φ = [η̂_v(1), …, η̂_v(h)]ᵀ` with `(H_{v,h})_{i,j} = η̂_{v−j}(i−j)` and `A = 1`.
//!   The variant built from raw `ψ̂` entries is also provided.
//!
//! Season arguments are 1-based; an arbitrary integer season `s` is wrapped to
//! `((s − 1) mod T) + 1`.

mod linalg;
mod montecarlo;
mod table;

pub use linalg::CONDITION_LIMIT;
pub use montecarlo::{mc_average_table, null_bands, McAverage, NullBands};
pub use table::{Measure, SeasonalLagTable};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::heavytail::{signed_power_unchecked, FlocParams};
use crate::procgen::PeriodicSeries;

/// Wrap an arbitrary integer season into `1..=period`.
pub fn wrap_season(season: i64, period: usize) -> usize {
    ((season - 1).rem_euclid(period as i64) + 1) as usize
}

/// Cycle window `[l_b, r_b]` of the estimator sum (may be empty: `l_b > r_b`).
pub fn window_bounds(nt: usize, period: usize, season: usize, lag: i64) -> (i64, i64) {
    let (nt, t, v) = (nt as i64, period as i64, season as i64);
    let ceil_div = |a: i64| -((-a).div_euclid(t));
    let floor_div = |a: i64| a.div_euclid(t);
    let lb = ceil_div(1 - v).max(ceil_div(1 - (v - lag)));
    let rb = floor_div(nt - v).min(floor_div(nt - (v - lag)));
    (lb, rb)
}

/// Precomputed signed powers of one series, shared by all lag/season queries.
#[derive(Debug, Clone)]
pub struct FlocEstimator<'a> {
    series: &'a PeriodicSeries,
    fp: FlocParams,
    pow_a: Vec<f64>,
    pow_b: Option<Vec<f64>>,
}

impl<'a> FlocEstimator<'a> {
    pub fn new(series: &'a PeriodicSeries, fp: FlocParams) -> Self {
        let pow_a: Vec<f64> = series.values().iter().map(|&x| signed_power_unchecked(x, fp.a_exp())).collect();
        let pow_b = (fp.b_exp() != fp.a_exp())
            .then(|| series.values().iter().map(|&x| signed_power_unchecked(x, fp.b_exp())).collect());
        Self { series, fp, pow_a, pow_b }
    }

    pub fn params(&self) -> &FlocParams {
        &self.fp
    }

    pub fn series(&self) -> &PeriodicSeries {
        self.series
    }

    fn period(&self) -> usize {
        self.series.period()
    }

    fn check_season(&self, season: usize) -> Result<()> {
        if season == 0 || season > self.period() {
            return Err(Error::Parameter(format!("season {season} outside 1..={}", self.period())));
        }
        Ok(())
    }

    /// Sample peFLOACVF `ψ̂_v(h)`.
    pub fn acvf(&self, season: usize, lag: i64) -> Result<f64> {
        self.check_season(season)?;
        let period = self.period() as i64;
        let (lb, rb) = window_bounds(self.series.len(), self.period(), season, lag);
        if lb > rb {
            return Err(Error::InsufficientData(format!(
                "no cycle pairs season {season} with lag {lag} in a sample of length {}",
                self.series.len()
            )));
        }
        let pow_b = self.pow_b.as_deref().unwrap_or(&self.pow_a);
        let mut sum = 0.0;
        for n in lb..=rb {
            // 1-based t = nT + v  ->  0-based index t − 1
            let t = (n * period + season as i64 - 1) as usize;
            let s = (t as i64 - lag) as usize;
            sum += self.pow_a[t] * pow_b[s];
        }
        Ok(sum / self.series.n_cycles() as f64)
    }

    /// Seasonal FLOM `ψ̂_v(0)`; zero means the season is identically zero.
    pub fn flom(&self, season: usize) -> Result<f64> {
        self.acvf(season, 0)
    }

    /// Sample peFLOACF `η̂_v(h)`; exactly 1 at lag 0.
    pub fn acf(&self, season: usize, lag: i64) -> Result<f64> {
        let num = self.acvf(season, lag)?;
        let other = wrap_season(season as i64 - lag, self.period());
        let d_here = self.flom(season)?;
        let d_there = self.flom(other)?;
        self.standardize(num, season, lag, d_here, d_there)
    }

    fn standardize(&self, num: f64, season: usize, lag: i64, d_here: f64, d_there: f64) -> Result<f64> {
        if !(d_here > 0.0) || !(d_there > 0.0) {
            let which = if d_here > 0.0 { wrap_season(season as i64 - lag, self.period()) } else { season };
            return Err(Error::Degenerate(format!("season {which} has zero fractional lower-order moment")));
        }
        if lag == 0 {
            return Ok(1.0);
        }
        let total = self.fp.total();
        Ok(num / (d_here.powf(self.fp.a_exp() / total) * d_there.powf(self.fp.b_exp() / total)))
    }

    /// Every `η̂_s(h)` for `s ∈ 1..=T`, `|h| ≤ max_lag`.
    pub fn acf_grid(&self, max_lag: usize) -> Result<LagGrid> {
        let floms: Vec<f64> = (1..=self.period()).map(|s| self.flom(s)).collect::<Result<_>>()?;
        self.grid(max_lag, |s, h| {
            let num = self.acvf(s, h)?;
            let other = wrap_season(s as i64 - h, self.period());
            self.standardize(num, s, h, floms[s - 1], floms[other - 1])
        })
    }

    /// Every `ψ̂_s(h)` for `s ∈ 1..=T`, `|h| ≤ max_lag`.
    pub fn acvf_grid(&self, max_lag: usize) -> Result<LagGrid> {
        self.grid(max_lag, |s, h| self.acvf(s, h))
    }

    fn grid(&self, max_lag: usize, f: impl Fn(usize, i64) -> Result<f64>) -> Result<LagGrid> {
        let width = 2 * max_lag + 1;
        let mut values = Vec::with_capacity(self.period() * width);
        for s in 1..=self.period() {
            for h in -(max_lag as i64)..=max_lag as i64 {
                values.push(f(s, h)?);
            }
        }
        Ok(LagGrid { period: self.period(), max_lag, values })
    }

    /// Sample peFLOPACF `ζ̂_v(h)` (η̂-based system). Requires `A = 1`.
    pub fn pacf(&self, season: usize, lag: usize) -> Result<f64> {
        self.require_unit_a()?;
        self.check_season(season)?;
        let grid = self.acf_grid(lag)?;
        grid.partial(season, lag)
    }

    /// `ζ̂_v(h)` from the system with raw `ψ̂` entries. Requires `A = 1`.
    pub fn pacf_acvf_variant(&self, season: usize, lag: usize) -> Result<f64> {
        self.require_unit_a()?;
        self.check_season(season)?;
        let grid = self.acvf_grid(lag)?;
        grid.partial(season, lag)
    }

    fn require_unit_a(&self) -> Result<()> {
        if self.fp.a_exp() != 1.0 {
            return Err(Error::Parameter(format!(
                "partial autocorrelation needs A = 1, got A = {}",
                self.fp.a_exp()
            )));
        }
        Ok(())
    }

    /// Table of `measure` over all seasons and the given lags.
    pub fn table(&self, measure: Measure, lags: &[i64]) -> Result<SeasonalLagTable> {
        let max_lag = lags.iter().map(|h| h.unsigned_abs() as usize).max().unwrap_or(0);
        let grid = match measure {
            Measure::Pefloacvf => self.acvf_grid(max_lag)?,
            Measure::Pefloacf | Measure::Peflopacf => self.acf_grid(max_lag)?,
        };
        if measure == Measure::Peflopacf {
            self.require_unit_a()?;
            if let Some(h) = lags.iter().find(|h| **h < 1) {
                return Err(Error::Parameter(format!("partial autocorrelation is defined for lags ≥ 1, got {h}")));
            }
        }
        let mut values = Vec::with_capacity(self.period() * lags.len());
        for s in 1..=self.period() {
            for &h in lags {
                values.push(match measure {
                    Measure::Peflopacf => grid.partial(s, h as usize)?,
                    _ => grid.get(s as i64, h),
                });
            }
        }
        SeasonalLagTable::from_parts(measure, self.period(), lags.to_vec(), values, self.fp)
    }
}

/// Dense `(season, lag)` grid of a measure, lags `−max_lag..=max_lag`.
#[derive(Debug, Clone)]
pub struct LagGrid {
    period: usize,
    max_lag: usize,
    values: Vec<f64>,
}

impl LagGrid {
    /// Value at an arbitrary integer season (wrapped) and lag.
    pub fn get(&self, season: i64, lag: i64) -> f64 {
        let s = wrap_season(season, self.period);
        assert!(lag.unsigned_abs() as usize <= self.max_lag, "lag {lag} outside grid");
        self.values[(s - 1) * (2 * self.max_lag + 1) + (lag + self.max_lag as i64) as usize]
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    /// Last component of the solution of the `h × h` Yule–Walker-type system
    /// with entries `g_{v−j}(i−j)` and right-hand side `g_v(1..h)`.
    pub fn partial(&self, season: usize, h: usize) -> Result<f64> {
        self.yule_walker(season, h).map(|phi| phi[h - 1])
    }

    /// Full solution vector of the order-`h` system for `season`.
    pub fn yule_walker(&self, season: usize, h: usize) -> Result<Vec<f64>> {
        if h == 0 {
            return Err(Error::Parameter("system order must be at least 1".into()));
        }
        if h > self.max_lag {
            return Err(Error::Parameter(format!("order {h} exceeds grid lag range {}", self.max_lag)));
        }
        let v = season as i64;
        let m = DMatrix::from_fn(h, h, |i, j| {
            let (i, j) = (i as i64 + 1, j as i64 + 1);
            self.get(v - j, i - j)
        });
        let rhs = DVector::from_fn(h, |i, _| self.get(v, i as i64 + 1));
        linalg::solve_checked(m, &rhs)
            .map(|x| x.iter().copied().collect())
            .map_err(|condition| Error::Singular { season, lag: h, condition })
    }
}

pub fn sample_pefloacvf(series: &PeriodicSeries, season: usize, lag: i64, fp: &FlocParams) -> Result<f64> {
    FlocEstimator::new(series, *fp).acvf(season, lag)
}

pub fn sample_pefloacf(series: &PeriodicSeries, season: usize, lag: i64, fp: &FlocParams) -> Result<f64> {
    FlocEstimator::new(series, *fp).acf(season, lag)
}

/// `ζ̂_v(h)` with `A = 1` and `B = b_exp`. The moment condition `1 + B < α`
/// is the caller's to enforce (see [`FlocParams::partial`]).
pub fn sample_peflopacf(series: &PeriodicSeries, season: usize, lag: usize, b_exp: f64) -> Result<f64> {
    let fp = FlocParams::partial(b_exp, f64::INFINITY)?;
    FlocEstimator::new(series, fp).pacf(season, lag)
}

pub fn sample_peflopacf_acvf_variant(series: &PeriodicSeries, season: usize, lag: usize, b_exp: f64) -> Result<f64> {
    let fp = FlocParams::partial(b_exp, f64::INFINITY)?;
    FlocEstimator::new(series, fp).pacf_acvf_variant(season, lag)
}
