//! Periodic series and simulation of i.p.d. noise and PARMA processes.
//!
//! A PARMA model with period `T` follows
//!
//! ```text
//! X_t − φ_1(t) X_{t−1} − … − φ_p(t) X_{t−p} = ξ_t + θ_1(t) ξ_{t−1} + … + θ_q(t) ξ_{t−q}
//! ```
//!
//! with `T`-periodic coefficients and i.p.d. symmetric α-stable innovations.
//! Seasons are 1-based throughout: observation `t` (1-based) belongs to
//! season `((t − 1) mod T) + 1`.

use nalgebra::DMatrix;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heavytail::{StableParams, SymStable};

/// Values `x_1..x_{NT}` covering `N` full cycles of period `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSeries {
    values: Vec<f64>,
    period: usize,
}

impl PeriodicSeries {
    pub fn new(values: Vec<f64>, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::Parameter("period must be at least 1".into()));
        }
        if values.is_empty() {
            return Err(Error::InsufficientData("series is empty".into()));
        }
        if !values.len().is_multiple_of(period) {
            return Err(Error::Shape(format!(
                "series length {} is not a multiple of the period {period}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at index {}", i + 1)));
        }
        Ok(Self { values, period })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn n_cycles(&self) -> usize {
        self.values.len() / self.period
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Season of the 1-based time index `t`.
    pub fn season_of(&self, t: usize) -> usize {
        (t - 1) % self.period + 1
    }

    /// Same period, values mapped element-wise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect(), self.period)
    }

    /// Values of one season (1-based), in time order.
    pub fn season_values(&self, season: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(season - 1).step_by(self.period).copied()
    }
}

/// Symmetric α-stable innovations with a per-season scale `σ(v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Innovation {
    pub alpha: f64,
    pub scales: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawModel {
    period: usize,
    #[serde(default)]
    ar: Vec<Vec<f64>>,
    #[serde(default)]
    ma: Vec<Vec<f64>>,
    innovation: Innovation,
}

/// Causal PARMA model. Row `v − 1` of `ar` holds `φ_1(v)..φ_p(v)`, row
/// `v − 1` of `ma` holds `θ_1(v)..θ_q(v)`. Empty coefficient tables are
/// allowed (pure PMA, pure PAR, pure noise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct PeriodicModel {
    period: usize,
    ar: Vec<Vec<f64>>,
    ma: Vec<Vec<f64>>,
    innovation: Innovation,
}

impl TryFrom<RawModel> for PeriodicModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        PeriodicModel::new(raw.period, raw.ar, raw.ma, raw.innovation)
    }
}

impl From<PeriodicModel> for RawModel {
    fn from(m: PeriodicModel) -> Self {
        RawModel { period: m.period, ar: m.ar, ma: m.ma, innovation: m.innovation }
    }
}

fn normalize_table(name: &str, table: Vec<Vec<f64>>, period: usize) -> Result<Vec<Vec<f64>>> {
    if table.is_empty() {
        return Ok(vec![Vec::new(); period]);
    }
    if table.len() != period {
        return Err(Error::Model(format!("{name} table has {} rows, expected one per season ({period})", table.len())));
    }
    let width = table[0].len();
    if table.iter().any(|row| row.len() != width) {
        return Err(Error::Model(format!("{name} rows must all have the same length")));
    }
    if table.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::Model(format!("{name} coefficients must be finite")));
    }
    Ok(table)
}

impl PeriodicModel {
    pub fn new(period: usize, ar: Vec<Vec<f64>>, ma: Vec<Vec<f64>>, innovation: Innovation) -> Result<Self> {
        if period == 0 {
            return Err(Error::Model("period must be at least 1".into()));
        }
        let ar = normalize_table("AR", ar, period)?;
        let ma = normalize_table("MA", ma, period)?;
        let scales = match innovation.scales.len() {
            1 => vec![innovation.scales[0]; period],
            n if n == period => innovation.scales.clone(),
            n => return Err(Error::Model(format!("{n} innovation scales given for period {period}"))),
        };
        for &s in &scales {
            StableParams::new(innovation.alpha, s)?;
        }
        let model = Self { period, ar, ma, innovation: Innovation { alpha: innovation.alpha, scales } };
        let radius = model.monodromy_spectral_radius();
        if !(radius < 1.0 - 1e-9) {
            return Err(Error::Model(format!(
                "AR part is not causal: spectral radius of the monodromy matrix is {radius:.6}"
            )));
        }
        Ok(model)
    }

    /// PAR model from per-season coefficient rows, i.i.d. `S(α, σ)` innovations.
    pub fn par(ar: Vec<Vec<f64>>, alpha: f64, sigma: f64) -> Result<Self> {
        let period = ar.len();
        Self::new(period, ar, Vec::new(), Innovation { alpha, scales: vec![sigma] })
    }

    /// PMA model from per-season coefficient rows, i.i.d. `S(α, σ)` innovations.
    pub fn pma(ma: Vec<Vec<f64>>, alpha: f64, sigma: f64) -> Result<Self> {
        let period = ma.len();
        Self::new(period, Vec::new(), ma, Innovation { alpha, scales: vec![sigma] })
    }

    /// Pure i.p.d. noise with per-season scales.
    pub fn noise(period: usize, alpha: f64, scales: Vec<f64>) -> Result<Self> {
        Self::new(period, Vec::new(), Vec::new(), Innovation { alpha, scales })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn ar_order(&self) -> usize {
        self.ar[0].len()
    }

    pub fn ma_order(&self) -> usize {
        self.ma[0].len()
    }

    /// `φ_i(v)`, 1-based `season` and `lag`.
    pub fn phi(&self, season: usize, lag: usize) -> f64 {
        self.ar[season - 1][lag - 1]
    }

    pub fn theta(&self, season: usize, lag: usize) -> f64 {
        self.ma[season - 1][lag - 1]
    }

    pub fn ar_rows(&self) -> &[Vec<f64>] {
        &self.ar
    }

    pub fn ma_rows(&self) -> &[Vec<f64>] {
        &self.ma
    }

    pub fn innovation(&self) -> &Innovation {
        &self.innovation
    }

    pub fn alpha(&self) -> f64 {
        self.innovation.alpha
    }

    /// Spectral radius of the product of per-season companion matrices over one period.
    pub fn monodromy_spectral_radius(&self) -> f64 {
        let p = self.ar_order();
        if p == 0 {
            return 0.0;
        }
        let mut product = DMatrix::<f64>::identity(p, p);
        for row in &self.ar {
            let mut companion = DMatrix::<f64>::zeros(p, p);
            for (i, &c) in row.iter().enumerate() {
                companion[(0, i)] = c;
            }
            for i in 1..p {
                companion[(i, i - 1)] = 1.0;
            }
            product = companion * product;
        }
        product
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Default burn-in of `50·T + 10·(p + q)` samples, rounded up to whole cycles.
    pub fn default_burn_in_cycles(&self) -> usize {
        let samples = 50 * self.period + 10 * (self.ar_order() + self.ma_order());
        samples.div_ceil(self.period)
    }
}

/// Seasonal orders `p(v)`, `q(v)` and the global orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalOrders {
    pub ar: Vec<usize>,
    pub ma: Vec<usize>,
    pub p: usize,
    pub q: usize,
}

fn last_nonzero(row: &[f64]) -> usize {
    row.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1)
}

pub fn local_orders(model: &PeriodicModel) -> LocalOrders {
    let ar: Vec<usize> = model.ar.iter().map(|r| last_nonzero(r)).collect();
    let ma: Vec<usize> = model.ma.iter().map(|r| last_nonzero(r)).collect();
    let p = ar.iter().copied().max().unwrap_or(0);
    let q = ma.iter().copied().max().unwrap_or(0);
    LocalOrders { ar, ma, p, q }
}

/// Independent periodically distributed `S(α, σ(v))` sequence of `n_cycles` cycles.
pub fn gen_ipd_stable<R: Rng + ?Sized>(
    period: usize,
    scales: &[f64],
    alpha: f64,
    n_cycles: usize,
    rng: &mut R,
) -> Result<PeriodicSeries> {
    let model = PeriodicModel::noise(period, alpha, scales.to_vec())?;
    gen_parma(&model, n_cycles, rng, Some(0))
}

/// A simulated trajectory together with the innovations that drove it.
#[derive(Debug, Clone)]
pub struct TracedTrajectory {
    pub series: PeriodicSeries,
    /// Innovations for the whole run, burn-in included.
    pub innovations: Vec<f64>,
    /// `series.values()[i]` was driven by `innovations[offset + i]`.
    pub offset: usize,
}

/// Simulate `n_cycles` cycles after discarding `burn_in_cycles` (default when `None`).
pub fn gen_parma<R: Rng + ?Sized>(
    model: &PeriodicModel,
    n_cycles: usize,
    rng: &mut R,
    burn_in_cycles: Option<usize>,
) -> Result<PeriodicSeries> {
    gen_parma_traced(model, n_cycles, rng, burn_in_cycles).map(|t| t.series)
}

pub fn gen_parma_traced<R: Rng + ?Sized>(
    model: &PeriodicModel,
    n_cycles: usize,
    rng: &mut R,
    burn_in_cycles: Option<usize>,
) -> Result<TracedTrajectory> {
    if n_cycles == 0 {
        return Err(Error::InsufficientData("at least one cycle must be simulated".into()));
    }
    let period = model.period;
    let burn = burn_in_cycles.unwrap_or_else(|| model.default_burn_in_cycles()) * period;
    let total = burn + n_cycles * period;

    let unit = SymStable::new(StableParams::standard(model.alpha())?);
    let scales = &model.innovation.scales;
    let innovations: Vec<f64> = (0..total).map(|t| scales[t % period] * unit.sample(rng)).collect();

    let mut x = vec![0.0; total];
    for t in 0..total {
        let v = t % period;
        let mut acc = innovations[t];
        for (j, &theta) in model.ma[v].iter().enumerate() {
            if let Some(k) = t.checked_sub(j + 1) {
                acc += theta * innovations[k];
            }
        }
        for (i, &phi) in model.ar[v].iter().enumerate() {
            if let Some(k) = t.checked_sub(i + 1) {
                acc += phi * x[k];
            }
        }
        x[t] = acc;
    }
    let series = PeriodicSeries::new(x.split_off(burn), period)?;
    Ok(TracedTrajectory { series, innovations, offset: burn })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Substreams;

    fn model2() -> PeriodicModel {
        PeriodicModel::par(vec![vec![0.8], vec![-0.3]], 1.7, 1.0).unwrap()
    }

    fn model3() -> PeriodicModel {
        PeriodicModel::pma(vec![vec![0.8], vec![-0.3]], 1.7, 1.0).unwrap()
    }

    #[test]
    fn series_requires_full_cycles() {
        assert!(PeriodicSeries::new(vec![1.0; 6], 3).is_ok());
        assert!(matches!(PeriodicSeries::new(vec![1.0; 7], 3), Err(Error::Shape(_))));
        assert!(PeriodicSeries::new(vec![], 3).is_err());
        let s = PeriodicSeries::new(vec![0.0; 14], 7).unwrap();
        assert_eq!(s.n_cycles(), 2);
        assert_eq!(s.season_of(1), 1);
        assert_eq!(s.season_of(7), 7);
        assert_eq!(s.season_of(8), 1);
    }

    #[test]
    fn model_shapes_are_validated() {
        let inn = Innovation { alpha: 1.7, scales: vec![1.0] };
        assert!(PeriodicModel::new(2, vec![vec![0.5]], vec![], inn.clone()).is_err());
        assert!(PeriodicModel::new(2, vec![vec![0.5], vec![0.1, 0.2]], vec![], inn.clone()).is_err());
        assert!(PeriodicModel::new(2, vec![], vec![], Innovation { alpha: 1.7, scales: vec![1.0, 1.0, 1.0] }).is_err());
        assert!(PeriodicModel::new(2, vec![], vec![], Innovation { alpha: 2.5, scales: vec![1.0] }).is_err());
    }

    #[test]
    fn causality_gate() {
        assert!(matches!(PeriodicModel::par(vec![vec![1.2]], 1.7, 1.0), Err(Error::Model(_))));
        assert!(matches!(PeriodicModel::par(vec![vec![1.0]], 1.7, 1.0), Err(Error::Model(_))));
        // Individually explosive seasons can still give a causal cycle: 1.5 · 0.5 = 0.75
        assert!(PeriodicModel::par(vec![vec![1.5], vec![0.5]], 1.7, 1.0).is_ok());
        assert!(PeriodicModel::par(vec![vec![2.0], vec![0.6]], 1.7, 1.0).is_err());
    }

    #[test]
    fn monodromy_of_par1_is_product_of_coefficients() {
        let m = model2();
        assert!((m.monodromy_spectral_radius() - 0.24).abs() < 1e-12);
    }

    #[test]
    fn monodromy_order_two_matches_characteristic_roots() {
        // T = 1 AR(2) x_t = 0.5 x_{t-1} + 0.3 x_{t-2}: roots of z^2 - 0.5 z - 0.3
        let m = PeriodicModel::par(vec![vec![0.5, 0.3]], 1.8, 1.0).unwrap();
        let root = (0.5 + (0.25f64 + 1.2).sqrt()) / 2.0;
        assert!((m.monodromy_spectral_radius() - root).abs() < 1e-12);
    }

    #[test]
    fn local_orders_examples() {
        let o = local_orders(&model2());
        assert_eq!((o.ar.clone(), o.p), (vec![1, 1], 1));
        let m = PeriodicModel::par(vec![vec![0.8], vec![0.0]], 1.7, 1.0).unwrap();
        let o = local_orders(&m);
        assert_eq!((o.ar, o.p, o.q), (vec![1, 0], 1, 0));

        let rows = vec![
            vec![0.36, 0.0, 0.0],
            vec![0.45, 0.0, 0.0],
            vec![0.46, 0.0, 0.0],
            vec![0.38, -0.18, 0.29],
            vec![0.0, 0.0, 0.0],
            vec![0.48, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ];
        let m = PeriodicModel::par(rows, 1.9, 1.0).unwrap();
        let o = local_orders(&m);
        assert_eq!(o.ar, vec![1, 1, 1, 3, 0, 1, 0]);
        assert_eq!(o.p, 3);
    }

    #[test]
    fn output_length_and_determinism() {
        let s = Substreams::new(4);
        let a = gen_parma(&model2(), 500, &mut s.stream(0), None).unwrap();
        let b = gen_parma(&model2(), 500, &mut s.stream(0), None).unwrap();
        assert_eq!(a.len(), 1000);
        assert_eq!(a, b);
    }

    #[test]
    fn pure_noise_equals_innovations() {
        let m = PeriodicModel::noise(3, 1.5, vec![1.0, 2.0, 0.5]).unwrap();
        let t = gen_parma_traced(&m, 20, &mut Substreams::new(1).stream(0), None).unwrap();
        assert_eq!(t.series.values(), &t.innovations[t.offset..]);
    }

    #[test]
    fn ipd_period_one_is_iid_sample() {
        let s = Substreams::new(2);
        let a = gen_ipd_stable(1, &[1.0], 1.7, 50, &mut s.stream(0)).unwrap();
        let b = crate::heavytail::sample_sym_stable(&StableParams::new(1.7, 1.0).unwrap(), 50, &mut s.stream(0));
        assert_eq!(a.values(), &b[..]);
    }

    #[test]
    fn ipd_scales_apply_per_season() {
        let s = Substreams::new(3);
        let a = gen_ipd_stable(2, &[1.0, 1.0], 1.7, 100, &mut s.stream(0)).unwrap();
        let b = gen_ipd_stable(2, &[1.0, 2.0], 1.7, 100, &mut s.stream(0)).unwrap();
        for (t, (x, y)) in a.values().iter().zip(b.values()).enumerate() {
            let k = if t % 2 == 0 { 1.0 } else { 2.0 };
            assert_eq!(*y, k * x);
        }
    }

    #[test]
    fn pma_values_are_moving_sums_of_innovations() {
        let m = model3();
        let t = gen_parma_traced(&m, 50, &mut Substreams::new(5).stream(0), None).unwrap();
        for (i, &x) in t.series.values().iter().enumerate() {
            let k = t.offset + i;
            let season = i % 2 + 1;
            let expect = t.innovations[k] + m.theta(season, 1) * t.innovations[k - 1];
            assert!((x - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn par_recursion_holds_on_output() {
        let m = model2();
        let t = gen_parma_traced(&m, 50, &mut Substreams::new(6).stream(0), None).unwrap();
        let x = t.series.values();
        for i in 1..x.len() {
            let season = i % 2 + 1;
            let resid = x[i] - m.phi(season, 1) * x[i - 1];
            assert!((resid - t.innovations[t.offset + i]).abs() < 1e-9 * x[i].abs().max(1.0));
        }
    }

    #[test]
    fn gaussian_par_matches_lag_one_theory() {
        // Gaussian PAR_2(1): Var and lag-1 covariance solve the periodic Yule–Walker system.
        // γ_1(0) = φ1(1)^2 γ_2(0) + 2, γ_2(0) = φ1(2)^2 γ_1(0) + 2 (innovation variance 2σ² = 2).
        let (a, b) = (0.8f64, -0.3f64);
        let g2 = (2.0 + b * b * 2.0) / (1.0 - a * a * b * b);
        let g1 = a * a * g2 + 2.0;
        let rho1 = a * g2 / (g1 * g2).sqrt(); // corr(X_{season 1}, previous)
        let m = PeriodicModel::par(vec![vec![a], vec![b]], 2.0, 1.0).unwrap();
        let x = gen_parma(&m, 200_000, &mut Substreams::new(7).stream(0), None).unwrap();
        let v = x.values();
        let (mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0);
        for n in 1..v.len() / 2 {
            let cur = v[2 * n];
            let prev = v[2 * n - 1];
            s11 += cur * cur;
            s22 += prev * prev;
            s12 += cur * prev;
        }
        let est = s12 / (s11 * s22).sqrt();
        assert!((est - rho1).abs() < 0.01, "{est} vs {rho1}");
    }

    #[test]
    fn model_json_round_trip_and_validation() {
        let m = model2();
        let js = serde_json::to_string(&m).unwrap();
        let back: PeriodicModel = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"period":1,"ar":[[1.5]],"innovation":{"alpha":1.7,"scales":[1.0]}}"#;
        assert!(serde_json::from_str::<PeriodicModel>(bad).is_err());
    }
}
