//! Monte Carlo replication grids over PAR₂(1) / PMA₂(1) coefficient pairs.

use std::io::{Read, Write};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::heavytail::FlocParams;
use crate::inference::{identify_with_bands, portmanteau_test_with_null, CalibrationCache, Family};
use crate::io::{fmt_f64, parse_f64};
use crate::procgen::{gen_parma, local_orders, PeriodicModel};
use crate::rng::Substreams;

/// Period of the grid models.
pub const GRID_PERIOD: usize = 2;

/// `{−0.9, −0.7, …, 0.9}`.
pub fn default_coefficients() -> Vec<f64> {
    (0..10).map(|k| (2 * k - 9) as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub family: Family,
    /// `(coef(1), coef(2))` per cell.
    pub cells: Vec<(f64, f64)>,
    pub nt: usize,
    pub reps: usize,
    /// Calibration draws.
    pub m: usize,
    pub alpha: f64,
    pub sigma: f64,
    pub params: FlocParams,
    pub h_max: usize,
    /// `c` for power grids, `d` for order grids.
    pub level: f64,
}

impl ExperimentGrid {
    /// Every pair of `coefs`, first coordinate slowest.
    pub fn cartesian(coefs: &[f64]) -> Vec<(f64, f64)> {
        coefs.iter().flat_map(|&a| coefs.iter().map(move |&b| (a, b))).collect()
    }

    /// Test-power grid: `A = B = 0.8`, `h_max = 3`, `c = 0.05`, α = 1.7.
    pub fn power(family: Family, nt: usize) -> Self {
        Self {
            family,
            cells: Self::cartesian(&default_coefficients()),
            nt,
            reps: 200,
            m: 2000,
            alpha: 1.7,
            sigma: 1.0,
            params: FlocParams::for_alpha(0.8, 0.8, 1.7).expect("valid defaults"),
            h_max: 3,
            level: 0.05,
        }
    }

    /// Order-identification grid: `B = 0.6` (PAR) or `A = B = 0.8` (PMA), `h_max = 5`, `d = 0.99`.
    pub fn order(family: Family, nt: usize) -> Self {
        let params = match family {
            Family::Par => FlocParams::partial(0.6, 1.7),
            Family::Pma => FlocParams::for_alpha(0.8, 0.8, 1.7),
        }
        .expect("valid defaults");
        Self { params, h_max: 5, level: 0.99, ..Self::power(family, nt) }
    }

    pub fn with_cells(mut self, cells: Vec<(f64, f64)>) -> Self {
        self.cells = cells;
        self
    }

    pub fn model(&self, cell: (f64, f64)) -> Result<PeriodicModel> {
        let rows = vec![vec![cell.0], vec![cell.1]];
        match self.family {
            Family::Par => PeriodicModel::par(rows, self.alpha, self.sigma),
            Family::Pma => PeriodicModel::pma(rows, self.alpha, self.sigma),
        }
    }

    fn check(&self) -> Result<()> {
        if self.cells.is_empty() || self.reps == 0 {
            return Err(Error::Parameter("grid needs at least one cell and one replication".into()));
        }
        if self.nt == 0 || !self.nt.is_multiple_of(GRID_PERIOD) {
            return Err(Error::Parameter(format!("NT = {} is not a positive multiple of {GRID_PERIOD}", self.nt)));
        }
        Ok(())
    }
}

/// One grid cell's rates. `None` when every replication failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRates {
    pub coef1: f64,
    pub coef2: f64,
    pub rate_sub1: Option<f64>,
    pub rate_sub2: Option<f64>,
    pub rate_total: Option<f64>,
    pub reps_ok: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Power,
    Order,
}

impl GridKind {
    fn columns(self) -> [&'static str; 5] {
        match self {
            GridKind::Power => ["coef1", "coef2", "power_sub1", "power_sub2", "power_total"],
            GridKind::Order => ["coef1", "coef2", "rate_sub1", "rate_sub2", "rate_both"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridTable {
    pub kind: GridKind,
    pub rows: Vec<CellRates>,
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

impl GridTable {
    /// Missing rates are written as empty fields.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.kind.columns())?;
        for r in &self.rows {
            w.write_record([fmt_f64(r.coef1), fmt_f64(r.coef2), opt(r.rate_sub1), opt(r.rate_sub2), opt(r.rate_total)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Replication counts are not part of the CSV and come back as 0.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        let kind = [GridKind::Power, GridKind::Order]
            .into_iter()
            .find(|k| headers.iter().eq(k.columns()))
            .ok_or_else(|| Error::Ingest(format!("unrecognised grid header {headers:?}")))?;
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let bad = |k: usize| Error::Ingest(format!("row {}: bad field {k}", i + 2));
            let num = |k: usize| rec.get(k).and_then(|s| parse_f64(s).ok()).ok_or_else(|| bad(k));
            let maybe = |k: usize| match rec.get(k) {
                Some("") => Ok(None),
                _ => num(k).map(Some),
            };
            rows.push(CellRates {
                coef1: num(0)?,
                coef2: num(1)?,
                rate_sub1: maybe(2)?,
                rate_sub2: maybe(3)?,
                rate_total: maybe(4)?,
                reps_ok: 0,
            });
        }
        Ok(Self { kind, rows })
    }
}

/// `[sub1, sub2, total]` hits per replication, or `None` on failure.
type Outcome = Option<[bool; 3]>;

fn run_cells<F>(grid: &ExperimentGrid, seeds: Substreams, kind: GridKind, one: F) -> Result<GridTable>
where
    F: Fn(&PeriodicModel, Substreams, usize) -> Result<[bool; 3]> + Sync + Send,
{
    grid.check()?;
    let models: Vec<PeriodicModel> = grid.cells.iter().map(|&c| grid.model(c)).collect::<Result<_>>()?;
    let reps = grid.reps;
    let outcomes: Vec<Outcome> = map_indexed(grid.cells.len() * reps, |i| {
        let (cell, rep) = (i / reps, i % reps);
        match one(&models[cell], seeds.derive(1 + cell as u64), rep) {
            Ok(o) => Some(o),
            Err(e) => {
                warn!("cell {cell} replication {rep} failed: {e}");
                None
            }
        }
    });
    let rows = grid
        .cells
        .iter()
        .zip(outcomes.chunks(reps))
        .map(|(&(coef1, coef2), chunk)| {
            let ok: Vec<[bool; 3]> = chunk.iter().flatten().copied().collect();
            let rate = |k: usize| (!ok.is_empty()).then(|| ok.iter().filter(|o| o[k]).count() as f64 / ok.len() as f64);
            CellRates { coef1, coef2, rate_sub1: rate(0), rate_sub2: rate(1), rate_total: rate(2), reps_ok: ok.len() }
        })
        .collect();
    Ok(GridTable { kind, rows })
}

/// Empirical power of each subtest and of the whole portmanteau procedure per cell.
/// One null calibration (seed stream 0) is shared by all cells.
pub fn replicate_power_grid(grid: &ExperimentGrid, seeds: Substreams, cache: &CalibrationCache) -> Result<GridTable> {
    grid.check()?;
    let null = cache.kappa_null(grid.alpha, grid.nt, GRID_PERIOD, &grid.params, grid.h_max, grid.m, seeds.derive(0))?;
    let n_cycles = grid.nt / GRID_PERIOD;
    run_cells(grid, seeds, GridKind::Power, |model, cell_seeds, rep| {
        let x = gen_parma(model, n_cycles, &mut cell_seeds.stream(rep as u64), None)?;
        let r = portmanteau_test_with_null(&x, &null, grid.level)?;
        Ok([r.reject_by_season[0], r.reject_by_season[1], r.reject_any])
    })
}

/// Share of replications whose identified seasonal orders match the true ones.
pub fn replicate_order_grid(grid: &ExperimentGrid, seeds: Substreams, cache: &CalibrationCache) -> Result<GridTable> {
    grid.check()?;
    let bands = cache.order_bands(
        grid.family,
        grid.alpha,
        &grid.params,
        grid.nt,
        GRID_PERIOD,
        grid.h_max,
        grid.level,
        grid.m,
        seeds.derive(0),
    )?;
    let n_cycles = grid.nt / GRID_PERIOD;
    run_cells(grid, seeds, GridKind::Order, |model, cell_seeds, rep| {
        let truth = local_orders(model);
        let truth = match grid.family {
            Family::Par => truth.ar,
            Family::Pma => truth.ma,
        };
        let x = gen_parma(model, n_cycles, &mut cell_seeds.stream(rep as u64), None)?;
        let r = identify_with_bands(&x, grid.family, &bands)?;
        let hit = [r.seasonal[0] == truth[0], r.seasonal[1] == truth[1]];
        Ok([hit[0], hit[1], hit[0] && hit[1]])
    })
}
