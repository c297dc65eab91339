use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;

use cyclofloc::flocmeasures::null_bands;
use cyclofloc::inference::report::{fit_table, order_table, portmanteau_table};
use cyclofloc::inference::{portmanteau_test_with_null, identify_with_bands, CalibrationCache, Family};
use cyclofloc::pipeline::{
    default_coefficients, fit_workflow, ingest_csv, preprocess_log_huber, replicate_order_grid, replicate_power_grid,
    write_series_csv, ExperimentGrid, FitConfig,
};
use cyclofloc::procgen::{gen_parma, Innovation};
use cyclofloc::{FlocEstimator, FlocParams, Measure, PeriodicModel, PeriodicSeries, Substreams};

use crate::args::*;

/// Files read and written by a command, for the manifest.
pub struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(create(path)?, value)?;
    Ok(())
}

fn load(input: &Input) -> Result<PeriodicSeries> {
    let series = ingest_csv(&input.input, &input.column, input.period)
        .with_context(|| format!("reading {}", input.input.display()))?;
    info!("read {} observations ({} cycles of {})", series.len(), series.n_cycles(), series.period());
    if input.log_huber {
        return Ok(preprocess_log_huber(&series)?);
    }
    Ok(series)
}

fn read_outcome(input: &Input, out: &Path) -> Outcome {
    Outcome { inputs: vec![input.input.clone()], outputs: vec![out.to_path_buf()] }
}

/// Splits a season-major coefficient list into `period` equal rows.
fn seasonal_rows(name: &str, flat: &[f64], period: usize) -> Result<Vec<Vec<f64>>> {
    if flat.is_empty() {
        return Ok(Vec::new());
    }
    if period == 0 || !flat.len().is_multiple_of(period) {
        bail!("--{name} has {} values, not a multiple of the period {period}", flat.len());
    }
    Ok(flat.chunks(flat.len() / period).map(<[f64]>::to_vec).collect())
}

fn sim_model(a: &SimulateArgs) -> Result<PeriodicModel> {
    if let Some(path) = &a.model {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return serde_json::from_str(&text).with_context(|| format!("invalid model in {}", path.display()));
    }
    let innovation = Innovation { alpha: a.alpha, scales: a.sigma.clone() };
    let (ar, ma) = match a.family {
        SimFamily::Par => (seasonal_rows("phi", &a.phi, a.period)?, seasonal_rows("theta", &a.theta, a.period)?),
        SimFamily::Pma => (Vec::new(), seasonal_rows("theta", &a.theta, a.period)?),
        SimFamily::Ipd => (Vec::new(), Vec::new()),
    };
    if a.family == SimFamily::Pma && !a.phi.is_empty() {
        bail!("--phi given for a PMA model");
    }
    if a.family == SimFamily::Ipd && !(a.phi.is_empty() && a.theta.is_empty()) {
        bail!("i.p.d. noise takes no coefficients");
    }
    Ok(PeriodicModel::new(a.period, ar, ma, innovation)?)
}

pub fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let model = sim_model(a)?;
    let period = model.period();
    if a.nt == 0 || !a.nt.is_multiple_of(period) {
        bail!("--nt {} is not a positive multiple of the period {period}", a.nt);
    }
    let mut rng = Substreams::new(a.seed).stream(0);
    let series = gen_parma(&model, a.nt / period, &mut rng, a.burn_in)?;
    write_series_csv(&series, create(&a.output.out)?)?;
    let mut inputs = Vec::new();
    inputs.extend(a.model.clone());
    Ok(Outcome { inputs, outputs: vec![a.output.out.clone()] })
}

pub fn measure(a: &MeasureArgs) -> Result<Outcome> {
    let series = load(&a.input)?;
    let bound = a.alpha.unwrap_or(f64::INFINITY);
    let h = a.hmax as i64;
    let (fp, lags): (FlocParams, Vec<i64>) = match a.measure {
        Measure::Peflopacf => {
            if a.a_exp.is_some_and(|x| x != 1.0) {
                bail!("the partial autocorrelation uses A = 1");
            }
            (FlocParams::partial(a.b_exp.unwrap_or(0.6), bound)?, (1..=h).collect())
        }
        _ => (FlocParams::new(a.a_exp.unwrap_or(0.8), a.b_exp.unwrap_or(0.8), bound)?, (-h..=h).collect()),
    };
    let table = FlocEstimator::new(&series, fp).table(a.measure, &lags)?;
    let bands = match (a.d, a.alpha) {
        (Some(d), Some(alpha)) => Some(null_bands(
            a.measure,
            alpha,
            series.len(),
            series.period(),
            &lags,
            &fp,
            d,
            a.m,
            Substreams::new(a.seed),
        )?),
        _ => None,
    };
    table.write_csv(create(&a.output.out)?, bands.as_ref())?;
    Ok(read_outcome(&a.input, &a.output.out))
}

pub fn test(a: &TestArgs, cache: &CalibrationCache) -> Result<Outcome> {
    let series = load(&a.input)?;
    let fp = FlocParams::for_alpha(a.a_exp, a.b_exp, a.alpha)?;
    let null = cache.kappa_null(a.alpha, series.len(), series.period(), &fp, a.hmax, a.m, Substreams::new(a.seed))?;
    let result = portmanteau_test_with_null(&series, &null, a.level)?;
    print!("{}", portmanteau_table(&result));
    write_json(&a.output.out, &result)?;
    Ok(read_outcome(&a.input, &a.output.out))
}

pub fn identify(a: &IdentifyArgs, cache: &CalibrationCache) -> Result<Outcome> {
    let series = load(&a.input)?;
    let family = match a.family {
        OrderFamily::Par => Family::Par,
        OrderFamily::Pma => Family::Pma,
    };
    let fp = match family {
        Family::Par => FlocParams::partial(a.b_exp.unwrap_or(0.6), a.alpha)?,
        Family::Pma => FlocParams::for_alpha(a.a_exp, a.b_exp.unwrap_or(0.8), a.alpha)?,
    };
    let bands = cache.order_bands(family, a.alpha, &fp, series.len(), series.period(), a.hmax, a.d, a.m, Substreams::new(a.seed))?;
    let result = identify_with_bands(&series, family, &bands)?;
    print!("{}", order_table(&result));
    write_json(&a.output.out, &result)?;
    Ok(read_outcome(&a.input, &a.output.out))
}

pub fn fit(a: &FitArgs, cache: &CalibrationCache) -> Result<Outcome> {
    let series = load(&a.input)?;
    let cfg = FitConfig {
        alpha: a.alpha,
        b_exp: a.b_exp,
        id_h_max: a.hmax,
        d: a.d,
        test_params: FlocParams::for_alpha(a.test_a, a.test_b, a.alpha)?,
        test_h_max: a.test_hmax,
        c: a.level,
        m: a.m,
        orders: a.orders.clone(),
    };
    let report = fit_workflow(&series, &cfg, Substreams::new(a.seed), cache)?;
    if let Some(id) = &report.identification {
        print!("{}", order_table(id));
    }
    print!("{}", fit_table(&report.fit));
    print!("residuals:\n{}", portmanteau_table(&report.residual_test));
    write_json(&a.output.out, &report)?;
    Ok(read_outcome(&a.input, &a.output.out))
}

pub fn replicate(a: &ReplicateArgs, cache: &CalibrationCache) -> Result<Outcome> {
    let mut grid = match a.figure {
        Figure::PowerPar => ExperimentGrid::power(Family::Par, a.nt),
        Figure::PowerPma => ExperimentGrid::power(Family::Pma, a.nt),
        Figure::OrderPar => ExperimentGrid::order(Family::Par, a.nt),
        Figure::OrderPma => ExperimentGrid::order(Family::Pma, a.nt),
    };
    let coefs = if a.coefs.is_empty() { default_coefficients() } else { a.coefs.clone() };
    grid = grid.with_cells(ExperimentGrid::cartesian(&coefs));
    grid.reps = a.reps;
    grid.m = a.m;
    grid.alpha = a.alpha;
    if let Some(h) = a.hmax {
        grid.h_max = h;
    }
    if let Some(l) = a.level {
        grid.level = l;
    }
    let is_par_order = a.figure == Figure::OrderPar;
    let a_exp = a.a_exp.unwrap_or(grid.params.a_exp());
    let b_exp = a.b_exp.unwrap_or(grid.params.b_exp());
    grid.params = if is_par_order {
        if a_exp != 1.0 {
            bail!("PAR order identification uses A = 1");
        }
        FlocParams::partial(b_exp, a.alpha)?
    } else {
        FlocParams::for_alpha(a_exp, b_exp, a.alpha)?
    };
    let seeds = Substreams::new(a.seed);
    let table = match a.figure {
        Figure::PowerPar | Figure::PowerPma => replicate_power_grid(&grid, seeds, cache)?,
        Figure::OrderPar | Figure::OrderPma => replicate_order_grid(&grid, seeds, cache)?,
    };
    table.write_csv(create(&a.output.out)?)?;
    Ok(Outcome { inputs: Vec::new(), outputs: vec![a.output.out.clone()] })
}
