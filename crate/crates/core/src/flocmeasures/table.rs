use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heavytail::FlocParams;
use crate::io::{fmt_f64, parse_f64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Pefloacvf,
    Pefloacf,
    Peflopacf,
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::Pefloacvf => "pefloacvf",
            Measure::Pefloacf => "pefloacf",
            Measure::Peflopacf => "peflopacf",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pefloacvf" => Ok(Measure::Pefloacvf),
            "pefloacf" => Ok(Measure::Pefloacf),
            "peflopacf" => Ok(Measure::Peflopacf),
            other => Err(Error::Parameter(format!("unknown measure '{other}'"))),
        }
    }
}

/// Values of a periodic measure for every season `v ∈ 1..=T` and each requested lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalLagTable {
    pub measure: Measure,
    pub period: usize,
    pub lags: Vec<i64>,
    /// Row-major: season-major, lags in `lags` order.
    pub values: Vec<f64>,
    pub params: FlocParams,
}

impl SeasonalLagTable {
    pub fn from_parts(
        measure: Measure,
        period: usize,
        lags: Vec<i64>,
        values: Vec<f64>,
        params: FlocParams,
    ) -> Result<Self> {
        if values.len() != period * lags.len() {
            return Err(Error::Shape(format!(
                "{} values for {period} seasons × {} lags",
                values.len(),
                lags.len()
            )));
        }
        Ok(Self { measure, period, lags, values, params })
    }

    pub fn get(&self, season: usize, lag: i64) -> Option<f64> {
        let j = self.lags.iter().position(|&h| h == lag)?;
        (1..=self.period).contains(&season).then(|| self.values[(season - 1) * self.lags.len() + j])
    }

    /// `(v, h, value)` in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        let width = self.lags.len();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &val)| (i / width + 1, self.lags[i % width], val))
    }

    /// CSV with columns `v,h,value`, or `v,h,value,lower,upper` when bands are given.
    pub fn write_csv<W: Write>(&self, out: W, bands: Option<&super::NullBands>) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match bands {
            None => w.write_record(["v", "h", "value"])?,
            Some(_) => w.write_record(["v", "h", "value", "lower", "upper"])?,
        }
        for (v, h, val) in self.entries() {
            let mut rec = vec![v.to_string(), h.to_string(), fmt_f64(val)];
            if let Some(b) = bands {
                let (lo, hi) = b
                    .band(h)
                    .ok_or_else(|| Error::Shape(format!("bands do not cover lag {h}")))?;
                rec.push(fmt_f64(lo));
                rec.push(fmt_f64(hi));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv); meta fields are supplied by the caller.
    pub fn read_csv<R: Read>(input: R, measure: Measure, params: FlocParams) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |k: usize| {
                rec.get(k).ok_or_else(|| Error::Ingest(format!("row {}: missing column {k}", i + 2)))
            };
            let v: usize = field(0)?.trim().parse().map_err(|_| Error::Ingest(format!("row {}: bad season", i + 2)))?;
            let h: i64 = field(1)?.trim().parse().map_err(|_| Error::Ingest(format!("row {}: bad lag", i + 2)))?;
            let val = parse_f64(field(2)?).map_err(|_| Error::Ingest(format!("row {}: bad value", i + 2)))?;
            rows.push((v, h, val));
        }
        let period = rows.iter().map(|r| r.0).max().unwrap_or(0);
        let mut lags: Vec<i64> = Vec::new();
        for r in rows.iter().filter(|r| r.0 == 1) {
            lags.push(r.1);
        }
        let values = rows.iter().map(|r| r.2).collect();
        Self::from_parts(measure, period, lags, values, params)
    }
}
