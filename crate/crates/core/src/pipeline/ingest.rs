use std::fs::File;
use std::io::Read;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::parse_f64;
use crate::procgen::PeriodicSeries;

/// Which CSV column holds the observations.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ColumnSelector {
    /// `value` if present, else the only column.
    #[default]
    Auto,
    Index(usize),
    Name(String),
}

impl std::str::FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    /// A bare integer is a 0-based index; anything else is a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) if s.eq_ignore_ascii_case("auto") => ColumnSelector::Auto,
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

pub fn ingest_csv(path: impl AsRef<Path>, column: &ColumnSelector, period: usize) -> Result<PeriodicSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Ingest(format!("{}: {e}", path.display())))?;
    ingest_reader(file, column, period)
}

/// Reads a headed CSV, trimming a partial trailing cycle with a warning.
pub fn ingest_reader<R: Read>(input: R, column: &ColumnSelector, period: usize) -> Result<PeriodicSeries> {
    if period == 0 {
        return Err(Error::Parameter("period must be at least 1".into()));
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(|e| Error::Ingest(e.to_string()))?.clone();
    if headers.is_empty() {
        return Err(Error::Ingest("empty file".into()));
    }
    let col = match column {
        ColumnSelector::Index(i) if *i < headers.len() => *i,
        ColumnSelector::Index(i) => return Err(Error::Ingest(format!("column {i} not present ({} columns)", headers.len()))),
        ColumnSelector::Name(n) => headers
            .iter()
            .position(|h| h == n)
            .ok_or_else(|| Error::Ingest(format!("no column named '{n}'")))?,
        ColumnSelector::Auto => match headers.iter().position(|h| h.eq_ignore_ascii_case("value")) {
            Some(i) => i,
            None if headers.len() == 1 => 0,
            None => return Err(Error::Ingest("several columns and none named 'value'; select one".into())),
        },
    };
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Ingest(format!("row {row}: {e}")))?;
        let cell = rec.get(col).ok_or_else(|| Error::Ingest(format!("row {row}: missing column {col}")))?;
        let x = parse_f64(cell)
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Ingest(format!("row {row}: '{cell}' is not a finite number")))?;
        values.push(x);
    }
    if values.is_empty() {
        return Err(Error::Ingest("no data rows".into()));
    }
    let keep = values.len() / period * period;
    if keep == 0 {
        return Err(Error::Ingest(format!("{} rows do not make up one cycle of {period}", values.len())));
    }
    if keep < values.len() {
        warn!("dropping {} trailing observations of an incomplete cycle", values.len() - keep);
        values.truncate(keep);
    }
    PeriodicSeries::new(values, period)
}

/// Writes `t,season,value` rows at full precision.
pub fn write_series_csv<W: std::io::Write>(series: &PeriodicSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "season", "value"])?;
    for (i, &x) in series.values().iter().enumerate() {
        w.write_record([(i + 1).to_string(), series.season_of(i + 1).to_string(), crate::io::fmt_f64(x)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_of(n: usize) -> String {
        let mut s = String::from("value\n");
        for i in 0..n {
            s.push_str(&format!("{}\n", i as f64 + 0.5));
        }
        s
    }

    #[test]
    fn full_cycles_are_kept() {
        let s = ingest_reader(csv_of(546).as_bytes(), &ColumnSelector::Auto, 7).unwrap();
        assert_eq!((s.n_cycles(), s.period()), (78, 7));
    }

    #[test]
    fn partial_cycle_is_trimmed() {
        let s = ingest_reader(csv_of(547).as_bytes(), &ColumnSelector::Auto, 7).unwrap();
        assert_eq!(s.len(), 546);
    }

    #[test]
    fn errors_name_the_row() {
        assert!(matches!(ingest_reader("".as_bytes(), &ColumnSelector::Auto, 7), Err(Error::Ingest(_))));
        assert!(matches!(ingest_reader("value\n".as_bytes(), &ColumnSelector::Auto, 1), Err(Error::Ingest(_))));
        match ingest_reader("value\n1\nabc\n".as_bytes(), &ColumnSelector::Auto, 1) {
            Err(Error::Ingest(msg)) => assert!(msg.contains("row 3"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(ingest_reader("value\n1\n\n2\nNaN\n".as_bytes(), &ColumnSelector::Auto, 1).is_err());
    }

    #[test]
    fn column_selection() {
        let data = "date,count,value\nd1,3,1.5\nd2,4,2.5\n";
        let by_auto = ingest_reader(data.as_bytes(), &ColumnSelector::Auto, 1).unwrap();
        assert_eq!(by_auto.values(), &[1.5, 2.5]);
        let by_name = ingest_reader(data.as_bytes(), &"count".parse().unwrap(), 1).unwrap();
        assert_eq!(by_name.values(), &[3.0, 4.0]);
        let by_index = ingest_reader(data.as_bytes(), &"1".parse().unwrap(), 2).unwrap();
        assert_eq!(by_index.values(), &[3.0, 4.0]);
        assert!(ingest_reader("a,b\n1,2\n".as_bytes(), &ColumnSelector::Auto, 1).is_err());
    }

    #[test]
    fn written_series_reads_back() {
        let s = PeriodicSeries::new(vec![0.1, -1.0 / 3.0, 1e-310, 7.0], 2).unwrap();
        let mut buf = Vec::new();
        write_series_csv(&s, &mut buf).unwrap();
        let back = ingest_reader(&buf[..], &ColumnSelector::Auto, 2).unwrap();
        assert_eq!(back, s);
    }
}
