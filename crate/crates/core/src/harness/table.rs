use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "M,series,mean_rate,stderr,trials";

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub memory: f64,
    pub series: String,
    pub mean_rate: f64,
    pub stderr: f64,
    /// Zero for analytic series.
    pub trials: usize,
}

/// Mean rate per memory size and series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateMemoryTable {
    pub rows: Vec<TableRow>,
}

/// Mean and standard error `s / sqrt(k)` of a sample.
pub fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let k = samples.len();
    if k == 0 {
        return (0.0, 0.0);
    }
    let mean = samples.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

impl RateMemoryTable {
    pub fn push(&mut self, row: TableRow) {
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Series names in first-appearance order.
    pub fn series(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.series) {
                names.push(r.series.clone());
            }
        }
        names
    }

    /// `(M, mean)` points of one series, sorted by `M`.
    pub fn points(&self, series: &str) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> =
            self.rows.iter().filter(|r| r.series == series).map(|r| (r.memory, r.mean_rate)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts
    }

    pub fn get(&self, memory: f64, series: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.series == series && (r.memory - memory).abs() < 1e-9)
    }

    /// CSV text, rows sorted by `(M, series)`, six decimals throughout.
    pub fn to_csv(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(Error::Config("empty rate-memory table".into()));
        }
        let mut rows: Vec<&TableRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.memory.total_cmp(&b.memory).then_with(|| a.series.cmp(&b.series)));
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io { path: "<csv>".into(), message: e.to_string() };
        w.write_record(CSV_HEADER.split(',')).map_err(io)?;
        for r in rows {
            w.write_record([
                format!("{:.6}", r.memory),
                r.series.clone(),
                format!("{:.6}", r.mean_rate),
                format!("{:.6}", r.stderr),
                r.trials.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io { path: "<csv>".into(), message: e.to_string() })?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let bad = |msg: String| Error::Config(format!("csv: {msg}"));
        let header: Vec<String> =
            reader.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_string).collect();
        if header.join(",") != CSV_HEADER {
            return Err(bad(format!("unexpected header `{}`", header.join(","))));
        }
        let mut table = Self::default();
        for rec in reader.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let num =
                |i: usize| -> Result<f64> { rec[i].parse().map_err(|_| bad(format!("bad number `{}`", &rec[i]))) };
            table.push(TableRow {
                memory: num(0)?,
                series: rec[1].to_string(),
                mean_rate: num(2)?,
                stderr: num(3)?,
                trials: rec[4].parse().map_err(|_| bad(format!("bad count `{}`", &rec[4])))?,
            });
        }
        Ok(table)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::from_csv(&text)
    }
}

pub fn emit_csv(table: &RateMemoryTable, path: &Path) -> Result<()> {
    let text = table.to_csv()?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_rows() -> RateMemoryTable {
        RateMemoryTable {
            rows: vec![
                TableRow { memory: 20.0, series: "lc-u".into(), mean_rate: 8.0, stderr: 0.0, trials: 3 },
                TableRow { memory: 0.0, series: "comp-cacm".into(), mean_rate: 10.123456789, stderr: 0.25, trials: 3 },
            ],
        }
    }

    #[test]
    fn golden_two_rows() {
        assert_eq!(
            two_rows().to_csv().unwrap(),
            "M,series,mean_rate,stderr,trials\n\
             0.000000,comp-cacm,10.123457,0.250000,3\n\
             20.000000,lc-u,8.000000,0.000000,3\n"
        );
    }

    #[test]
    fn empty_table_is_an_error() {
        assert!(RateMemoryTable::default().to_csv().is_err());
    }

    #[test]
    fn csv_reads_back() {
        let text = two_rows().to_csv().unwrap();
        let back = RateMemoryTable::from_csv(&text).unwrap();
        assert_eq!(back.to_csv().unwrap(), text);
        assert!(RateMemoryTable::from_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn stderr_formula() {
        let (mean, se) = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mean, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_stderr(&[7.0]), (7.0, 0.0));
    }
}
