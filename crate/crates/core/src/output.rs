//! Flat row types for tabular output and their CSV / JSON encodings.
//!
//! JSON output is an array of objects whose keys are the CSV column names.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::ap::AverageReport;
use crate::characters::TwistedSumReport;
use crate::config::OutputFormat;
use crate::equi::BoundComparison;
use crate::error::{Error, Result};
use crate::exact::SequenceRecord;
use crate::fit::FitResult;
use crate::zeta::{CesaroReport, PartialSeriesValue, ResidueProbe};

/// One term of the sequence. Big integers are written in decimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub n: u64,
    #[serde(rename = "P")]
    pub p: String,
    pub root: String,
    pub a: String,
}

impl From<&SequenceRecord> for SequenceRow {
    fn from(r: &SequenceRecord) -> Self {
        Self {
            n: r.n,
            p: r.p.to_string(),
            root: r.root.to_string(),
            a: r.a.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorSumRow {
    pub n: u64,
    pub a: u64,
    pub b: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageRow {
    pub x: u64,
    pub q: u64,
    pub b: u64,
    pub raw_sum: u128,
    pub average: f64,
    pub main_term: f64,
    pub residual: f64,
    pub ratio: f64,
}

impl From<&AverageReport> for AverageRow {
    fn from(r: &AverageReport) -> Self {
        Self {
            x: r.x,
            q: r.q,
            b: r.b,
            raw_sum: r.raw_sum,
            average: r.average,
            main_term: r.main_term,
            residual: r.residual,
            ratio: r.ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistRow {
    pub q: u64,
    pub char_index: usize,
    pub x: u64,
    #[serde(rename = "re_S")]
    pub re_s: f64,
    #[serde(rename = "im_S")]
    pub im_s: f64,
    pub main_term: f64,
    pub residual_abs: f64,
}

impl From<&TwistedSumReport> for TwistRow {
    fn from(r: &TwistedSumReport) -> Self {
        Self {
            q: r.q,
            char_index: r.char_index,
            x: r.x,
            re_s: r.re_s,
            im_s: r.im_s,
            main_term: r.main_term,
            residual_abs: r.residual_abs,
        }
    }
}

/// Discrepancy of one sample plus its Erdős–Turán comparison.
/// `D_star` and `D` are normalized; `ET_bound_K` is in count form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub q: u64,
    pub b: u64,
    pub start: u64,
    #[serde(rename = "D_star")]
    pub d_star: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "ET_bound_K")]
    pub et_bound_k: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnRow {
    pub start: u64,
    pub end: u64,
    pub q: u64,
    pub m: u64,
    pub measured: f64,
    pub bound: f64,
    pub satisfied: bool,
}

impl KnRow {
    pub fn new(start: u64, end: u64, q: u64, c: &BoundComparison) -> Self {
        Self {
            start,
            end,
            q,
            m: c.parameter,
            measured: c.measured,
            bound: c.bound,
            satisfied: c.satisfied,
        }
    }
}

/// `N` is empty for values that are not truncated sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub series_id: String,
    pub s: f64,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub re: f64,
    pub im: f64,
}

impl From<&PartialSeriesValue> for SeriesRow {
    fn from(v: &PartialSeriesValue) -> Self {
        Self {
            series_id: v.series_id.clone(),
            s: v.s,
            n: Some(v.n),
            re: v.re,
            im: v.im,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CesaroRow {
    pub x: u64,
    #[serde(rename = "S_numerator")]
    pub s_numerator: u128,
    pub value: f64,
    pub main_term: f64,
    pub ratio: f64,
}

impl From<&CesaroReport> for CesaroRow {
    fn from(r: &CesaroReport) -> Self {
        Self {
            x: r.x,
            s_numerator: r.numerator,
            value: r.value,
            main_term: r.main_term,
            ratio: r.ratio,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueRow {
    pub s: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub product: f64,
    pub target: f64,
}

impl From<&ResidueProbe> for ResidueRow {
    fn from(p: &ResidueProbe) -> Self {
        Self {
            s: p.s,
            n: p.n,
            product: p.product,
            target: p.target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub point_count: usize,
}

impl From<&FitResult> for FitRow {
    fn from(f: &FitResult) -> Self {
        Self {
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
            point_count: f.point_count,
        }
    }
}

pub fn write_rows<T: Serialize, W: Write>(format: OutputFormat, rows: &[T], out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn read_rows<T: DeserializeOwned, R: Read>(format: OutputFormat, input: R) -> Result<Vec<T>> {
    match format {
        OutputFormat::Csv => csv::Reader::from_reader(input)
            .deserialize()
            .map(|r| r.map_err(Error::from))
            .collect(),
        OutputFormat::Json => Ok(serde_json::from_reader(input)?),
    }
}

/// Gnuplot-style data: a `#` header line, then whitespace-separated pairs.
pub fn write_plot<W: Write>(mut out: W, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> Result<()> {
    writeln!(out, "# {x_label} {y_label}")?;
    for (x, y) in points {
        writeln!(out, "{x:e} {y:e}")?;
    }
    Ok(())
}

/// Two numeric columns pulled out of an arbitrary emitted table.
pub fn read_columns<R: Read>(format: OutputFormat, input: R, x_col: &str, y_col: &str) -> Result<Vec<(f64, f64)>> {
    let records: Vec<serde_json::Map<String, serde_json::Value>> = match format {
        OutputFormat::Json => serde_json::from_reader(input)?,
        OutputFormat::Csv => {
            let mut reader = csv::Reader::from_reader(input);
            let headers = reader.headers()?.clone();
            reader
                .records()
                .map(|rec| {
                    let rec = rec?;
                    Ok(headers
                        .iter()
                        .zip(rec.iter())
                        .map(|(h, v)| (h.to_string(), serde_json::Value::String(v.to_string())))
                        .collect())
                })
                .collect::<Result<_>>()?
        }
    };
    records
        .iter()
        .enumerate()
        .map(|(i, rec)| Ok((numeric(rec, x_col, i)?, numeric(rec, y_col, i)?)))
        .collect()
}

fn numeric(rec: &serde_json::Map<String, serde_json::Value>, col: &str, row: usize) -> Result<f64> {
    let v = rec
        .get(col)
        .ok_or_else(|| Error::param(format!("column {col:?} not found")))?;
    let parsed = match v {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) => s.trim().parse().ok(),
        _ => None,
    };
    parsed.ok_or_else(|| Error::format(row as u64, format!("row {row}: column {col:?} is not numeric")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ap::{self, ApQuery};
    use crate::characters;
    use crate::exact::{self, MemoryBudget};
    use crate::zeta;
    use std::fmt::Debug;

    fn round_trip<T>(rows: &[T])
    where
        T: Serialize + DeserializeOwned + PartialEq + Debug,
    {
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let mut buf = Vec::new();
            write_rows(format, rows, &mut buf).unwrap();
            let back: Vec<T> = read_rows(format, &buf[..]).unwrap();
            assert_eq!(back, rows, "{format:?}");
        }
    }

    #[test]
    fn average_rows() {
        let rows: Vec<AverageRow> = [(0, 1, 1000), (2, 5, 12_345), (3, 8, 99_999)]
            .iter()
            .map(|&(b, q, x)| AverageRow::from(&ap::average_a_ap(&ApQuery::new(b, q, x).unwrap())))
            .collect();
        round_trip(&rows);
        let mut buf = Vec::new();
        write_rows(OutputFormat::Csv, &rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "x,q,b,raw_sum,average,main_term,residual,ratio");
    }

    #[test]
    fn twist_rows() {
        let rows: Vec<TwistRow> = characters::characters(5)
            .unwrap()
            .iter()
            .map(|chi| TwistRow::from(&characters::twisted_sum(chi, 777).unwrap()))
            .collect();
        round_trip(&rows);
    }

    #[test]
    fn series_and_friends() {
        let mut rows = vec![SeriesRow::from(&zeta::partial_g(2.7, 1000).unwrap())];
        rows.push(SeriesRow {
            series_id: "zeta_real".into(),
            s: 2.0,
            n: None,
            re: zeta::zeta_real(2.0, 1e-12).unwrap(),
            im: 0.0,
        });
        round_trip(&rows);
        let c = zeta::cesaro_b(5000, MemoryBudget::default()).unwrap();
        round_trip(&[CesaroRow::from(&c)]);
        let probes: Vec<ResidueRow> = zeta::residue_probe(&[3.0, 2.8], 2000)
            .unwrap()
            .iter()
            .map(ResidueRow::from)
            .collect();
        round_trip(&probes);
    }

    #[test]
    fn misc_rows() {
        let seq: Vec<SequenceRow> = exact::sequence_range(20, 30).unwrap().map(|r| SequenceRow::from(&r)).collect();
        round_trip(&seq);
        round_trip(&[DivisorSumRow { n: 4, a: 2, b: 3 }]);
        round_trip(&[DiscrepancyRow {
            n: 10,
            q: 1,
            b: 0,
            start: 1,
            d_star: 0.125,
            d: 0.2,
            et_bound_k: 7.5,
            satisfied: true,
        }]);
        round_trip(&[KnRow {
            start: 1000,
            end: 2000,
            q: 3,
            m: 2,
            measured: 1.5,
            bound: 40.0,
            satisfied: true,
        }]);
    }

    #[test]
    fn columns_from_either_format() {
        let rows = vec![
            CesaroRow { x: 10, s_numerator: 5, value: 0.5, main_term: 1.0, ratio: 5.0 },
            CesaroRow { x: 100, s_numerator: 50, value: 0.5, main_term: 2.0, ratio: 25.0 },
        ];
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let mut buf = Vec::new();
            write_rows(format, &rows, &mut buf).unwrap();
            let cols = read_columns(format, &buf[..], "x", "ratio").unwrap();
            assert_eq!(cols, vec![(10.0, 5.0), (100.0, 25.0)]);
            assert!(read_columns(format, &buf[..], "x", "nope").is_err());
        }
    }

    #[test]
    fn plot_format() {
        let mut buf = Vec::new();
        write_plot(&mut buf, "x", "y", &[(10.0, 2.5)]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# x y\n1e1 2.5e0\n");
    }
}
