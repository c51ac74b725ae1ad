//! Float formatting shared by every CSV the toolkit writes.
//!
//! Floats are written in scientific notation with 17 significant digits,
//! which round-trips every finite `f64` exactly.

use std::io::{Read, Write};

use crate::error::{PricingError, Result};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| PricingError::domain(format!("not a number: {s:?}")))
}

/// Empty field for `None`.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(s).map(Some)
    }
}

/// One observation of a tidy `x,series,value` table.
#[derive(Debug, Clone, PartialEq)]
pub struct LongRow {
    pub x: f64,
    pub series: String,
    pub value: f64,
}

const LONG_HEADER: [&str; 3] = ["x", "series", "value"];

/// Writes `x,series,value` with LF line endings.
pub fn write_long_csv<W: Write>(rows: &[LongRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(LONG_HEADER)?;
    for r in rows {
        w.write_record([fmt_f64(r.x).as_str(), r.series.as_str(), fmt_f64(r.value).as_str()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_long_csv<R: Read>(input: R) -> Result<Vec<LongRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(LONG_HEADER) {
        return Err(PricingError::domain("expected header x,series,value"));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            Ok(LongRow { x: parse_f64(field(0))?, series: field(1).to_string(), value: parse_f64(field(2))? })
        })
        .collect()
}
