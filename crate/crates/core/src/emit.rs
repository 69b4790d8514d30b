//! CSV and JSON writers. CSV numbers carry 6 significant digits, JSON full
//! doubles.

use crate::error::Result;
use crate::numeric::fmt_sig6;
use serde::Serialize;
use std::io::Write;

pub fn write_json<W: Write, T: Serialize + ?Sized>(w: W, value: &T) -> Result<()> {
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

pub fn write_csv<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(header)?;
    for r in rows {
        wr.write_record(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn num(v: f64) -> String {
    fmt_sig6(v)
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(fmt_sig6).unwrap_or_default()
}
