//! Curve input from `x,y` CSV and CSV output of per-solve records.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::curve::Point;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
struct XyRow {
    x: f64,
    y: f64,
}

/// Reads points from CSV with a mandatory `x,y` header.
pub fn read_points_csv<R: Read>(reader: R) -> Result<Vec<Point>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::InvalidArgument(format!("csv header: {e}")))?;
    if headers.iter().collect::<Vec<_>>() != ["x", "y"] {
        return Err(Error::InvalidArgument(format!("expected header x,y, found {headers:?}")));
    }
    rdr.deserialize::<XyRow>()
        .map(|r| {
            r.map(|row| [row.x, row.y])
                .map_err(|e| Error::InvalidArgument(format!("csv row: {e}")))
        })
        .collect()
}

pub fn read_points_file(path: &std::path::Path) -> Result<Vec<Point>> {
    let f = std::fs::File::open(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    read_points_csv(f)
}

/// One mapped solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub eps: f64,
    pub ns: usize,
    pub nt: usize,
    pub norm_sq: f64,
    pub residual: f64,
    pub wall_seconds: f64,
}

/// Writes serialisable rows as CSV with a header row and LF line endings.
pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidArgument(format!("csv write: {e}")))?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv write: {e}")))
}
