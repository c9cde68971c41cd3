//! `results.csv`: one row per run.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One run as written to and read back from `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub protocol: String,
    pub scheduler: String,
    pub detector: String,
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    /// Head start of the counting protocol.
    pub b: Option<u32>,
    pub converged: bool,
    pub total: u64,
    pub effective: u64,
    pub r0: Option<u32>,
    pub r1: Option<u32>,
    /// Longest census window, when census tracking was enabled.
    pub census_window: Option<u64>,
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    // written by hand so an empty list still gets a header
    w.write_record([
        "protocol",
        "scheduler",
        "detector",
        "n",
        "rep",
        "seed",
        "b",
        "converged",
        "total",
        "effective",
        "r0",
        "r1",
        "census_window",
    ])?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<ResultRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn read_csv_file(path: &Path) -> Result<Vec<ResultRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file).map_err(|e| Error::Results { path: path.to_path_buf(), message: e.to_string() })
}
