//! Numeric CSV reader: one point per row.
//!
//! Unless disabled, the first row is a header when any of its cells fails to
//! parse as a number.

use std::io::Read;
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Header {
    Auto,
    Absent,
}

pub fn read_dataset<R: Read>(input: R, header: Header) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let mut values = Vec::new();
    let mut dim = None;
    let mut record = csv::StringRecord::new();
    let mut row = 0;
    loop {
        match reader.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => {
                return Err(Error::Csv {
                    row: row + 1,
                    column: 0,
                    message: e.to_string(),
                })
            }
        }
        row += 1;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, _>> =
            record.iter().map(str::parse::<f64>).collect();
        if row == 1 && header == Header::Auto && parsed.iter().any(|p| p.is_err()) {
            continue;
        }
        match dim {
            None => dim = Some(record.len()),
            Some(d) if d != record.len() => {
                return Err(Error::Csv {
                    row,
                    column: record.len().min(d) + 1,
                    message: format!("expected {d} columns, found {}", record.len()),
                })
            }
            Some(_) => {}
        }
        for (col, (cell, value)) in record.iter().zip(parsed).enumerate() {
            let v = value.map_err(|_| Error::Csv {
                row,
                column: col + 1,
                message: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    row,
                    column: col + 1,
                    message: format!("'{cell}' is not finite"),
                });
            }
            values.push(v);
        }
    }
    let dim = dim.ok_or_else(|| Error::InvalidDataset("no data rows".into()))?;
    Dataset::from_flat(dim, values)
}

pub fn read_dataset_file(path: &Path, header: Header) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_dataset(std::io::BufReader::new(file), header)
}
