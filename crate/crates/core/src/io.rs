//! CSV ingestion and atomic output files.
//!
//! Input files hold one value per row, either as a single column or as
//! `index,value`. The value is always the last column. A single header line
//! is recognised when its last field is not a number.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvSeries {
    pub values: Vec<f64>,
    /// Integer label from the first column of the first data row, if any.
    pub start_label: Option<i64>,
}

pub fn read_series_csv(path: &Path) -> Result<CsvSeries> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_series_csv(&text, path)
}

pub fn parse_series_csv(text: &str, path: &Path) -> Result<CsvSeries> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_owned(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut values = Vec::new();
    let mut start_label = None;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let last = record.get(record.len() - 1).unwrap_or("");
        match last.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                if values.is_empty() && record.len() > 1 {
                    start_label = record
                        .get(0)
                        .and_then(|s| s.parse::<f64>().ok())
                        .map(|f| f.round() as i64);
                }
                values.push(v);
            }
            Ok(_) => return Err(parse_err(format!("row {}: non-finite value '{last}'", row + 1))),
            Err(_) if row == 0 => continue,
            Err(_) => return Err(parse_err(format!("row {}: cannot parse '{last}'", row + 1))),
        }
    }
    if values.is_empty() {
        return Err(parse_err("no data rows".into()));
    }
    Ok(CsvSeries {
        values,
        start_label,
    })
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Render rows as comma-separated text with a header line.
pub fn csv_text<R, I>(header: &[&str], rows: R) -> String
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = String>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.into_iter().collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
