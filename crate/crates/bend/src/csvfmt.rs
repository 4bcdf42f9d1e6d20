//! Locale-independent number formatting shared by every CSV writer.

use std::path::Path;

use crate::error::{Error, Result};

/// Ten significant digits in scientific notation.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.9e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_else(|| "nan".to_string())
}

/// Compact label for an angle in π/32 units: `19`, `18.5`.
pub fn pi32_label(angle_pi32: f64) -> String {
    format!("{angle_pi32}")
}

/// Write a header plus rows and return the bytes written.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e.into_error(),
    })?;
    std::fs::write(path, &bytes).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    Ok(bytes)
}

pub fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}
