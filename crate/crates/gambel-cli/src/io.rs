use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::CliError;

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad grid '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let (start, stop, step) = (v[0], v[1], v[2]);
        if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if n > 10_000_000 {
            return Err(CliError::Usage(format!("grid '{s}' has too many points")));
        }
        return Ok((0..n).map(|i| start + i as f64 * step).collect());
    }
    if parts.len() != 1 {
        return Err(bad());
    }
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(v)
}

/// Numeric CSV into a matrix; a first row that does not parse is taken as a header.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(|t| t.parse::<f64>()).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(CliError::Usage(format!("{}: non-numeric value on line {}", path.display(), i + 1)));
            }
        }
    }
    let n = rows.len();
    if n == 0 {
        return Err(CliError::Usage(format!("{}: no data rows", path.display())));
    }
    let p = rows[0].len();
    if rows.iter().any(|r| r.len() != p) {
        return Err(CliError::Usage(format!("{}: rows have different lengths", path.display())));
    }
    Ok(DMatrix::from_row_iterator(n, p, rows.into_iter().flatten()))
}

pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

pub fn csv_writer(out: Box<dyn Write>) -> csv::Writer<Box<dyn Write>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Two-column CSV.
pub fn write_pairs(path: Option<&Path>, header: [&str; 2], xs: &[f64], ys: &[f64]) -> Result<(), CliError> {
    let mut w = csv_writer(output(path)?);
    w.write_record(header)?;
    for (x, y) in xs.iter().zip(ys) {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<(), CliError> {
    let mut out = output(path)?;
    serde_json::to_writer(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
