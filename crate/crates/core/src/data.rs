//! Dataset containers and their CSV interchange format.

use std::fmt;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// A regression dataset: feature matrix `x` (n rows, p columns) and
/// response vector `y` (length n).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self, DataError> {
        if x.nrows() != y.len() {
            return Err(DataError::ShapeMismatch {
                rows: x.nrows(),
                responses: y.len(),
            });
        }
        Ok(Self { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

/// Held-out observations drawn i.i.d. from the same law as the training data.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSet {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl TestSet {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self, DataError> {
        let d = Dataset::new(x, y)?;
        Ok(Self { x: d.x, y: d.y })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("feature matrix has {rows} rows but response has {responses} entries")]
    ShapeMismatch { rows: usize, responses: usize },
    #[error("csv parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Formats a float with 17 significant digits so that the f64 value
/// round-trips exactly through the decimal representation.
pub(crate) struct F64Full(pub f64);

impl fmt::Display for F64Full {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

/// Writes a dataset as CSV with header `x_0,...,x_{p-1},y`, LF line endings,
/// and floats rendered with 17 significant digits.
pub fn write_dataset_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<(), DataError> {
    let mut w = BufWriter::new(writer);
    let p = dataset.p();
    for j in 0..p {
        write!(w, "x_{j},")?;
    }
    writeln!(w, "y")?;
    for i in 0..dataset.n() {
        for j in 0..p {
            write!(w, "{},", F64Full(dataset.x[(i, j)]))?;
        }
        writeln!(w, "{}", F64Full(dataset.y[i]))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset_csv(dataset: &Dataset, path: &Path) -> Result<(), DataError> {
    write_dataset_csv(dataset, std::fs::File::create(path)?)
}

/// Reads a dataset written by [`write_dataset_csv`]. The header row is
/// required and fixes the number of feature columns.
pub fn read_dataset_csv<R: Read>(reader: R) -> Result<Dataset, DataError> {
    let r = BufReader::new(reader);
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| DataError::Parse {
            line: 1,
            message: "missing header row".into(),
        })?
        .map_err(DataError::Io)?;
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    if cols.len() < 2 || cols[cols.len() - 1] != "y" {
        return Err(DataError::Parse {
            line: 1,
            message: format!("expected header `x_0,...,x_{{p-1}},y`, got `{header}`"),
        });
    }
    let p = cols.len() - 1;
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 2;
        let line = line.map_err(DataError::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != p + 1 {
            return Err(DataError::Parse {
                line: line_no,
                message: format!("expected {} fields, got {}", p + 1, fields.len()),
            });
        }
        for field in &fields[..p] {
            xs.push(parse_f64(field, line_no)?);
        }
        ys.push(parse_f64(fields[p], line_no)?);
    }
    let n = ys.len();
    let x = DMatrix::from_row_slice(n, p, &xs);
    Dataset::new(x, DVector::from_vec(ys))
}

pub fn load_dataset_csv(path: &Path) -> Result<Dataset, DataError> {
    read_dataset_csv(std::fs::File::open(path)?)
}

fn parse_f64(field: &str, line: usize) -> Result<f64, DataError> {
    field.trim().parse::<f64>().map_err(|e| DataError::Parse {
        line,
        message: format!("bad float `{field}`: {e}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let x = DMatrix::from_row_slice(3, 2, &[0.1, -2.5e-17, 1.0 / 3.0, 7e300, 0.0, -1.0]);
        let y = DVector::from_vec(vec![1.5, f64::MIN_POSITIVE, 2.0f64.powi(-40)]);
        let ds = Dataset::new(x, y).unwrap();
        let mut buf = Vec::new();
        write_dataset_csv(&ds, &mut buf).unwrap();
        let back = read_dataset_csv(buf.as_slice()).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn rejects_bad_header() {
        let err = read_dataset_csv("a,b\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, DataError::Parse { line: 1, .. }));
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = read_dataset_csv("x_0,y\n1.0,2.0,3.0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, DataError::Parse { line: 2, .. }));
    }
}
