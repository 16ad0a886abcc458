//! CSV interchange for sweep results.
//!
//! Header `rep,lambda,k,M,estimator,value,status`; floats carry 17
//! significant digits so values round-trip exactly; lines end with LF. The
//! writer takes any row iterator and streams, so arbitrarily long sweeps
//! never need the whole table in memory.

use std::borrow::Borrow;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};

use thiserror::Error;

use crate::sweep::{EstimatorKind, ResultRow, Status};

pub const CSV_HEADER: &str = "rep,lambda,k,M,estimator,value,status";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("csv parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn write_csv<I, B, W>(rows: I, writer: W) -> Result<(), OutputError>
where
    I: IntoIterator<Item = B>,
    B: Borrow<ResultRow>,
    W: Write,
{
    let mut w = BufWriter::new(writer);
    writeln!(w, "{CSV_HEADER}")?;
    for row in rows {
        let row = row.borrow();
        writeln!(
            w,
            "{},{:.16e},{},{},{},{:.16e},{}",
            row.rep,
            row.lambda,
            row.k,
            row.m,
            row.estimator.name(),
            row.value,
            row.status.name()
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<ResultRow>, OutputError> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines();
    match lines.next() {
        Some(header) => {
            let header = header?;
            if header.trim_end() != CSV_HEADER {
                return Err(OutputError::Parse {
                    line: 1,
                    message: format!("unexpected header `{header}`"),
                });
            }
        }
        None => {
            return Err(OutputError::Parse {
                line: 1,
                message: "missing header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 7 {
            return Err(OutputError::Parse {
                line: line_no,
                message: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let parse_err = |message: String| OutputError::Parse {
            line: line_no,
            message,
        };
        rows.push(ResultRow {
            rep: fields[0]
                .parse()
                .map_err(|e| parse_err(format!("bad rep: {e}")))?,
            lambda: fields[1]
                .parse()
                .map_err(|e| parse_err(format!("bad lambda: {e}")))?,
            k: fields[2]
                .parse()
                .map_err(|e| parse_err(format!("bad k: {e}")))?,
            m: fields[3]
                .parse()
                .map_err(|e| parse_err(format!("bad M: {e}")))?,
            estimator: EstimatorKind::parse(fields[4])
                .ok_or_else(|| parse_err(format!("unknown estimator `{}`", fields[4])))?,
            value: fields[5]
                .parse()
                .map_err(|e| parse_err(format!("bad value: {e}")))?,
            status: Status::parse(fields[6])
                .ok_or_else(|| parse_err(format!("unknown status `{}`", fields[6])))?,
        });
    }
    Ok(rows)
}
