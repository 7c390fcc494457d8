//! Flat text matrix format: the first line holds `n`, followed by `n` lines
//! of `n` whitespace-separated reals. Blank lines and lines starting with `#`
//! are skipped.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;
use crate::scalar::Real;

pub fn read_matrix<T: Real, R: BufRead>(reader: R) -> Result<SymmetricMatrix<T>> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty() && !s.trim_start().starts_with('#')));
    let parse_err = |line, message: String| Error::Parse { line, message };
    let (first, header) = lines.next().ok_or_else(|| parse_err(1, "missing dimension line".into()))?;
    let header = header.map_err(|e| parse_err(first, e.to_string()))?;
    let n: usize = header.trim().parse().map_err(|_| parse_err(first, format!("bad dimension {header:?}")))?;
    if n == 0 {
        return Err(parse_err(first, "dimension must be positive".into()));
    }
    let mut data = DMatrix::<T>::zeros(n, n);
    for row in 0..n {
        let (line_no, line) = lines.next().ok_or_else(|| parse_err(first + row + 1, format!("expected {n} rows")))?;
        let line = line.map_err(|e| parse_err(line_no, e.to_string()))?;
        let values: Vec<&str> = line.split_whitespace().collect();
        if values.len() != n {
            return Err(parse_err(line_no, format!("expected {n} values, found {}", values.len())));
        }
        for (col, v) in values.iter().enumerate() {
            let x: f64 = v.parse().map_err(|_| parse_err(line_no, format!("bad number {v:?}")))?;
            data[(row, col)] = T::lit(x);
        }
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(parse_err(line_no, "trailing data after the last row".into()));
    }
    SymmetricMatrix::new(data)
}

/// Writes with shortest round-trip formatting, so reading back is exact.
pub fn write_matrix<T: Real, W: Write>(mut writer: W, m: &SymmetricMatrix<T>) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    writeln!(writer, "{}", m.n()).map_err(io)?;
    for i in 0..m.n() {
        let row: Vec<String> = (0..m.n()).map(|j| format!("{}", m.get(i, j).as_f64())).collect();
        writeln!(writer, "{}", row.join(" ")).map_err(io)?;
    }
    writer.flush().map_err(io)
}
