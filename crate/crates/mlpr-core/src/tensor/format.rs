//! The `mlpr-tensor v1` text format.
//!
//! ```text
//! m n nnz
//! i1 i2 ... im value
//! ...
//! ```
//!
//! Indices are 1-based and whitespace-separated. `value` is either a
//! decimal literal or a rational `p/q`; rationals are parsed as exact
//! integers and converted with a single correctly-rounded division, so
//! hand-authored rational data survives the trip into `f64` bit-faithfully.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use super::{StochasticTensor, TensorBuilder, TensorError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

fn line_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Line {
        line,
        message: message.into(),
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64, FormatError> {
    if let Some((num, den)) = token.split_once('/') {
        let p: i128 = num
            .parse()
            .map_err(|_| line_err(line, format!("invalid rational numerator `{num}`")))?;
        let q: i128 = den
            .parse()
            .map_err(|_| line_err(line, format!("invalid rational denominator `{den}`")))?;
        if q == 0 {
            return Err(line_err(line, "rational denominator is zero"));
        }
        Ok(p as f64 / q as f64)
    } else {
        token
            .parse()
            .map_err(|_| line_err(line, format!("invalid value `{token}`")))
    }
}

/// Parses the format into a [`TensorBuilder`] (so that callers can run
/// diagnostics before building).
pub fn parse_tensor_v1<R: std::io::Read>(reader: R) -> Result<TensorBuilder, FormatError> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .ok_or_else(|| line_err(1, "missing header line `m n nnz`"))?
        .map_err(FormatError::Io)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(line_err(1, "header must be `m n nnz`"));
    }
    let order: usize = fields[0]
        .parse()
        .map_err(|_| line_err(1, format!("invalid order `{}`", fields[0])))?;
    let dim: usize = fields[1]
        .parse()
        .map_err(|_| line_err(1, format!("invalid dimension `{}`", fields[1])))?;
    let nnz: usize = fields[2]
        .parse()
        .map_err(|_| line_err(1, format!("invalid nonzero count `{}`", fields[2])))?;
    let mut builder = TensorBuilder::new(order, dim).map_err(|e| line_err(1, e.to_string()))?;

    let mut seen = 0usize;
    let mut line_no = 1usize;
    for line in lines {
        line_no += 1;
        let line = line.map_err(FormatError::Io)?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != order + 1 {
            return Err(line_err(
                line_no,
                format!(
                    "expected {} indices and a value, found {} fields",
                    order,
                    tokens.len()
                ),
            ));
        }
        let mut indices = Vec::with_capacity(order);
        for tok in &tokens[..order] {
            let ix: usize = tok
                .parse()
                .map_err(|_| line_err(line_no, format!("invalid index `{tok}`")))?;
            indices.push(ix);
        }
        let value = parse_value(tokens[order], line_no)?;
        builder
            .add_entry(&indices, value)
            .map_err(|e| line_err(line_no, e.to_string()))?;
        seen += 1;
        if seen > nnz {
            return Err(line_err(
                line_no,
                format!("more entries than the declared nnz {nnz}"),
            ));
        }
    }
    if seen != nnz {
        return Err(line_err(
            line_no,
            format!("header declares {nnz} entries, file contains {seen}"),
        ));
    }
    Ok(builder)
}

/// Reads, validates, and builds a tensor from a file.
pub fn read_tensor_file<P: AsRef<Path>>(path: P) -> Result<StochasticTensor, FormatError> {
    let file = File::open(path)?;
    Ok(parse_tensor_v1(file)?.build()?)
}

/// Writes coordinate-form tensors. Entries are emitted fiber-major with
/// shortest round-trip decimal values, so identical tensors produce
/// byte-identical files.
pub fn write_tensor_v1<W: Write>(
    tensor: &StochasticTensor,
    out: &mut W,
) -> Result<(), FormatError> {
    let entries = tensor.coo_entries()?;
    writeln!(out, "{} {} {}", tensor.order(), tensor.dim(), entries.len())?;
    for (indices, value) in entries {
        for ix in indices {
            write!(out, "{ix} ")?;
        }
        writeln!(out, "{value}")?;
    }
    Ok(())
}

pub fn write_tensor_file<P: AsRef<Path>>(
    tensor: &StochasticTensor,
    path: P,
) -> Result<(), FormatError> {
    let mut file = std::io::BufWriter::new(File::create(path)?);
    write_tensor_v1(tensor, &mut file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_and_decimal_values() {
        let text = "2 2 4\n1 1 1/3\n2 1 2/3\n1 2 0.25\n2 2 0.75\n";
        let t = parse_tensor_v1(text.as_bytes()).unwrap().build().unwrap();
        assert_eq!(t.entry(&[1, 1]).unwrap(), 1.0 / 3.0);
        assert_eq!(t.entry(&[2, 2]).unwrap(), 0.75);
    }

    #[test]
    fn reports_line_of_malformed_entry() {
        let text = "2 2 4\n1 1 1/3\n2 1 bogus\n";
        match parse_tensor_v1(text.as_bytes()) {
            Err(FormatError::Line { line: 3, .. }) => {}
            other => panic!("expected line-3 error, got {other:?}"),
        }
    }

    #[test]
    fn reports_wrong_entry_count() {
        let text = "2 2 3\n1 1 1\n2 2 1\n";
        match parse_tensor_v1(text.as_bytes()) {
            Err(FormatError::Line { message, .. }) => {
                assert!(message.contains("declares 3"), "{message}")
            }
            other => panic!("expected count mismatch, got {other:?}"),
        }
    }

    #[test]
    fn roundtrip_preserves_entries() {
        let t = super::super::saburov();
        let mut buf = Vec::new();
        write_tensor_v1(&t, &mut buf).unwrap();
        let back = parse_tensor_v1(buf.as_slice()).unwrap().build().unwrap();
        assert_eq!(t.coo_entries().unwrap(), back.coo_entries().unwrap());
        // and the bytes themselves are reproducible
        let mut buf2 = Vec::new();
        write_tensor_v1(&back, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }
}
