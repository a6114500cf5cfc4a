//! Reader for MatrixMarket coordinate files describing graph adjacency.
//!
//! Accepts `%%MatrixMarket matrix coordinate <real|integer|pattern>
//! <general|symmetric>` with 1-based indices. Entries become 0/1
//! adjacency: any stored nonzero is an arc, explicit zeros are dropped.
//! Symmetric storage is expanded to both orientations; `general` files
//! yield directed graphs.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

use crate::generators::Graph;

#[derive(Debug, Error)]
pub enum MatrixMarketError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

fn err(line: usize, message: impl Into<String>) -> MatrixMarketError {
    MatrixMarketError::Line {
        line,
        message: message.into(),
    }
}

pub fn read_graph<R: std::io::Read>(reader: R) -> Result<Graph, MatrixMarketError> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .ok_or_else(|| err(1, "empty file"))?
        .map_err(MatrixMarketError::Io)?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_lowercase())
        .collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" {
        return Err(err(
            1,
            "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`",
        ));
    }
    if fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(err(1, "only `matrix coordinate` files are supported"));
    }
    let field = fields[3].as_str();
    if !matches!(field, "real" | "integer" | "pattern") {
        return Err(err(1, format!("unsupported field type `{field}`")));
    }
    let pattern = field == "pattern";
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(err(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut line_no = 1usize;
    let mut size: Option<(usize, usize, usize)> = None;
    let mut arcs: Vec<(u32, u32)> = Vec::new();
    for line in lines {
        line_no += 1;
        let line = line.map_err(MatrixMarketError::Io)?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if tokens.len() != 3 {
                    return Err(err(line_no, "size line must be `rows cols nnz`"));
                }
                let rows: usize = tokens[0]
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid row count `{}`", tokens[0])))?;
                let cols: usize = tokens[1]
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid column count `{}`", tokens[1])))?;
                let nnz: usize = tokens[2]
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid nonzero count `{}`", tokens[2])))?;
                if rows != cols {
                    return Err(err(
                        line_no,
                        format!("adjacency must be square ({rows} x {cols})"),
                    ));
                }
                size = Some((rows, cols, nnz));
            }
            Some((rows, _, _)) => {
                let want = if pattern { 2 } else { 3 };
                if tokens.len() < want {
                    return Err(err(
                        line_no,
                        format!("expected {want} fields, found {}", tokens.len()),
                    ));
                }
                let i: usize = tokens[0]
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid row index `{}`", tokens[0])))?;
                let j: usize = tokens[1]
                    .parse()
                    .map_err(|_| err(line_no, format!("invalid column index `{}`", tokens[1])))?;
                if i < 1 || i > rows || j < 1 || j > rows {
                    return Err(err(
                        line_no,
                        format!("index ({i}, {j}) out of range 1..={rows}"),
                    ));
                }
                let keep = if pattern {
                    true
                } else {
                    let v: f64 = tokens[2]
                        .parse()
                        .map_err(|_| err(line_no, format!("invalid value `{}`", tokens[2])))?;
                    v != 0.0
                };
                if keep {
                    arcs.push((i as u32 - 1, j as u32 - 1));
                }
            }
        }
    }
    let Some((rows, _, nnz)) = size else {
        return Err(err(line_no, "missing size line"));
    };
    if arcs.len() > nnz {
        return Err(err(
            line_no,
            format!("file holds more than the declared {nnz} entries"),
        ));
    }
    Ok(if symmetric {
        Graph::new_undirected(rows, arcs)
    } else {
        Graph::new_directed(rows, arcs)
    })
}

pub fn read_graph_file<P: AsRef<Path>>(path: P) -> Result<Graph, MatrixMarketError> {
    read_graph(File::open(path)?)
}
