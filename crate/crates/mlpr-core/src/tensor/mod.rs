//! Sparse order-`m` stochastic tensors and the tensor-times-vector-power
//! kernel.
//!
//! A tensor is stored through its mode-1 unfolding: every nonzero
//! `(i1, i2, ..., im) -> value` becomes a `(row, col, value)` triple where
//! `row = i1 - 1` and `col` is the mixed-radix encoding of
//! `(i2, ..., im)` with `i2` varying fastest:
//!
//! ```text
//! col = (i2 - 1) + (i3 - 1) * n + ... + (im - 1) * n^{m-2}
//! ```
//!
//! Memory is `O(nnz)` regardless of the order. Stochasticity means every
//! unfolding column (fiber over the first index) sums to one.

pub mod format;

mod graph_derived;

pub use graph_derived::GraphDerivedParts;

use thiserror::Error;

use crate::validate::{TensorDiagnostics, VectorDiagnostics};

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("tensor order must be at least 2 (got {0})")]
    OrderTooSmall(usize),
    #[error("tensor dimension must be at least 1 (got {0})")]
    DimensionTooSmall(usize),
    #[error("vector length {got} does not match tensor dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("entry has {got} indices, expected {expected}")]
    IndexArity { expected: usize, got: usize },
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("entry value {0} is not finite")]
    NotFinite(f64),
    #[error("tensor fails stochasticity validation: {0}")]
    Invalid(TensorDiagnostics),
    #[error(
        "operation requires coordinate storage; this tensor uses a structured graph-derived form"
    )]
    NotCoordinateForm,
}

/// Reduction order used by [`StochasticTensor::apply`].
///
/// Both modes are deterministic: `Sequential` accumulates nonzeros in
/// storage order, `Parallel` splits the nonzeros into fixed chunks,
/// accumulates each chunk independently and merges partial results in
/// chunk order. The two modes may differ by rounding in the last bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApplyMode {
    #[default]
    Sequential,
    /// Rayon chunked reduction. Falls back to `Sequential` when the crate
    /// is built without the `parallel` feature.
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CooEntry {
    pub row: u32,
    pub col: u64,
    pub value: f64,
}

pub(crate) fn coo_entry(row: u32, col: u64, value: f64) -> CooEntry {
    CooEntry { row, col, value }
}

#[derive(Debug, Clone)]
enum Repr {
    /// Coordinate list of the mode-1 unfolding, sorted by (col, row).
    Coo(Vec<CooEntry>),
    /// Triangle/adjacency mix kept in factored form (order 3 only); see
    /// [`GraphDerivedParts`].
    GraphDerived(GraphDerivedParts),
}

/// Sparse order-`m`, dimension-`n` stochastic tensor.
#[derive(Debug, Clone)]
pub struct StochasticTensor {
    order: usize,
    dim: usize,
    repr: Repr,
    mode: ApplyMode,
}

impl StochasticTensor {
    /// Order `m` of the tensor (number of modes).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Dimension `n` of every mode.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored nonzeros of the mode-1 unfolding. For graph-derived
    /// tensors this counts the nonzeros the unfolding would have if
    /// materialized.
    pub fn nnz(&self) -> u64 {
        match &self.repr {
            Repr::Coo(entries) => entries.len() as u64,
            Repr::GraphDerived(parts) => parts.materialized_nnz(),
        }
    }

    pub fn apply_mode(&self) -> ApplyMode {
        self.mode
    }

    pub fn set_apply_mode(&mut self, mode: ApplyMode) {
        self.mode = mode;
    }

    pub fn with_apply_mode(mut self, mode: ApplyMode) -> Self {
        self.mode = mode;
        self
    }

    /// The action `(A s^{m-1})_{i1} = sum a_{i1,...,im} s_{i2} ... s_{im}`.
    ///
    /// `s` is any real vector of length `n`; stochasticity of the output is
    /// guaranteed only for stochastic `s`.
    pub fn apply(&self, s: &[f64]) -> Result<Vec<f64>, TensorError> {
        if s.len() != self.dim {
            return Err(TensorError::DimensionMismatch {
                expected: self.dim,
                got: s.len(),
            });
        }
        Ok(match &self.repr {
            Repr::Coo(entries) => match self.mode {
                ApplyMode::Sequential => apply_coo_sequential(entries, s, self.dim, self.order),
                ApplyMode::Parallel => apply_coo_parallel(entries, s, self.dim, self.order),
            },
            Repr::GraphDerived(parts) => parts.apply(s),
        })
    }

    /// Entry `a_{i1,...,im}` addressed with 1-based indices.
    pub fn entry(&self, indices: &[usize]) -> Result<f64, TensorError> {
        if indices.len() != self.order {
            return Err(TensorError::IndexArity {
                expected: self.order,
                got: indices.len(),
            });
        }
        for &ix in indices {
            if ix < 1 || ix > self.dim {
                return Err(TensorError::IndexOutOfRange {
                    index: ix,
                    dim: self.dim,
                });
            }
        }
        let row = (indices[0] - 1) as u32;
        let col = encode_col(&indices[1..], self.dim);
        Ok(match &self.repr {
            Repr::Coo(entries) => {
                match entries.binary_search_by(|e| (e.col, e.row).cmp(&(col, row))) {
                    Ok(pos) => entries[pos].value,
                    Err(_) => 0.0,
                }
            }
            Repr::GraphDerived(parts) => parts.entry(row as usize, col),
        })
    }

    /// Nonzeros as 1-based index tuples, sorted fiber-major. Coordinate
    /// storage only.
    pub fn coo_entries(&self) -> Result<Vec<(Vec<usize>, f64)>, TensorError> {
        match &self.repr {
            Repr::Coo(entries) => Ok(entries
                .iter()
                .map(|e| {
                    let mut idx = Vec::with_capacity(self.order);
                    idx.push(e.row as usize + 1);
                    idx.extend(decode_col(e.col, self.dim, self.order));
                    (idx, e.value)
                })
                .collect()),
            Repr::GraphDerived(_) => Err(TensorError::NotCoordinateForm),
        }
    }

    /// Re-checks the stochasticity invariants and reports violations.
    pub fn validate(&self) -> TensorDiagnostics {
        match &self.repr {
            Repr::Coo(entries) => {
                crate::validate::validate_unfolding(self.order, self.dim, entries)
            }
            Repr::GraphDerived(parts) => parts.validate(),
        }
    }

    /// Fast path for generators that produce already-normalized unfolding
    /// columns: entries are `(row, col, value)` with 0-based indices.
    /// Debug builds re-validate.
    pub(crate) fn from_normalized_unfolding(
        order: usize,
        dim: usize,
        mut entries: Vec<CooEntry>,
    ) -> Self {
        entries.sort_unstable_by_key(|a| (a.col, a.row));
        let t = Self {
            order,
            dim,
            repr: Repr::Coo(entries),
            mode: ApplyMode::Sequential,
        };
        debug_assert!(
            t.validate().is_valid(),
            "generator produced an invalid tensor"
        );
        t
    }

    pub(crate) fn from_graph_derived(parts: GraphDerivedParts) -> Self {
        Self {
            order: 3,
            dim: parts.dim(),
            repr: Repr::GraphDerived(parts),
            mode: ApplyMode::Sequential,
        }
    }
}

/// Accumulates entries, merges duplicates, validates, and builds a
/// [`StochasticTensor`].
///
/// Duplicate index tuples are summed before validation (the MatrixMarket
/// convention for repeated coordinates).
#[derive(Debug, Clone)]
pub struct TensorBuilder {
    order: usize,
    dim: usize,
    entries: Vec<CooEntry>,
}

impl TensorBuilder {
    pub fn new(order: usize, dim: usize) -> Result<Self, TensorError> {
        if order < 2 {
            return Err(TensorError::OrderTooSmall(order));
        }
        if dim < 1 {
            return Err(TensorError::DimensionTooSmall(dim));
        }
        Ok(Self {
            order,
            dim,
            entries: Vec::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds one nonzero with 1-based indices `(i1, ..., im)`.
    pub fn add_entry(&mut self, indices: &[usize], value: f64) -> Result<(), TensorError> {
        if indices.len() != self.order {
            return Err(TensorError::IndexArity {
                expected: self.order,
                got: indices.len(),
            });
        }
        for &ix in indices {
            if ix < 1 || ix > self.dim {
                return Err(TensorError::IndexOutOfRange {
                    index: ix,
                    dim: self.dim,
                });
            }
        }
        if !value.is_finite() {
            return Err(TensorError::NotFinite(value));
        }
        self.entries.push(CooEntry {
            row: (indices[0] - 1) as u32,
            col: encode_col(&indices[1..], self.dim),
            value,
        });
        Ok(())
    }

    /// Merges duplicates and returns the merged, sorted entry list.
    fn merged(&self) -> Vec<CooEntry> {
        let mut entries = self.entries.clone();
        entries.sort_unstable_by_key(|a| (a.col, a.row));
        entries.dedup_by(|next, kept| {
            if next.col == kept.col && next.row == kept.row {
                kept.value += next.value;
                true
            } else {
                false
            }
        });
        entries
    }

    /// Stochasticity diagnostics on the merged entries.
    pub fn validate(&self) -> TensorDiagnostics {
        crate::validate::validate_unfolding(self.order, self.dim, &self.merged())
    }

    /// Validates and finalizes the tensor.
    pub fn build(self) -> Result<StochasticTensor, TensorError> {
        let entries = self.merged();
        let diagnostics = crate::validate::validate_unfolding(self.order, self.dim, &entries);
        if !diagnostics.is_valid() {
            return Err(TensorError::Invalid(diagnostics));
        }
        Ok(StochasticTensor {
            order: self.order,
            dim: self.dim,
            repr: Repr::Coo(entries),
            mode: ApplyMode::Sequential,
        })
    }
}

/// Encodes the trailing 1-based indices `(i2, ..., im)` into the unfolding
/// column, `i2` fastest.
pub(crate) fn encode_col(trailing: &[usize], dim: usize) -> u64 {
    let mut col = 0u64;
    let mut stride = 1u64;
    for &ix in trailing {
        col += (ix as u64 - 1) * stride;
        stride *= dim as u64;
    }
    col
}

/// Inverse of [`encode_col`]: the 1-based `(i2, ..., im)` tuple.
pub(crate) fn decode_col(col: u64, dim: usize, order: usize) -> Vec<usize> {
    let mut c = col;
    let n = dim as u64;
    (0..order - 1)
        .map(|_| {
            let ix = (c % n) as usize + 1;
            c /= n;
            ix
        })
        .collect()
}

fn apply_coo_sequential(entries: &[CooEntry], s: &[f64], dim: usize, order: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    accumulate(entries, s, dim as u64, order, &mut out);
    out
}

fn accumulate(entries: &[CooEntry], s: &[f64], n: u64, order: usize, out: &mut [f64]) {
    match order {
        2 => {
            for e in entries {
                out[e.row as usize] += e.value * s[e.col as usize];
            }
        }
        3 => {
            for e in entries {
                let j = (e.col % n) as usize;
                let k = (e.col / n) as usize;
                out[e.row as usize] += e.value * s[j] * s[k];
            }
        }
        _ => {
            for e in entries {
                let mut c = e.col;
                let mut prod = e.value;
                for _ in 0..order - 1 {
                    prod *= s[(c % n) as usize];
                    c /= n;
                }
                out[e.row as usize] += prod;
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn apply_coo_parallel(entries: &[CooEntry], s: &[f64], dim: usize, order: usize) -> Vec<f64> {
    use rayon::prelude::*;

    const MIN_CHUNK: usize = 8192;
    if entries.len() < 2 * MIN_CHUNK {
        return apply_coo_sequential(entries, s, dim, order);
    }
    let threads = rayon::current_num_threads().max(1);
    let chunk = (entries.len() / (4 * threads)).max(MIN_CHUNK);
    let partials: Vec<Vec<f64>> = entries
        .par_chunks(chunk)
        .map(|block| {
            let mut local = vec![0.0; dim];
            accumulate(block, s, dim as u64, order, &mut local);
            local
        })
        .collect();
    // Merge in fixed chunk order so the result is reproducible.
    let mut out = vec![0.0; dim];
    for local in partials {
        for (o, l) in out.iter_mut().zip(local) {
            *o += l;
        }
    }
    out
}

#[cfg(not(feature = "parallel"))]
fn apply_coo_parallel(entries: &[CooEntry], s: &[f64], dim: usize, order: usize) -> Vec<f64> {
    apply_coo_sequential(entries, s, dim, order)
}

/// Diagnostics for a would-be distribution vector.
pub fn validate_vector(values: &[f64]) -> VectorDiagnostics {
    crate::validate::validate_distribution(values)
}

/// The 3x3x3 positive stochastic tensor with three distinct stochastic
/// fixed points `[0.1, 0.2, 0.7]`, `[0.4, 0.3, 0.3]`, `[0.59, 0.31, 0.1]`
/// of the undamped map. Entries are rational and parsed exactly; ships
/// embedded as the standard pathological test case.
pub fn saburov() -> StochasticTensor {
    static DATA: &str = include_str!("saburov.mlpr");
    format::parse_tensor_v1(DATA.as_bytes())
        .expect("embedded tensor parses")
        .build()
        .expect("embedded tensor is stochastic")
}
