//! Stochasticity diagnostics for tensors and vectors.
//!
//! Validation is diagnostic, not fail-fast: callers get a report with
//! violation counts and the worst offending fiber/entry, and decide what
//! to do with it. [`crate::TensorBuilder::build`] turns a non-empty report
//! into an error.

use std::fmt;

use crate::tensor::{decode_col, CooEntry};
use crate::STOCHASTIC_TOL;

/// Maximum number of itemized violations kept in a report.
const EXAMPLE_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct FiberReport {
    /// 1-based `(i2, ..., im)` identifying the fiber.
    pub fiber: Vec<usize>,
    /// Sum of the fiber's entries (0 for a missing fiber).
    pub sum: f64,
    /// `1 - sum`.
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntryReport {
    /// 1-based full index tuple.
    pub indices: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    FiberSum(FiberReport),
    NegativeEntry(EntryReport),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TensorDiagnostics {
    pub fiber_violations: u64,
    pub negative_entries: u64,
    /// Fiber with the largest `|1 - sum|`.
    pub worst_fiber: Option<FiberReport>,
    /// Most negative entry.
    pub worst_negative: Option<EntryReport>,
    /// Up to 16 itemized violations.
    pub examples: Vec<Violation>,
}

impl TensorDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.fiber_violations == 0 && self.negative_entries == 0
    }

    fn record_fiber(&mut self, report: FiberReport) {
        self.fiber_violations += 1;
        let is_worse = self
            .worst_fiber
            .as_ref()
            .is_none_or(|w| report.deficit.abs() > w.deficit.abs());
        if is_worse {
            self.worst_fiber = Some(report.clone());
        }
        if self.examples.len() < EXAMPLE_CAP {
            self.examples.push(Violation::FiberSum(report));
        }
    }

    fn record_negative(&mut self, report: EntryReport) {
        self.negative_entries += 1;
        let is_worse = self
            .worst_negative
            .as_ref()
            .is_none_or(|w| report.value < w.value);
        if is_worse {
            self.worst_negative = Some(report.clone());
        }
        if self.examples.len() < EXAMPLE_CAP {
            self.examples.push(Violation::NegativeEntry(report));
        }
    }
}

impl fmt::Display for TensorDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "no violations");
        }
        write!(
            f,
            "{} fiber violation(s), {} negative entrie(s)",
            self.fiber_violations, self.negative_entries
        )?;
        if let Some(w) = &self.worst_fiber {
            write!(
                f,
                "; worst fiber {:?} sums to {} (deficit {:e})",
                w.fiber, w.sum, w.deficit
            )?;
        }
        if let Some(w) = &self.worst_negative {
            write!(f, "; worst negative entry {:?} = {:e}", w.indices, w.value)?;
        }
        Ok(())
    }
}

/// Validates the merged, `(col, row)`-sorted entry list of a mode-1
/// unfolding: nonnegative entries, every fiber present, every fiber sum
/// within [`STOCHASTIC_TOL`] of one.
pub(crate) fn validate_unfolding(
    order: usize,
    dim: usize,
    entries: &[CooEntry],
) -> TensorDiagnostics {
    let mut diag = TensorDiagnostics::default();
    let fiber_of = |col: u64| decode_col(col, dim, order);
    let index_of = |e: &CooEntry| {
        let mut idx = vec![e.row as usize + 1];
        idx.extend(decode_col(e.col, dim, order));
        idx
    };

    let mut present: u128 = 0;
    let mut cursor: u64 = 0; // next expected column when scanning for gaps
    let mut first_missing: Option<u64> = None;
    let mut i = 0;
    while i < entries.len() {
        let col = entries[i].col;
        if first_missing.is_none() && col > cursor {
            first_missing = Some(cursor);
        }
        cursor = col + 1;
        let mut sum = 0.0;
        let mut j = i;
        while j < entries.len() && entries[j].col == col {
            let e = &entries[j];
            if e.value < 0.0 {
                diag.record_negative(EntryReport {
                    indices: index_of(e),
                    value: e.value,
                });
            }
            sum += e.value;
            j += 1;
        }
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            diag.record_fiber(FiberReport {
                fiber: fiber_of(col),
                sum,
                deficit: 1.0 - sum,
            });
        }
        present += 1;
        i = j;
    }

    let expected = (dim as u128).pow(order as u32 - 1);
    if present < expected {
        let missing = expected - present;
        // Report the first missing fiber explicitly, count the rest.
        let col = first_missing.unwrap_or(cursor);
        diag.record_fiber(FiberReport {
            fiber: fiber_of(col),
            sum: 0.0,
            deficit: 1.0,
        });
        diag.fiber_violations += (missing as u64).saturating_sub(1);
    }
    diag
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VectorDiagnostics {
    pub negative_entries: u64,
    pub worst_negative: Option<(usize, f64)>,
    pub sum: f64,
    pub sum_deviation: f64,
}

impl VectorDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.negative_entries == 0 && self.sum_deviation <= STOCHASTIC_TOL
    }
}

/// Diagnostics for a would-be probability distribution.
pub fn validate_distribution(values: &[f64]) -> VectorDiagnostics {
    let mut diag = VectorDiagnostics::default();
    for (i, &x) in values.iter().enumerate() {
        if x < 0.0 {
            diag.negative_entries += 1;
            if diag.worst_negative.is_none_or(|(_, w)| x < w) {
                diag.worst_negative = Some((i, x));
            }
        }
    }
    diag.sum = values.iter().sum();
    diag.sum_deviation = (diag.sum - 1.0).abs();
    diag
}
