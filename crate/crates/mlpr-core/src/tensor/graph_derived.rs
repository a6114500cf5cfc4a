//! Factored storage for order-3 tensors built from a graph.
//!
//! The unfolding of such a tensor is
//!
//! ```text
//! R = beta [S + v dangling(S)] + (1 - beta) [M + v dangling(M)] (x) e^T
//! ```
//!
//! where `S` is the column-rescaled unfolding of the triangle indicator
//! tensor, `M` the column-rescaled adjacency transpose, `v` a positive
//! distribution and `dangling(B) = e^T - e^T B` the row of column
//! deficits. Materializing `R` puts a dense copy of `v` into every
//! dangling column (there are `O(n^2)` of them) and repeats `M` across
//! `n` blocks; keeping the factors lets `apply` run in
//! `O(nnz(S) + nnz(M) + n)` instead.

use super::CooEntry;
use crate::validate::{EntryReport, FiberReport, TensorDiagnostics};
use crate::STOCHASTIC_TOL;

#[derive(Debug, Clone)]
pub struct GraphDerivedParts {
    n: usize,
    beta: f64,
    /// Correction distribution, strictly positive.
    v: Vec<f64>,
    /// Normalized triangle columns: `(row, col, value)` in the `n^2`
    /// column space, sorted by `(col, row)`. Each present column sums to 1.
    s_entries: Vec<CooEntry>,
    /// Sorted distinct columns of `s_entries`; every other column of `S`
    /// is dangling (deficit one).
    s_active_cols: Vec<u64>,
    /// Nonzeros of `M = A^T D^+` sorted by `(col, row)`; column `j` sums
    /// to 1 unless node `j` is isolated.
    m_entries: Vec<CooEntry>,
    /// `dangling(M)`: 1.0 at isolated nodes, else 0.0.
    m_deficit: Vec<f64>,
}

impl GraphDerivedParts {
    pub(crate) fn new(
        n: usize,
        beta: f64,
        v: Vec<f64>,
        mut s_entries: Vec<CooEntry>,
        mut m_entries: Vec<CooEntry>,
        m_deficit: Vec<f64>,
    ) -> Self {
        assert!((0.0..=1.0).contains(&beta), "beta must lie in [0, 1]");
        assert_eq!(v.len(), n);
        assert_eq!(m_deficit.len(), n);
        s_entries.sort_unstable_by_key(|a| (a.col, a.row));
        m_entries.sort_unstable_by_key(|a| (a.col, a.row));
        let mut s_active_cols: Vec<u64> = s_entries.iter().map(|e| e.col).collect();
        s_active_cols.dedup();
        Self {
            n,
            beta,
            v,
            s_entries,
            s_active_cols,
            m_entries,
            m_deficit,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `R x^2` for an arbitrary real `x`, bit-for-bit equal (up to the
    /// usual summation rounding) to what the materialized coordinate form
    /// would produce.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n as u64;
        let t: f64 = x.iter().sum();

        // beta part: S(x (x) x) plus v times the dangling mass.
        let mut out = vec![0.0; self.n];
        if self.beta != 0.0 {
            for e in &self.s_entries {
                let j = (e.col % n) as usize;
                let k = (e.col / n) as usize;
                out[e.row as usize] += e.value * x[j] * x[k];
            }
            // dangling(S) applied to x (x) x: t^2 minus the active-column mass
            let mut active_mass = 0.0;
            for &col in &self.s_active_cols {
                let j = (col % n) as usize;
                let k = (col / n) as usize;
                active_mass += x[j] * x[k];
            }
            let dangling_mass = t * t - active_mass;
            for (o, &vi) in out.iter_mut().zip(&self.v) {
                *o = self.beta * (*o + vi * dangling_mass);
            }
        }

        // (1 - beta) part: ((M + v dangling(M)) x) scaled by e^T x.
        if self.beta != 1.0 {
            let mut mx = vec![0.0; self.n];
            for e in &self.m_entries {
                mx[e.row as usize] += e.value * x[e.col as usize];
            }
            let deficit_mass: f64 = self.m_deficit.iter().zip(x).map(|(d, xi)| d * xi).sum();
            let w = (1.0 - self.beta) * t;
            for ((o, m), &vi) in out.iter_mut().zip(mx).zip(&self.v) {
                *o += w * (m + vi * deficit_mass);
            }
        }
        out
    }

    /// Entry of the materialized unfolding at `(row, col)`, 0-based.
    pub fn entry(&self, row: usize, col: u64) -> f64 {
        let n = self.n as u64;
        let j = (col % n) as usize; // i2: block-local column, selects the M column
        let s_val = match self
            .s_entries
            .binary_search_by(|e| (e.col, e.row).cmp(&(col, row as u32)))
        {
            Ok(pos) => self.s_entries[pos].value,
            Err(_) => 0.0,
        };
        let s_dangling = if self.s_active_cols.binary_search(&col).is_ok() {
            0.0
        } else {
            1.0
        };
        let m_val = match self
            .m_entries
            .binary_search_by(|e| (e.col, e.row).cmp(&(j as u64, row as u32)))
        {
            Ok(pos) => self.m_entries[pos].value,
            Err(_) => 0.0,
        };
        self.beta * (s_val + self.v[row] * s_dangling)
            + (1.0 - self.beta) * (m_val + self.v[row] * self.m_deficit[j])
    }

    /// Nonzero count of the materialized unfolding.
    pub fn materialized_nnz(&self) -> u64 {
        let n = self.n as u64;
        // Rows of each M-with-correction column.
        let m_col_rows: Vec<u64> = (0..self.n)
            .map(|j| {
                if self.m_deficit[j] > 0.0 {
                    n // dense v column
                } else {
                    let lo = self.m_entries.partition_point(|e| e.col < j as u64);
                    let hi = self.m_entries.partition_point(|e| e.col <= j as u64);
                    (hi - lo) as u64
                }
            })
            .collect();

        if self.beta == 0.0 {
            return m_col_rows.iter().sum::<u64>() * n;
        }

        let mut total: u64 = 0;
        // Dangling columns of S carry a dense copy of v: n rows each.
        let dangling_cols = n * n - self.s_active_cols.len() as u64;
        total += dangling_cols * n;
        // Active columns: union of the triangle rows and the M column rows.
        let mut i = 0usize;
        for &col in &self.s_active_cols {
            let j = (col % n) as usize;
            let mut s_rows = Vec::new();
            while i < self.s_entries.len() && self.s_entries[i].col == col {
                s_rows.push(self.s_entries[i].row);
                i += 1;
            }
            if self.beta == 1.0 {
                total += s_rows.len() as u64;
            } else if self.m_deficit[j] > 0.0 {
                total += n; // v makes the column dense
            } else {
                let lo = self.m_entries.partition_point(|e| e.col < j as u64);
                let hi = self.m_entries.partition_point(|e| e.col <= j as u64);
                let mut union = s_rows.len() + (hi - lo);
                for e in &self.m_entries[lo..hi] {
                    if s_rows.binary_search(&e.row).is_ok() {
                        union -= 1;
                    }
                }
                total += union as u64;
            }
        }
        total
    }

    /// Structural stochasticity check: every present `S` column and every
    /// non-isolated `M` column must sum to one, `v` must be a positive
    /// distribution. Together these make every materialized column sum to
    /// `beta + (1 - beta) = 1`.
    pub fn validate(&self) -> TensorDiagnostics {
        let mut diag = TensorDiagnostics::default();
        let n = self.n as u64;
        let mut i = 0usize;
        while i < self.s_entries.len() {
            let col = self.s_entries[i].col;
            let mut sum = 0.0;
            while i < self.s_entries.len() && self.s_entries[i].col == col {
                if self.s_entries[i].value < 0.0 {
                    record_negative(&mut diag, &self.s_entries[i], n);
                }
                sum += self.s_entries[i].value;
                i += 1;
            }
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                record_fiber(&mut diag, col, sum, n);
            }
        }
        let mut j = 0usize;
        let mut idx = 0usize;
        while j < self.n {
            let mut sum = 0.0;
            while idx < self.m_entries.len() && self.m_entries[idx].col == j as u64 {
                if self.m_entries[idx].value < 0.0 {
                    record_negative(&mut diag, &self.m_entries[idx], n);
                }
                sum += self.m_entries[idx].value;
                idx += 1;
            }
            let expected = 1.0 - self.m_deficit[j];
            if (sum - expected).abs() > STOCHASTIC_TOL {
                record_fiber(&mut diag, j as u64, sum, n);
            }
            j += 1;
        }
        let vd = crate::validate::validate_distribution(&self.v);
        if !vd.is_valid() || self.v.iter().any(|&x| x <= 0.0) {
            diag.fiber_violations += 1;
        }
        diag
    }
}

fn record_negative(diag: &mut TensorDiagnostics, e: &CooEntry, n: u64) {
    let report = EntryReport {
        indices: vec![
            e.row as usize + 1,
            (e.col % n) as usize + 1,
            (e.col / n) as usize + 1,
        ],
        value: e.value,
    };
    diag.negative_entries += 1;
    if diag
        .worst_negative
        .as_ref()
        .is_none_or(|w| report.value < w.value)
    {
        diag.worst_negative = Some(report);
    }
}

fn record_fiber(diag: &mut TensorDiagnostics, col: u64, sum: f64, n: u64) {
    let report = FiberReport {
        fiber: vec![(col % n) as usize + 1, (col / n) as usize + 1],
        sum,
        deficit: 1.0 - sum,
    };
    diag.fiber_violations += 1;
    if diag
        .worst_fiber
        .as_ref()
        .is_none_or(|w| report.deficit.abs() > w.deficit.abs())
    {
        diag.worst_fiber = Some(report);
    }
}
