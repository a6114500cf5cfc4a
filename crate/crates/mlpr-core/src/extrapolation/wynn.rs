//! Wynn's scalar epsilon-algorithm.
//!
//! Feeding scalars `s_0, s_1, ...` builds the triangular table
//!
//! ```text
//! eps_{-1}^{(l)} = 0,   eps_0^{(l)} = s_l,
//! eps_{k+1}^{(l)} = eps_{k-1}^{(l+1)} + 1 / (eps_k^{(l+1)} - eps_k^{(l)}) ,
//! ```
//!
//! one ascending diagonal per pushed scalar, keeping only the current and
//! previous diagonals. Even columns `eps_{2k}^{(l)}` carry the Shanks
//! transforms of the scalar sequence; odd columns are intermediates.
//!
//! A difference whose magnitude falls below `threshold` times the local
//! scale makes the table degenerate: the recursion would divide by
//! (nearly) zero, which happens precisely when the sequence is constant
//! or has converged to working accuracy. Callers are expected to restart
//! or shorten the window.

use thiserror::Error;

/// A vanishing denominator in the epsilon recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("epsilon table degenerate at column {column}")]
pub struct Degeneracy {
    pub column: usize,
}

#[derive(Debug, Clone)]
pub struct ScalarEpsilonTable {
    /// Ascending diagonal with index sum `fed - 2`: `prev[c] = eps_c^{(j-1-c)}`.
    prev: Vec<f64>,
    /// Ascending diagonal with index sum `fed - 1`: `cur[c] = eps_c^{(j-c)}`.
    cur: Vec<f64>,
    fed: usize,
    threshold: f64,
}

/// Degeneracy test shared with the vector recursion: `a - b` counts as
/// vanishing when it is below `threshold` relative to the operands.
pub(crate) fn vanishing(a: f64, b: f64, threshold: f64) -> bool {
    let d = a - b;
    !d.is_finite() || d.abs() <= threshold * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

impl ScalarEpsilonTable {
    pub fn new(threshold: f64) -> Self {
        Self {
            prev: Vec::new(),
            cur: Vec::new(),
            fed: 0,
            threshold,
        }
    }

    /// Number of scalars pushed so far.
    pub fn fed(&self) -> usize {
        self.fed
    }

    /// Extends the table by one ascending diagonal.
    pub fn push(&mut self, value: f64) -> Result<(), Degeneracy> {
        let j = self.fed;
        let mut next = Vec::with_capacity(j + 1);
        next.push(value);
        for c in 1..=j {
            let below = next[c - 1]; // eps_{c-1}^{(j-c+1)}
            let above = self.cur[c - 1]; // eps_{c-1}^{(j-c)}
            if vanishing(below, above, self.threshold) {
                return Err(Degeneracy { column: c });
            }
            let west = if c >= 2 { self.cur[c - 2] } else { 0.0 }; // eps_{c-2}^{(j-c+1)}
            let entry = west + 1.0 / (below - above);
            if !entry.is_finite() {
                return Err(Degeneracy { column: c });
            }
            next.push(entry);
        }
        self.prev = std::mem::replace(&mut self.cur, next);
        self.fed += 1;
        Ok(())
    }

    /// Current ascending diagonal: `current()[c] = eps_c^{(fed-1-c)}`.
    pub fn current(&self) -> &[f64] {
        &self.cur
    }

    /// Previous ascending diagonal: `previous()[c] = eps_c^{(fed-2-c)}`.
    pub fn previous(&self) -> &[f64] {
        &self.prev
    }

    /// Convenience: the tip `eps_{fed-1}^{(0)}` of the current diagonal.
    pub fn tip(&self) -> Option<f64> {
        self.cur.last().copied()
    }
}

/// Shanks transform `eps_{2k}^{(0)}` of the first `2k + 1` scalars.
pub fn scalar_shanks(seq: &[f64], half_width: usize, threshold: f64) -> Result<f64, Degeneracy> {
    assert!(
        seq.len() > 2 * half_width,
        "need 2k+1 scalars for the order-k transform"
    );
    let mut table = ScalarEpsilonTable::new(threshold);
    for &s in &seq[..2 * half_width + 1] {
        table.push(s)?;
    }
    Ok(table.current()[2 * half_width])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sequence_is_resolved_exactly() {
        // s_l = 1 + 2^{-l}: the order-1 transform hits the limit exactly,
        // including in floating point (the cancellation is exact).
        let seq: Vec<f64> = (0..3).map(|l| 1.0 + 0.5f64.powi(l)).collect();
        let e2 = scalar_shanks(&seq, 1, 1e-14).unwrap();
        assert_eq!(e2, 1.0);
    }

    #[test]
    fn two_mode_sequence_needs_order_two() {
        // s_l = 3 + 2 (0.5)^l + (0.2)^l
        let seq: Vec<f64> = (0..5)
            .map(|l| 3.0 + 2.0 * 0.5f64.powi(l) + 0.2f64.powi(l))
            .collect();
        let e4 = scalar_shanks(&seq, 2, 1e-14).unwrap();
        assert!((e4 - 3.0).abs() < 1e-10, "got {e4}");
        // order 1 alone does not resolve it
        let e2 = scalar_shanks(&seq, 1, 1e-14).unwrap();
        assert!((e2 - 3.0).abs() > 1e-3);
    }

    #[test]
    fn constant_sequence_degenerates_in_the_first_column() {
        let mut table = ScalarEpsilonTable::new(1e-14);
        table.push(0.25).unwrap();
        assert_eq!(table.push(0.25), Err(Degeneracy { column: 1 }));
    }

    #[test]
    fn diagonals_expose_the_expected_entries() {
        let mut t = ScalarEpsilonTable::new(1e-14);
        for l in 0..3 {
            t.push(1.0 + 0.5f64.powi(l)).unwrap();
        }
        // current diagonal after three pushes: [eps_0^{(2)}, eps_1^{(1)}, eps_2^{(0)}]
        assert_eq!(t.current().len(), 3);
        assert_eq!(t.current()[0], 1.25);
        // eps_1^{(1)} = 1/(s_2 - s_1) = -4
        assert_eq!(t.current()[1], -4.0);
        assert_eq!(t.tip(), Some(1.0));
        assert_eq!(t.previous().len(), 2);
    }
}
