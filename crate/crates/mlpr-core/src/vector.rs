//! Stochastic (probability distribution) vectors.

use rand::Rng;
use thiserror::Error;

use crate::STOCHASTIC_TOL;

#[derive(Debug, Error, PartialEq)]
pub enum VectorError {
    #[error("entry {index} is negative ({value:e})")]
    Negative { index: usize, value: f64 },
    #[error("entries sum to {sum} (deviation {deviation:e} exceeds tolerance)")]
    NotNormalized { sum: f64, deviation: f64 },
    #[error("vector is empty")]
    Empty,
    #[error("entry {index} is not finite")]
    NotFinite { index: usize },
}

/// A dense length-`n` probability distribution: entries nonnegative and
/// summing to one within [`STOCHASTIC_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector {
    values: Vec<f64>,
}

impl DistributionVector {
    /// Validates nonnegativity and normalization.
    pub fn new(values: Vec<f64>) -> Result<Self, VectorError> {
        if values.is_empty() {
            return Err(VectorError::Empty);
        }
        for (i, &x) in values.iter().enumerate() {
            if !x.is_finite() {
                return Err(VectorError::NotFinite { index: i });
            }
            if x < 0.0 {
                return Err(VectorError::Negative { index: i, value: x });
            }
        }
        let sum: f64 = values.iter().sum();
        let deviation = (sum - 1.0).abs();
        if deviation > STOCHASTIC_TOL {
            return Err(VectorError::NotNormalized { sum, deviation });
        }
        Ok(Self { values })
    }

    /// Wraps values that are stochastic by construction. Debug builds verify
    /// the claim loosely (1e-9) to catch drift in solver internals.
    pub(crate) fn new_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(
            (values.iter().sum::<f64>() - 1.0).abs() <= 1e-9 && values.iter().all(|&x| x >= -1e-9),
            "new_unchecked received a non-stochastic vector"
        );
        Self { values }
    }

    /// Rescales a nonnegative vector with positive mass to sum exactly one.
    pub fn from_unnormalized(mut values: Vec<f64>) -> Result<Self, VectorError> {
        if values.is_empty() {
            return Err(VectorError::Empty);
        }
        for (i, &x) in values.iter().enumerate() {
            if !x.is_finite() {
                return Err(VectorError::NotFinite { index: i });
            }
            if x < 0.0 {
                return Err(VectorError::Negative { index: i, value: x });
            }
        }
        let sum: f64 = values.iter().sum();
        if sum <= 0.0 {
            return Err(VectorError::NotNormalized {
                sum,
                deviation: 1.0,
            });
        }
        for x in &mut values {
            *x /= sum;
        }
        Ok(Self { values })
    }

    /// The uniform distribution on `n` states.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self {
            values: vec![1.0 / n as f64; n],
        }
    }

    /// Draws uniformly from the simplex (normalized i.i.d. exponentials).
    pub fn random_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n > 0, "dimension must be positive");
        let mut values: Vec<f64> = (0..n)
            .map(|_| {
                // Map (0,1] to an Exp(1) sample; guard the open endpoint.
                let u: f64 = rng.random::<f64>();
                -(1.0 - u).max(f64::MIN_POSITIVE).ln()
            })
            .collect();
        let sum: f64 = values.iter().sum();
        for x in &mut values {
            *x /= sum;
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// Membership in the interior of the simplex (all entries strictly
    /// positive).
    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(|&x| x > 0.0)
    }
}

impl std::ops::Deref for DistributionVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl AsRef<[f64]> for DistributionVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// 1-norm of a vector.
pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// 1-norm of the difference of two equal-length vectors.
pub fn diff_norm1(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
