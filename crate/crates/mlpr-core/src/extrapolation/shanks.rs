//! Direct evaluation of the topological Shanks transformations through
//! their normalized coefficient system.
//!
//! Given the window `s_l, ..., s_{l+2k}` and a dual vector `y`, the
//! coefficients `a_0, ..., a_k` solve
//!
//! ```text
//! a_0 + ... + a_k = 1
//! a_0 <y, ds_{l+i}> + ... + a_k <y, ds_{l+k+i}> = 0 ,   i = 0, ..., k-1
//! ```
//!
//! with `ds_i = s_{i+1} - s_i`. The first transformation combines the
//! leading vectors, the second the trailing ones:
//!
//! ```text
//! first:  a_0 s_l     + ... + a_k s_{l+k}
//! second: a_0 s_{l+k} + ... + a_k s_{l+2k}
//! ```
//!
//! This is the O(k^3 + k n) reference route; the recursive scheme in
//! [`super::stea`] computes the same second transform without forming the
//! system.

use thiserror::Error;

use crate::dense::{condition_1norm, solve, DenseError, DenseMatrix};
use crate::vector::dot;

#[derive(Debug, Error)]
pub enum ShanksError {
    #[error("window must hold 2k+1 = {expected} vectors (got {got})")]
    WindowSize { expected: usize, got: usize },
    #[error("dual vector length {got} does not match vector dimension {expected}")]
    DualLength { expected: usize, got: usize },
    #[error("coefficient system is singular or ill-conditioned: {0}")]
    System(#[from] DenseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShanksVariant {
    First,
    Second,
}

#[derive(Debug, Clone)]
pub struct ShanksCoefficients {
    /// `a_0, ..., a_k`, summing to one.
    pub values: Vec<f64>,
    /// 1-norm condition number of the coefficient system.
    pub condition: f64,
}

/// Moments `b_i = <y, s_{i+1} - s_i>` of a window.
pub(crate) fn window_moments(window: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    window
        .windows(2)
        .map(|pair| {
            let d: Vec<f64> = pair[1].iter().zip(&pair[0]).map(|(a, b)| a - b).collect();
            dot(y, &d)
        })
        .collect()
}

/// Coefficient system from the moments `b_0 ... b_{2k-1}`.
pub(crate) fn coefficient_system(moments: &[f64]) -> DenseMatrix {
    debug_assert_eq!(moments.len() % 2, 0);
    let k = moments.len() / 2;
    let mut m = DenseMatrix::zeros(k + 1, k + 1);
    for j in 0..=k {
        m[(0, j)] = 1.0;
    }
    for i in 0..k {
        for j in 0..=k {
            m[(i + 1, j)] = moments[i + j];
        }
    }
    m
}

/// Solves the normalized system for the given moments.
pub(crate) fn solve_coefficients(moments: &[f64]) -> Result<ShanksCoefficients, DenseError> {
    let k = moments.len() / 2;
    let m = coefficient_system(moments);
    let mut rhs = vec![0.0; k + 1];
    rhs[0] = 1.0;
    let values = solve(&m, &rhs)?;
    let condition = condition_1norm(&m)?;
    Ok(ShanksCoefficients { values, condition })
}

/// Computes the order-`k` transformation of the first `2k + 1` vectors of
/// `window`.
pub fn shanks_direct(
    window: &[Vec<f64>],
    y: &[f64],
    half_width: usize,
    variant: ShanksVariant,
) -> Result<(ShanksCoefficients, Vec<f64>), ShanksError> {
    let k = half_width;
    if window.len() < 2 * k + 1 {
        return Err(ShanksError::WindowSize {
            expected: 2 * k + 1,
            got: window.len(),
        });
    }
    let window = &window[..2 * k + 1];
    let n = window[0].len();
    if y.len() != n {
        return Err(ShanksError::DualLength {
            expected: n,
            got: y.len(),
        });
    }
    if k == 0 {
        return Ok((
            ShanksCoefficients {
                values: vec![1.0],
                condition: 1.0,
            },
            window[0].clone(),
        ));
    }
    let moments = window_moments(window, y);
    let coeffs = solve_coefficients(&moments)?;
    let offset = match variant {
        ShanksVariant::First => 0,
        ShanksVariant::Second => k,
    };
    let mut out = vec![0.0; n];
    for (i, &a) in coeffs.values.iter().enumerate() {
        for (o, x) in out.iter_mut().zip(&window[offset + i]) {
            *o += a * x;
        }
    }
    Ok((coeffs, out))
}
