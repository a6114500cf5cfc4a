//! Choosing the dual vector `y` so that extrapolation preserves
//! stochasticity.
//!
//! The combination coefficients solved in [`super::shanks`] depend on `y`
//! only through the moments `b_i = <y, ds_{l+i}>`. Prescribing the
//! moments first and reconstructing a matching `y` afterwards therefore
//! steers the coefficients directly. The pattern produced by
//! [`stochasticity_moments`],
//!
//! ```text
//! b_{k-1} = 1,   b_{k-i} = b_{k-2+i} = -c_i < 0  (i = 2..k),
//! b_{2k-1} = 0,  sum |c_i| < 1   (default c_i = 1/(2k)) ,
//! ```
//!
//! makes the associated symmetric Toeplitz matrix positive definite with
//! `||I - T||_2 < 1`, which forces every solved coefficient to be
//! nonnegative. Combined with the normalization row, a nonnegative
//! combination of stochastic iterates is again stochastic.
//!
//! Reconstruction of `y` uses the thin QR factorization of the difference
//! matrix: with `Delta = Q R` and `g` solving `R^T g = b`, the vector
//! `y = Q g` satisfies `<y, ds_i> = b_i` for all `i`. This requires the
//! `2k` differences to be linearly independent and `2k <= n`.

use crate::dense::{qr_thin, DenseError, DenseMatrix};
use crate::extrapolation::shanks::coefficient_system;

/// The moment pattern `b_0 ... b_{2k-1}` with the default off-diagonal
/// weight `1/(2k)`.
pub fn stochasticity_moments(half_width: usize) -> Vec<f64> {
    assert!(half_width >= 1);
    let k = half_width;
    let mut b = vec![0.0; 2 * k];
    b[k - 1] = 1.0;
    let c = 1.0 / (2.0 * k as f64);
    for i in 2..=k {
        b[k - i] = -c;
        b[k - 2 + i] = -c;
    }
    b[2 * k - 1] = 0.0;
    b
}

/// Reconstruction problem: find `y` with `<y, delta_i> = b_i`.
#[derive(Debug, Clone)]
pub struct YConstructionProblem {
    deltas: Vec<Vec<f64>>,
    moments: Vec<f64>,
}

impl YConstructionProblem {
    pub fn new(deltas: Vec<Vec<f64>>, moments: Vec<f64>) -> Self {
        assert_eq!(deltas.len(), moments.len(), "one moment per difference");
        assert!(!deltas.is_empty());
        assert!(
            deltas.len() <= deltas[0].len(),
            "need 2k <= n for full column rank"
        );
        Self { deltas, moments }
    }

    /// Builds the differences of a `2k + 1`-vector window and pairs them
    /// with the given moments.
    pub fn from_window(window: &[Vec<f64>], moments: Vec<f64>) -> Self {
        assert_eq!(window.len(), moments.len() + 1);
        let deltas = window
            .windows(2)
            .map(|pair| pair[1].iter().zip(&pair[0]).map(|(a, b)| a - b).collect())
            .collect();
        Self::new(deltas, moments)
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    /// The dual vector realizing the moments; errors when the differences
    /// are rank deficient.
    pub fn construct_y(&self) -> Result<Vec<f64>, DenseError> {
        let delta = DenseMatrix::from_columns(&self.deltas);
        let (q, r) = qr_thin(&delta, 1e-12)?;
        let p = self.deltas.len();
        // forward substitution on R^T g = b
        let mut g = vec![0.0; p];
        for i in 0..p {
            let mut acc = self.moments[i];
            for j in 0..i {
                acc -= r[(j, i)] * g[j];
            }
            g[i] = acc / r[(i, i)];
        }
        // y = Q g
        let n = self.deltas[0].len();
        let mut y = vec![0.0; n];
        for (j, gj) in g.iter().enumerate() {
            for i in 0..n {
                y[i] += q[(i, j)] * gj;
            }
        }
        Ok(y)
    }

    /// The `(k+1) x (k+1)` symmetric Toeplitz matrix induced by the
    /// moments: `T[i][j] = b_{k-1+i-j}` (zero outside the moment range).
    pub fn toeplitz(&self) -> DenseMatrix {
        toeplitz_from_moments(&self.moments)
    }

    /// The normalized coefficient system these moments induce.
    pub fn system_matrix(&self) -> DenseMatrix {
        coefficient_system(&self.moments)
    }
}

/// Toeplitz matrix of the moment pattern (independent of the iterates).
pub fn toeplitz_from_moments(moments: &[f64]) -> DenseMatrix {
    debug_assert_eq!(moments.len() % 2, 0);
    let k = moments.len() / 2;
    let mut t = DenseMatrix::zeros(k + 1, k + 1);
    for i in 0..=k {
        for j in 0..=k {
            let idx = k as isize - 1 + i as isize - j as isize;
            if (0..2 * k as isize).contains(&idx) {
                t[(i, j)] = moments[idx as usize];
            }
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::symmetric_eigenvalues;
    use crate::extrapolation::shanks::{shanks_direct, ShanksVariant};
    use crate::vector::{dot, DistributionVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn moment_pattern_for_k2() {
        assert_eq!(stochasticity_moments(2), vec![-0.25, 1.0, -0.25, 0.0]);
        assert_eq!(stochasticity_moments(1), vec![1.0, 0.0]);
    }

    #[test]
    fn toeplitz_for_k2_is_spd_with_small_identity_distance() {
        let b = stochasticity_moments(2);
        let t = toeplitz_from_moments(&b);
        // explicit 3x3: [[1, -1/4, 0], [-1/4, 1, -1/4], [0, -1/4, 1]]
        assert_eq!(t[(0, 0)], 1.0);
        assert_eq!(t[(0, 1)], -0.25);
        assert_eq!(t[(0, 2)], 0.0);
        assert_eq!(t[(1, 0)], -0.25);
        let eig = symmetric_eigenvalues(&t);
        assert!(eig[0] > 0.0, "not positive definite: {eig:?}");
        // ||I - T||_2 = max |1 - eig| < 1
        let dist = eig.iter().map(|e| (1.0 - e).abs()).fold(0.0, f64::max);
        assert!(dist < 1.0, "||I - T||_2 = {dist}");
    }

    #[test]
    fn identity_deltas_reproduce_the_moments_directly() {
        // n = 2k with unit-vector differences: y equals b.
        let k = 2;
        let n = 2 * k;
        let deltas: Vec<Vec<f64>> = (0..2 * k)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        let b = stochasticity_moments(k);
        let y = YConstructionProblem::new(deltas, b.clone())
            .construct_y()
            .unwrap();
        for (yi, bi) in y.iter().zip(&b) {
            assert!((yi - bi).abs() < 1e-12);
        }
    }

    #[test]
    fn random_full_rank_deltas_reproduce_prescribed_moments() {
        use rand::Rng;
        let n = 12;
        let k = 3; // 2k = 6 <= n
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let deltas: Vec<Vec<f64>> = (0..2 * k)
            .map(|_| (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let b: Vec<f64> = (0..2 * k)
            .map(|_| rng.random::<f64>() * 4.0 - 2.0)
            .collect();
        let problem = YConstructionProblem::new(deltas.clone(), b.clone());
        let y = problem.construct_y().unwrap();
        for (delta, bi) in deltas.iter().zip(&b) {
            assert!((dot(&y, delta) - bi).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_moments_make_the_coefficient_system_degenerate() {
        use rand::Rng;
        let n = 8;
        let k = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let deltas: Vec<Vec<f64>> = (0..2 * k)
            .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
            .collect();
        let problem = YConstructionProblem::new(deltas, vec![0.0; 2 * k]);
        let y = problem.construct_y().unwrap();
        // y is orthogonal to every difference, so the moment rows vanish
        // and the coefficient system is singular.
        assert!(crate::dense::solve(&problem.system_matrix(), &[1.0, 0.0, 0.0]).is_err());
        assert!(crate::vector::norm1(&y) < 1e-10);
    }

    #[test]
    fn solved_coefficients_are_nonnegative_and_preserve_stochasticity() {
        let n = 20;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for k in 1..=5usize {
            let window: Vec<Vec<f64>> = (0..2 * k + 1)
                .map(|_| DistributionVector::random_simplex(n, &mut rng).into_vec())
                .collect();
            let b = stochasticity_moments(k);
            let y = YConstructionProblem::from_window(&window, b)
                .construct_y()
                .unwrap();
            let (coeffs, out) = shanks_direct(&window, &y, k, ShanksVariant::Second).unwrap();
            for &a in &coeffs.values {
                assert!(a >= -1e-12, "negative coefficient {a} at k={k}");
            }
            assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(out.iter().all(|&x| x >= -1e-12));
        }
    }
}
