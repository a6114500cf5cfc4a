//! The damped multilinear PageRank fixed-point problem.

use thiserror::Error;

use crate::tensor::{StochasticTensor, TensorError};
use crate::vector::{norm1, DistributionVector};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("alpha must lie in [0, 1) (got {0})")]
    AlphaOutOfRange(f64),
    #[error("alpha must lie in [0, 1] (got {0})")]
    AlphaOutOfClosedRange(f64),
    #[error("teleportation vector must be strictly positive")]
    TeleportNotPositive,
    #[error("teleportation length {got} does not match tensor dimension {expected}")]
    TeleportDimension { expected: usize, got: usize },
    #[error("residual of the zero vector is undefined")]
    ZeroVector,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// The fixed-point problem `s = alpha P s^{m-1} + (1 - alpha) v`.
///
/// `alpha < 1` and a strictly positive teleportation vector make the
/// damped tensor irreducible, which guarantees a positive solution.
#[derive(Debug, Clone)]
pub struct PageRankProblem {
    tensor: StochasticTensor,
    alpha: f64,
    teleport: DistributionVector,
}

impl PageRankProblem {
    pub fn new(
        tensor: StochasticTensor,
        alpha: f64,
        teleport: DistributionVector,
    ) -> Result<Self, ProblemError> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(ProblemError::AlphaOutOfRange(alpha));
        }
        if teleport.len() != tensor.dim() {
            return Err(ProblemError::TeleportDimension {
                expected: tensor.dim(),
                got: teleport.len(),
            });
        }
        if !teleport.is_strictly_positive() {
            return Err(ProblemError::TeleportNotPositive);
        }
        Ok(Self {
            tensor,
            alpha,
            teleport,
        })
    }

    /// Convenience constructor with the uniform teleportation vector.
    pub fn with_uniform_teleport(
        tensor: StochasticTensor,
        alpha: f64,
    ) -> Result<Self, ProblemError> {
        let v = DistributionVector::uniform(tensor.dim());
        Self::new(tensor, alpha, v)
    }

    pub fn tensor(&self) -> &StochasticTensor {
        &self.tensor
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn teleport(&self) -> &DistributionVector {
        &self.teleport
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn order(&self) -> usize {
        self.tensor.order()
    }

    /// One application of the PageRank map to a stochastic vector:
    /// `alpha P s^{m-1} + (1 - alpha) v`. The output is stochastic by
    /// convexity; no renormalization is applied.
    pub fn map_apply(&self, s: &DistributionVector) -> Result<DistributionVector, ProblemError> {
        let values = pagerank_map(&self.tensor, self.alpha, &self.teleport, s)?;
        Ok(DistributionVector::new_unchecked(values))
    }

    /// Relative 1-norm residual of an arbitrary nonzero vector `x` under
    /// the damped tensor action:
    ///
    /// ```text
    /// r1(x) = || alpha P x^{m-1} + (1 - alpha) (e^T x)^{m-1} v  -  x ||_1 / ||x||_1
    /// ```
    ///
    /// The `(e^T x)^{m-1}` factor is the action of the rank-one
    /// teleportation tensor on general vectors; for stochastic `x` it is
    /// one and the expression reduces to
    /// `|| alpha P x^{m-1} + (1 - alpha) v - x ||_1`.
    pub fn residual(&self, x: &[f64]) -> Result<f64, ProblemError> {
        let scale = norm1(x);
        if scale == 0.0 {
            return Err(ProblemError::ZeroVector);
        }
        let t = self.tensor.apply(x)?;
        let mass: f64 = x.iter().sum();
        let teleport_weight = (1.0 - self.alpha) * mass.powi(self.order() as i32 - 1);
        let num: f64 = t
            .iter()
            .zip(self.teleport.as_slice())
            .zip(x)
            .map(|((ti, vi), xi)| (self.alpha * ti + teleport_weight * vi - xi).abs())
            .sum();
        Ok(num / scale)
    }

    /// Residual from a precomputed tensor action, for stochastic iterates.
    /// One residual per map evaluation: solvers reuse the apply they
    /// already paid for.
    pub(crate) fn residual_from_action(&self, s: &[f64], action: &[f64]) -> f64 {
        action
            .iter()
            .zip(self.teleport.as_slice())
            .zip(s)
            .map(|((ti, vi), si)| (self.alpha * ti + (1.0 - self.alpha) * vi - si).abs())
            .sum()
    }

    /// The damped action `alpha P s^{m-1} + (1 - alpha) v` on a stochastic
    /// `s`, as a raw vector (used by the inner-outer scheme where this
    /// whole map plays the role of the tensor).
    pub(crate) fn damped_action(&self, action: &[f64]) -> Vec<f64> {
        action
            .iter()
            .zip(self.teleport.as_slice())
            .map(|(ti, vi)| self.alpha * ti + (1.0 - self.alpha) * vi)
            .collect()
    }
}

/// Free-standing PageRank map for stochastic `s`, with `alpha` allowed to
/// reach 1 (the undamped tensor action); the problem type itself enforces
/// `alpha < 1`.
pub fn pagerank_map(
    tensor: &StochasticTensor,
    alpha: f64,
    teleport: &[f64],
    s: &[f64],
) -> Result<Vec<f64>, ProblemError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ProblemError::AlphaOutOfClosedRange(alpha));
    }
    if teleport.len() != tensor.dim() {
        return Err(ProblemError::TeleportDimension {
            expected: tensor.dim(),
            got: teleport.len(),
        });
    }
    let t = tensor.apply(s)?;
    Ok(t.iter()
        .zip(teleport)
        .map(|(ti, vi)| alpha * ti + (1.0 - alpha) * vi)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::saburov;
    use crate::vector::diff_norm1;

    fn saburov_problem(alpha: f64) -> PageRankProblem {
        PageRankProblem::with_uniform_teleport(saburov(), alpha).unwrap()
    }

    #[test]
    fn alpha_zero_returns_teleport() {
        let p = saburov_problem(0.0);
        let s = DistributionVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let out = p.map_apply(&s).unwrap();
        assert!(diff_norm1(&out, p.teleport()) < 1e-15);
        // and the residual at x = v vanishes
        assert!(p.residual(p.teleport().as_slice()).unwrap() < 1e-15);
    }

    #[test]
    fn alpha_one_is_the_pure_tensor_action() {
        let t = saburov();
        let v = vec![1.0 / 3.0; 3];
        let s = vec![0.1, 0.2, 0.7];
        let out = pagerank_map(&t, 1.0, &v, &s).unwrap();
        let pure = t.apply(&s).unwrap();
        assert!(diff_norm1(&out, &pure) < 1e-15);
    }

    #[test]
    fn map_of_a_pure_fixed_point_is_the_convex_combination() {
        let p = saburov_problem(0.99);
        let s = DistributionVector::new(vec![0.1, 0.2, 0.7]).unwrap();
        let out = p.map_apply(&s).unwrap();
        let want: Vec<f64> = s.iter().map(|&si| 0.99 * si + 0.01 / 3.0).collect();
        assert!(diff_norm1(&out, &want) < 1e-14);
    }

    #[test]
    fn residual_of_pure_fixed_points_under_pure_map() {
        // With the tensor action alone (alpha = 1 path through pagerank_map)
        // the pure fixed points have vanishing residual.
        let t = saburov();
        for x in [[0.4, 0.3, 0.3], [0.1, 0.2, 0.7], [0.59, 0.31, 0.1]] {
            let y = pagerank_map(&t, 1.0, &[1.0 / 3.0; 3], &x).unwrap();
            assert!(diff_norm1(&y, &x) <= 1e-10);
        }
    }

    #[test]
    fn residual_matches_dense_recomputation() {
        let p = saburov_problem(0.85);
        let x = [0.25, 0.6, 0.15];
        // dense recomputation via entry()
        let t = p.tensor();
        let mut action = [0.0; 3];
        for i1 in 1..=3 {
            for i2 in 1..=3 {
                for i3 in 1..=3 {
                    action[i1 - 1] += t.entry(&[i1, i2, i3]).unwrap() * x[i2 - 1] * x[i3 - 1];
                }
            }
        }
        let mass: f64 = x.iter().sum();
        let want: f64 = (0..3)
            .map(|i| (0.85 * action[i] + 0.15 * mass.powi(2) / 3.0 - x[i]).abs())
            .sum::<f64>()
            / x.iter().map(|v| v.abs()).sum::<f64>();
        let got = p.residual(&x).unwrap();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn zero_vector_residual_is_an_error() {
        let p = saburov_problem(0.5);
        assert!(matches!(
            p.residual(&[0.0; 3]),
            Err(ProblemError::ZeroVector)
        ));
    }

    #[test]
    fn constructor_rejects_bad_inputs() {
        let t = saburov();
        let v = DistributionVector::uniform(3);
        assert!(matches!(
            PageRankProblem::new(t.clone(), 1.0, v.clone()),
            Err(ProblemError::AlphaOutOfRange(_))
        ));
        let boundary = DistributionVector::new(vec![0.0, 0.5, 0.5]).unwrap();
        assert!(matches!(
            PageRankProblem::new(t, 0.5, boundary),
            Err(ProblemError::TeleportNotPositive)
        ));
    }
}
