//! Baseline fixed-point iterations for the multilinear PageRank problem.
//!
//! Two methods are provided. The shifted fixed-point method (SFPM) damps
//! the PageRank map with a shift `gamma >= 0`:
//!
//! ```text
//! s_{l+1} = alpha/(1+gamma) P s_l^{m-1} + (1-alpha)/(1+gamma) v + gamma/(1+gamma) s_l
//! ```
//!
//! The inner-outer method (IOM) solves, at each outer step, the implicit
//! equation
//!
//! ```text
//! s_{l+1} = alpha/(m-1) A s_{l+1}^{m-1} + (1 - alpha/(m-1)) s_l ,
//! ```
//!
//! where `A` is the damped tensor itself; the inner problem is again of
//! PageRank form with damping `alpha/(m-1) < 1/(m-1)`, hence always in
//! the contractive regime, and is solved here by the SFPM with zero
//! shift, teleportation replaced by `s_l`.
//!
//! Both produce stochastic iterates from a stochastic start. For
//! `alpha < 1/(m-1)` the iteration errors obey the a-priori bounds
//! exposed as [`sfpm_error_bound`] and [`io_error_bound`].
//!
//! Iteration cost is counted in *map evaluations* (applications of the
//! sparse tensor action), and the stopping residual is always computed
//! from the evaluation that produced the current iterate, so one residual
//! costs exactly one map evaluation.

use std::time::Instant;

use thiserror::Error;

use crate::problem::{PageRankProblem, ProblemError};
use crate::tensor::{StochasticTensor, TensorError};
use crate::vector::{diff_norm1, norm1, DistributionVector, VectorError};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("parameter outside the guaranteed domain: {0}")]
    Domain(String),
    #[error(
        "inner iteration budget exhausted after {evals_spent} map evaluations \
         (inner residual {inner_residual:e})"
    )]
    InnerBudgetExhausted {
        /// Best inner iterate reached before the budget ran out.
        best: Vec<f64>,
        /// Residual of `best` under the outer problem.
        outer_residual: f64,
        inner_residual: f64,
        evals_spent: u64,
    },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Configuration shared by the basic solvers (and, for tolerances and
/// budgets, by the restarted extrapolation driver).
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Shift of the SFPM. Ignored by the inner-outer method.
    pub gamma: f64,
    /// Residual threshold for convergence.
    pub tol: f64,
    /// Maximum iterations past the initial residual evaluation.
    pub max_iters: usize,
    /// Inner residual threshold of the IOM; `None` means
    /// `max(tol/10, 1e-13)`.
    pub inner_tol: Option<f64>,
    /// Inner iteration cap per outer step; `None` means `10 * n`.
    pub inner_max_iters: Option<usize>,
    /// Hard cap on total map evaluations; `None` means unlimited.
    pub max_map_evals: Option<u64>,
}

impl SolverConfig {
    pub fn new(tol: f64) -> Self {
        Self {
            gamma: 0.0,
            tol,
            max_iters: 1_000_000,
            inner_tol: None,
            inner_max_iters: None,
            max_map_evals: None,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn effective_inner_tol(&self) -> f64 {
        self.inner_tol
            .unwrap_or_else(|| (self.tol / 10.0).max(1e-13))
    }

    pub fn effective_inner_max_iters(&self, dim: usize) -> usize {
        self.inner_max_iters.unwrap_or(10 * dim)
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.tol.is_nan() || self.tol < 1e-15 {
            return Err(SolveError::InvalidConfig(format!(
                "tol must be at least 1e-15 (got {})",
                self.tol
            )));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(SolveError::InvalidConfig(format!(
                "gamma must be finite and nonnegative (got {})",
                self.gamma
            )));
        }
        if let Some(it) = self.inner_tol {
            if it.is_nan() || it <= 0.0 {
                return Err(SolveError::InvalidConfig(format!(
                    "inner_tol must be positive (got {it})"
                )));
            }
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(1e-8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    /// Iterate index (0 is the starting vector).
    pub step: usize,
    /// Residual of this iterate.
    pub residual: f64,
    /// Map evaluations spent so far, including the one that produced this
    /// residual.
    pub cum_map_evals: u64,
    pub wall_seconds: f64,
    /// True when the iterate is an extrapolated restart point.
    pub is_extrapolated: bool,
}

/// Bookkeeping produced by the restarted extrapolation driver.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtrapolationStats {
    /// Peak number of simultaneously stored extrapolation vectors
    /// (diagonal scheme contract: at most `k + 2`). The
    /// stochasticity-enforcing strategy stores the whole `2k + 1` window
    /// instead and reports that here.
    pub max_resident_vectors: usize,
    /// Cycles that ended early on a degenerate epsilon table and fell
    /// back to the last basic iterate.
    pub degenerate_cycles: u64,
    /// Extrapolated restarts that violated stochasticity beyond 1e-9 and
    /// were clipped and renormalized.
    pub clipped_restarts: u64,
    pub cycles_completed: u64,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
    /// The iterate whose residual is recorded in the last trace row.
    pub final_vector: Vec<f64>,
    pub final_residual: f64,
    pub termination: Termination,
    pub map_evals: u64,
    pub wall_seconds: f64,
    /// Iterates drifting from stochasticity beyond 1e-9 (monitored, never
    /// fatal).
    pub stochasticity_warnings: u64,
    pub extrapolation: Option<ExtrapolationStats>,
}

impl IterationTrace {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    /// The final iterate as a checked distribution.
    pub fn final_distribution(&self) -> Result<DistributionVector, VectorError> {
        DistributionVector::new(self.final_vector.clone())
    }
}

/// One advance of a fixed-point scheme, together with the residual of the
/// vector it advanced *from*.
#[derive(Debug, Clone)]
pub struct DriverStep {
    /// Residual of the input iterate.
    pub residual: f64,
    /// The next iterate.
    pub next: Vec<f64>,
    /// Map evaluations consumed by this call.
    pub evals: u64,
}

/// A fixed-point scheme usable by the basic loop and by the restarted
/// extrapolation driver.
pub trait FixedPointDriver {
    fn dim(&self) -> usize;
    /// Advances from `s`, reporting the residual of `s` itself. One call
    /// performs whatever map evaluations the scheme needs (one for the
    /// SFPM, a full inner solve for the IOM).
    fn step(&mut self, s: &[f64]) -> Result<DriverStep, SolveError>;
}

/// SFPM driver: one map evaluation per step.
pub struct SfpmDriver<'a> {
    problem: &'a PageRankProblem,
    gamma: f64,
}

impl<'a> SfpmDriver<'a> {
    pub fn new(problem: &'a PageRankProblem, gamma: f64) -> Self {
        Self { problem, gamma }
    }
}

impl FixedPointDriver for SfpmDriver<'_> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn step(&mut self, s: &[f64]) -> Result<DriverStep, SolveError> {
        let action = self.problem.tensor().apply(s)?;
        let residual = self.problem.residual_from_action(s, &action);
        let alpha = self.problem.alpha();
        let g = self.gamma;
        let scale = 1.0 / (1.0 + g);
        let v = self.problem.teleport().as_slice();
        let mut next: Vec<f64> = action
            .iter()
            .zip(v)
            .zip(s)
            .map(|((ai, vi), si)| scale * (alpha * ai + (1.0 - alpha) * vi + g * si))
            .collect();
        renormalize_mass(&mut next);
        Ok(DriverStep {
            residual,
            next,
            evals: 1,
        })
    }
}

/// IOM driver: each step runs an inner SFPM solve (zero shift, damping
/// `alpha/(m-1)`, teleportation replaced by the current outer iterate).
pub struct InnerOuterDriver<'a> {
    problem: &'a PageRankProblem,
    inner_tol: f64,
    inner_max_iters: usize,
    /// The damped action of the iterate this driver last returned; saves
    /// one map evaluation per outer step.
    cache: Option<(Vec<f64>, Vec<f64>)>,
}

impl<'a> InnerOuterDriver<'a> {
    pub fn new(problem: &'a PageRankProblem, config: &SolverConfig) -> Self {
        Self {
            problem,
            inner_tol: config.effective_inner_tol(),
            inner_max_iters: config.effective_inner_max_iters(problem.dim()),
            cache: None,
        }
    }
}

impl FixedPointDriver for InnerOuterDriver<'_> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn step(&mut self, s: &[f64]) -> Result<DriverStep, SolveError> {
        let mut evals = 0u64;
        // f(x) = alpha P x^{m-1} + (1-alpha) v, the damped action.
        let fx0 = match self.cache.take() {
            Some((cached_s, cached_f)) if cached_s == s => cached_f,
            _ => {
                evals += 1;
                self.problem.damped_action(&self.problem.tensor().apply(s)?)
            }
        };
        let outer_residual = diff_norm1(&fx0, s);
        let m = self.problem.order();
        let at = self.problem.alpha() / (m - 1) as f64;

        let mut x = s.to_vec();
        let mut fx = fx0;
        for _ in 0..self.inner_max_iters.max(1) {
            // x_{j+1} = at * f(x_j) + (1 - at) * s
            let mut xnew: Vec<f64> = fx
                .iter()
                .zip(s)
                .map(|(f, t)| at * f + (1.0 - at) * t)
                .collect();
            renormalize_mass(&mut xnew);
            let fnew = self
                .problem
                .damped_action(&self.problem.tensor().apply(&xnew)?);
            evals += 1;
            let inner_residual: f64 = fnew
                .iter()
                .zip(s)
                .zip(&xnew)
                .map(|((f, t), xi)| (at * f + (1.0 - at) * t - xi).abs())
                .sum();
            x = xnew;
            fx = fnew;
            if inner_residual <= self.inner_tol {
                self.cache = Some((x.clone(), fx));
                return Ok(DriverStep {
                    residual: outer_residual,
                    next: x,
                    evals,
                });
            }
        }
        let inner_residual: f64 = fx
            .iter()
            .zip(s)
            .zip(&x)
            .map(|((f, t), xi)| (at * f + (1.0 - at) * t - xi).abs())
            .sum();
        Err(SolveError::InnerBudgetExhausted {
            outer_residual: diff_norm1(&fx, &x),
            best: x,
            inner_residual,
            evals_spent: evals,
        })
    }
}

/// Wraps an arbitrary fixed-point map `F` for use with the restarted
/// driver; the residual is `||F(s) - s||_1 / ||s||_1`.
pub struct MapDriver<F: FnMut(&[f64]) -> Vec<f64>> {
    dim: usize,
    map: F,
}

impl<F: FnMut(&[f64]) -> Vec<f64>> MapDriver<F> {
    pub fn new(dim: usize, map: F) -> Self {
        Self { dim, map }
    }
}

impl<F: FnMut(&[f64]) -> Vec<f64>> FixedPointDriver for MapDriver<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn step(&mut self, s: &[f64]) -> Result<DriverStep, SolveError> {
        let next = (self.map)(s);
        let residual = diff_norm1(&next, s) / norm1(s).max(f64::MIN_POSITIVE);
        Ok(DriverStep {
            residual,
            next,
            evals: 1,
        })
    }
}

fn check_start(problem: &PageRankProblem, s0: &[f64]) -> Result<(), SolveError> {
    if s0.len() != problem.dim() {
        return Err(SolveError::Tensor(TensorError::DimensionMismatch {
            expected: problem.dim(),
            got: s0.len(),
        }));
    }
    Ok(())
}

fn warn_drift(s: &[f64]) -> bool {
    let sum: f64 = s.iter().sum();
    (sum - 1.0).abs() > crate::ITERATE_WARN_TOL || s.iter().any(|&x| x < -crate::ITERATE_WARN_TOL)
}

/// Pins an (analytically stochastic) iterate back onto the simplex.
///
/// In the non-contractive regime the tensor action scales total mass by
/// `(sum s)^{m-1}`, so a one-ulp deviation is amplified geometrically
/// across iterations; dividing by the actual sum is a no-op in exact
/// arithmetic and keeps the drift at rounding level indefinitely.
fn renormalize_mass(v: &mut [f64]) {
    let sum: f64 = v.iter().sum();
    if sum > 0.0 && sum != 1.0 {
        for x in v.iter_mut() {
            *x /= sum;
        }
    }
}

/// The shared basic iteration loop.
pub(crate) fn drive_basic(
    driver: &mut dyn FixedPointDriver,
    s0: &[f64],
    tol: f64,
    max_iters: usize,
    max_map_evals: Option<u64>,
) -> Result<IterationTrace, SolveError> {
    let t0 = Instant::now();
    let mut steps = Vec::new();
    let mut cum = 0u64;
    let mut warnings = 0u64;
    let mut s = s0.to_vec();
    let mut l = 0usize;
    loop {
        match driver.step(&s) {
            Ok(st) => {
                cum += st.evals;
                steps.push(TraceStep {
                    step: l,
                    residual: st.residual,
                    cum_map_evals: cum,
                    wall_seconds: t0.elapsed().as_secs_f64(),
                    is_extrapolated: false,
                });
                if warn_drift(&s) {
                    warnings += 1;
                }
                let termination = if st.residual <= tol {
                    Some(Termination::Converged)
                } else if l >= max_iters || max_map_evals.is_some_and(|cap| cum >= cap) {
                    Some(Termination::BudgetExhausted)
                } else {
                    None
                };
                if let Some(termination) = termination {
                    return Ok(IterationTrace {
                        final_residual: st.residual,
                        final_vector: s,
                        termination,
                        map_evals: cum,
                        wall_seconds: t0.elapsed().as_secs_f64(),
                        stochasticity_warnings: warnings,
                        extrapolation: None,
                        steps,
                    });
                }
                s = st.next;
                l += 1;
            }
            Err(SolveError::InnerBudgetExhausted {
                best,
                outer_residual,
                evals_spent,
                ..
            }) => {
                // Surface the best inner iterate honestly as a budget stop.
                cum += evals_spent;
                steps.push(TraceStep {
                    step: l,
                    residual: outer_residual,
                    cum_map_evals: cum,
                    wall_seconds: t0.elapsed().as_secs_f64(),
                    is_extrapolated: false,
                });
                return Ok(IterationTrace {
                    final_residual: outer_residual,
                    final_vector: best,
                    termination: Termination::BudgetExhausted,
                    map_evals: cum,
                    wall_seconds: t0.elapsed().as_secs_f64(),
                    stochasticity_warnings: warnings,
                    extrapolation: None,
                    steps,
                });
            }
            Err(e) => return Err(e),
        }
    }
}

/// One SFPM step.
pub fn sfpm_step(
    problem: &PageRankProblem,
    config: &SolverConfig,
    s: &DistributionVector,
) -> Result<DistributionVector, SolveError> {
    config.validate()?;
    check_start(problem, s)?;
    let st = SfpmDriver::new(problem, config.gamma).step(s)?;
    Ok(DistributionVector::new_unchecked(st.next))
}

/// Runs the SFPM until the residual drops below `config.tol` or a budget
/// is exhausted.
pub fn sfpm_solve(
    problem: &PageRankProblem,
    config: &SolverConfig,
    s0: &DistributionVector,
) -> Result<IterationTrace, SolveError> {
    config.validate()?;
    check_start(problem, s0)?;
    let mut driver = SfpmDriver::new(problem, config.gamma);
    drive_basic(
        &mut driver,
        s0,
        config.tol,
        config.max_iters,
        config.max_map_evals,
    )
}

/// One outer step of the inner-outer method; errors carry the best inner
/// iterate if the inner budget runs out.
pub fn inner_outer_step(
    problem: &PageRankProblem,
    config: &SolverConfig,
    s: &DistributionVector,
) -> Result<DistributionVector, SolveError> {
    config.validate()?;
    check_start(problem, s)?;
    let st = InnerOuterDriver::new(problem, config).step(s)?;
    Ok(DistributionVector::new_unchecked(st.next))
}

/// Runs the inner-outer method; inner budget exhaustion terminates the
/// trace as `BudgetExhausted` with the best iterate reached.
pub fn inner_outer_solve(
    problem: &PageRankProblem,
    config: &SolverConfig,
    s0: &DistributionVector,
) -> Result<IterationTrace, SolveError> {
    config.validate()?;
    check_start(problem, s0)?;
    let mut driver = InnerOuterDriver::new(problem, config);
    drive_basic(
        &mut driver,
        s0,
        config.tol,
        config.max_iters,
        config.max_map_evals,
    )
}

/// The raw higher-order power step `A s^{m-1} + gamma s`.
///
/// Not stochasticity-preserving for `gamma != 0` (the output sums to
/// `1 + gamma` for stochastic inputs); provided for reference and
/// diagnostics only.
pub fn hopm_step(
    tensor: &StochasticTensor,
    gamma: f64,
    s: &[f64],
) -> Result<Vec<f64>, TensorError> {
    let mut out = tensor.apply(s)?;
    for (o, si) in out.iter_mut().zip(s) {
        *o += gamma * si;
    }
    Ok(out)
}

/// A-priori SFPM error bound `2 ((alpha (m-1) + gamma) / (1 + gamma))^l`,
/// valid when `alpha (m-1) < 1`.
pub fn sfpm_error_bound(alpha: f64, gamma: f64, m: usize, ell: u32) -> Result<f64, SolveError> {
    if m < 2 {
        return Err(SolveError::Domain(format!(
            "order must be at least 2 (got {m})"
        )));
    }
    if gamma.is_nan() || gamma < 0.0 || !gamma.is_finite() {
        return Err(SolveError::Domain(format!(
            "gamma must be finite and nonnegative (got {gamma})"
        )));
    }
    let contraction = alpha * (m - 1) as f64;
    if !(0.0..1.0).contains(&contraction) {
        return Err(SolveError::Domain(format!(
            "bound requires alpha (m-1) < 1 (got {contraction})"
        )));
    }
    Ok(2.0 * ((contraction + gamma) / (1.0 + gamma)).powi(ell as i32))
}

/// A-priori inner-outer error bound
/// `2 ((1 - alpha/(m-1)) / (1 - alpha^2))^l`, valid when
/// `alpha < 1/(m-1)`.
pub fn io_error_bound(alpha: f64, m: usize, ell: u32) -> Result<f64, SolveError> {
    if m < 2 {
        return Err(SolveError::Domain(format!(
            "order must be at least 2 (got {m})"
        )));
    }
    if !(0.0..1.0).contains(&alpha) || alpha * (m - 1) as f64 >= 1.0 {
        return Err(SolveError::Domain(format!(
            "bound requires 0 <= alpha < 1/(m-1) (got alpha = {alpha}, m = {m})"
        )));
    }
    let at = alpha / (m - 1) as f64;
    Ok(2.0 * ((1.0 - at) / (1.0 - alpha * alpha)).powi(ell as i32))
}

/// Sensitivity of the solution to the damping:
/// `||s_alpha - s_beta||_1 <= 2 |beta - alpha| / (1 - alpha (m-1))` for
/// `0 < alpha < 1/(m-1)`.
pub fn alpha_sensitivity_bound(alpha: f64, beta: f64, m: usize) -> Result<f64, SolveError> {
    if m < 2 {
        return Err(SolveError::Domain(format!(
            "order must be at least 2 (got {m})"
        )));
    }
    if !(0.0 < alpha && alpha * ((m - 1) as f64) < 1.0) {
        return Err(SolveError::Domain(format!(
            "bound requires 0 < alpha < 1/(m-1) (got alpha = {alpha}, m = {m})"
        )));
    }
    if !(0.0 < beta && beta < 1.0) {
        return Err(SolveError::Domain(format!(
            "beta must lie in (0, 1) (got {beta})"
        )));
    }
    Ok(2.0 * (beta - alpha).abs() / (1.0 - alpha * (m - 1) as f64))
}
