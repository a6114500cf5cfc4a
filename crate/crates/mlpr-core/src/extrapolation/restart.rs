//! Restarted extrapolation: generate `2k` basic iterates, extrapolate
//! once, restart the basic iteration from the extrapolated point.
//!
//! Per cycle `i`: set `s_0 = x_i`, produce `s_l = F(s_{l-1})` for
//! `l = 1..2k` while feeding `(s_l, <y, s_l>)` into the diagonal scheme,
//! then restart from `x_{i+1} = veps_{2k}^{(0)}` (the full-window second
//! transform, consuming all `2k + 1` vectors). A degenerate epsilon table
//! ends the cycle early with the newest basic iterate instead. The dual
//! vector `y` is chosen per [`YStrategy`].
//!
//! Residuals are recorded for every basic iterate and for every restart
//! point; the solve stops as soon as any recorded residual reaches the
//! tolerance, or when budgets run out.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use crate::problem::PageRankProblem;
use crate::solvers::{
    DriverStep, ExtrapolationStats, FixedPointDriver, InnerOuterDriver, IterationTrace, SfpmDriver,
    SolveError, SolverConfig, Termination, TraceStep,
};
use crate::vector::{dot, DistributionVector};

use super::shanks::{shanks_direct, ShanksVariant};
use super::stea::SteaDiagonalState;
use super::ystoch::{stochasticity_moments, YConstructionProblem};
use super::DEFAULT_DEGENERACY_THRESHOLD;

/// How the dual vector is chosen at each cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum YStrategy {
    /// One simplex sample drawn from the seed, kept for all cycles.
    FixedRandom,
    /// The previous cycle's extrapolated vector (seeded random for the
    /// first cycle). The cheap default; extrapolated iterates obtained
    /// this way are monitored for stochasticity but not guaranteed.
    #[default]
    LastExtrapolated,
    /// Per cycle, construct `y` from the window differences so that the
    /// combination coefficients are nonnegative and the extrapolated
    /// vector is provably stochastic. Costs one QR factorization per
    /// cycle and stores the whole `2k + 1` window; requires `2k <= n`.
    StochasticityEnforcing,
}

#[derive(Debug, Clone)]
pub struct RestartConfig {
    /// `k`: the window holds `2k + 1` vectors.
    pub half_width: usize,
    pub cycles: usize,
    pub y_strategy: YStrategy,
    /// Relative threshold for vanishing epsilon-table denominators.
    pub degeneracy_threshold: f64,
    /// Seed for the initial dual vector.
    pub y_seed: u64,
}

impl RestartConfig {
    pub fn new(half_width: usize, cycles: usize) -> Self {
        Self {
            half_width,
            cycles,
            ..Self::default()
        }
    }

    /// Window size `2k`.
    pub fn width(&self) -> usize {
        2 * self.half_width
    }

    fn validate(&self, dim: usize) -> Result<(), SolveError> {
        if self.half_width < 1 {
            return Err(SolveError::InvalidConfig(
                "extrapolation width 2k must be at least 2".into(),
            ));
        }
        if self.cycles < 1 {
            return Err(SolveError::InvalidConfig(
                "cycles must be at least 1".into(),
            ));
        }
        if self.degeneracy_threshold.is_nan() || self.degeneracy_threshold <= 0.0 {
            return Err(SolveError::InvalidConfig(
                "degeneracy threshold must be positive".into(),
            ));
        }
        if self.y_strategy == YStrategy::StochasticityEnforcing && 2 * self.half_width > dim {
            return Err(SolveError::InvalidConfig(format!(
                "stochasticity-enforcing y needs 2k <= n (2k = {}, n = {dim})",
                2 * self.half_width
            )));
        }
        Ok(())
    }
}

impl Default for RestartConfig {
    fn default() -> Self {
        Self {
            half_width: 5,
            cycles: 4,
            y_strategy: YStrategy::default(),
            degeneracy_threshold: DEFAULT_DEGENERACY_THRESHOLD,
            y_seed: 0,
        }
    }
}

/// Basic iteration wrapped by the restarts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicMethod {
    Sfpm,
    InnerOuter,
}

struct Recorder {
    t0: Instant,
    steps: Vec<TraceStep>,
    cum: u64,
    idx: usize,
    warnings: u64,
    tol: f64,
    budget: Option<u64>,
}

enum Flow {
    Go(DriverStep),
    End {
        termination: Termination,
        /// Replacement final vector and residual (inner-budget stops).
        takeover: Option<(Vec<f64>, f64)>,
    },
}

impl Recorder {
    fn new(tol: f64, budget: Option<u64>) -> Self {
        Self {
            t0: Instant::now(),
            steps: Vec::new(),
            cum: 0,
            idx: 0,
            warnings: 0,
            tol,
            budget,
        }
    }

    fn advance(
        &mut self,
        driver: &mut dyn FixedPointDriver,
        s: &[f64],
        is_extrapolated: bool,
    ) -> Result<Flow, SolveError> {
        match driver.step(s) {
            Ok(st) => {
                self.cum += st.evals;
                self.steps.push(TraceStep {
                    step: self.idx,
                    residual: st.residual,
                    cum_map_evals: self.cum,
                    wall_seconds: self.t0.elapsed().as_secs_f64(),
                    is_extrapolated,
                });
                self.idx += 1;
                let sum: f64 = s.iter().sum();
                if (sum - 1.0).abs() > crate::ITERATE_WARN_TOL
                    || s.iter().any(|&x| x < -crate::ITERATE_WARN_TOL)
                {
                    self.warnings += 1;
                }
                if st.residual <= self.tol {
                    Ok(Flow::End {
                        termination: Termination::Converged,
                        takeover: None,
                    })
                } else if self.budget.is_some_and(|cap| self.cum >= cap) {
                    Ok(Flow::End {
                        termination: Termination::BudgetExhausted,
                        takeover: None,
                    })
                } else {
                    Ok(Flow::Go(st))
                }
            }
            Err(SolveError::InnerBudgetExhausted {
                best,
                outer_residual,
                evals_spent,
                ..
            }) => {
                self.cum += evals_spent;
                self.steps.push(TraceStep {
                    step: self.idx,
                    residual: outer_residual,
                    cum_map_evals: self.cum,
                    wall_seconds: self.t0.elapsed().as_secs_f64(),
                    is_extrapolated,
                });
                self.idx += 1;
                Ok(Flow::End {
                    termination: Termination::BudgetExhausted,
                    takeover: Some((best, outer_residual)),
                })
            }
            Err(e) => Err(e),
        }
    }

    fn finish(
        self,
        fallback: Vec<f64>,
        termination: Termination,
        takeover: Option<(Vec<f64>, f64)>,
        stats: ExtrapolationStats,
    ) -> IterationTrace {
        let (final_vector, final_residual) = match takeover {
            Some((v, r)) => (v, r),
            None => {
                let r = self.steps.last().map(|s| s.residual).unwrap_or(f64::NAN);
                (fallback, r)
            }
        };
        IterationTrace {
            final_vector,
            final_residual,
            termination,
            map_evals: self.cum,
            wall_seconds: self.t0.elapsed().as_secs_f64(),
            stochasticity_warnings: self.warnings,
            extrapolation: Some(stats),
            steps: self.steps,
        }
    }
}

enum Sanitize {
    Clean,
    Clipped,
    Unusable,
}

/// Clips and renormalizes a restart vector only when it violates
/// stochasticity beyond 1e-9.
fn sanitize(x: &mut [f64]) -> Sanitize {
    if x.iter().any(|v| !v.is_finite()) {
        return Sanitize::Unusable;
    }
    let sum: f64 = x.iter().sum();
    let min = x.iter().cloned().fold(f64::INFINITY, f64::min);
    if min >= -1e-9 && (sum - 1.0).abs() <= 1e-9 {
        return Sanitize::Clean;
    }
    let mut mass = 0.0;
    for v in x.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
        mass += *v;
    }
    if mass <= 0.0 {
        return Sanitize::Unusable;
    }
    for v in x.iter_mut() {
        *v /= mass;
    }
    Sanitize::Clipped
}

fn stochasticity_enforcing_extrapolate(window: &[Vec<f64>], k: usize) -> Option<Vec<f64>> {
    let moments = stochasticity_moments(k);
    let y = YConstructionProblem::from_window(window, moments)
        .construct_y()
        .ok()?;
    let (_, out) = shanks_direct(window, &y, k, ShanksVariant::Second).ok()?;
    Some(out)
}

/// Restarted extrapolation around an arbitrary fixed-point driver.
///
/// A negative `tol` disables residual stopping (all cycles run to
/// completion). Returns the trace with per-iterate residuals; restart
/// points carry `is_extrapolated = true`.
pub fn restarted_solve_driver(
    driver: &mut dyn FixedPointDriver,
    x0: &[f64],
    rcfg: &RestartConfig,
    tol: f64,
    max_map_evals: Option<u64>,
) -> Result<IterationTrace, SolveError> {
    let n = driver.dim();
    rcfg.validate(n)?;
    if x0.len() != n {
        return Err(SolveError::InvalidConfig(format!(
            "starting vector has length {} but the problem dimension is {n}",
            x0.len()
        )));
    }
    let k = rcfg.half_width;
    let mut rng = ChaCha8Rng::seed_from_u64(rcfg.y_seed);
    let mut y = DistributionVector::random_simplex(n, &mut rng).into_vec();
    let mut stats = ExtrapolationStats::default();
    let mut rec = Recorder::new(tol, max_map_evals);

    let mut x = x0.to_vec();
    let mut pending = match rec.advance(driver, &x, false)? {
        Flow::Go(st) => st,
        Flow::End {
            termination,
            takeover,
        } => return Ok(rec.finish(x, termination, takeover, stats)),
    };

    for _cycle in 0..rcfg.cycles {
        let collecting = rcfg.y_strategy == YStrategy::StochasticityEnforcing;
        let mut window: Vec<Vec<f64>> = Vec::new();
        let mut stea = (!collecting).then(|| SteaDiagonalState::new(k, rcfg.degeneracy_threshold));
        let mut degenerate = false;

        if collecting {
            window.push(x.clone());
        } else if let Some(st) = stea.as_mut() {
            if st.push(&x, dot(&y, &x)).is_err() {
                degenerate = true;
            }
        }

        let mut s = pending.next.clone();
        let mut ell = 1usize;
        loop {
            if !degenerate {
                if collecting {
                    window.push(s.clone());
                } else if let Some(st) = stea.as_mut() {
                    if st.push(&s, dot(&y, &s)).is_err() {
                        degenerate = true;
                    }
                }
            }
            if ell == 2 * k || degenerate {
                break;
            }
            match rec.advance(driver, &s, false)? {
                Flow::Go(st) => {
                    s = st.next;
                    ell += 1;
                }
                Flow::End {
                    termination,
                    takeover,
                } => return Ok(rec.finish(s, termination, takeover, stats)),
            }
        }

        // Restart vector: the full-window transform; on a degenerate
        // table, the deepest shortened-window transform computed before
        // the degeneracy, or the newest basic iterate when none exists.
        let mut is_extrapolated = true;
        let mut xe = if degenerate {
            stats.degenerate_cycles += 1;
            match stea.as_ref().and_then(|st| {
                stats.max_resident_vectors =
                    stats.max_resident_vectors.max(st.peak_resident_vectors());
                st.deepest_extrapolant()
            }) {
                Some(partial) => partial.to_vec(),
                None => {
                    is_extrapolated = false;
                    s.clone()
                }
            }
        } else if collecting {
            stats.max_resident_vectors = stats.max_resident_vectors.max(window.len());
            match stochasticity_enforcing_extrapolate(&window, k) {
                Some(v) => v,
                None => {
                    is_extrapolated = false;
                    stats.degenerate_cycles += 1;
                    s.clone()
                }
            }
        } else {
            let st = stea.as_ref().expect("diagonal scheme present");
            stats.max_resident_vectors = stats.max_resident_vectors.max(st.peak_resident_vectors());
            st.extrapolated().expect("window complete").to_vec()
        };

        if is_extrapolated {
            match sanitize(&mut xe) {
                Sanitize::Clean => {}
                Sanitize::Clipped => stats.clipped_restarts += 1,
                Sanitize::Unusable => {
                    is_extrapolated = false;
                    stats.degenerate_cycles += 1;
                    xe = s.clone();
                }
            }
        }
        stats.cycles_completed += 1;

        match rec.advance(driver, &xe, is_extrapolated)? {
            Flow::Go(st) => pending = st,
            Flow::End {
                termination,
                takeover,
            } => return Ok(rec.finish(xe, termination, takeover, stats)),
        }
        if rcfg.y_strategy == YStrategy::LastExtrapolated && is_extrapolated {
            y = xe.clone();
        }
        x = xe;
    }
    Ok(rec.finish(x, Termination::BudgetExhausted, None, stats))
}

/// Restarted extrapolation of the SFPM or of the inner-outer outer
/// sequence on a PageRank problem. Convergence tolerance and budgets come
/// from `scfg`, extrapolation parameters from `rcfg`.
pub fn restarted_solve(
    problem: &PageRankProblem,
    method: BasicMethod,
    scfg: &SolverConfig,
    rcfg: &RestartConfig,
    s0: &DistributionVector,
) -> Result<IterationTrace, SolveError> {
    scfg.validate()?;
    match method {
        BasicMethod::Sfpm => {
            let mut driver = SfpmDriver::new(problem, scfg.gamma);
            restarted_solve_driver(&mut driver, s0, rcfg, scfg.tol, scfg.max_map_evals)
        }
        BasicMethod::InnerOuter => {
            let mut driver = InnerOuterDriver::new(problem, scfg);
            restarted_solve_driver(&mut driver, s0, rcfg, scfg.tol, scfg.max_map_evals)
        }
    }
}
