//! Shanks-transformation acceleration of fixed-point sequences.
//!
//! The machinery comes in two equivalent routes that check each other:
//!
//! * [`stea::SteaDiagonalState`] / [`stea::stea2_extrapolate`] computes the
//!   second topological Shanks transformation through the simplified
//!   epsilon-algorithm recursion, driven by the scalar table of
//!   [`wynn::ScalarEpsilonTable`]. Built diagonal-by-diagonal, it stores at
//!   most `k + 2` full vectors.
//! * [`shanks::shanks_direct`] solves the underlying `(k+1) x (k+1)`
//!   normalized coefficient system explicitly and forms the combination.
//!   Slower and memory-hungry, it serves as the independent oracle.
//!
//! [`restart::restarted_solve`] couples either basic method with the
//! diagonal scheme: run `2k` basic iterations, extrapolate once, restart
//! from the extrapolated point.
//!
//! [`ystoch`] constructs the dual vector `y` that makes all combination
//! coefficients nonnegative, so extrapolated combinations of stochastic
//! iterates are provably stochastic.

pub mod restart;
pub mod shanks;
pub mod stea;
pub mod wynn;
pub mod ystoch;

pub use restart::{restarted_solve, restarted_solve_driver, BasicMethod, RestartConfig, YStrategy};
pub use shanks::{shanks_direct, ShanksCoefficients, ShanksError, ShanksVariant};
pub use stea::{stea2_extrapolate, SteaDiagonalState};
pub use wynn::{Degeneracy, ScalarEpsilonTable};
pub use ystoch::{stochasticity_moments, YConstructionProblem};

/// Default relative threshold below which an epsilon-table denominator is
/// treated as vanishing.
pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-14;
