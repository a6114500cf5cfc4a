//! Multilinear PageRank vectors of order-`m` stochastic tensors.
//!
//! A stochastic tensor `P` of order `m` and dimension `n` drives the
//! higher-order fixed-point problem
//!
//! ```text
//! s = alpha * P s^{m-1} + (1 - alpha) * v ,
//! ```
//!
//! whose solution is a stochastic Z-eigenvector of the damped tensor.
//! This crate provides:
//!
//! * sparse tensor storage and the tensor-times-vector-power kernel
//!   ([`tensor`]),
//! * the damped fixed-point map and its 1-norm residual ([`problem`]),
//! * baseline iterations: the shifted fixed-point method and the
//!   inner-outer method, with the matching a-priori error bounds
//!   ([`solvers`]),
//! * Shanks-transformation acceleration: Wynn's scalar epsilon-algorithm,
//!   the simplified topological epsilon-algorithm (second form) in its
//!   restarted variant, a direct linear-system oracle, and the
//!   nonnegativity-enforcing choice of the dual functional
//!   ([`extrapolation`]),
//! * synthetic and graph-derived tensor generators ([`generators`]),
//! * readers/writers for the `mlpr-tensor v1` text format and
//!   MatrixMarket coordinate graphs ([`tensor::format`], [`matrix_market`]).
//!
//! The crate is deterministic: all randomness is drawn from caller-seeded
//! generators, and the tensor apply kernel defaults to a fixed sequential
//! reduction order. With the `parallel` feature the kernel can be switched
//! to a rayon reduction that is itself deterministic (fixed chunk merge
//! order).

pub mod dense;
pub mod extrapolation;
pub mod generators;
pub mod matrix_market;
pub mod problem;
pub mod solvers;
pub mod tensor;
pub mod validate;
pub mod vector;

pub use problem::PageRankProblem;
pub use solvers::{IterationTrace, SolverConfig, Termination};
pub use tensor::{ApplyMode, StochasticTensor, TensorBuilder};
pub use vector::DistributionVector;

/// Tolerance for stochasticity at construction/validation time.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Looser tolerance used to flag drifting iterates during long runs.
pub const ITERATE_WARN_TOL: f64 = 1e-9;
