//! Test-problem generators: random graphs, block-random stochastic
//! tensors, and graph-derived triangle tensors.

pub mod graphs;
pub mod real_world;
pub mod tensor_gen;

pub use graphs::{default_model_pool, random_graph, Graph, GraphModel};
pub use real_world::{
    build_real_world_tensor, dangling_row, three_cycle_tensor, RealWorldMix, SparseColMatrix,
    TriangleTensor,
};
pub use tensor_gen::{random_stochastic_tensor, random_stochastic_tensor_seeded};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("graph must have at least {min} nodes (got {got})")]
    TooSmall { min: usize, got: usize },
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("model pool is empty")]
    EmptyPool,
}
