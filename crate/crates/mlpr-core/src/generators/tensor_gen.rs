//! Block-random stochastic tensor generation.
//!
//! The mode-1 unfolding is an `n x n^{m-1}` matrix made of `n^{m-2}`
//! consecutive `n x n` blocks. For each block a model is drawn uniformly
//! from the pool, its adjacency matrix is placed in the block, and the
//! block columns are rescaled to sum to one (empty columns become
//! uniform).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graphs::{default_model_pool, random_graph, GraphModel};
use super::GeneratorError;
use crate::tensor::StochasticTensor;

/// Generates an order-`m`, dimension-`n` stochastic tensor from the given
/// model pool.
pub fn random_stochastic_tensor<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    pool: &[GraphModel],
    rng: &mut R,
) -> Result<StochasticTensor, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::TooSmall { min: 2, got: n });
    }
    if m < 2 {
        return Err(GeneratorError::InvalidParameter(format!(
            "tensor order must be at least 2 (got {m})"
        )));
    }
    if pool.is_empty() {
        return Err(GeneratorError::EmptyPool);
    }
    let blocks = (n as u64).pow(m as u32 - 2);
    let mut entries = Vec::new();
    for q in 0..blocks {
        let model = &pool[rng.random_range(0..pool.len())];
        let graph = random_graph(model, n, rng)?;
        let columns = graph.columns();
        for (j, rows) in columns.iter().enumerate() {
            let base = q * n as u64 + j as u64;
            if rows.is_empty() {
                // empty column: uniform distribution keeps the block stochastic
                let w = 1.0 / n as f64;
                for i in 0..n as u32 {
                    entries.push(crate::tensor::coo_entry(i, base, w));
                }
            } else {
                let w = 1.0 / rows.len() as f64;
                for &i in rows {
                    entries.push(crate::tensor::coo_entry(i, base, w));
                }
            }
        }
    }
    Ok(StochasticTensor::from_normalized_unfolding(m, n, entries))
}

/// Deterministic convenience wrapper over the default pool.
pub fn random_stochastic_tensor_seeded(
    n: usize,
    m: usize,
    seed: u64,
) -> Result<StochasticTensor, GeneratorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_stochastic_tensor(n, m, &default_model_pool(), &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_two_is_a_single_stochastic_block() {
        let t = random_stochastic_tensor_seeded(10, 2, 7).unwrap();
        assert_eq!(t.order(), 2);
        assert_eq!(t.dim(), 10);
        assert!(t.validate().is_valid());
    }

    #[test]
    fn every_generated_tensor_validates() {
        for m in 2..=4 {
            for seed in 0..5 {
                let t = random_stochastic_tensor_seeded(6, m, seed).unwrap();
                assert!(t.validate().is_valid(), "m={m} seed={seed}");
            }
        }
    }

    #[test]
    fn identical_seeds_give_identical_tensors() {
        let a = random_stochastic_tensor_seeded(8, 3, 99).unwrap();
        let b = random_stochastic_tensor_seeded(8, 3, 99).unwrap();
        assert_eq!(a.coo_entries().unwrap(), b.coo_entries().unwrap());
    }

    #[test]
    fn rank1_only_pool_yields_uniform_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = random_stochastic_tensor(4, 3, &[GraphModel::Rank1], &mut rng).unwrap();
        for (_, v) in t.coo_entries().unwrap() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }
}
