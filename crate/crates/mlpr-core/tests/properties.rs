//! Property tests for the structural invariants.

use proptest::prelude::*;

use mlpr_core::extrapolation::{shanks_direct, ShanksVariant};
use mlpr_core::tensor::{format, TensorBuilder};
use mlpr_core::vector::{diff_norm1, norm1, DistributionVector};
use mlpr_core::PageRankProblem;

/// A dense random stochastic tensor of the given order and dimension,
/// plus its entries for oracle recomputation.
fn dense_stochastic_tensor(m: usize, n: usize) -> impl Strategy<Value = (Vec<f64>, usize, usize)> {
    let fibers = n.pow(m as u32 - 1);
    proptest::collection::vec(0.01f64..1.0, fibers * n).prop_map(move |mut raw| {
        for f in 0..fibers {
            let col = &mut raw[f * n..(f + 1) * n];
            let sum: f64 = col.iter().sum();
            for x in col.iter_mut() {
                *x /= sum;
            }
        }
        (raw, m, n)
    })
}

fn build(raw: &[f64], m: usize, n: usize) -> mlpr_core::StochasticTensor {
    let mut b = TensorBuilder::new(m, n).unwrap();
    let fibers = n.pow(m as u32 - 1);
    for f in 0..fibers {
        // decode fiber index into (i2, ..., im)
        let mut trailing = Vec::with_capacity(m - 1);
        let mut c = f;
        for _ in 0..m - 1 {
            trailing.push(c % n + 1);
            c /= n;
        }
        for i1 in 0..n {
            let mut idx = vec![i1 + 1];
            idx.extend(&trailing);
            b.add_entry(&idx, raw[f * n + i1]).unwrap();
        }
    }
    b.build().unwrap()
}

fn stochastic_vector(n: usize) -> impl Strategy<Value = DistributionVector> {
    proptest::collection::vec(0.01f64..1.0, n)
        .prop_map(|v| DistributionVector::from_unnormalized(v).unwrap())
}

/// Exhaustive summation over all index tuples.
fn dense_apply_oracle(raw: &[f64], m: usize, n: usize, s: &[f64]) -> Vec<f64> {
    let fibers = n.pow(m as u32 - 1);
    let mut out = vec![0.0; n];
    for f in 0..fibers {
        let mut prod = 1.0;
        let mut c = f;
        for _ in 0..m - 1 {
            prod *= s[c % n];
            c /= n;
        }
        for i1 in 0..n {
            out[i1] += raw[f * n + i1] * prod;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Sparse apply equals the exhaustive dense oracle for all small shapes.
    #[test]
    fn apply_matches_dense_oracle(
        (raw, m, n) in (2usize..=4, 2usize..=4)
            .prop_flat_map(|(m, n)| dense_stochastic_tensor(m, n)),
        seed in 0u64..1000,
    ) {
        let tensor = build(&raw, m, n);
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s = DistributionVector::random_simplex(n, &mut rng);
        let got = tensor.apply(&s).unwrap();
        let want = dense_apply_oracle(&raw, m, n, &s);
        prop_assert!(diff_norm1(&got, &want) <= 1e-13);
        // stochastic output
        prop_assert!((got.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(got.iter().all(|&x| x >= 0.0));
    }

    /// apply is homogeneous of degree m-1.
    #[test]
    fn apply_is_homogeneous(
        (raw, m, n) in (2usize..=4, 2usize..=3)
            .prop_flat_map(|(m, n)| dense_stochastic_tensor(m, n)),
        lambda in 0.1f64..3.0,
    ) {
        let tensor = build(&raw, m, n);
        let s: Vec<f64> = (0..n).map(|i| 0.2 + 0.3 * i as f64).collect();
        let scaled: Vec<f64> = s.iter().map(|x| lambda * x).collect();
        let lhs = tensor.apply(&scaled).unwrap();
        let factor = lambda.powi(m as i32 - 1);
        let rhs: Vec<f64> = tensor.apply(&s).unwrap().iter().map(|x| factor * x).collect();
        prop_assert!(diff_norm1(&lhs, &rhs) <= 1e-10 * norm1(&rhs).max(1.0));
    }

    /// The damped map output is bounded below by the teleportation floor.
    #[test]
    fn pagerank_map_has_positive_floor(
        (raw, _, n) in dense_stochastic_tensor(3, 3),
        alpha in 0.0f64..0.999,
        s in stochastic_vector(3),
    ) {
        let tensor = build(&raw, 3, n);
        let v = DistributionVector::from_unnormalized(vec![0.5, 0.3, 0.2]).unwrap();
        let problem = PageRankProblem::new(tensor, alpha, v.clone()).unwrap();
        let out = problem.map_apply(&s).unwrap();
        let floor = (1.0 - alpha) * v.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(out.iter().all(|&x| x >= floor - 1e-15));
    }

    /// Text-format round trip preserves the tensor exactly.
    #[test]
    fn format_roundtrip_is_exact(
        (raw, m, n) in (2usize..=3, 2usize..=3)
            .prop_flat_map(|(m, n)| dense_stochastic_tensor(m, n)),
    ) {
        let tensor = build(&raw, m, n);
        let mut buf = Vec::new();
        format::write_tensor_v1(&tensor, &mut buf).unwrap();
        let back = format::parse_tensor_v1(buf.as_slice()).unwrap().build().unwrap();
        prop_assert_eq!(tensor.coo_entries().unwrap(), back.coo_entries().unwrap());
    }

    /// Shanks coefficients always satisfy the normalization row.
    #[test]
    fn shanks_coefficients_are_normalized(
        seed in 0u64..10_000,
        k in 1usize..4,
    ) {
        use rand::{Rng, SeedableRng};
        let n = 8;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let window: Vec<Vec<f64>> = (0..2 * k + 1)
            .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        if let Ok((coeffs, _)) = shanks_direct(&window, &y, k, ShanksVariant::Second) {
            prop_assert!((coeffs.values.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }
}
