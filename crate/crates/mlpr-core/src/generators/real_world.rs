//! Order-3 stochastic tensors derived from a graph.
//!
//! Starting from the undirected version of a graph, the triangle tensor
//! `C[i][j][k] = 1` iff `{i, j, k}` is a three-cycle. Its mode-1
//! unfolding, column-rescaled into a sub-stochastic `S`, is blended with
//! the degree-normalized adjacency `M = A^T D^+`:
//!
//! ```text
//! R = beta [S + v dangling(S)] + (1 - beta) [M + v dangling(M)] (x) e^T
//! ```
//!
//! `dangling(B) = e^T - e^T B` fills the mass missing from each column
//! with the distribution `v`, which makes `R` stochastic for any
//! `beta` in [0, 1]. The result is kept in factored form (see
//! [`crate::tensor::GraphDerivedParts`]); columns and entries are still
//! addressable exactly.

use crate::tensor::{coo_entry, GraphDerivedParts, StochasticTensor};
use crate::vector::DistributionVector;

use super::graphs::Graph;
use super::GeneratorError;

/// Blend weight and correction distribution of the construction.
#[derive(Debug, Clone)]
pub struct RealWorldMix {
    pub beta: f64,
    /// The positive distribution injected into dangling columns.
    pub teleport: DistributionVector,
}

impl RealWorldMix {
    pub fn uniform(n: usize, beta: f64) -> Result<Self, GeneratorError> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(GeneratorError::InvalidParameter(format!(
                "beta must lie in [0, 1] (got {beta})"
            )));
        }
        Ok(Self {
            beta,
            teleport: DistributionVector::uniform(n),
        })
    }
}

/// The binary triangle tensor of a graph: symmetric under all six index
/// permutations, stored as the sorted list of triangles `i < j < k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleTensor {
    n: usize,
    triangles: Vec<[u32; 3]>,
}

impl TriangleTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Nonzero count of the order-3 tensor: six entries per triangle.
    pub fn nnz(&self) -> u64 {
        6 * self.triangles.len() as u64
    }

    /// Entry `C[i][j][k]` with 0-based indices.
    pub fn entry(&self, i: u32, j: u32, k: u32) -> f64 {
        let mut t = [i, j, k];
        t.sort_unstable();
        if t[0] == t[1] || t[1] == t[2] {
            return 0.0;
        }
        if self.triangles.binary_search(&t).is_ok() {
            1.0
        } else {
            0.0
        }
    }
}

/// Enumerates the triangles of the (symmetrized) graph.
pub fn three_cycle_tensor(graph: &Graph) -> TriangleTensor {
    let g = graph.symmetrized();
    let adj = g.neighbor_lists();
    let mut triangles = Vec::new();
    for i in 0..g.n() as u32 {
        for &j in &adj[i as usize] {
            if j <= i {
                continue;
            }
            // common neighbors k > j of i and j
            let (a, b) = (&adj[i as usize], &adj[j as usize]);
            let (mut p, mut q) = (0usize, 0usize);
            while p < a.len() && q < b.len() {
                match a[p].cmp(&b[q]) {
                    std::cmp::Ordering::Less => p += 1,
                    std::cmp::Ordering::Greater => q += 1,
                    std::cmp::Ordering::Equal => {
                        if a[p] > j {
                            triangles.push([i, j, a[p]]);
                        }
                        p += 1;
                        q += 1;
                    }
                }
            }
        }
    }
    triangles.sort_unstable();
    TriangleTensor {
        n: g.n(),
        triangles,
    }
}

/// A nonnegative matrix stored column-wise: `cols[j]` holds the sorted
/// `(row, value)` nonzeros of column `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseColMatrix {
    pub nrows: usize,
    pub cols: Vec<Vec<(u32, f64)>>,
}

impl SparseColMatrix {
    pub fn from_dense(dense: &[Vec<f64>]) -> Self {
        let nrows = dense.len();
        let ncols = if nrows == 0 { 0 } else { dense[0].len() };
        let cols = (0..ncols)
            .map(|j| {
                (0..nrows)
                    .filter(|&i| dense[i][j] != 0.0)
                    .map(|i| (i as u32, dense[i][j]))
                    .collect()
            })
            .collect();
        Self { nrows, cols }
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.cols
            .iter()
            .map(|c| c.iter().map(|(_, v)| v).sum())
            .collect()
    }
}

/// Column deficits `e^T - e^T B` of a column-substochastic matrix,
/// entrywise nonnegative up to rounding.
pub fn dangling_row(b: &SparseColMatrix) -> Vec<f64> {
    b.column_sums().iter().map(|s| 1.0 - s).collect()
}

/// Builds the blended stochastic tensor of a graph. Directed graphs are
/// symmetrized first; triangle counting happens on the undirected
/// version.
pub fn build_real_world_tensor(
    graph: &Graph,
    mix: &RealWorldMix,
) -> Result<StochasticTensor, GeneratorError> {
    let g = graph.symmetrized();
    let n = g.n();
    if n < 1 {
        return Err(GeneratorError::TooSmall { min: 1, got: 0 });
    }
    if mix.teleport.len() != n {
        return Err(GeneratorError::InvalidParameter(format!(
            "teleport length {} does not match graph size {n}",
            mix.teleport.len()
        )));
    }
    if !mix.teleport.is_strictly_positive() {
        return Err(GeneratorError::InvalidParameter(
            "teleport vector must be strictly positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&mix.beta) {
        return Err(GeneratorError::InvalidParameter(format!(
            "beta must lie in [0, 1] (got {})",
            mix.beta
        )));
    }

    // S: triangle columns rescaled to sum one.
    let tri = three_cycle_tensor(&g);
    let mut s_entries = Vec::with_capacity(tri.nnz() as usize);
    {
        use std::collections::BTreeMap;
        // column (j, k) -> rows i; each permutation of a triangle
        // contributes one entry
        let mut cols: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for t in tri.triangles() {
            let perms = [
                (t[0], t[1], t[2]),
                (t[0], t[2], t[1]),
                (t[1], t[0], t[2]),
                (t[1], t[2], t[0]),
                (t[2], t[0], t[1]),
                (t[2], t[1], t[0]),
            ];
            for (i, j, k) in perms {
                cols.entry(j as u64 + k as u64 * n as u64)
                    .or_default()
                    .push(i);
            }
        }
        for (col, mut rows) in cols {
            rows.sort_unstable();
            let w = 1.0 / rows.len() as f64;
            for i in rows {
                s_entries.push(coo_entry(i, col, w));
            }
        }
    }

    // M = A^T D^+: column j lists the neighbors of j weighted 1/deg(j).
    let degrees = g.degrees();
    let columns = g.columns();
    let mut m_entries = Vec::new();
    let mut m_deficit = vec![0.0; n];
    for j in 0..n {
        if degrees[j] == 0 {
            m_deficit[j] = 1.0;
            continue;
        }
        let w = 1.0 / degrees[j] as f64;
        for &i in &columns[j] {
            m_entries.push(coo_entry(i, j as u64, w));
        }
    }

    let parts = GraphDerivedParts::new(
        n,
        mix.beta,
        mix.teleport.as_slice().to_vec(),
        s_entries,
        m_entries,
        m_deficit,
    );
    let tensor = StochasticTensor::from_graph_derived(parts);
    debug_assert!(tensor.validate().is_valid());
    Ok(tensor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::diff_norm1;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k3() -> Graph {
        Graph::new_undirected(3, [(0u32, 1u32), (1, 2), (0, 2)])
    }

    fn path4() -> Graph {
        Graph::new_undirected(4, [(0u32, 1u32), (1, 2), (2, 3)])
    }

    #[test]
    fn triangle_graph_has_six_nonzeros() {
        let c = three_cycle_tensor(&k3());
        assert_eq!(c.nnz(), 6);
        assert_eq!(c.triangles(), &[[0, 1, 2]]);
        // symmetric under permutations
        assert_eq!(c.entry(0, 1, 2), 1.0);
        assert_eq!(c.entry(2, 0, 1), 1.0);
        assert_eq!(c.entry(1, 1, 2), 0.0);
    }

    #[test]
    fn path_graph_has_no_triangles() {
        assert_eq!(three_cycle_tensor(&path4()).nnz(), 0);
    }

    #[test]
    fn triangle_count_matches_brute_force_on_a_random_graph() {
        use super::super::graphs::{random_graph, GraphModel};
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let g = random_graph(&GraphModel::ErdosRenyi { p: Some(0.3) }, 20, &mut rng).unwrap();
        let c = three_cycle_tensor(&g);
        // brute force over all node triples
        let adj = g.neighbor_lists();
        let has = |a: usize, b: u32| adj[a].binary_search(&b).is_ok();
        let mut count = 0u64;
        for i in 0..20u32 {
            for j in i + 1..20 {
                for k in j + 1..20 {
                    if has(i as usize, j) && has(i as usize, k) && has(j as usize, k) {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(c.nnz(), 6 * count);
    }

    #[test]
    fn dangling_row_cases() {
        // stochastic matrix: zero deficits
        let b = SparseColMatrix::from_dense(&[vec![0.5, 1.0], vec![0.5, 0.0]]);
        assert!(dangling_row(&b).iter().all(|d| d.abs() < 1e-15));
        // zero matrix: all ones
        let z = SparseColMatrix {
            nrows: 2,
            cols: vec![vec![], vec![]],
        };
        assert_eq!(dangling_row(&z), vec![1.0, 1.0]);
        // half-stochastic
        let h = SparseColMatrix::from_dense(&[vec![0.25, 0.5], vec![0.25, 0.0]]);
        assert_eq!(dangling_row(&h), vec![0.5, 0.5]);
    }

    /// Dense reference construction of R for small graphs.
    fn dense_reference(g: &Graph, mix: &RealWorldMix) -> Vec<Vec<f64>> {
        let g = g.symmetrized();
        let n = g.n();
        let tri = three_cycle_tensor(&g);
        // dense S
        let mut s = vec![vec![0.0; n * n]; n];
        for j in 0..n as u32 {
            for k in 0..n as u32 {
                let col = j as usize + k as usize * n;
                let mut sum = 0.0;
                for i in 0..n as u32 {
                    sum += tri.entry(i, j, k);
                }
                if sum > 0.0 {
                    for i in 0..n as u32 {
                        s[i as usize][col] = tri.entry(i, j, k) / sum;
                    }
                }
            }
        }
        // dense M
        let deg = g.degrees();
        let cols = g.columns();
        let mut m = vec![vec![0.0; n]; n];
        for j in 0..n {
            if deg[j] > 0 {
                for &i in &cols[j] {
                    m[i as usize][j] = 1.0 / deg[j] as f64;
                }
            }
        }
        let v = mix.teleport.as_slice();
        let dang_s: Vec<f64> = (0..n * n)
            .map(|c| 1.0 - (0..n).map(|i| s[i][c]).sum::<f64>())
            .collect();
        let dang_m: Vec<f64> = (0..n)
            .map(|j| 1.0 - (0..n).map(|i| m[i][j]).sum::<f64>())
            .collect();
        let mut r = vec![vec![0.0; n * n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = j + k * n;
                    r[i][c] = mix.beta * (s[i][c] + v[i] * dang_s[c])
                        + (1.0 - mix.beta) * (m[i][j] + v[i] * dang_m[j]);
                }
            }
        }
        r
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn k3_blend_matches_the_dense_reference() {
        let mix = RealWorldMix::uniform(3, 0.5).unwrap();
        let t = build_real_world_tensor(&k3(), &mix).unwrap();
        let r = dense_reference(&k3(), &mix);
        // columns sum to one
        for c in 0..9 {
            let sum: f64 = (0..3).map(|i| r[i][c]).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        // entries agree
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let got = t.entry(&[i + 1, j + 1, k + 1]).unwrap();
                    assert!(
                        (got - r[i][j + 3 * k]).abs() < 1e-14,
                        "entry ({i},{j},{k}): {got} vs {}",
                        r[i][j + 3 * k]
                    );
                }
            }
        }
        // and the factored apply agrees with the dense one
        let x = [0.2, 0.5, 0.3];
        let got = t.apply(&x).unwrap();
        let want: Vec<f64> = (0..3)
            .map(|i| {
                (0..3)
                    .flat_map(|j| (0..3).map(move |k| (j, k)))
                    .map(|(j, k)| r[i][j + 3 * k] * x[j] * x[k])
                    .sum()
            })
            .collect();
        assert!(diff_norm1(&got, &want) < 1e-14);
        assert!(t.validate().is_valid());
    }

    #[test]
    fn beta_one_unfolding_equals_s_on_fully_active_columns() {
        // K3 with beta = 1: the columns (j,k) with j != k are active;
        // check that such a column of the tensor equals the S column.
        let mix = RealWorldMix::uniform(3, 1.0).unwrap();
        let t = build_real_world_tensor(&k3(), &mix).unwrap();
        // column (j=1, k=2): the only triangle row is i=0, normalized to 1
        assert_eq!(t.entry(&[1, 2, 3]).unwrap(), 1.0);
        assert_eq!(t.entry(&[2, 2, 3]).unwrap(), 0.0);
    }

    #[test]
    fn beta_zero_blocks_repeat_m_with_dangling_correction() {
        let mix = RealWorldMix::uniform(4, 0.0).unwrap();
        let t = build_real_world_tensor(&path4(), &mix).unwrap();
        // every block (fixed k) must equal M + v dangling(M)
        let g = path4();
        let deg = g.degrees();
        for k in 1..=4 {
            for j in 1..=4usize {
                for i in 1..=4usize {
                    let want = if g
                        .arcs()
                        .binary_search(&((i - 1) as u32, (j - 1) as u32))
                        .is_ok()
                    {
                        1.0 / deg[j - 1] as f64
                    } else {
                        0.0
                    };
                    assert!((t.entry(&[i, j, k]).unwrap() - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn isolated_nodes_are_corrected_by_the_teleport() {
        // node 3 is isolated
        let g = Graph::new_undirected(4, [(0u32, 1u32), (1, 2)]);
        let mix = RealWorldMix::uniform(4, 0.3).unwrap();
        let t = build_real_world_tensor(&g, &mix).unwrap();
        assert!(t.validate().is_valid());
        // column (j=4, k=1) must be 0.3*v + 0.7*v = v
        for i in 1..=4 {
            assert!((t.entry(&[i, 4, 1]).unwrap() - 0.25).abs() < 1e-14);
        }
    }
}
