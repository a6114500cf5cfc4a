//! Random graph models used to assemble block-stochastic tensors.
//!
//! All models emit simple undirected graphs except `Rank1`, which is the
//! all-ones adjacency (self-loops included) injecting a strong
//! directionality that makes the resulting tensor problems harder.
//! Generation is a pure function of `(model, n, rng)`.

use std::collections::BTreeSet;

use rand::Rng;

use super::GeneratorError;

/// A graph stored as the nonzero pattern of its adjacency matrix:
/// `arcs` holds `(row, col)` pairs, i.e. `A[row][col] = 1`. Undirected
/// graphs store both orientations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    arcs: Vec<(u32, u32)>,
    directed: bool,
}

impl Graph {
    /// Undirected graph from an edge list (both orientations stored;
    /// self-loops allowed).
    pub fn new_undirected(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            assert!((i as usize) < n && (j as usize) < n, "node out of range");
            set.insert((i, j));
            set.insert((j, i));
        }
        Self {
            n,
            arcs: set.into_iter().collect(),
            directed: false,
        }
    }

    /// Directed graph from an arc list `(row, col)`.
    pub fn new_directed(n: usize, arcs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let set: BTreeSet<(u32, u32)> = arcs
            .into_iter()
            .inspect(|&(i, j)| assert!((i as usize) < n && (j as usize) < n, "node out of range"))
            .collect();
        Self {
            n,
            arcs: set.into_iter().collect(),
            directed: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted `(row, col)` nonzeros of the adjacency matrix.
    pub fn arcs(&self) -> &[(u32, u32)] {
        &self.arcs
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of undirected edges (loops count once).
    pub fn edge_count(&self) -> usize {
        self.arcs.iter().filter(|&&(i, j)| i <= j).count()
    }

    /// The undirected version `sign(A + A^T)`.
    pub fn symmetrized(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        let mut set = BTreeSet::new();
        for &(i, j) in &self.arcs {
            set.insert((i, j));
            set.insert((j, i));
        }
        Graph {
            n: self.n,
            arcs: set.into_iter().collect(),
            directed: false,
        }
    }

    /// Row sums of the adjacency matrix.
    pub fn degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for &(i, _) in &self.arcs {
            deg[i as usize] += 1;
        }
        deg
    }

    /// Per-column sorted row lists: `columns()[j] = { i : A[i][j] = 1 }`.
    pub fn columns(&self) -> Vec<Vec<u32>> {
        let mut cols = vec![Vec::new(); self.n];
        for &(i, j) in &self.arcs {
            cols[j as usize].push(i);
        }
        for c in &mut cols {
            c.sort_unstable();
        }
        cols
    }

    /// Sorted neighbor lists of the symmetrized graph, self-loops dropped.
    pub fn neighbor_lists(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![BTreeSet::new(); self.n];
        for &(i, j) in &self.arcs {
            if i != j {
                adj[i as usize].insert(j);
                adj[j as usize].insert(i);
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

/// Graph models. Parameters defaulting to `None` use the pool defaults:
/// `Gilbert` with `p = 1.1 ln(n)/n`, `ErdosRenyi` with exactly
/// `ceil(2.5 n)` edges, `Geometric` with radius `sqrt(1.44/n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphModel {
    /// Ring lattice of the given (even) degree with random rewiring.
    SmallWorld { degree: usize, rewiring: f64 },
    /// Independent edges with probability `p`.
    Gilbert { p: Option<f64> },
    /// `Some(p)`: independent edges with probability `p` (binomial edge
    /// count). `None`: exactly `ceil(2.5 n)` distinct edges, uniform.
    ErdosRenyi { p: Option<f64> },
    /// Preferential attachment, `edges_per_node` new edges per node.
    Preferential { edges_per_node: usize },
    /// Random geometric graph on the unit square.
    Geometric { radius: Option<f64> },
    /// All-ones adjacency (with self-loops).
    Rank1,
}

impl GraphModel {
    pub fn tag(&self) -> &'static str {
        match self {
            GraphModel::SmallWorld { .. } => "smallw",
            GraphModel::Gilbert { .. } => "gilbert",
            GraphModel::ErdosRenyi { .. } => "erdrey",
            GraphModel::Preferential { .. } => "pref",
            GraphModel::Geometric { .. } => "geo",
            GraphModel::Rank1 => "rank1",
        }
    }
}

/// The default pool drawn from by the block-tensor generator.
pub fn default_model_pool() -> Vec<GraphModel> {
    vec![
        GraphModel::SmallWorld {
            degree: 4,
            rewiring: 0.1,
        },
        GraphModel::Gilbert { p: None },
        GraphModel::ErdosRenyi { p: None },
        GraphModel::Preferential { edges_per_node: 2 },
        GraphModel::Geometric { radius: None },
        GraphModel::Rank1,
    ]
}

/// Samples a graph from the model.
pub fn random_graph<R: Rng + ?Sized>(
    model: &GraphModel,
    n: usize,
    rng: &mut R,
) -> Result<Graph, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::TooSmall { min: 2, got: n });
    }
    match *model {
        GraphModel::SmallWorld { degree, rewiring } => small_world(n, degree, rewiring, rng),
        GraphModel::Gilbert { p } => {
            let p = p.unwrap_or_else(|| (1.1 * (n as f64).ln() / n as f64).min(1.0));
            gilbert(n, p, rng)
        }
        GraphModel::ErdosRenyi { p } => match p {
            Some(p) => gilbert(n, p, rng),
            None => erdos_renyi_count(n, (2.5 * n as f64).ceil() as usize, rng),
        },
        GraphModel::Preferential { edges_per_node } => preferential(n, edges_per_node, rng),
        GraphModel::Geometric { radius } => {
            let r = radius.unwrap_or_else(|| (1.44 / n as f64).sqrt());
            geometric(n, r, rng)
        }
        GraphModel::Rank1 => {
            let arcs = (0..n as u32).flat_map(|i| (0..n as u32).map(move |j| (i, j)));
            Ok(Graph {
                n,
                arcs: arcs.collect(),
                directed: false,
            })
        }
    }
}

fn gilbert<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph, GeneratorError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GeneratorError::InvalidParameter(format!(
            "edge probability must lie in [0, 1] (got {p})"
        )));
    }
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph::new_undirected(n, edges))
}

fn erdos_renyi_count<R: Rng + ?Sized>(
    n: usize,
    edges: usize,
    rng: &mut R,
) -> Result<Graph, GeneratorError> {
    let max = n * (n - 1) / 2;
    let m = edges.min(max);
    let mut set = BTreeSet::new();
    while set.len() < m {
        let i = rng.random_range(0..n as u32);
        let j = rng.random_range(0..n as u32);
        if i == j {
            continue;
        }
        set.insert((i.min(j), i.max(j)));
    }
    Ok(Graph::new_undirected(n, set))
}

fn small_world<R: Rng + ?Sized>(
    n: usize,
    degree: usize,
    rewiring: f64,
    rng: &mut R,
) -> Result<Graph, GeneratorError> {
    if degree == 0 || !degree.is_multiple_of(2) {
        return Err(GeneratorError::InvalidParameter(format!(
            "small-world degree must be positive and even (got {degree})"
        )));
    }
    if !(0.0..=1.0).contains(&rewiring) {
        return Err(GeneratorError::InvalidParameter(format!(
            "rewiring probability must lie in [0, 1] (got {rewiring})"
        )));
    }
    // clamp the half-degree for tiny rings
    let half = (degree / 2).min((n - 1) / 2).max(1);
    let mut set = BTreeSet::new();
    for i in 0..n as u32 {
        for d in 1..=half as u32 {
            let j = (i + d) % n as u32;
            let (a, b) = (i.min(j), i.max(j));
            if rng.random::<f64>() < rewiring {
                // rewire the far endpoint uniformly, avoiding loops/duplicates
                for _ in 0..16 {
                    let t = rng.random_range(0..n as u32);
                    let (a2, b2) = (i.min(t), i.max(t));
                    if t != i && !set.contains(&(a2, b2)) {
                        set.insert((a2, b2));
                        break;
                    }
                }
            } else {
                set.insert((a, b));
            }
        }
    }
    Ok(Graph::new_undirected(n, set))
}

fn preferential<R: Rng + ?Sized>(
    n: usize,
    edges_per_node: usize,
    rng: &mut R,
) -> Result<Graph, GeneratorError> {
    if edges_per_node == 0 {
        return Err(GeneratorError::InvalidParameter(
            "preferential attachment needs at least one edge per node".into(),
        ));
    }
    let m = edges_per_node.min(n - 1);
    let seed = (m + 1).min(n);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    // degree-weighted sampling via the repeated-endpoints list
    let mut endpoints: Vec<u32> = Vec::new();
    for i in 0..seed as u32 {
        for j in i + 1..seed as u32 {
            edges.push((i, j));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    for node in seed as u32..n as u32 {
        let mut picked = BTreeSet::new();
        let mut guard = 0;
        while picked.len() < m && guard < 64 * m {
            guard += 1;
            let target = if endpoints.is_empty() {
                rng.random_range(0..node)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if target != node {
                picked.insert(target);
            }
        }
        for &t in &picked {
            edges.push((t, node));
            endpoints.push(t);
            endpoints.push(node);
        }
    }
    Ok(Graph::new_undirected(n, edges))
}

fn geometric<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Result<Graph, GeneratorError> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(GeneratorError::InvalidParameter(format!(
            "geometric radius must be positive (got {radius})"
        )));
    }
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let r2 = radius * radius;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dx = pts[i].0 - pts[j].0;
            let dy = pts[i].1 - pts[j].1;
            if dx * dx + dy * dy <= r2 {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Ok(Graph::new_undirected(n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank1_is_the_all_ones_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = random_graph(&GraphModel::Rank1, 4, &mut rng).unwrap();
        assert_eq!(g.arcs().len(), 16);
        assert_eq!(g.degrees(), vec![4, 4, 4, 4]);
    }

    #[test]
    fn erdrey_with_p_one_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_graph(&GraphModel::ErdosRenyi { p: Some(1.0) }, 6, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 15);
    }

    #[test]
    fn erdrey_edge_count_is_within_three_sigma_of_binomial() {
        let n = 100;
        let p = 0.05;
        let pairs = (n * (n - 1) / 2) as f64;
        let mean = pairs * p;
        let sigma = (pairs * p * (1.0 - p)).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(12345);
        let g = random_graph(&GraphModel::ErdosRenyi { p: Some(p) }, n, &mut rng).unwrap();
        let edges = g.edge_count() as f64;
        assert!(
            (edges - mean).abs() <= 3.0 * sigma,
            "edge count {edges} outside {mean} +- {}",
            3.0 * sigma
        );
    }

    #[test]
    fn exact_count_variant_hits_its_edge_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 40;
        let g = random_graph(&GraphModel::ErdosRenyi { p: None }, n, &mut rng).unwrap();
        assert_eq!(g.edge_count(), (2.5 * n as f64).ceil() as usize);
    }

    #[test]
    fn models_are_deterministic_under_a_fixed_seed() {
        for model in default_model_pool() {
            let mut rng1 = ChaCha8Rng::seed_from_u64(99);
            let mut rng2 = ChaCha8Rng::seed_from_u64(99);
            let g1 = random_graph(&model, 30, &mut rng1).unwrap();
            let g2 = random_graph(&model, 30, &mut rng2).unwrap();
            assert_eq!(g1, g2, "model {} not deterministic", model.tag());
        }
    }

    #[test]
    fn symmetrization_closes_directed_arcs() {
        let g = Graph::new_directed(3, [(0u32, 1u32), (1, 2)]);
        let u = g.symmetrized();
        assert_eq!(u.arcs(), &[(0, 1), (1, 0), (1, 2), (2, 1)]);
    }

    #[test]
    fn small_world_has_the_ring_degree_without_rewiring() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_graph(
            &GraphModel::SmallWorld {
                degree: 4,
                rewiring: 0.0,
            },
            12,
            &mut rng,
        )
        .unwrap();
        assert!(g.degrees().iter().all(|&d| d == 4));
    }
}
