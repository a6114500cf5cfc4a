//! Simplified topological epsilon-algorithm, second form (vector columns
//! driven by the scalar table).
//!
//! Only even vector columns exist; the update
//!
//! ```text
//! veps_{2k+2}^{(l)} = veps_{2k}^{(l+1)}
//!   + (eps_{2k+2}^{(l)} - eps_{2k}^{(l+1)}) / (eps_{2k}^{(l+2)} - eps_{2k}^{(l+1)})
//!     * (veps_{2k}^{(l+2)} - veps_{2k}^{(l+1)})
//! ```
//!
//! consumes three neighbouring vector entries and three scalars from
//! Wynn's table applied to `<y, s_l>`. Feeding the `2k + 1` window
//! vectors one by one builds one ascending diagonal per push and requires
//! at most `k + 2` resident vectors (the diagonal plus one carry buffer);
//! the final tip `veps_{2k}^{(0)}` equals the second topological Shanks
//! transform of the window.

use super::wynn::{vanishing, Degeneracy, ScalarEpsilonTable};

#[derive(Debug, Clone)]
pub struct SteaDiagonalState {
    half_width: usize,
    scalars: ScalarEpsilonTable,
    /// Even-column ascending diagonal: `vdiag[c] = veps_{2c}^{(j-2c)}`
    /// where `j + 1` vectors have been fed.
    vdiag: Vec<Vec<f64>>,
    threshold: f64,
    fed: usize,
    peak_resident: usize,
}

impl SteaDiagonalState {
    /// `half_width` is `k`: the window holds `2k + 1` vectors.
    pub fn new(half_width: usize, threshold: f64) -> Self {
        assert!(half_width >= 1, "extrapolation width 2k must be at least 2");
        Self {
            half_width,
            scalars: ScalarEpsilonTable::new(threshold),
            vdiag: Vec::with_capacity(half_width + 1),
            threshold,
            fed: 0,
            peak_resident: 0,
        }
    }

    pub fn fed(&self) -> usize {
        self.fed
    }

    /// Window length `2k + 1`.
    pub fn window(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Peak number of simultaneously stored vectors (diagonal + carry).
    pub fn peak_resident_vectors(&self) -> usize {
        self.peak_resident
    }

    /// Feeds the next iterate and its scalar projection `<y, s>`.
    pub fn push(&mut self, s: &[f64], scalar: f64) -> Result<(), Degeneracy> {
        assert!(self.fed < self.window(), "window already complete");
        self.scalars.push(scalar)?;
        let j = self.fed;
        if j == 0 {
            self.vdiag.push(s.to_vec());
            self.fed = 1;
            self.peak_resident = self.peak_resident.max(1);
            return Ok(());
        }
        // carry = old vdiag[c-1] = veps_{2c-2}^{(j-2c+1)} while vdiag[c-1]
        // already holds the freshly computed veps_{2c-2}^{(j-2c+2)}.
        let mut carry = std::mem::replace(&mut self.vdiag[0], s.to_vec());
        self.peak_resident = self.peak_resident.max(self.vdiag.len() + 1);
        let cmax = (j / 2).min(self.half_width);
        for c in 1..=cmax {
            let cur = self.scalars.current();
            let prev = self.scalars.previous();
            let denom_a = cur[2 * c - 2]; // eps_{2k}^{(l+2)}
            let denom_b = prev[2 * c - 2]; // eps_{2k}^{(l+1)}
            if vanishing(denom_a, denom_b, self.threshold) {
                return Err(Degeneracy { column: 2 * c });
            }
            let ratio = (cur[2 * c] - prev[2 * c - 2]) / (denom_a - denom_b);
            if !ratio.is_finite() {
                return Err(Degeneracy { column: 2 * c });
            }
            // carry <- carry + ratio * (vdiag[c-1] - carry), in place
            {
                let newer = &self.vdiag[c - 1];
                for (ci, ni) in carry.iter_mut().zip(newer) {
                    *ci += ratio * (*ni - *ci);
                }
            }
            if c == self.vdiag.len() {
                // diagonal grew by one column; the carry is consumed
                self.vdiag.push(std::mem::take(&mut carry));
                self.peak_resident = self.peak_resident.max(self.vdiag.len());
                break;
            } else {
                std::mem::swap(&mut self.vdiag[c], &mut carry);
                self.peak_resident = self.peak_resident.max(self.vdiag.len() + 1);
            }
        }
        self.fed = j + 1;
        Ok(())
    }

    /// `veps_{2k}^{(0)}`, available once the window is complete.
    pub fn extrapolated(&self) -> Option<&[f64]> {
        if self.fed == self.window() {
            self.vdiag.last().map(|v| v.as_slice())
        } else {
            None
        }
    }

    /// Deepest transform column computed so far (a shortened-window
    /// approximant `veps_{2c}` with `c >= 1`), if any. This is what a
    /// caller restarts from when the table degenerates before the window
    /// completes.
    pub fn deepest_extrapolant(&self) -> Option<&[f64]> {
        if self.vdiag.len() >= 2 {
            self.vdiag.last().map(|v| v.as_slice())
        } else {
            None
        }
    }
}

/// One-shot second topological Shanks transform of a complete window:
/// `vectors` are `s_0 ... s_{2k}` and `scalars` their projections
/// `<y, s_l>`.
pub fn stea2_extrapolate(
    vectors: &[Vec<f64>],
    scalars: &[f64],
    half_width: usize,
    threshold: f64,
) -> Result<Vec<f64>, Degeneracy> {
    assert_eq!(
        vectors.len(),
        2 * half_width + 1,
        "need exactly 2k+1 vectors"
    );
    assert_eq!(vectors.len(), scalars.len());
    let mut state = SteaDiagonalState::new(half_width, threshold);
    for (v, &sc) in vectors.iter().zip(scalars) {
        state.push(v, sc)?;
    }
    Ok(state.extrapolated().expect("window complete").to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::{diff_norm1, dot, norm1};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// s_l = s + sum_j lambda_j^l w_j: a kernel sequence of order k.
    fn kernel_sequence(limit: &[f64], modes: &[(f64, Vec<f64>)], len: usize) -> Vec<Vec<f64>> {
        (0..len)
            .map(|l| {
                let mut v = limit.to_vec();
                for (lambda, w) in modes {
                    let p = lambda.powi(l as i32);
                    for (vi, wi) in v.iter_mut().zip(w) {
                        *vi += p * wi;
                    }
                }
                v
            })
            .collect()
    }

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
    }

    #[test]
    fn geometric_vector_sequence_is_exact_with_k1() {
        let n = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let limit = random_vec(n, &mut rng);
        let w = random_vec(n, &mut rng);
        let seq = kernel_sequence(&limit, &[(0.6, w)], 3);
        let y: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let scalars: Vec<f64> = seq.iter().map(|s| dot(&y, s)).collect();
        let out = stea2_extrapolate(&seq, &scalars, 1, 1e-14).unwrap();
        assert!(diff_norm1(&out, &limit) < 1e-12 * norm1(&limit).max(1.0));
    }

    #[test]
    fn order_four_kernel_is_recovered() {
        let n = 20;
        let k = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let limit: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.5).collect();
        let lambdas = [0.85, -0.6, 0.4, -0.25];
        let modes: Vec<(f64, Vec<f64>)> = lambdas
            .iter()
            .map(|&l| (l, random_vec(n, &mut rng)))
            .collect();
        let seq = kernel_sequence(&limit, &modes, 2 * k + 1);
        let y: Vec<f64> = random_vec(n, &mut rng);
        let scalars: Vec<f64> = seq.iter().map(|s| dot(&y, s)).collect();
        let out = stea2_extrapolate(&seq, &scalars, k, 1e-14).unwrap();
        assert!(
            diff_norm1(&out, &limit) <= 1e-10 * norm1(&limit),
            "error {:e}",
            diff_norm1(&out, &limit)
        );
    }

    #[test]
    fn memory_bound_is_k_plus_two() {
        // a genuine order-3 kernel sequence keeps every table column alive
        let n = 12;
        let k = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let limit = random_vec(n, &mut rng);
        let modes: Vec<(f64, Vec<f64>)> = [0.8, -0.5, 0.3]
            .iter()
            .map(|&l| (l, random_vec(n, &mut rng)))
            .collect();
        let seq = kernel_sequence(&limit, &modes, 2 * k + 1);
        let y = random_vec(n, &mut rng);
        let mut state = SteaDiagonalState::new(k, 1e-14);
        for s in &seq {
            state.push(s, dot(&y, s)).unwrap();
        }
        assert!(state.extrapolated().is_some());
        assert!(
            state.peak_resident_vectors() <= k + 2,
            "peak {} exceeds k+2",
            state.peak_resident_vectors()
        );
    }

    #[test]
    fn matches_the_direct_solver_on_a_smooth_sequence() {
        use crate::extrapolation::shanks::{shanks_direct, ShanksVariant};
        let n = 10;
        let k = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // smooth contractive drift toward a limit, mildly nonlinear
        let limit: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mut seq = vec![random_vec(n, &mut rng)];
        for l in 0..2 * k {
            let last = &seq[l];
            let next: Vec<f64> = last
                .iter()
                .zip(&limit)
                .map(|(x, t)| t + 0.55 * (x - t) + 0.02 * (x - t).powi(2))
                .collect();
            seq.push(next);
        }
        let y: Vec<f64> = random_vec(n, &mut rng);
        let scalars: Vec<f64> = seq.iter().map(|s| dot(&y, s)).collect();
        let recursive = stea2_extrapolate(&seq, &scalars, k, 1e-14).unwrap();
        let (_, direct) = shanks_direct(&seq, &y, k, ShanksVariant::Second).unwrap();
        let rel = diff_norm1(&recursive, &direct) / norm1(&direct).max(1.0);
        assert!(rel < 1e-8, "relative disagreement {rel:e}");
    }
}
