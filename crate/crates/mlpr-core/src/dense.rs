//! Small dense linear-algebra helpers.
//!
//! The extrapolation machinery only ever solves systems of size `k + 1`
//! (coefficient systems) or factors `n x 2k` difference matrices with
//! `2k <= n`, so a compact hand-rolled kernel set is sufficient: partial
//! pivoting Gaussian elimination, Householder QR with a thin Q, and a
//! Jacobi eigenvalue sweep for small symmetric matrices.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DenseError {
    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("matrix is rank deficient at column {column} (|R[{column},{column}]| = {diagonal:e})")]
    RankDeficient { column: usize, diagonal: f64 },
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Builds an `n x k` matrix from `k` column vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        let c = cols.len();
        let r = if c == 0 { 0 } else { cols[0].len() };
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for i in 0..r {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Max absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, DenseError> {
    assert_eq!(a.rows(), a.cols(), "solve requires a square matrix");
    assert_eq!(b.len(), a.rows());
    let n = a.rows();
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (piv_row, piv_val) =
            (col..n)
                .map(|r| (r, m[(r, col)].abs()))
                .fold(
                    (col, -1.0),
                    |acc, cur| if cur.1 > acc.1 { cur } else { acc },
                );
        if piv_val <= f64::MIN_POSITIVE {
            return Err(DenseError::Singular {
                column: col,
                pivot: piv_val,
            });
        }
        if piv_row != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(piv_row, j)];
                m[(piv_row, j)] = tmp;
            }
            rhs.swap(col, piv_row);
        }
        for r in col + 1..n {
            let factor = m[(r, col)] / m[(col, col)];
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[(r, j)] -= factor * m[(col, j)];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in i + 1..n {
            acc -= m[(i, j)] * x[j];
        }
        x[i] = acc / m[(i, i)];
    }
    Ok(x)
}

/// Explicit inverse via `n` pivoted solves. Intended for the small
/// coefficient systems only.
pub fn inverse(a: &DenseMatrix) -> Result<DenseMatrix, DenseError> {
    let n = a.rows();
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve(a, &e)?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// 1-norm condition number computed from the explicit inverse.
pub fn condition_1norm(a: &DenseMatrix) -> Result<f64, DenseError> {
    Ok(a.norm1() * inverse(a)?.norm1())
}

/// Thin Householder QR of a tall matrix (`rows >= cols`).
///
/// Returns `(q, r)` with `q` of shape `rows x cols`, `q^T q = I`, and `r`
/// upper triangular `cols x cols`, such that `a = q r`. Fails when a
/// diagonal of `r` falls below `tol` times the largest column norm.
pub fn qr_thin(a: &DenseMatrix, tol: f64) -> Result<(DenseMatrix, DenseMatrix), DenseError> {
    let (n, p) = (a.rows(), a.cols());
    assert!(n >= p, "qr_thin requires rows >= cols");
    let mut work = a.clone();
    // Householder vectors stored per step.
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(p);
    let scale = (0..p)
        .map(|j| (0..n).map(|i| a[(i, j)].powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for k in 0..p {
        let mut v: Vec<f64> = (k..n).map(|i| work[(i, k)]).collect();
        let alpha = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let alpha = if v[0] >= 0.0 { -alpha } else { alpha };
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if alpha.abs() <= tol * scale {
            return Err(DenseError::RankDeficient {
                column: k,
                diagonal: alpha.abs(),
            });
        }
        if vnorm2 > 0.0 {
            for j in k..p {
                let dot: f64 = (k..n).map(|i| v[i - k] * work[(i, j)]).sum();
                let coeff = 2.0 * dot / vnorm2;
                for i in k..n {
                    work[(i, j)] -= coeff * v[i - k];
                }
            }
        }
        vs.push(v);
    }
    let mut r = DenseMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            r[(i, j)] = work[(i, j)];
        }
    }
    // Q = H_0 ... H_{p-1} applied to the first p identity columns.
    let mut q = DenseMatrix::zeros(n, p);
    for j in 0..p {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        for k in (0..p).rev() {
            let v = &vs[k];
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            let dot: f64 = (k..n).map(|i| v[i - k] * e[i]).sum();
            let coeff = 2.0 * dot / vnorm2;
            for i in k..n {
                e[i] -= coeff * v[i - k];
            }
        }
        for i in 0..n {
            q[(i, j)] = e[i];
        }
    }
    Ok((q, r))
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut m = a.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + m.norm1()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_pivoting_required_system() {
        // First pivot is zero; elimination without pivoting would fail.
        let a = DenseMatrix::from_rows(&[
            vec![0.0, 2.0, 1.0],
            vec![1.0, -1.0, 0.0],
            vec![3.0, 0.0, -2.0],
        ]);
        let x_true = vec![1.5, -0.25, 2.0];
        let b = a.matvec(&x_true);
        let x = solve(&a, &b).unwrap();
        for (got, want) in x.iter().zip(&x_true) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn detects_singular_matrix() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(
            solve(&a, &[1.0, 2.0]),
            Err(DenseError::Singular { .. })
        ));
    }

    #[test]
    fn qr_reconstructs_and_is_orthonormal() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.5],
            vec![-2.0, 1.0],
            vec![0.0, 3.0],
            vec![4.0, -1.0],
        ]);
        let (q, r) = qr_thin(&a, 1e-12).unwrap();
        for i in 0..4 {
            for j in 0..2 {
                let recon: f64 = (0..2).map(|k| q[(i, k)] * r[(k, j)]).sum();
                assert!((recon - a[(i, j)]).abs() < 1e-12);
            }
        }
        for j1 in 0..2 {
            for j2 in 0..2 {
                let d: f64 = (0..4).map(|i| q[(i, j1)] * q[(i, j2)]).sum();
                let want = if j1 == j2 { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn qr_flags_rank_deficiency() {
        let c0 = vec![1.0, 2.0, 3.0, 4.0];
        let c1: Vec<f64> = c0.iter().map(|x| 2.0 * x).collect();
        let a = DenseMatrix::from_columns(&[c0, c1]);
        assert!(matches!(
            qr_thin(&a, 1e-12),
            Err(DenseError::RankDeficient { .. })
        ));
    }

    #[test]
    fn jacobi_eigenvalues_of_known_matrix() {
        // eig([2 1; 1 2]) = {1, 3}
        let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let eig = symmetric_eigenvalues(&a);
        assert!((eig[0] - 1.0).abs() < 1e-12);
        assert!((eig[1] - 3.0).abs() < 1e-12);
    }
}
