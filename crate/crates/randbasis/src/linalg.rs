//! Minimal numerical kernel layer: sparse matrices in compressed-row form,
//! a banded direct factorization for the step systems, and dense (truncated)
//! SVD wrappers that the rest of the crate builds on.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Column-major dense matrix of `f64`.
pub type DenseMatrix = DMatrix<f64>;
/// Dense vector of `f64`.
pub type Vector = DVector<f64>;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is singular (zero pivot at row {0})")]
    SingularMatrix(usize),
    #[error("SVD iteration did not converge")]
    NonConvergence,
    #[error("matrix is identically zero")]
    ZeroMatrix,
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
}

/// Square or rectangular sparse matrix in compressed-row storage.
///
/// Column indices are strictly increasing within each row and explicit
/// zeros are dropped when the matrix is finalized from triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOperator {
    /// Build from (row, col, value) triplets, summing duplicates and
    /// dropping entries that cancel to exactly zero.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Self {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_rows];
        for &(i, j, v) in triplets {
            assert!(i < n_rows && j < n_cols, "triplet out of bounds");
            per_row[i].push((j, v));
        }
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for row in &mut per_row {
            row.sort_unstable_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == j {
                    v += row[k].1;
                    k += 1;
                }
                if v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &triplets)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterate entries of one row as (column, value) pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_offsets[i];
        let hi = self.row_offsets[i + 1];
        self.col_indices[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    /// Iterate all entries as (row, column, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn matvec(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.n_cols);
        let mut y = Vector::zeros(self.n_rows);
        for i in 0..self.n_rows {
            let mut acc = 0.0;
            for (j, v) in self.row(i) {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// y = alpha * A * x + beta * y
    pub fn matvec_into(&self, x: &Vector, alpha: f64, beta: f64, y: &mut Vector) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        for i in 0..self.n_rows {
            let mut acc = 0.0;
            for (j, v) in self.row(i) {
                acc += v * x[j];
            }
            y[i] = alpha * acc + beta * y[i];
        }
    }

    /// Bilinear form x^T A y.
    pub fn bilinear(&self, x: &Vector, y: &Vector) -> f64 {
        assert_eq!(x.len(), self.n_rows);
        assert_eq!(y.len(), self.n_cols);
        let mut acc = 0.0;
        for i in 0..self.n_rows {
            let mut row_acc = 0.0;
            for (j, v) in self.row(i) {
                row_acc += v * y[j];
            }
            acc += x[i] * row_acc;
        }
        acc
    }

    /// Sum of two operators with identical dimensions.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        let mut triplets: Vec<(usize, usize, f64)> = self.entries().collect();
        triplets.extend(other.entries());
        Self::from_triplets(self.n_rows, self.n_cols, &triplets)
    }

    /// self + scale * other
    pub fn add_scaled(&self, scale: f64, other: &Self) -> Self {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        let mut triplets: Vec<(usize, usize, f64)> = self.entries().collect();
        triplets.extend(other.entries().map(|(i, j, v)| (i, j, scale * v)));
        Self::from_triplets(self.n_rows, self.n_cols, &triplets)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.entries() {
            a[(i, j)] = v;
        }
        a
    }

    /// Largest |i - j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.entries()
            .map(|(i, j, _)| i.abs_diff(j))
            .max()
            .unwrap_or(0)
    }
}

/// Banded LU factorization with partial pivoting of a square sparse matrix.
///
/// The factors are immutable after construction; `solve` allocates its own
/// workspace, so one factorization can serve many threads concurrently.
#[derive(Debug, Clone)]
pub struct Factorization {
    n: usize,
    ml: usize,
    mu: usize,
    // LAPACK-style band storage with ml extra superdiagonals for pivot fill:
    // entry (i, j) lives at band[j * ldab + (ml + mu + i - j)].
    band: Vec<f64>,
    ldab: usize,
    ipiv: Vec<usize>,
}

/// Factor a square sparse operator. Fails on (near-)zero pivots.
pub fn factorize(matrix: &SparseOperator) -> Result<Factorization, LinalgError> {
    if matrix.n_rows() != matrix.n_cols() {
        return Err(LinalgError::NotSquare(matrix.n_rows(), matrix.n_cols()));
    }
    let n = matrix.n_rows();
    let bw = matrix.bandwidth();
    let (ml, mu) = (bw, bw);
    let ldab = 2 * ml + mu + 1;
    let mut band = vec![0.0; ldab * n];
    let mut max_abs: f64 = 0.0;
    for (i, j, v) in matrix.entries() {
        band[j * ldab + (ml + mu + i - j)] = v;
        max_abs = max_abs.max(v.abs());
    }
    if max_abs == 0.0 {
        return Err(LinalgError::SingularMatrix(0));
    }
    let pivot_floor = max_abs * 1e-300_f64.max(f64::EPSILON * 1e-4);

    let at = |i: usize, j: usize| j * ldab + (ml + mu + i - j);
    let mut ipiv = vec![0usize; n];
    for k in 0..n {
        let i_hi = (k + ml).min(n - 1);
        let mut p = k;
        let mut p_val = band[at(k, k)].abs();
        for i in (k + 1)..=i_hi {
            let v = band[at(i, k)].abs();
            if v > p_val {
                p = i;
                p_val = v;
            }
        }
        if p_val <= pivot_floor {
            return Err(LinalgError::SingularMatrix(k));
        }
        ipiv[k] = p;
        let j_hi = (k + ml + mu).min(n - 1);
        if p != k {
            for j in k..=j_hi {
                band.swap(at(k, j), at(p, j));
            }
        }
        let pivot = band[at(k, k)];
        for i in (k + 1)..=i_hi {
            let l = band[at(i, k)] / pivot;
            band[at(i, k)] = l;
            if l != 0.0 {
                for j in (k + 1)..=j_hi {
                    let u = band[at(k, j)];
                    if u != 0.0 {
                        band[at(i, j)] -= l * u;
                    }
                }
            }
        }
    }
    Ok(Factorization {
        n,
        ml,
        mu,
        band,
        ldab,
        ipiv,
    })
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve S x = b for the matrix S this factorization was built from.
    pub fn solve(&self, b: &Vector) -> Vector {
        assert_eq!(b.len(), self.n);
        let mut x = b.clone();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut Vector) {
        let n = self.n;
        let (ml, mu, ldab) = (self.ml, self.mu, self.ldab);
        let at = |i: usize, j: usize| j * ldab + (ml + mu + i - j);
        // forward substitution with the recorded row interchanges
        for k in 0..n {
            let p = self.ipiv[k];
            if p != k {
                x.swap_rows(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                let i_hi = (k + ml).min(n - 1);
                for i in (k + 1)..=i_hi {
                    x[i] -= self.band[at(i, k)] * xk;
                }
            }
        }
        // back substitution on the banded upper factor
        for k in (0..n).rev() {
            let j_hi = (k + ml + mu).min(n - 1);
            let mut acc = x[k];
            for j in (k + 1)..=j_hi {
                acc -= self.band[at(k, j)] * x[j];
            }
            x[k] = acc / self.band[at(k, k)];
        }
    }
}

/// Full SVD: A = U diag(sigma) V^T with sigma non-increasing.
pub fn svd(a: &DenseMatrix) -> Result<(DenseMatrix, Vector, DenseMatrix), LinalgError> {
    let svd = a
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or(LinalgError::NonConvergence)?;
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    Ok((u, svd.singular_values, vt))
}

/// Singular values only, non-increasing.
pub fn singular_values(a: &DenseMatrix) -> Result<Vector, LinalgError> {
    let svd = a
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or(LinalgError::NonConvergence)?;
    Ok(svd.singular_values)
}

/// Left singular vectors with sigma_i > tol * sigma_0. Always keeps at
/// least one column; fails on an identically zero matrix.
pub fn truncated_svd(a: &DenseMatrix, tol: f64) -> Result<(DenseMatrix, Vector), LinalgError> {
    assert!(tol > 0.0 && tol <= 1.0, "tol must lie in (0, 1]");
    let (u, sigma, _) = svd(a)?;
    if sigma[0] == 0.0 {
        return Err(LinalgError::ZeroMatrix);
    }
    let cutoff = tol * sigma[0];
    let keep = sigma.iter().take_while(|&&s| s > cutoff).count().max(1);
    Ok((u.columns(0, keep).into_owned(), sigma))
}
