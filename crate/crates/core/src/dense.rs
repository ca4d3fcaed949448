//! Small dense matrices: cyclic Jacobi for symmetric eigenproblems and a
//! Cholesky factorization. Used for the pointwise coefficient checks, for the
//! Rayleigh-Ritz step inside Lanczos and for the dense reference eigensolver.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
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
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.add(i, j, a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest `|a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }

    /// Largest `|a_ij - a_ji|`, with its location.
    pub fn asymmetry(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let d = (self.get(i, j) - self.get(j, i)).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }
}

/// Eigen-decomposition of a symmetric matrix: ascending values, eigenvectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
    pub sweeps: usize,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
///
/// Only the upper triangle of `a` is read.
pub fn symmetric_eigen(a: &DenseMatrix) -> SymmetricEigen {
    assert_eq!(a.rows, a.cols, "matrix must be square");
    let n = a.rows;
    // full symmetric working copy built from the upper triangle
    let mut w = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = a.get(i, j);
            w.set(i, j, v);
            w.set(j, i, v);
        }
    }
    // rows of `vt` are the accumulated eigenvectors
    let mut vt = DenseMatrix::identity(n);
    let frob2: f64 = w.data.iter().map(|x| x * x).sum();
    let mut sweeps = 0;
    let wd = &mut w.data;
    let vd = &mut vt.data;
    while sweeps < JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            off += wd[p * n + p + 1..(p + 1) * n].iter().map(|x| x * x).sum::<f64>();
        }
        if off == 0.0 || off <= 1e-32 * frob2 {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = wd[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = wd[p * n + p];
                let aqq = wd[q * n + q];
                // rotation underflows relative to both diagonals: drop the entry
                if sweeps > 4 && 1e-18 * app.abs().max(aqq.abs()) >= apq.abs() {
                    wd[p * n + q] = 0.0;
                    wd[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                // rows p and q are contiguous; mirror them into the columns
                let (head, tail) = wd.split_at_mut(q * n);
                let rp = &mut head[p * n..(p + 1) * n];
                let rq = &mut tail[..n];
                for (a, b) in rp.iter_mut().zip(rq.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = c * x - s * y;
                    *b = s * x + c * y;
                }
                rp[p] = app - t * apq;
                rq[q] = aqq + t * apq;
                rp[q] = 0.0;
                rq[p] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let (x, y) = (wd[p * n + k], wd[q * n + k]);
                        wd[k * n + p] = x;
                        wd[k * n + q] = y;
                    }
                }
                wd[q * n + p] = 0.0;
                let (head, tail) = vd.split_at_mut(q * n);
                for (a, b) in head[p * n..(p + 1) * n].iter_mut().zip(tail[..n].iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = c * x - s * y;
                    *b = s * x + c * y;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.get(i, i).total_cmp(&w.get(j, j)).then(i.cmp(&j)));
    let values = order.iter().map(|&i| w.get(i, i)).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, col, vt.get(src, r));
        }
    }
    SymmetricEigen {
        values,
        vectors,
        sweeps,
    }
}

/// Lower-triangular `L` with `A = L Lᵀ`. Reads the lower triangle of `a`.
pub fn cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch("cholesky needs a square matrix".into()));
    }
    let n = a.rows;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite(j));
        }
        let d = sqrt(d);
        l.set(j, j, d);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / d);
        }
    }
    Ok(l)
}

/// Solves `L y = b` in place for lower-triangular `L`.
pub fn forward_substitute(l: &DenseMatrix, b: &mut [f64]) {
    for i in 0..l.rows {
        let mut s = b[i];
        for k in 0..i {
            s -= l.get(i, k) * b[k];
        }
        b[i] = s / l.get(i, i);
    }
}

/// Solves `Lᵀ x = b` in place for lower-triangular `L`.
pub fn backward_substitute_transposed(l: &DenseMatrix, b: &mut [f64]) {
    let n = l.rows;
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l.get(k, i) * b[k];
        }
        b[i] = s / l.get(i, i);
    }
}

/// Smallest and largest eigenvalue of a small symmetric matrix.
pub fn eigen_bounds(a: &DenseMatrix) -> (f64, f64) {
    let e = symmetric_eigen(a);
    (e.values[0], e.values[e.values.len() - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_two_by_two_block() {
        let a = DenseMatrix::from_rows(&[&[2.0, 0.0, 1.0], &[0.0, 2.0, 0.0], &[1.0, 0.0, 2.0]]);
        let e = symmetric_eigen(&a);
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 2.0).abs() < 1e-14);
        assert!((e.values[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let a = DenseMatrix::from_rows(&[
            &[4.0, 1.0, -2.0, 0.5],
            &[1.0, 3.0, 0.0, 1.0],
            &[-2.0, 0.0, 5.0, -1.0],
            &[0.5, 1.0, -1.0, 2.0],
        ]);
        let e = symmetric_eigen(&a);
        let mut d = DenseMatrix::zeros(4, 4);
        for i in 0..4 {
            d.set(i, i, e.values[i]);
        }
        let back = e.vectors.matmul(&d).matmul(&e.vectors.transpose());
        assert!(back.max_abs_diff(&a) < 1e-13);
        let vtv = e.vectors.transpose().matmul(&e.vectors);
        assert!(vtv.max_abs_diff(&DenseMatrix::identity(4)) < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn cholesky_round_trip_and_failure() {
        let a = DenseMatrix::from_rows(&[&[4.0, 2.0], &[2.0, 3.0]]);
        let l = cholesky(&a).unwrap();
        assert!(l.matmul(&l.transpose()).max_abs_diff(&a) < 1e-14);
        let bad = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert_eq!(cholesky(&bad), Err(Error::NotPositiveDefinite(1)));
    }
}
