//! Symmetric sparse matrices stored as the lower triangle in CSR form.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::{Error, Result};

/// Symmetric `n×n` matrix; row `i` holds the columns `j <= i`, sorted, with
/// the diagonal last.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSym {
    /// Zero matrix with a given lower-triangular pattern. Each row of
    /// `rows` must be sorted, deduplicated, contain only `j <= i`, and end
    /// with the diagonal.
    pub fn from_pattern(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for (i, r) in rows.iter().enumerate() {
            if r.last() != Some(&i) || r.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument("row pattern must be sorted and end at the diagonal".into()));
            }
            col_idx.extend_from_slice(r);
            row_ptr.push(col_idx.len());
        }
        let values = vec![0.0; col_idx.len()];
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Sums `(i, j, v)` triplets; entries above the diagonal are mirrored
    /// into the lower triangle. The diagonal is always stored.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for &(i, j, _) in triplets {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch("triplet index out of range".into()));
            }
            let (r, c) = if i >= j { (i, j) } else { (j, i) };
            rows[r].push(c);
        }
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
        }
        let mut s = Self::from_pattern(rows)?;
        for &(i, j, v) in triplets {
            let (r, c) = if i >= j { (i, j) } else { (j, i) };
            s.add(r, c, v);
        }
        Ok(s)
    }

    /// Lower triangle of a dense matrix, skipping exact zeros off the diagonal.
    pub fn from_dense(a: &DenseMatrix) -> Self {
        let n = a.rows();
        let rows = (0..n)
            .map(|i| (0..=i).filter(|&j| j == i || a.get(i, j) != 0.0).collect())
            .collect();
        let mut s = Self::from_pattern(rows).expect("valid pattern");
        for i in 0..n {
            for k in s.row_ptr[i]..s.row_ptr[i + 1] {
                s.values[k] = a.get(i, s.col_idx[k]);
            }
        }
        s
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored (lower-triangle) entries.
    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row `i` of the lower triangle as (columns, values).
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (cols, _) = self.row(i);
        cols.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    /// Adds `v` at `(i, j)` with `j <= i`. Panics outside the pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.position(i, j).expect("entry outside the sparsity pattern");
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.position(r, c).map_or(0.0, |k| self.values[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.values[self.row_ptr[i + 1] - 1]).collect()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let xi = x[i];
            let mut acc = 0.0;
            let last = cols.len() - 1;
            for (&j, &v) in cols[..last].iter().zip(&vals[..last]) {
                acc += v * x[j];
                y[j] += v * xi;
            }
            y[i] += acc + vals[last] * xi;
        }
        y
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        crate::math::dot(x, &self.matvec(x))
    }

    /// `a·self + b·other`; both must share the same pattern.
    pub fn linear_combination(&self, a: f64, other: &SparseSym, b: f64) -> Result<SparseSym> {
        if self.row_ptr != other.row_ptr || self.col_idx != other.col_idx {
            return Err(Error::DimensionMismatch("sparsity patterns differ".into()));
        }
        let mut out = self.clone();
        for (o, (x, y)) in out.values.iter_mut().zip(self.values.iter().zip(&other.values)) {
            *o = a * x + b * y;
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d.set(i, j, v);
                d.set(j, i, v);
            }
        }
        d
    }

    /// Lower-triangle entries as `(row, col, value)`, row-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// Neighbour lists of the symmetric pattern (no self loops).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for i in 0..self.n {
            let (cols, _) = self.row(i);
            for &j in cols {
                if j != i {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_and_matvec() {
        let s = SparseSym::from_triplets(3, &[(0, 0, 2.0), (1, 0, -1.0), (0, 1, 0.0), (1, 1, 2.0), (2, 2, 1.0), (2, 1, 3.0)]).unwrap();
        assert_eq!(s.get(0, 1), -1.0);
        assert_eq!(s.get(1, 2), 3.0);
        assert_eq!(s.matvec(&[1.0, 2.0, 3.0]), vec![0.0, 12.0, 9.0]);
        let d = s.to_dense();
        assert_eq!(d.matvec(&[1.0, 2.0, 3.0]), s.matvec(&[1.0, 2.0, 3.0]));
        assert_eq!(SparseSym::from_dense(&d), s.linear_combination(1.0, &s, 0.0).unwrap());
        assert_eq!(s.diagonal(), vec![2.0, 2.0, 1.0]);
    }
}
