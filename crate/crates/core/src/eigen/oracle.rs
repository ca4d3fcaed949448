//! Dense reference eigensolver: Cholesky of `M`, cyclic Jacobi on
//! `L⁻¹ K L⁻ᵀ`, back-transformation.

use alloc::vec::Vec;

use super::{normalize_sign, rayleigh_residual, EigenResult};
use crate::dense::{backward_substitute_transposed, cholesky, forward_substitute, symmetric_eigen, DenseMatrix};
use crate::sparse::SparseSym;
use crate::{Error, Result};

/// Largest problem the dense path accepts.
pub const DENSE_ORACLE_MAX: usize = 2000;

pub fn dense_oracle_of(k: &SparseSym, m: &SparseSym, nev: usize) -> Result<EigenResult> {
    let n = k.n();
    if n > DENSE_ORACLE_MAX {
        return Err(Error::TooLarge {
            n,
            max: DENSE_ORACLE_MAX,
        });
    }
    if m.n() != n {
        return Err(Error::DimensionMismatch("K and M have different sizes".into()));
    }
    if nev == 0 || nev > n {
        return Err(Error::TooFewUnknowns { k: nev, n });
    }
    let l = cholesky(&m.to_dense())?;
    let kd = k.to_dense();
    // Y = L⁻¹ K, column by column; then C = L⁻¹ Yᵀ
    let mut y = DenseMatrix::zeros(n, n);
    for c in 0..n {
        let mut col: Vec<f64> = (0..n).map(|r| kd.get(r, c)).collect();
        forward_substitute(&l, &mut col);
        for (r, v) in col.into_iter().enumerate() {
            y.set(r, c, v);
        }
    }
    let mut c = DenseMatrix::zeros(n, n);
    for col in 0..n {
        let mut v: Vec<f64> = y.row(col).to_vec();
        forward_substitute(&l, &mut v);
        for (r, x) in v.into_iter().enumerate() {
            c.set(r, col, x);
        }
    }
    let eig = symmetric_eigen(&c);
    let mut out = EigenResult {
        values: Vec::with_capacity(nev),
        vectors: Vec::with_capacity(nev),
        residuals: Vec::with_capacity(nev),
        iterations: eig.sweeps,
    };
    for j in 0..nev {
        let mut x: Vec<f64> = (0..n).map(|r| eig.vectors.get(r, j)).collect();
        backward_substitute_transposed(&l, &mut x);
        normalize_sign(m, &mut x);
        let (_, res) = rayleigh_residual(k, m, &x);
        out.values.push(eig.values[j]);
        out.vectors.push(x);
        out.residuals.push(res);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pencil() {
        let i = SparseSym::from_dense(&DenseMatrix::identity(4));
        let r = dense_oracle_of(&i, &i, 3).unwrap();
        assert_eq!(r.values.len(), 3);
        assert!(r.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn size_guard() {
        let big = SparseSym::from_triplets(DENSE_ORACLE_MAX + 1, &[]).unwrap();
        assert!(matches!(dense_oracle_of(&big, &big, 1), Err(Error::TooLarge { .. })));
    }
}
