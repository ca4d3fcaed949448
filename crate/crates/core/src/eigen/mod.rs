//! Generalized symmetric eigenproblems `K x = λ M x`.
//!
//! The sparse path factorizes `K - σM` ([`ldl`]) and runs shift-invert
//! Lanczos in the `M` inner product ([`lanczos`]). [`dense_oracle`] is an
//! independent dense path for small problems.

pub mod lanczos;
pub mod ldl;
mod oracle;

use alloc::vec::Vec;

pub use lanczos::{smallest_eigenpairs_of, SolverOptions};
pub use ldl::{factorize, factorize_with, LdlFactor, Ordering};
pub use oracle::{dense_oracle_of, DENSE_ORACLE_MAX};

use crate::assembly::DiscreteOperatorPair;
use crate::math::{dot, norm2, sqrt};
use crate::sparse::SparseSym;
use crate::Result;

/// Eigenpairs in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// `M`-orthonormal, one per value.
    pub vectors: Vec<Vec<f64>>,
    /// Relative residuals `‖Kx - λMx‖₂ / ‖Kx‖₂`.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// The `k` smallest eigenpairs of an assembled pair.
pub fn smallest_eigenpairs(pair: &DiscreteOperatorPair, k: usize, opts: &SolverOptions) -> Result<EigenResult> {
    smallest_eigenpairs_of(&pair.stiffness, &pair.mass, k, opts)
}

/// Dense reference solution of an assembled pair.
pub fn dense_oracle(pair: &DiscreteOperatorPair, k: usize) -> Result<EigenResult> {
    dense_oracle_of(&pair.stiffness, &pair.mass, k)
}

/// Rayleigh quotient and relative residual of `x`.
pub(crate) fn rayleigh_residual(k: &SparseSym, m: &SparseSym, x: &[f64]) -> (f64, f64) {
    let kx = k.matvec(x);
    let mx = m.matvec(x);
    let lambda = dot(x, &kx) / dot(x, &mx);
    let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - lambda * b).collect();
    let denom = norm2(&kx);
    let rel = if denom > 0.0 { norm2(&r) / denom } else { norm2(&r) };
    (lambda, rel)
}

/// Scales to unit `M`-norm and flips the sign so the entries sum to a
/// nonnegative value.
pub(crate) fn normalize_sign(m: &SparseSym, x: &mut [f64]) {
    let nrm = sqrt(m.quad_form(x));
    let sum: f64 = x.iter().sum();
    let s = if sum < 0.0 { -1.0 / nrm } else { 1.0 / nrm };
    x.iter_mut().for_each(|v| *v *= s);
}
