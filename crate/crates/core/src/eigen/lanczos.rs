//! Shift-invert Lanczos with full reorthogonalization in the `M` inner
//! product.
//!
//! The operator is `T = (K - σM)⁻¹ M`, self-adjoint in `⟨x, y⟩_M`. Its
//! largest eigenvalues `θ = 1/(λ - σ)` belong to the smallest `λ`. The
//! projected matrix `Vᵀ M T V` is read off the orthogonalization
//! coefficients, so Rayleigh–Ritz stays exact on `span V` even after a
//! random vector is injected.
//!
//! The all-ones start vector is invariant under every symmetry of a
//! symmetric mesh, so its Krylov space misses antisymmetric eigenvectors.
//! Once the wanted pairs converge, a seeded random vector is injected and
//! the iteration runs again; this repeats until a run reproduces the same
//! values.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ldl::{factorize, LdlFactor};
use super::{normalize_sign, rayleigh_residual, EigenResult};
use crate::dense::{symmetric_eigen, DenseMatrix};
use crate::math::{dot, sqrt};
use crate::sparse::SparseSym;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative residual target `‖Kx - λMx‖₂ ≤ tol·‖Kx‖₂`.
    pub tol: f64,
    /// Shift `σ`; must lie below the smallest eigenvalue.
    pub shift: f64,
    /// Seed for injected random vectors.
    pub seed: u64,
    /// Lanczos steps allowed; `None` means `500·k`.
    pub max_iter: Option<usize>,
    /// Probe runs that move the shift towards the lowest eigenvalue before
    /// the main iteration. Every accepted shift is certified to lie below
    /// the spectrum by a positive-definite factorization.
    pub shift_refinements: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            shift: 0.0,
            seed: 42,
            max_iter: None,
            shift_refinements: 3,
        }
    }
}

struct Basis<'a> {
    m: &'a SparseSym,
    v: Vec<Vec<f64>>,
    mv: Vec<Vec<f64>>,
}

impl Basis<'_> {
    /// Two passes of classical Gram–Schmidt; returns the accumulated
    /// coefficients and the remaining `M`-norm.
    fn orthogonalize(&self, w: &mut [f64]) -> (Vec<f64>, f64) {
        let mut coeffs = vec![0.0; self.v.len()];
        for _ in 0..2 {
            let c: Vec<f64> = self.mv.iter().map(|mv| dot(mv, w)).collect();
            for (vi, ci) in self.v.iter().zip(&c) {
                for (wk, vk) in w.iter_mut().zip(vi) {
                    *wk -= ci * vk;
                }
            }
            for (acc, ci) in coeffs.iter_mut().zip(c) {
                *acc += ci;
            }
        }
        let nrm = sqrt(self.m.quad_form(w).max(0.0));
        (coeffs, nrm)
    }

    fn push(&mut self, mut w: Vec<f64>, norm: f64) {
        w.iter_mut().for_each(|x| *x /= norm);
        self.mv.push(self.m.matvec(&w));
        self.v.push(w);
    }
}

struct Ritz {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
}

fn ritz(k: &SparseSym, m: &SparseSym, basis: &Basis<'_>, h: &[Vec<f64>], nev: usize) -> Ritz {
    let j = h.len();
    let mut proj = DenseMatrix::zeros(j, j);
    for (col, c) in h.iter().enumerate() {
        for (row, &v) in c.iter().enumerate().take(col + 1) {
            proj.set(row, col, v);
        }
    }
    let eig = symmetric_eigen(&proj);
    let n = basis.v[0].len();
    let mut out = Ritz {
        values: Vec::new(),
        vectors: Vec::new(),
        residuals: Vec::new(),
    };
    for t in 0..nev.min(j) {
        let col = j - 1 - t;
        let mut x = vec![0.0; n];
        for (i, vi) in basis.v.iter().enumerate().take(j) {
            let s = eig.vectors.get(i, col);
            for (xk, vk) in x.iter_mut().zip(vi) {
                *xk += s * vk;
            }
        }
        let (lambda, res) = rayleigh_residual(k, m, &x);
        out.values.push(lambda);
        out.vectors.push(x);
        out.residuals.push(res);
    }
    out
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
}

fn shifted(k: &SparseSym, m: &SparseSym, sigma: f64) -> Result<SparseSym> {
    if sigma == 0.0 {
        return Ok(k.clone());
    }
    if let Ok(s) = k.linear_combination(1.0, m, -sigma) {
        return Ok(s);
    }
    let mut t: Vec<(usize, usize, f64)> = k.triplets().collect();
    t.extend(m.triplets().map(|(i, j, v)| (i, j, -sigma * v)));
    SparseSym::from_triplets(k.n(), &t)
}

fn same_values(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()))
}

/// The `nev` algebraically smallest eigenpairs of `K x = λ M x`.
pub fn smallest_eigenpairs_of(k: &SparseSym, m: &SparseSym, nev: usize, opts: &SolverOptions) -> Result<EigenResult> {
    let n = k.n();
    if m.n() != n {
        return Err(Error::DimensionMismatch("K and M have different sizes".into()));
    }
    if nev == 0 || !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("need k >= 1 and tol > 0".into()));
    }
    if n < nev {
        return Err(Error::TooFewUnknowns { k: nev, n });
    }
    let (_, fac) = refine_shift(k, m, nev, opts)?;
    let max_iter = opts.max_iter.unwrap_or(500 * nev);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis = Basis {
        m,
        v: Vec::new(),
        mv: Vec::new(),
    };
    let ones = vec![1.0; n];
    let norm = sqrt(m.quad_form(&ones));
    basis.push(ones, norm);

    let mut h: Vec<Vec<f64>> = Vec::new();
    let mut iterations = 0;
    let mut run_start = 0;
    let mut first_run_len: Option<usize> = None;
    let mut accepted: Option<Vec<f64>> = None;
    let mut best: Option<Ritz> = None;
    let mut next_check = nev;
    while iterations < max_iter {
        let j = basis.v.len() - 1;
        let mut w = fac.solve(&basis.mv[j]);
        let before = sqrt(m.quad_form(&w).max(0.0));
        let (coeffs, beta) = basis.orthogonalize(&mut w);
        h.push(coeffs);
        iterations += 1;
        let exhausted = basis.v.len() == n;
        let run_len = iterations - run_start;
        let min_run = first_run_len.unwrap_or(0);

        let mut converged_now = false;
        if exhausted || (h.len() >= nev && h.len() >= next_check) {
            let r = ritz(k, m, &basis, &h, nev);
            converged_now = r.values.len() == nev && r.residuals.iter().all(|&x| x <= opts.tol);
            let better = match &best {
                None => true,
                Some(b) => {
                    r.residuals.iter().copied().fold(0.0, f64::max) <= b.residuals.iter().copied().fold(0.0, f64::max)
                }
            };
            if converged_now || better {
                best = Some(r);
            }
            next_check = h.len() + if h.len() < 40 { 1 } else { h.len() / 10 };
        }
        if converged_now && (exhausted || run_len >= min_run) {
            let values = best.as_ref().expect("just stored").values.clone();
            let done = exhausted || accepted.as_deref().is_some_and(|prev| same_values(prev, &values));
            if done {
                return Ok(finish(m, best.take().expect("converged Ritz pairs"), iterations));
            }
            if first_run_len.is_none() {
                first_run_len = Some(run_len);
            }
            accepted = Some(values);
            // verification run from a fresh random direction
            match inject_random(&mut basis, &mut rng, n) {
                true => {
                    run_start = iterations;
                    continue;
                }
                false => return Ok(finish(m, best.take().expect("converged Ritz pairs"), iterations)),
            }
        }
        if exhausted {
            break;
        }
        if beta > 1e-10 * before {
            basis.push(w, beta);
        } else if !inject_random(&mut basis, &mut rng, n) {
            // invariant subspace spans everything reachable; check once more
            let r = ritz(k, m, &basis, &h, nev);
            if r.values.len() == nev && r.residuals.iter().all(|&x| x <= opts.tol) {
                return Ok(finish(m, r, iterations));
            }
            best = Some(r);
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations,
        residuals: best.map(|b| b.residuals).unwrap_or_default(),
    })
}

const PROBE_STEPS: usize = 24;

/// Smallest Ritz value after a short run from the all-ones vector; an upper
/// bound for the lowest eigenvalue.
fn probe_lowest(k: &SparseSym, m: &SparseSym, fac: &LdlFactor, steps: usize) -> f64 {
    let n = k.n();
    let mut basis = Basis {
        m,
        v: Vec::new(),
        mv: Vec::new(),
    };
    let ones = vec![1.0; n];
    let norm = sqrt(m.quad_form(&ones));
    basis.push(ones, norm);
    let mut h = Vec::new();
    for _ in 0..steps.min(n) {
        let j = basis.v.len() - 1;
        let mut w = fac.solve(&basis.mv[j]);
        let before = sqrt(m.quad_form(&w).max(0.0));
        let (coeffs, beta) = basis.orthogonalize(&mut w);
        h.push(coeffs);
        if basis.v.len() == n || !(beta > 1e-10 * before) {
            break;
        }
        basis.push(w, beta);
    }
    let r = ritz(k, m, &basis, &h, h.len());
    r.values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Moves `σ` to `σ + 0.9·(λ̃ - σ)` where `λ̃` is a probe estimate, backing
/// off towards the last certified shift whenever `K - σM` is not positive
/// definite.
fn refine_shift(k: &SparseSym, m: &SparseSym, nev: usize, opts: &SolverOptions) -> Result<(f64, LdlFactor)> {
    let mut sigma = opts.shift;
    let mut fac = factorize(&shifted(k, m, sigma)?)?;
    if k.n() <= 4 * PROBE_STEPS {
        return Ok((sigma, fac));
    }
    for _ in 0..opts.shift_refinements {
        let est = probe_lowest(k, m, &fac, PROBE_STEPS + nev);
        if !(est.is_finite() && est > sigma) {
            break;
        }
        let mut step = 0.9 * (est - sigma);
        let mut accepted = false;
        for _ in 0..6 {
            if let Ok(f) = factorize(&shifted(k, m, sigma + step)?) {
                sigma += step;
                fac = f;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((sigma, fac))
}

fn inject_random(basis: &mut Basis<'_>, rng: &mut ChaCha8Rng, n: usize) -> bool {
    if basis.v.len() >= n {
        return false;
    }
    for _ in 0..3 {
        let mut r = random_vector(rng, n);
        let before = sqrt(basis.m.quad_form(&r));
        let (_, nrm) = basis.orthogonalize(&mut r);
        if nrm > 1e-8 * before {
            basis.push(r, nrm);
            return true;
        }
    }
    false
}

fn finish(m: &SparseSym, r: Ritz, iterations: usize) -> EigenResult {
    let mut order: Vec<usize> = (0..r.values.len()).collect();
    order.sort_by(|&a, &b| r.values[a].total_cmp(&r.values[b]).then(a.cmp(&b)));
    let mut out = EigenResult {
        values: Vec::new(),
        vectors: Vec::new(),
        residuals: Vec::new(),
        iterations,
    };
    for i in order {
        let mut x = r.vectors[i].clone();
        normalize_sign(m, &mut x);
        out.values.push(r.values[i]);
        out.vectors.push(x);
        out.residuals.push(r.residuals[i]);
    }
    out
}
