use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{check_ascending, first_pair, mesh_strip, Discretization};
use crate::coefficient::{conjugate_rotation, reduce_direction, CoefficientField};
use crate::dense::DenseMatrix;
use crate::eigen::SolverOptions;
use crate::geometry::{BoundaryTag, CrossSectionSpec, Direction};
use crate::math::floor;
use crate::mesh::{mesh_box3, CellFamily, Mesh};
use crate::{Error, Result};

/// Relative change between the last two truncation lengths below which a
/// reduced sequence is labelled converged.
pub const REDUCED_REL_TOL: f64 = 1e-4;

/// Relative slack allowed before a rise in `Z_L` or `s_K` counts as a
/// monotonicity violation.
const MONOTONE_TOL: f64 = 1e-8;

/// First eigenpair of the reduced operator on `(-L, 0) × ω₂`: Dirichlet at
/// `z₁ = -L` and on `∂ω₂`, natural Neumann at `z₁ = 0`.
#[derive(Clone, Debug)]
pub struct TruncatedSolution {
    pub length: f64,
    pub value: f64,
    pub residual: f64,
    pub dofs: usize,
    /// Nodal values on every mesh node.
    pub vector: Vec<f64>,
    pub mesh: Mesh,
    nx: usize,
    ny: usize,
    xi: (f64, f64),
    family: CellFamily,
}

impl TruncatedSolution {
    /// Finite-element interpolation of the eigenfunction at `(z₁, ξ)`;
    /// zero outside `[-L, 0] × ω₂`. Only `p = 1`.
    pub fn evaluate(&self, z1: f64, xi: f64) -> f64 {
        let (c, d) = self.xi;
        if !(z1 >= -self.length && z1 <= 0.0 && xi >= c && xi <= d) {
            return 0.0;
        }
        let hx = self.length / self.nx as f64;
        let hy = (d - c) / self.ny as f64;
        let fx = (z1 + self.length) / hx;
        let fy = (xi - c) / hy;
        let i = (floor(fx) as usize).min(self.nx - 1);
        let j = (floor(fy) as usize).min(self.ny - 1);
        let s = (fx - i as f64).clamp(0.0, 1.0);
        let t = (fy - j as f64).clamp(0.0, 1.0);
        let id = |i: usize, j: usize| self.vector[i + (self.nx + 1) * j];
        let (a, b, cc, dd) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
        match self.family {
            CellFamily::Tensor => (1.0 - s) * (1.0 - t) * a + s * (1.0 - t) * b + s * t * cc + (1.0 - s) * t * dd,
            CellFamily::Simplex if s >= t => a + s * (b - a) + t * (cc - b),
            CellFamily::Simplex => a + t * (dd - a) + s * (cc - dd),
        }
    }
}

fn tag_neumann_at_zero(mesh: &mut Mesh, scale: f64) -> Result<()> {
    let tol = 1e-9 * scale;
    mesh.tag_boundary(|c, n| {
        if c[0].abs() <= tol && (n[0] - 1.0).abs() <= 1e-12 {
            Ok((BoundaryTag::Neumann, None))
        } else {
            Ok((BoundaryTag::Dirichlet, None))
        }
    })
}

/// Solves the truncated problem of length `L` for a reduced coefficient
/// `A_ν` (`m = 1`).
pub fn solve_truncated(
    a_nu: &CoefficientField,
    cross: &CrossSectionSpec,
    length: f64,
    disc: &Discretization,
    opts: &SolverOptions,
) -> Result<TruncatedSolution> {
    disc.validate()?;
    if a_nu.m() != 1 || a_nu.p() != cross.dim() {
        return Err(Error::DimensionMismatch("truncated problems need a reduced (1+p) coefficient".into()));
    }
    if !(length > 0.0) {
        return Err(Error::InvalidArgument(format!("truncation length must be positive, got {length}")));
    }
    let nx = disc.cells(length);
    let mut mesh = mesh_strip((-length, 0.0), nx, cross, disc)?;
    tag_neumann_at_zero(&mut mesh, length + cross.diameter())?;
    let (pair, eig) = first_pair(&mesh, a_nu, 1, opts)?;
    let iv = cross.intervals()[0];
    Ok(TruncatedSolution {
        length,
        value: eig.values[0],
        residual: eig.residuals[0],
        dofs: pair.n(),
        vector: pair.lift(&eig.vectors[0]),
        mesh,
        nx,
        ny: disc.xi_cells(iv.1 - iv.0),
        xi: iv,
        family: disc.family,
    })
}

/// The sequence `Z_L^ν` over a truncation schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedResult {
    pub nu: Direction,
    pub lengths: Vec<f64>,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub dofs: Vec<usize>,
    /// The last computed value (no extrapolation beyond it).
    pub extrapolated: f64,
    /// Relative change between the last two values.
    pub relative_change: f64,
    pub converged: bool,
}

pub fn solve_reduced(
    a: &CoefficientField,
    nu: &Direction,
    cross: &CrossSectionSpec,
    lengths: &[f64],
    disc: &Discretization,
    opts: &SolverOptions,
) -> Result<ReducedResult> {
    check_ascending(lengths, "truncation lengths")?;
    let a_nu = reduce_direction(a, nu)?;
    let mut out = ReducedResult {
        nu: nu.clone(),
        lengths: lengths.to_vec(),
        values: Vec::new(),
        residuals: Vec::new(),
        dofs: Vec::new(),
        extrapolated: f64::NAN,
        relative_change: f64::NAN,
        converged: false,
    };
    for &l in lengths {
        let t = solve_truncated(&a_nu, cross, l, disc, opts)?;
        if let Some(&prev) = out.values.last() {
            if t.value > prev * (1.0 + MONOTONE_TOL) {
                return Err(Error::MonotonicityViolated {
                    parameter: l,
                    previous: prev,
                    current: t.value,
                });
            }
        }
        out.values.push(t.value);
        out.residuals.push(t.residual);
        out.dofs.push(t.dofs);
    }
    let last = *out.values.last().expect("nonempty schedule");
    out.extrapolated = last;
    if out.values.len() >= 2 {
        let prev = out.values[out.values.len() - 2];
        out.relative_change = (prev - last).abs() / last.abs();
        out.converged = out.relative_change <= REDUCED_REL_TOL;
    }
    Ok(out)
}

/// Slab value `s_K^ν` on `(-K, 0) × (-K, K) × ω₂` in coordinates rotated so
/// that `ν` is the first axis.
#[derive(Clone, Debug, PartialEq)]
pub struct SlabResult {
    pub size: f64,
    pub value: f64,
    pub residual: f64,
    pub dofs: usize,
}

pub fn solve_slab(
    a: &CoefficientField,
    nu: &Direction,
    cross: &CrossSectionSpec,
    size: f64,
    disc: &Discretization,
    opts: &SolverOptions,
) -> Result<SlabResult> {
    disc.validate()?;
    if a.m() != 2 || cross.dim() != 1 {
        return Err(Error::InvalidArgument(format!(
            "slab problems need m = 2 and p = 1, got m = {} and p = {}",
            a.m(),
            cross.dim()
        )));
    }
    if !(size > 0.0) {
        return Err(Error::InvalidArgument(format!("slab size must be positive, got {size}")));
    }
    let b = DenseMatrix::from_row_major(2, 2, nu.rotation_with_first_row());
    let ab = conjugate_rotation(a, &b)?;
    let iv = cross.intervals()[0];
    let n = [disc.cells(size), disc.cells(2.0 * size), disc.xi_cells(iv.1 - iv.0)];
    let mut mesh = mesh_box3([(-size, 0.0), (-size, size), iv], n, disc.family)?;
    tag_neumann_at_zero(&mut mesh, 3.0 * size + cross.diameter())?;
    let (pair, eig) = first_pair(&mesh, &ab, 2, opts)?;
    Ok(SlabResult {
        size,
        value: eig.values[0],
        residual: eig.residuals[0],
        dofs: pair.n(),
    })
}

/// Directions sampled by a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    /// Grid size on `S¹` (ignored for `m = 1`, where `S⁰ = {±1}`).
    pub samples: usize,
    pub refine: bool,
    pub lengths: Vec<f64>,
    pub disc: Discretization,
}

impl SweepOptions {
    pub fn new(lengths: Vec<f64>, disc: Discretization) -> Self {
        Self {
            samples: 64,
            refine: false,
            lengths,
            disc,
        }
    }
}

/// `Z^ν` samples and their minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub samples: Vec<(Direction, f64)>,
    /// Extra evaluations made by golden-section refinement.
    pub refined: Vec<(Direction, f64)>,
    pub argmin_direction: Direction,
    pub min_value: f64,
    /// Grid spacing in radians (`π` for `S⁰`).
    pub resolution: f64,
}

/// Uniform `θ` grid `2πi/samples` for `m = 2`; `[+1, -1]` for `m = 1`.
pub fn sweep_plan(m: usize, samples: usize) -> Result<Vec<Direction>> {
    match m {
        1 => Ok(vec![Direction::new(vec![1.0])?, Direction::new(vec![-1.0])?]),
        2 => {
            if samples < 3 {
                return Err(Error::InvalidArgument("a sweep needs at least 3 directions".into()));
            }
            Ok((0..samples).map(|i| Direction::from_angle(2.0 * PI * i as f64 / samples as f64)).collect())
        }
        m => Err(Error::InvalidArgument(format!("direction sweeps need m = 1 or 2, got {m}"))),
    }
}

fn better(candidate: f64, current: f64) -> bool {
    candidate < current - 1e-9 * current.abs()
}

impl SweepResult {
    /// Gathers values evaluated on a [`sweep_plan`], keeping the first
    /// (smallest-angle) minimiser among ties.
    pub fn from_samples(samples: Vec<(Direction, f64)>) -> Result<Self> {
        let first = samples.first().ok_or_else(|| Error::InvalidArgument("empty sweep".into()))?;
        let mut best = (first.0.clone(), first.1);
        for (d, v) in &samples[1..] {
            if better(*v, best.1) {
                best = (d.clone(), *v);
            }
        }
        let resolution = if first.0.dim() == 1 { PI } else { 2.0 * PI / samples.len() as f64 };
        Ok(Self {
            samples,
            refined: Vec::new(),
            argmin_direction: best.0,
            min_value: best.1,
            resolution,
        })
    }

    /// Largest difference between neighbouring grid samples (cyclic).
    pub fn max_adjacent_jump(&self) -> f64 {
        let n = self.samples.len();
        (0..n)
            .map(|i| (self.samples[(i + 1) % n].1 - self.samples[i].1).abs())
            .fold(0.0, f64::max)
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search on `θ ∈ [θ* - Δ, θ* + Δ]` around the grid minimiser
/// until the bracket is narrower than `Δ/16`. No-op for `m = 1`.
pub fn refine_sweep<F>(mut result: SweepResult, mut f: F) -> Result<SweepResult>
where
    F: FnMut(&Direction) -> Result<f64>,
{
    if result.argmin_direction.dim() != 2 {
        return Ok(result);
    }
    let delta = result.resolution;
    let center = result.argmin_direction.angle();
    let (mut lo, mut hi) = (center - delta, center + delta);
    let mut eval = |theta: f64, refined: &mut Vec<(Direction, f64)>| -> Result<f64> {
        let d = Direction::from_angle(theta);
        let v = f(&d)?;
        refined.push((d, v));
        Ok(v)
    };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1, &mut result.refined)?;
    let mut f2 = eval(x2, &mut result.refined)?;
    while hi - lo > delta / 16.0 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1, &mut result.refined)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2, &mut result.refined)?;
        }
    }
    for (d, v) in &result.refined {
        if better(*v, result.min_value) {
            result.min_value = *v;
            result.argmin_direction = d.clone();
        }
    }
    Ok(result)
}

/// Sequential sweep of `Z^ν` (the last value of each reduced sequence).
pub fn sweep_directions(
    a: &CoefficientField,
    cross: &CrossSectionSpec,
    sweep: &SweepOptions,
    opts: &SolverOptions,
) -> Result<SweepResult> {
    let eval = |d: &Direction| solve_reduced(a, d, cross, &sweep.lengths, &sweep.disc, opts).map(|r| r.extrapolated);
    let samples = sweep_plan(a.m(), sweep.samples)?
        .into_iter()
        .map(|d| eval(&d).map(|v| (d, v)))
        .collect::<Result<Vec<_>>>()?;
    let result = SweepResult::from_samples(samples)?;
    if sweep.refine {
        refine_sweep(result, eval)
    } else {
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_strip_is_mu1_plus_axial_mode() {
        let disc = Discretization::new(0.125).with_xi_divisions(8).with_family(CellFamily::Tensor);
        let a = CoefficientField::identity(1, 1);
        let t = solve_truncated(&a, &CrossSectionSpec::unit(), 4.0, &disc, &SolverOptions::default()).unwrap();
        // separable: Z_L^h = μ₁^h + first mixed 1D mode of (-L, 0)
        assert!(t.value > PI * PI);
        assert!(t.value < PI * PI + (PI / 8.0) * (PI / 8.0) + 0.2);
        assert!((t.evaluate(-4.0, 0.5)).abs() < 1e-14);
        assert!(t.evaluate(0.0, 0.5) > t.evaluate(-2.0, 0.5));
    }

    #[test]
    fn sweep_plan_shapes() {
        assert_eq!(sweep_plan(1, 64).unwrap().len(), 2);
        let p = sweep_plan(2, 8).unwrap();
        assert!((p[2].angle() - PI / 2.0).abs() < 1e-15);
        assert!(sweep_plan(3, 8).is_err());
    }

    #[test]
    fn golden_section_finds_interior_minimum() {
        let samples: Vec<(Direction, f64)> = sweep_plan(2, 16)
            .unwrap()
            .into_iter()
            .map(|d| {
                let v = 1.0 - libm::cos(d.angle() - 0.3);
                (d, v)
            })
            .collect();
        let r = SweepResult::from_samples(samples).unwrap();
        assert!((r.argmin_direction.angle() - PI / 8.0).abs() < 1e-15);
        let r = refine_sweep(r, |d| Ok(1.0 - libm::cos(d.angle() - 0.3))).unwrap();
        let err = (r.argmin_direction.angle() - 0.3).abs();
        assert!(err < 2.0 * PI / 16.0 / 16.0, "{err}");
        assert!(r.min_value < 1e-3);
    }

    #[test]
    fn ties_keep_smallest_angle() {
        let samples = sweep_plan(2, 4).unwrap().into_iter().map(|d| (d, 5.0)).collect();
        let r = SweepResult::from_samples(samples).unwrap();
        assert_eq!(r.argmin_direction.angle(), 0.0);
    }
}
