//! The eigenvalue problems of the dimension-reduction study.
//!
//! * [`solve_cross_section`]: `μ₁` and `W` on `ω₂`, plus the coupling
//!   indicator `‖A₁₂∇W‖`.
//! * [`solve_reduced`]: truncated half-strip values `Z_L^ν`.
//! * [`solve_slab`]: slab values `s_K^ν` (`m = 2`).
//! * [`sweep_plan`] / [`SweepResult`] / [`sweep_directions`]: `inf_ν Z^ν`.
//! * [`solve_full`]: `λ_ℓ^k` (mixed) or `σ_ℓ^k` (all Dirichlet).
//! * [`upper_bound_quotient`]: Rayleigh quotient of a boundary-concentrated
//!   test function.
//! * [`decay_profile`]: eigenfunction mass over sub-cylinders `Ω_r`.

mod cross_section;
mod full;
mod reduced;

use alloc::format;

pub use cross_section::{gap_condition_holds, solve_cross_section, solve_cross_section_with, CrossSectionResult};
pub use full::{
    decay_profile, decay_profile_unchecked, mesh_cylinder, solve_full, upper_bound_quotient, BoundaryMode,
    DecayProfile, FullSolution, UpperBound,
};
pub use reduced::{
    refine_sweep, solve_reduced, solve_slab, solve_truncated, sweep_directions, sweep_plan, ReducedResult,
    SlabResult, SweepOptions, SweepResult, TruncatedSolution, REDUCED_REL_TOL,
};

use crate::geometry::CrossSectionSpec;
use crate::math::ceil;
use crate::mesh::{mesh_box2, mesh_box3, mesh_interval, CellFamily, Mesh};
use crate::{Error, Result};

/// Mesh resolution shared by every solve of a study.
#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    /// Target cell size along base (and half-strip) directions.
    pub target_h: f64,
    /// Cells per cross-section interval; `None` uses `target_h`.
    pub xi_divisions: Option<usize>,
    pub family: CellFamily,
}

impl Discretization {
    pub fn new(target_h: f64) -> Self {
        Self {
            target_h,
            xi_divisions: None,
            family: CellFamily::Simplex,
        }
    }

    pub fn with_xi_divisions(mut self, n: usize) -> Self {
        self.xi_divisions = Some(n);
        self
    }

    pub fn with_family(mut self, family: CellFamily) -> Self {
        self.family = family;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.target_h > 0.0) || !self.target_h.is_finite() {
            return Err(Error::InvalidArgument(format!("target_h must be positive, got {}", self.target_h)));
        }
        if self.xi_divisions == Some(0) {
            return Err(Error::InvalidArgument("xi_divisions must be at least 1".into()));
        }
        Ok(())
    }

    /// Cells covering `length` at the target size.
    pub fn cells(&self, length: f64) -> usize {
        let n = ceil(length / self.target_h - 1e-9);
        if n < 1.0 {
            1
        } else {
            n as usize
        }
    }

    pub fn xi_cells(&self, length: f64) -> usize {
        self.xi_divisions.unwrap_or_else(|| self.cells(length))
    }
}

/// Mesh of `X-interval × ω₂` (`p = 1` gives 2D, `p = 2` gives 3D), all
/// facets tagged Dirichlet.
pub(crate) fn mesh_strip(x: (f64, f64), nx: usize, cross: &CrossSectionSpec, disc: &Discretization) -> Result<Mesh> {
    let iv = cross.intervals();
    match iv.len() {
        1 => {
            let ny = disc.xi_cells(iv[0].1 - iv[0].0);
            mesh_box2(x.0, x.1, iv[0].0, iv[0].1, nx, ny, disc.family)
        }
        2 => {
            let n1 = disc.xi_cells(iv[0].1 - iv[0].0);
            let n2 = disc.xi_cells(iv[1].1 - iv[1].0);
            mesh_box3([x, iv[0], iv[1]], [nx, n1, n2], disc.family)
        }
        p => Err(Error::InvalidArgument(format!("strip meshes need p <= 2, got {p}"))),
    }
}

/// Mesh of the cross-section box alone.
pub(crate) fn mesh_cross(cross: &CrossSectionSpec, n: usize, family: CellFamily) -> Result<Mesh> {
    let iv = cross.intervals();
    match iv.len() {
        1 => mesh_interval(iv[0].0, iv[0].1, n),
        2 => mesh_box2(iv[0].0, iv[0].1, iv[1].0, iv[1].1, n, n, family),
        3 => mesh_box3([iv[0], iv[1], iv[2]], [n, n, n], family),
        p => Err(Error::InvalidArgument(format!("cross-section meshes need p <= 3, got {p}"))),
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub(crate) fn check_ascending(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() || values.windows(2).any(|w| !(w[0] < w[1])) || values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument(format!("{what} must be positive and strictly ascending")));
    }
    Ok(())
}

/// First eigenvalue helper used by several problems.
pub(crate) fn first_pair(
    mesh: &Mesh,
    a: &crate::coefficient::CoefficientField,
    xi_offset: usize,
    opts: &crate::eigen::SolverOptions,
) -> Result<(crate::assembly::DiscreteOperatorPair, crate::eigen::EigenResult)> {
    let pair = crate::assembly::assemble(mesh, a, xi_offset)?;
    let eig = crate::eigen::smallest_eigenpairs(&pair, 1, opts)?;
    Ok((pair, eig))
}

