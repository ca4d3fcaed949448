use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{fit_slope, mesh_strip, solve_cross_section_with, solve_truncated, Discretization};
use crate::assembly::{assemble, element_norms, interpolate, rayleigh, DiscreteOperatorPair};
use crate::coefficient::{reduce_direction, CoefficientField};
use crate::eigen::{smallest_eigenpairs, EigenResult, SolverOptions};
use crate::geometry::{classify_boundary_facet, point_in_scaled_base, BaseSpec, BoundaryTag, CylinderSpec};
use crate::math::{cos, ln, sqrt};
use crate::mesh::{extrude, mesh_box3, mesh_polygon_scaled, CellFamily, Mesh};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Neumann on the lateral boundary, Dirichlet on the caps.
    Mixed,
    /// Dirichlet on the whole boundary.
    Dirichlet,
}

/// Mesh of `Ω_ℓ` with boundary tags for the chosen mode. Lateral facets
/// carry the id of the base face they lie on.
pub fn mesh_cylinder(cyl: &CylinderSpec, disc: &Discretization, mode: BoundaryMode) -> Result<Mesh> {
    disc.validate()?;
    let l = cyl.scale;
    let mut mesh = match &cyl.base {
        BaseSpec::Interval { a, b } => mesh_strip((l * a, l * b), disc.cells(l * (b - a)), &cyl.cross, disc)?,
        BaseSpec::Polygon(poly) => {
            if cyl.p() != 1 {
                return Err(Error::InvalidArgument("polygon bases need p = 1".into()));
            }
            let iv = cyl.cross.intervals()[0];
            let nz = disc.xi_cells(iv.1 - iv.0);
            match disc.family {
                CellFamily::Tensor => {
                    let (x0, x1, y0, y1) = poly.as_axis_rectangle().ok_or_else(|| {
                        Error::InvalidArgument("tensor cells need an axis-aligned rectangular base".into())
                    })?;
                    let n = [disc.cells(l * (x1 - x0)), disc.cells(l * (y1 - y0)), nz];
                    mesh_box3([(l * x0, l * x1), (l * y0, l * y1), iv], n, CellFamily::Tensor)?
                }
                CellFamily::Simplex => {
                    let longest = (0..poly.num_edges())
                        .map(|k| {
                            let v = poly.vertices()[k];
                            sqrt(v[0] * v[0] + v[1] * v[1]).max(poly.edge_length(k))
                        })
                        .fold(0.0, f64::max);
                    let base = mesh_polygon_scaled(poly, l, disc.cells(l * longest))?;
                    extrude(&base, iv.0, iv.1, nz)?
                }
            }
        }
    };
    match mode {
        BoundaryMode::Dirichlet => mesh.tag_boundary(|_, _| Ok((BoundaryTag::Dirichlet, None)))?,
        BoundaryMode::Mixed => {
            let tol = cyl.boundary_tolerance();
            let m = cyl.m();
            mesh.tag_boundary(|c, n| {
                let tag = classify_boundary_facet(cyl, c, n)?;
                let face = match tag {
                    BoundaryTag::Neumann => {
                        let x: Vec<f64> = c[..m].iter().map(|v| v / l).collect();
                        cyl.base.face_containing(&x, tol / l)
                    }
                    BoundaryTag::Dirichlet => None,
                };
                Ok((tag, face))
            })?
        }
    }
    Ok(mesh)
}

/// Eigenpairs on `Ω_ℓ` together with the mesh and matrices they live on.
#[derive(Clone, Debug)]
pub struct FullSolution {
    pub eigen: EigenResult,
    pub mesh: Mesh,
    pub pair: DiscreteOperatorPair,
}

/// The `k` smallest eigenvalues on `Ω_ℓ`.
pub fn solve_full(
    cyl: &CylinderSpec,
    a: &CoefficientField,
    k: usize,
    disc: &Discretization,
    mode: BoundaryMode,
    opts: &SolverOptions,
    dof_cap: Option<usize>,
) -> Result<FullSolution> {
    if a.m() != cyl.m() || a.p() != cyl.p() {
        return Err(Error::DimensionMismatch(format!(
            "coefficient has (m, p) = ({}, {}), cylinder has ({}, {})",
            a.m(),
            a.p(),
            cyl.m(),
            cyl.p()
        )));
    }
    let mesh = mesh_cylinder(cyl, disc, mode)?;
    if let Some(cap) = dof_cap {
        let dofs = mesh.nodes_with_tag(BoundaryTag::Dirichlet).iter().filter(|d| !**d).count();
        if dofs > cap {
            return Err(Error::DofCap { dofs, cap });
        }
    }
    let pair = assemble(&mesh, a, cyl.m())?;
    let eigen = smallest_eigenpairs(&pair, k, opts)?;
    Ok(FullSolution { eigen, mesh, pair })
}

/// Rayleigh quotient of the boundary-concentrated test function.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperBound {
    pub face: usize,
    pub size: f64,
    pub quotient: f64,
    /// `Z_K^ν` of the truncated problem whose eigenfunction is used.
    pub reduced_value: f64,
    pub reduced_residual: f64,
    pub dofs: usize,
}

/// Half-width of the tangential bump support in units of `K`.
fn bump_half_width(m: usize) -> f64 {
    1.0 / sqrt(m.saturating_sub(1).max(1) as f64)
}

/// `Φ(t) = c·cos²(πt/(2a))` on `(-a, a)` with `∫Φ² = 1`.
fn bump(t: f64, a: f64) -> f64 {
    if t.abs() >= a {
        return 0.0;
    }
    let c = sqrt(4.0 / (3.0 * a));
    let s = cos(PI * t / (2.0 * a));
    c * s * s
}

/// Builds `q = v_K^ν(z₁, ξ)·Φ_K(z_t)` at the centroid of base face `face`
/// (scaled by `ℓ`), where `z₁` is the signed distance along the outward
/// normal `ν`, `z_t` the tangential offset, `v_K^ν` the first eigenfunction
/// of the truncated problem of length `K` and `Φ_K(t) = Φ(t/K)/√K`. Returns
/// its Rayleigh quotient on the mixed problem.
pub fn upper_bound_quotient(
    cyl: &CylinderSpec,
    a: &CoefficientField,
    face: usize,
    size: f64,
    disc: &Discretization,
    opts: &SolverOptions,
) -> Result<UpperBound> {
    if cyl.p() != 1 || a.m() != cyl.m() || a.p() != 1 {
        return Err(Error::InvalidArgument("upper-bound construction needs p = 1".into()));
    }
    if face >= cyl.base.num_faces() {
        return Err(Error::InvalidArgument(format!("base has no face {face}")));
    }
    if !(size > 0.0) {
        return Err(Error::InvalidArgument(format!("support size must be positive, got {size}")));
    }
    let m = cyl.m();
    let l = cyl.scale;
    let nu = cyl.base.face_normal(face);
    let nv = nu.components().to_vec();
    let p0: Vec<f64> = cyl.base.face_centroid(face).iter().map(|c| l * c).collect();
    let half = bump_half_width(m) * size;
    let tangent = if m == 2 { [-nv[1], nv[0]] } else { [0.0, 0.0] };
    let tol = cyl.boundary_tolerance();
    let corners: Vec<Vec<f64>> = if m == 1 {
        alloc::vec![alloc::vec![p0[0] - size * nv[0]]]
    } else {
        let mut v = Vec::new();
        for depth in [0.0, size] {
            for side in [-half, half] {
                v.push((0..2).map(|i| p0[i] - depth * nv[i] + side * tangent[i]).collect());
            }
        }
        v
    };
    for c in &corners {
        let x: Vec<f64> = c.iter().map(|v| v / l).collect();
        if cyl.base.signed_distance(&x) * l > tol {
            return Err(Error::SupportDoesNotFit(format!(
                "support of size {size} at face {face} leaves the scaled base (corner {c:?})"
            )));
        }
    }
    let a_nu = reduce_direction(a, &nu)?;
    let reduced = solve_truncated(&a_nu, &cyl.cross, size, disc, opts)?;
    let mesh = mesh_cylinder(cyl, disc, BoundaryMode::Mixed)?;
    let pair = assemble(&mesh, a, m)?;
    let scale = 1.0 / sqrt(size);
    let q = interpolate(&mesh, &pair, |x| {
        let d: Vec<f64> = (0..m).map(|i| x[i] - p0[i]).collect();
        let z1: f64 = (0..m).map(|i| d[i] * nv[i]).sum();
        let v = reduced.evaluate(z1, x[m]);
        if m == 1 {
            v
        } else {
            let zt = d[0] * tangent[0] + d[1] * tangent[1];
            v * scale * bump(zt / size, bump_half_width(m))
        }
    })?;
    Ok(UpperBound {
        face,
        size,
        quotient: rayleigh(&pair, &q)?,
        reduced_value: reduced.value,
        reduced_residual: reduced.residual,
        dofs: pair.n(),
    })
}

/// Mass of the first eigenfunction over the sub-cylinders `Ω_r = rω₁ × ω₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayProfile {
    pub scale: f64,
    pub radii: Vec<f64>,
    /// `∫_{Ω_r} u²`.
    pub masses: Vec<f64>,
    /// `∫_{Ω_r} |∇u|²`.
    pub gradient_masses: Vec<f64>,
    /// Counted volume of `Ω_r` over the volume of `Ω_ℓ`.
    pub measure_fractions: Vec<f64>,
    pub total_mass: f64,
    pub total_gradient_mass: f64,
    /// Least-squares slope of `log(mass / measure fraction)` against `ℓ - r`.
    pub slope: f64,
    /// Least-squares slope of `log(mass)` against `ℓ - r`.
    pub raw_slope: f64,
    pub eigenvalue: f64,
    pub residual: f64,
    pub dofs: usize,
}

/// Decay profile of the first mixed eigenfunction. Requires the gap
/// condition on the cross-section.
pub fn decay_profile(
    cyl: &CylinderSpec,
    a: &CoefficientField,
    radii: &[f64],
    disc: &Discretization,
    opts: &SolverOptions,
) -> Result<DecayProfile> {
    let iv = cyl.cross.intervals()[0];
    let cs = solve_cross_section_with(&cyl.cross, a, disc.xi_cells(iv.1 - iv.0), disc.family, opts)?;
    if !super::gap_condition_holds(&cs, None) {
        return Err(Error::DecayHypotheses);
    }
    decay_profile_unchecked(cyl, a, radii, disc, opts)
}

/// [`decay_profile`] without the gap-condition check (for control runs).
pub fn decay_profile_unchecked(
    cyl: &CylinderSpec,
    a: &CoefficientField,
    radii: &[f64],
    disc: &Discretization,
    opts: &SolverOptions,
) -> Result<DecayProfile> {
    let l = cyl.scale;
    super::check_ascending(radii, "radii")?;
    if radii.iter().any(|&r| r > l - 1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("radii must lie in (0, ℓ - 1] = (0, {}]", l - 1.0)));
    }
    let sol = solve_full(cyl, a, 1, disc, BoundaryMode::Mixed, opts, None)?;
    let u = sol.pair.lift(&sol.eigen.vectors[0]);
    let mesh = &sol.mesh;
    let m = cyl.m();
    let mut per_element = Vec::with_capacity(mesh.num_elements());
    let (mut total_mass, mut total_grad, mut total_vol) = (0.0, 0.0, 0.0);
    for e in 0..mesh.num_elements() {
        let (mass, grad) = element_norms(mesh, e, &u)?;
        let vol = mesh.element_measure(e);
        let bary = mesh.element_barycenter(e);
        total_mass += mass;
        total_grad += grad;
        total_vol += vol;
        per_element.push((bary[..m].to_vec(), mass, grad, vol));
    }
    let mut out = DecayProfile {
        scale: l,
        radii: radii.to_vec(),
        masses: Vec::new(),
        gradient_masses: Vec::new(),
        measure_fractions: Vec::new(),
        total_mass,
        total_gradient_mass: total_grad,
        slope: f64::NAN,
        raw_slope: f64::NAN,
        eigenvalue: sol.eigen.values[0],
        residual: sol.eigen.residuals[0],
        dofs: sol.pair.n(),
    };
    for &r in radii {
        let (mut mass, mut grad, mut vol) = (0.0, 0.0, 0.0);
        for (x, em, eg, ev) in &per_element {
            if point_in_scaled_base(&cyl.base, r, x) {
                mass += em;
                grad += eg;
                vol += ev;
            }
        }
        out.masses.push(mass);
        out.gradient_masses.push(grad);
        out.measure_fractions.push(vol / total_vol);
    }
    if radii.len() >= 2 && out.masses.iter().all(|&v| v > 0.0) {
        let depth: Vec<f64> = radii.iter().map(|r| l - r).collect();
        let raw: Vec<f64> = out.masses.iter().map(|&v| ln(v)).collect();
        let normalized: Vec<f64> = out
            .masses
            .iter()
            .zip(&out.measure_fractions)
            .map(|(&v, &f)| ln(v / f))
            .collect();
        out.raw_slope = fit_slope(&depth, &raw);
        out.slope = fit_slope(&depth, &normalized);
    }
    Ok(out)
}
