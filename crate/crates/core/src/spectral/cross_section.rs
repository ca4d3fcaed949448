use alloc::vec::Vec;

use super::{first_pair, mesh_cross};
use crate::assembly::{coefficient_at_element, element_matrices};
use crate::coefficient::CoefficientField;
use crate::dense::DenseMatrix;
use crate::eigen::SolverOptions;
use crate::geometry::CrossSectionSpec;
use crate::math::{dot, sqrt};
use crate::mesh::{CellFamily, Mesh};
use crate::Result;

/// First Dirichlet eigenpair of `-div(A₂₂∇W) = μ₁W` on `ω₂`.
#[derive(Clone, Debug)]
pub struct CrossSectionResult {
    pub mu1: f64,
    /// Nodal values on every mesh node (zero on `∂ω₂`), `∫W² = 1`, `W >= 0`.
    pub w: Vec<f64>,
    /// Discrete `‖A₁₂∇W‖_{L²(ω₂)}`.
    pub gap_indicator: f64,
    pub residual: f64,
    pub dofs: usize,
    pub mesh: Mesh,
}

/// P1 solve with `n` cells per cross-section direction.
pub fn solve_cross_section(
    cross: &CrossSectionSpec,
    a: &CoefficientField,
    n: usize,
    opts: &SolverOptions,
) -> Result<CrossSectionResult> {
    solve_cross_section_with(cross, a, n, CellFamily::Simplex, opts)
}

/// As [`solve_cross_section`] with a choice of cells for `p >= 2`.
pub fn solve_cross_section_with(
    cross: &CrossSectionSpec,
    a: &CoefficientField,
    n: usize,
    family: CellFamily,
    opts: &SolverOptions,
) -> Result<CrossSectionResult> {
    let mesh = mesh_cross(cross, n, family)?;
    let a22 = a.block22();
    let (pair, eig) = first_pair(&mesh, &a22, 0, opts)?;
    let w = pair.lift(&eig.vectors[0]);
    let mut g2 = 0.0;
    if a.m() > 0 {
        let (m, p) = (a.m(), a.p());
        for e in 0..mesh.num_elements() {
            let full = coefficient_at_element(&mesh, e, a, 0)?;
            // A₁₂ᵀA₁₂ (p×p)
            let mut b = DenseMatrix::zeros(p, p);
            for r in 0..p {
                for c in 0..p {
                    b.set(r, c, (0..m).map(|i| full.get(i, m + r) * full.get(i, m + c)).sum());
                }
            }
            let (ke, _) = element_matrices(&mesh, e, &b)?;
            let local: Vec<f64> = mesh.element(e).iter().map(|&v| w[v]).collect();
            g2 += dot(&local, &ke.matvec(&local));
        }
    }
    Ok(CrossSectionResult {
        mu1: eig.values[0],
        w,
        gap_indicator: sqrt(g2.max(0.0)),
        residual: eig.residuals[0],
        dofs: pair.n(),
        mesh,
    })
}

/// `gap_indicator > threshold`; the default threshold is `1e-8·√μ₁`.
pub fn gap_condition_holds(cs: &CrossSectionResult, threshold: Option<f64>) -> bool {
    let t = threshold.unwrap_or(1e-8 * sqrt(cs.mu1));
    cs.gap_indicator > t
}
