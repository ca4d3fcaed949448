//! P1 and Q1 assembly of `∫ (A∇u)·∇v` and `∫ uv` with Dirichlet
//! elimination.
//!
//! `A` is evaluated once per element at the barycenter. Simplex elements
//! use exact integration (constant gradients); tensor cells use the 2-point
//! Gauss rule per direction.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::coefficient::CoefficientField;
use crate::dense::DenseMatrix;
use crate::geometry::BoundaryTag;
use crate::mesh::{q1_gauss_points, q1_jacobian, q1_reference_gradients, q1_values, Mesh};
use crate::sparse::SparseSym;
use crate::{Error, Result};

/// Stiffness and mass on the free (non-Dirichlet) nodes.
#[derive(Clone, Debug)]
pub struct DiscreteOperatorPair {
    pub stiffness: SparseSym,
    pub mass: SparseSym,
    /// Mesh node to unknown index; `None` for eliminated Dirichlet nodes.
    pub free_dofs: Vec<Option<usize>>,
    /// Unknown index to mesh node.
    pub dof_nodes: Vec<usize>,
    pub mesh_fingerprint: u64,
}

impl DiscreteOperatorPair {
    pub fn n(&self) -> usize {
        self.dof_nodes.len()
    }

    /// Extends a vector on the unknowns by zero to all mesh nodes.
    pub fn lift(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.free_dofs.len()];
        for (&node, &v) in self.dof_nodes.iter().zip(x) {
            out[node] = v;
        }
        out
    }
}

/// Element stiffness (for the given matrix `A`) and mass, in local node order.
pub fn element_matrices(mesh: &Mesh, e: usize, a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let d = mesh.dim();
    let nodes = mesh.element(e);
    let x: Vec<&[f64]> = nodes.iter().map(|&v| mesh.node(v)).collect();
    let k = nodes.len();
    let mut ke = DenseMatrix::zeros(k, k);
    let mut me = DenseMatrix::zeros(k, k);
    if mesh.kind().is_simplex() {
        let mut jac = [0.0; 9];
        for c in 0..d {
            for r in 0..d {
                jac[r * d + c] = x[c + 1][r] - x[0][r];
            }
        }
        let (inv, det) = invert(&jac, d);
        let vol = det / factorial(d);
        if !(vol > 0.0) {
            return Err(Error::NonPositiveMeasure(e));
        }
        // ∇λ_i (i >= 1) is row i-1 of J⁻¹
        let mut grads = vec![[0.0; 3]; k];
        for i in 1..k {
            for r in 0..d {
                grads[i][r] = inv[(i - 1) * d + r];
                grads[0][r] -= inv[(i - 1) * d + r];
            }
        }
        let denom = ((d + 1) * (d + 2)) as f64;
        for i in 0..k {
            for j in 0..k {
                ke.set(i, j, vol * a_form(a, &grads[i], &grads[j], d));
                me.set(i, j, vol * if i == j { 2.0 } else { 1.0 } / denom);
            }
        }
    } else {
        for (s, w) in q1_gauss_points(d) {
            let (jac, det) = q1_jacobian(&x, d, &s);
            if !(det > 0.0) {
                return Err(Error::NonPositiveMeasure(e));
            }
            let (inv, _) = invert(&jac, d);
            let ref_grads = q1_reference_gradients(d, &s);
            let vals = q1_values(d, &s);
            // physical gradient g = J⁻ᵀ ĝ
            let grads: Vec<[f64; 3]> = ref_grads
                .iter()
                .map(|g| {
                    let mut p = [0.0; 3];
                    for r in 0..d {
                        for c in 0..d {
                            p[r] += inv[c * d + r] * g[c];
                        }
                    }
                    p
                })
                .collect();
            let wd = w * det;
            for i in 0..k {
                for j in 0..k {
                    ke.add(i, j, wd * a_form(a, &grads[i], &grads[j], d));
                    me.add(i, j, wd * vals[i] * vals[j]);
                }
            }
        }
    }
    Ok((ke, me))
}

fn a_form(a: &DenseMatrix, gi: &[f64; 3], gj: &[f64; 3], d: usize) -> f64 {
    let mut s = 0.0;
    for r in 0..d {
        for c in 0..d {
            s += gi[r] * a.get(r, c) * gj[c];
        }
    }
    s
}

fn factorial(d: usize) -> f64 {
    (1..=d).product::<usize>() as f64
}

/// Inverse and determinant of a row-major `d×d` matrix, `d <= 3`.
fn invert(j: &[f64; 9], d: usize) -> ([f64; 9], f64) {
    let mut inv = [0.0; 9];
    match d {
        1 => {
            inv[0] = 1.0 / j[0];
            (inv, j[0])
        }
        2 => {
            let det = j[0] * j[3] - j[1] * j[2];
            inv[0] = j[3] / det;
            inv[1] = -j[1] / det;
            inv[2] = -j[2] / det;
            inv[3] = j[0] / det;
            (inv, det)
        }
        _ => {
            let c00 = j[4] * j[8] - j[5] * j[7];
            let c01 = j[5] * j[6] - j[3] * j[8];
            let c02 = j[3] * j[7] - j[4] * j[6];
            let det = j[0] * c00 + j[1] * c01 + j[2] * c02;
            inv[0] = c00 / det;
            inv[3] = c01 / det;
            inv[6] = c02 / det;
            inv[1] = (j[2] * j[7] - j[1] * j[8]) / det;
            inv[4] = (j[0] * j[8] - j[2] * j[6]) / det;
            inv[7] = (j[1] * j[6] - j[0] * j[7]) / det;
            inv[2] = (j[1] * j[5] - j[2] * j[4]) / det;
            inv[5] = (j[2] * j[3] - j[0] * j[5]) / det;
            inv[8] = (j[0] * j[4] - j[1] * j[3]) / det;
            (inv, det)
        }
    }
}

/// Evaluates `A` at the barycenter of element `e`; `ξ` starts at coordinate
/// `xi_offset`.
pub fn coefficient_at_element(mesh: &Mesh, e: usize, a: &CoefficientField, xi_offset: usize) -> Result<DenseMatrix> {
    if a.is_constant() {
        return a.evaluate(&[]);
    }
    let c = mesh.element_barycenter(e);
    a.evaluate(&c[xi_offset..xi_offset + a.p()])
}

/// Assembles `K` and `M`, eliminating nodes on Dirichlet-tagged facets.
///
/// Element contributions are added in element order, so the result does not
/// depend on anything but the inputs.
pub fn assemble(mesh: &Mesh, a: &CoefficientField, xi_offset: usize) -> Result<DiscreteOperatorPair> {
    if a.dim() != mesh.dim() {
        return Err(Error::DimensionMismatch(format!(
            "coefficient is {}x{} but the mesh has dimension {}",
            a.dim(),
            a.dim(),
            mesh.dim()
        )));
    }
    if xi_offset + a.p() > mesh.dim() {
        return Err(Error::DimensionMismatch("xi offset past the mesh dimension".into()));
    }
    let dirichlet = mesh.nodes_with_tag(BoundaryTag::Dirichlet);
    let mut free_dofs = vec![None; mesh.num_nodes()];
    let mut dof_nodes = Vec::new();
    for (node, &fixed) in dirichlet.iter().enumerate() {
        if !fixed {
            free_dofs[node] = Some(dof_nodes.len());
            dof_nodes.push(node);
        }
    }
    let n = dof_nodes.len();
    let mut rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for e in 0..mesh.num_elements() {
        let dofs: Vec<usize> = mesh.element(e).iter().filter_map(|&v| free_dofs[v]).collect();
        for &r in &dofs {
            for &c in &dofs {
                if c < r {
                    rows[r].push(c);
                }
            }
        }
    }
    for r in &mut rows {
        r.sort_unstable();
        r.dedup();
    }
    let mut stiffness = SparseSym::from_pattern(rows)?;
    let mut mass = stiffness.clone();
    for e in 0..mesh.num_elements() {
        let am = coefficient_at_element(mesh, e, a, xi_offset)?;
        let (ke, me) = element_matrices(mesh, e, &am)?;
        let nodes = mesh.element(e);
        for (li, &vi) in nodes.iter().enumerate() {
            let Some(r) = free_dofs[vi] else { continue };
            for (lj, &vj) in nodes.iter().enumerate() {
                let Some(c) = free_dofs[vj] else { continue };
                if c <= r {
                    stiffness.add(r, c, ke.get(li, lj));
                    mass.add(r, c, me.get(li, lj));
                }
            }
        }
    }
    Ok(DiscreteOperatorPair {
        stiffness,
        mass,
        free_dofs,
        dof_nodes,
        mesh_fingerprint: mesh.fingerprint(),
    })
}

/// `xᵀKx / xᵀMx`.
pub fn rayleigh(pair: &DiscreteOperatorPair, x: &[f64]) -> Result<f64> {
    if x.len() != pair.n() {
        return Err(Error::DimensionMismatch(format!("vector has {} entries, pair has {}", x.len(), pair.n())));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(pair.stiffness.quad_form(x) / pair.mass.quad_form(x))
}

/// Nodal interpolant of `f` on the unknowns (Dirichlet nodes dropped).
pub fn interpolate<F>(mesh: &Mesh, pair: &DiscreteOperatorPair, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    pair.dof_nodes
        .iter()
        .map(|&node| {
            let v = f(mesh.node(node));
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite(format!("interpolated value {v} at node {node}")))
            }
        })
        .collect()
}

/// `(∫_e u², ∫_e |∇u|²)` for a nodal vector over all mesh nodes.
pub fn element_norms(mesh: &Mesh, e: usize, u: &[f64]) -> Result<(f64, f64)> {
    let ident = DenseMatrix::identity(mesh.dim());
    let (ke, me) = element_matrices(mesh, e, &ident)?;
    let local: Vec<f64> = mesh.element(e).iter().map(|&v| u[v]).collect();
    let mass = crate::math::dot(&local, &me.matvec(&local));
    let grad = crate::math::dot(&local, &ke.matvec(&local));
    Ok((mass, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{mesh_box2, mesh_interval, CellFamily};

    #[test]
    fn one_dimensional_matrices() {
        let mesh = mesh_interval(0.0, 1.0, 4).unwrap();
        let pair = assemble(&mesh, &CoefficientField::identity(0, 1), 0).unwrap();
        assert_eq!(pair.n(), 3);
        let (k, m) = (pair.stiffness.to_dense(), pair.mass.to_dense());
        let h = 0.25;
        for i in 0..3 {
            assert!((k.get(i, i) - 2.0 / h).abs() < 1e-12);
            assert!((m.get(i, i) - 4.0 * h / 6.0).abs() < 1e-15);
            if i > 0 {
                assert!((k.get(i, i - 1) + 1.0 / h).abs() < 1e-12);
                assert!((m.get(i, i - 1) - h / 6.0).abs() < 1e-15);
            }
        }
        assert_eq!(k.get(0, 2), 0.0);
    }

    #[test]
    fn mass_totals_measure() {
        for family in [CellFamily::Simplex, CellFamily::Tensor] {
            let mut mesh = mesh_box2(0.0, 2.0, 0.0, 1.0, 5, 3, family).unwrap();
            mesh.tag_boundary(|_, _| Ok((BoundaryTag::Neumann, None))).unwrap();
            let pair = assemble(&mesh, &CoefficientField::identity(1, 1), 1).unwrap();
            let ones = vec![1.0; pair.n()];
            assert!((pair.mass.quad_form(&ones) - 2.0).abs() < 1e-12);
            assert!(pair.stiffness.quad_form(&ones).abs() < 1e-12);
        }
    }

    #[test]
    fn rayleigh_rejects_zero() {
        let mesh = mesh_interval(0.0, 1.0, 4).unwrap();
        let pair = assemble(&mesh, &CoefficientField::identity(0, 1), 0).unwrap();
        assert_eq!(rayleigh(&pair, &[0.0; 3]), Err(Error::ZeroVector));
        let x = interpolate(&mesh, &pair, |p| p[0]).unwrap();
        assert_eq!(x, vec![0.25, 0.5, 0.75]);
        let r1 = rayleigh(&pair, &x).unwrap();
        let r2 = rayleigh(&pair, &x.iter().map(|v| -3.0 * v).collect::<Vec<_>>()).unwrap();
        assert!((r1 - r2).abs() < 1e-12 * r1);
    }
}
