//! Continuous geometry: the base `ω₁` (an interval or a convex polygon that
//! contains the origin), the box cross-section `ω₂`, the cylinder
//! `Ω_ℓ = ℓω₁ × ω₂` and unit directions `ν ∈ S^{m-1}`.
//!
//! The cylinder boundary splits into the lateral part `Γ_ℓ = ∂(ℓω₁) × ω₂`
//! (Neumann) and the caps `γ_ℓ = ℓω₁ × ∂ω₂` (Dirichlet).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{cos, norm2, sin, sqrt};
use crate::{Error, Result};

/// Relative tolerance for "point lies on the boundary", scaled by the
/// diameter of the domain being tested.
pub const BOUNDARY_TOL_REL: f64 = 1e-9;

/// Tolerance on `‖ν‖ = 1` and on exact normals.
pub const UNIT_TOL: f64 = 1e-12;

/// Boundary condition attached to a boundary facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
}

/// A convex polygon, counter-clockwise, with the origin strictly inside.
///
/// Edge `k` runs from vertex `k` to vertex `k + 1` and is the set
/// `{X : n_k · X = d_k}` with outward unit normal `n_k` and `d_k > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<[f64; 2]>,
    normals: Vec<[f64; 2]>,
    offsets: Vec<f64>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Geometry(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Geometry("polygon vertex is not finite".into()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if vertices[i] == vertices[j] {
                    return Err(Error::Geometry(format!("repeated vertex {j}")));
                }
            }
        }
        let mut normals = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n);
        for k in 0..n {
            let a = vertices[k];
            let b = vertices[(k + 1) % n];
            let (tx, ty) = (b[0] - a[0], b[1] - a[1]);
            let len = sqrt(tx * tx + ty * ty);
            if len < 1e-12 {
                return Err(Error::DegenerateEdge(k));
            }
            // CCW polygon: outward normal is the tangent turned clockwise
            let nrm = [ty / len, -tx / len];
            normals.push(nrm);
            offsets.push(nrm[0] * a[0] + nrm[1] * a[1]);
        }
        for k in 0..n {
            let a = vertices[k];
            let b = vertices[(k + 1) % n];
            let c = vertices[(k + 2) % n];
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if cross <= 0.0 {
                return Err(Error::Geometry(format!(
                    "polygon is not strictly convex and counter-clockwise at vertex {}",
                    (k + 1) % n
                )));
            }
        }
        if offsets.iter().any(|&d| d <= 0.0) {
            return Err(Error::Geometry("origin is not strictly inside the polygon".into()));
        }
        Ok(Self {
            vertices,
            normals,
            offsets,
        })
    }

    /// Regular `n`-gon with the given circumradius. Edge `k` has its outward
    /// normal at angle `rotation + 2πk/n`.
    pub fn regular(sides: usize, circumradius: f64, rotation: f64) -> Result<Self> {
        if sides < 3 || !(circumradius > 0.0) {
            return Err(Error::Geometry("regular polygon needs >= 3 sides and a positive radius".into()));
        }
        let n = sides as f64;
        let vertices = (0..sides)
            .map(|k| {
                let angle = rotation + (2.0 * k as f64 - 1.0) * PI / n;
                [circumradius * cos(angle), circumradius * sin(angle)]
            })
            .collect();
        Self::new(vertices)
    }

    /// The square `(-1/2, 1/2)²`.
    pub fn unit_square() -> Self {
        Self::new(vec![[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]).expect("valid square")
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn num_edges(&self) -> usize {
        self.vertices.len()
    }

    pub fn normal(&self, edge: usize) -> [f64; 2] {
        self.normals[edge]
    }

    pub fn offset(&self, edge: usize) -> f64 {
        self.offsets[edge]
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        let a = self.vertices[edge];
        let b = self.vertices[(edge + 1) % self.vertices.len()];
        sqrt(sq(b[0] - a[0]) + sq(b[1] - a[1]))
    }

    pub fn edge_midpoint(&self, edge: usize) -> [f64; 2] {
        let a = self.vertices[edge];
        let b = self.vertices[(edge + 1) % self.vertices.len()];
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    /// Largest signed distance `n_k · X - d_k` over the edges: negative
    /// inside, zero on the boundary.
    pub fn signed_distance(&self, x: [f64; 2]) -> f64 {
        (0..self.vertices.len())
            .map(|k| self.normals[k][0] * x[0] + self.normals[k][1] * x[1] - self.offsets[k])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max(sqrt(sq(a[0] - b[0]) + sq(a[1] - b[1])));
            }
        }
        d
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|k| {
                let a = self.vertices[k];
                let b = self.vertices[(k + 1) % n];
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    /// `Some((x0, x1, y0, y1))` when the polygon is an axis-aligned rectangle.
    pub fn as_axis_rectangle(&self) -> Option<(f64, f64, f64, f64)> {
        if self.vertices.len() != 4 {
            return None;
        }
        let axis = |n: [f64; 2]| (n[0].abs() < UNIT_TOL) || (n[1].abs() < UNIT_TOL);
        if !self.normals.iter().all(|&n| axis(n)) {
            return None;
        }
        let xs = self.vertices.iter().map(|v| v[0]);
        let ys = self.vertices.iter().map(|v| v[1]);
        let x0 = xs.clone().fold(f64::INFINITY, f64::min);
        let x1 = xs.fold(f64::NEG_INFINITY, f64::max);
        let y0 = ys.clone().fold(f64::INFINITY, f64::min);
        let y1 = ys.fold(f64::NEG_INFINITY, f64::max);
        Some((x0, x1, y0, y1))
    }
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}

/// The base domain `ω₁ ⊂ ℝ^m`.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseSpec {
    /// `(a, b)` with `a < 0 < b`; `m = 1`.
    Interval { a: f64, b: f64 },
    /// Convex polygon; `m = 2`.
    Polygon(ConvexPolygon),
}

impl BaseSpec {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Geometry(format!("empty interval ({a}, {b})")));
        }
        if !(a < 0.0 && 0.0 < b) {
            return Err(Error::Geometry("origin is not strictly inside the interval".into()));
        }
        Ok(Self::Interval { a, b })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        ConvexPolygon::new(vertices).map(Self::Polygon)
    }

    /// Dimension `m` of the base.
    pub fn dim(&self) -> usize {
        match self {
            Self::Interval { .. } => 1,
            Self::Polygon(_) => 2,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Self::Interval { a, b } => b - a,
            Self::Polygon(p) => p.diameter(),
        }
    }

    /// Measure (length or area) of `ω₁`.
    pub fn measure(&self) -> f64 {
        match self {
            Self::Interval { a, b } => b - a,
            Self::Polygon(p) => p.area(),
        }
    }

    pub fn num_faces(&self) -> usize {
        match self {
            Self::Interval { .. } => 2,
            Self::Polygon(p) => p.num_edges(),
        }
    }

    /// Signed distance-like function: negative inside `ω₁`, zero on `∂ω₁`.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        match self {
            Self::Interval { a, b } => f64::max(a - x[0], x[0] - b),
            Self::Polygon(p) => p.signed_distance([x[0], x[1]]),
        }
    }

    /// Face of `∂ω₁` that `x` lies on (within `tol`), preferring the lowest id.
    pub fn face_containing(&self, x: &[f64], tol: f64) -> Option<usize> {
        match self {
            Self::Interval { a, b } => {
                if (x[0] - a).abs() <= tol {
                    Some(0)
                } else if (x[0] - b).abs() <= tol {
                    Some(1)
                } else {
                    None
                }
            }
            Self::Polygon(p) => (0..p.num_edges()).find(|&k| {
                let n = p.normal(k);
                (n[0] * x[0] + n[1] * x[1] - p.offset(k)).abs() <= tol
                    && p.signed_distance([x[0], x[1]]) <= tol
            }),
        }
    }

    /// Outward unit normal of a face.
    pub fn face_normal(&self, face: usize) -> Direction {
        match self {
            Self::Interval { .. } => Direction(vec![if face == 0 { -1.0 } else { 1.0 }]),
            Self::Polygon(p) => {
                let n = p.normal(face);
                Direction(vec![n[0], n[1]])
            }
        }
    }

    /// Centroid of a face of `ω₁` (unscaled).
    pub fn face_centroid(&self, face: usize) -> Vec<f64> {
        match self {
            Self::Interval { a, b } => vec![if face == 0 { *a } else { *b }],
            Self::Polygon(p) => p.edge_midpoint(face).to_vec(),
        }
    }
}

/// The cross-section `ω₂ = Π (a_i, b_i) ⊂ ℝ^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossSectionSpec {
    intervals: Vec<(f64, f64)>,
}

impl CrossSectionSpec {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Geometry("cross-section needs at least one interval".into()));
        }
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::Geometry(format!("cross-section interval {i} = ({a}, {b}) is empty")));
            }
        }
        Ok(Self { intervals })
    }

    /// The unit interval `(0, 1)`.
    pub fn unit() -> Self {
        Self {
            intervals: vec![(0.0, 1.0)],
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Dimension `p` of the cross-section.
    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn diameter(&self) -> f64 {
        sqrt(self.intervals.iter().map(|(a, b)| (b - a) * (b - a)).sum())
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).product()
    }

    /// True when `ξ` is on `∂ω₂` (within `tol`) and not outside it.
    pub fn on_boundary(&self, xi: &[f64], tol: f64) -> bool {
        let inside = self
            .intervals
            .iter()
            .zip(xi)
            .all(|(&(a, b), &x)| x >= a - tol && x <= b + tol);
        inside
            && self
                .intervals
                .iter()
                .zip(xi)
                .any(|(&(a, b), &x)| (x - a).abs() <= tol || (x - b).abs() <= tol)
    }

    /// Analytic first Dirichlet eigenvalue of `-Δ` on the box.
    pub fn laplacian_first_eigenvalue(&self) -> f64 {
        self.intervals
            .iter()
            .map(|(a, b)| (PI / (b - a)) * (PI / (b - a)))
            .sum()
    }
}

/// `Ω_ℓ = ℓω₁ × ω₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderSpec {
    pub base: BaseSpec,
    pub cross: CrossSectionSpec,
    pub scale: f64,
}

impl CylinderSpec {
    pub fn new(base: BaseSpec, cross: CrossSectionSpec, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Geometry(format!("scale must be positive, got {scale}")));
        }
        let dim = base.dim() + cross.dim();
        if dim > 3 {
            return Err(Error::Geometry(format!("m + p = {dim} is not meshable (at most 3)")));
        }
        Ok(Self { base, cross, scale })
    }

    pub fn m(&self) -> usize {
        self.base.dim()
    }

    pub fn p(&self) -> usize {
        self.cross.dim()
    }

    pub fn dim(&self) -> usize {
        self.m() + self.p()
    }

    pub fn diameter(&self) -> f64 {
        let a = self.scale * self.base.diameter();
        let b = self.cross.diameter();
        sqrt(a * a + b * b)
    }

    pub fn boundary_tolerance(&self) -> f64 {
        BOUNDARY_TOL_REL * self.diameter()
    }

    /// Same cylinder at another scale.
    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        Self::new(self.base.clone(), self.cross.clone(), scale)
    }
}

/// A unit vector `ν ∈ S^{m-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Checks `‖ν‖₂ = 1` within `1e-12`.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        let n = norm2(&components);
        if components.is_empty() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!("direction has norm {n}, expected 1")));
        }
        Ok(Self(components))
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(components: Vec<f64>) -> Result<Self> {
        let n = norm2(&components);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Ok(Self(components.into_iter().map(|c| c / n).collect()))
    }

    /// `(cos θ, sin θ)`.
    pub fn from_angle(theta: f64) -> Self {
        Self(vec![cos(theta), sin(theta)])
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Angle of a planar direction in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        let a = crate::math::atan2(self.0[1], self.0[0]);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }

    /// Orthogonal matrix (row-major, `m × m`) whose first row is `ν`.
    pub fn rotation_with_first_row(&self) -> Vec<f64> {
        match self.0.len() {
            1 => vec![self.0[0]],
            2 => vec![self.0[0], self.0[1], -self.0[1], self.0[0]],
            m => panic!("rotation for m = {m} is not supported"),
        }
    }
}

/// Tags a boundary facet of a mesh of `Ω_ℓ` from its centroid and outward
/// normal. Coordinates are `(X, ξ)` with `X ∈ ℝ^m` first.
///
/// Lateral facets (normal without ξ-component, centroid on `∂(ℓω₁)`) are
/// Neumann; facets whose centroid has `ξ ∈ ∂ω₂` are Dirichlet. A facet that
/// qualifies as both is Dirichlet.
pub fn classify_boundary_facet(
    cyl: &CylinderSpec,
    centroid: &[f64],
    normal: &[f64],
) -> Result<BoundaryTag> {
    let m = cyl.m();
    let d = cyl.dim();
    if centroid.len() != d || normal.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "facet data has dimension {}, cylinder has {d}",
            centroid.len()
        )));
    }
    let tol = cyl.boundary_tolerance();
    let x: Vec<f64> = centroid[..m].iter().map(|c| c / cyl.scale).collect();
    let on_lateral = cyl.base.signed_distance(&x).abs() * cyl.scale <= tol;
    let on_caps = cyl.cross.on_boundary(&centroid[m..], tol)
        && cyl.base.signed_distance(&x) * cyl.scale <= tol;
    let normal_xi = norm2(&normal[m..]);
    let lateral_normal = normal_xi <= UNIT_TOL * norm2(normal).max(1.0);
    match (on_lateral, on_caps) {
        (false, false) => Err(Error::InteriorFacet),
        (true, _) if lateral_normal => Ok(BoundaryTag::Neumann),
        // caps, or a tilted normal on the edge shared by both parts
        _ => Ok(BoundaryTag::Dirichlet),
    }
}

/// `X ∈ rω₁`, strict interior. Boundary points count as outside.
pub fn point_in_scaled_base(base: &BaseSpec, r: f64, x: &[f64]) -> bool {
    debug_assert!(r > 0.0);
    let y: Vec<f64> = x.iter().map(|c| c / r).collect();
    match base {
        BaseSpec::Interval { a, b } => *a < y[0] && y[0] < *b,
        BaseSpec::Polygon(p) => (0..p.num_edges()).all(|k| {
            let n = p.normal(k);
            n[0] * y[0] + n[1] * y[1] < p.offset(k)
        }),
    }
}

/// One outward unit normal per face, paired with the face id. For an
/// interval the right end comes first: `[(+1, 1), (-1, 0)]`.
pub fn outward_normals(base: &BaseSpec) -> Vec<(Direction, usize)> {
    match base {
        BaseSpec::Interval { .. } => vec![(Direction(vec![1.0]), 1), (Direction(vec![-1.0]), 0)],
        BaseSpec::Polygon(p) => (0..p.num_edges())
            .map(|k| (Direction(p.normal(k).to_vec()), k))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip() -> CylinderSpec {
        CylinderSpec::new(BaseSpec::interval(-1.0, 1.0).unwrap(), CrossSectionSpec::unit(), 2.0).unwrap()
    }

    #[test]
    fn classify_examples() {
        let cyl = strip();
        assert_eq!(classify_boundary_facet(&cyl, &[2.0, 0.5], &[1.0, 0.0]), Ok(BoundaryTag::Neumann));
        assert_eq!(classify_boundary_facet(&cyl, &[0.0, 1.0], &[0.0, 1.0]), Ok(BoundaryTag::Dirichlet));
        assert_eq!(classify_boundary_facet(&cyl, &[0.3, 0.5], &[1.0, 0.0]), Err(Error::InteriorFacet));

        let cube = CylinderSpec::new(
            BaseSpec::Polygon(ConvexPolygon::unit_square()),
            CrossSectionSpec::unit(),
            3.0,
        )
        .unwrap();
        assert_eq!(
            classify_boundary_facet(&cube, &[1.5, 0.2, 0.0], &[0.0, 0.0, -1.0]),
            Ok(BoundaryTag::Dirichlet)
        );
        assert_eq!(
            classify_boundary_facet(&cube, &[1.5, 0.2, 0.4], &[1.0, 0.0, 0.0]),
            Ok(BoundaryTag::Neumann)
        );
    }

    #[test]
    fn polygon_validation() {
        assert!(matches!(BaseSpec::polygon(vec![[0.0, 0.0], [1.0, 0.0]]), Err(Error::Geometry(_))));
        // clockwise
        assert!(BaseSpec::polygon(vec![[-1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [1.0, -1.0]]).is_err());
        // origin outside
        assert!(BaseSpec::polygon(vec![[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0]]).is_err());
        // collinear vertex breaks strict convexity
        assert!(BaseSpec::polygon(vec![[-1.0, -1.0], [0.0, -1.0], [1.0, -1.0], [0.0, 1.0]]).is_err());
        // repeated vertex
        assert!(BaseSpec::polygon(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, -1.0], [0.0, 1.0]]).is_err());
        assert_eq!(
            BaseSpec::polygon(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, -1.0 + 1e-13], [0.0, 1.0]]),
            Err(Error::DegenerateEdge(1))
        );
        assert!(BaseSpec::interval(0.0, 1.0).is_err());
    }

    #[test]
    fn point_membership() {
        let square = BaseSpec::Polygon(ConvexPolygon::unit_square());
        assert!(point_in_scaled_base(&square, 2.0, &[0.5, 0.5]));
        assert!(!point_in_scaled_base(&square, 2.0, &[3.0, 0.0]));
        assert!(!point_in_scaled_base(&square, 2.0, &[1.0, 0.0]), "boundary counts as outside");
        // hexagon with a vertex on the positive x axis
        let hex = BaseSpec::Polygon(ConvexPolygon::regular(6, 1.0, PI / 6.0).unwrap());
        assert!(point_in_scaled_base(&hex, 1.0, &[0.99, 0.0]));
        assert!(!point_in_scaled_base(&hex, 1.0, &[0.9, 0.2]));
    }

    #[test]
    fn normals_of_standard_shapes() {
        let n = outward_normals(&BaseSpec::interval(-1.0, 1.0).unwrap());
        assert_eq!(n[0], (Direction(vec![1.0]), 1));
        assert_eq!(n[1], (Direction(vec![-1.0]), 0));

        let sq = outward_normals(&BaseSpec::Polygon(ConvexPolygon::unit_square()));
        let expected = [[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]];
        for ((d, id), e) in sq.iter().zip(expected) {
            assert!((d.components()[0] - e[0]).abs() < 1e-12 && (d.components()[1] - e[1]).abs() < 1e-12);
            assert!(*id < 4);
        }

        let hex = ConvexPolygon::regular(6, 1.0, 0.0).unwrap();
        for (d, k) in outward_normals(&BaseSpec::Polygon(hex.clone())) {
            let angle = k as f64 * PI / 3.0;
            assert!((d.components()[0] - cos(angle)).abs() < 1e-12);
            assert!((d.components()[1] - sin(angle)).abs() < 1e-12);
            let c = hex.edge_midpoint(k);
            assert!(d.components()[0] * c[0] + d.components()[1] * c[1] > 0.0);
        }
    }

    #[test]
    fn direction_checks_norm() {
        assert!(Direction::new(vec![1.0, 1.0]).is_err());
        assert!(Direction::new(vec![0.6, 0.8]).is_ok());
        let d = Direction::from_angle(2.0);
        assert!((d.angle() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rectangle_detection() {
        assert_eq!(ConvexPolygon::unit_square().as_axis_rectangle(), Some((-0.5, 0.5, -0.5, 0.5)));
        assert_eq!(ConvexPolygon::regular(6, 1.0, 0.0).unwrap().as_axis_rectangle(), None);
        let sq = ConvexPolygon::regular(4, 1.0, 0.0).unwrap();
        let (x0, x1, _, _) = sq.as_axis_rectangle().unwrap();
        assert!((x1 - x0 - 2.0 * sqrt(0.5)).abs() < 1e-12);
    }
}
