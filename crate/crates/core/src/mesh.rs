//! Structured meshes: intervals, boxes (simplices or tensor cells), fan
//! triangulations of convex polygons and extrusion of triangle meshes to
//! tetrahedra.
//!
//! Generators tag every boundary facet [`BoundaryTag::Dirichlet`]; callers
//! retag with [`Mesh::tag_boundary`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{BoundaryTag, ConvexPolygon};
use crate::math::{norm2, sqrt};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Segment,
    Triangle,
    Quad,
    Tet,
    Hex,
}

impl ElementKind {
    pub fn dim(self) -> usize {
        match self {
            ElementKind::Segment => 1,
            ElementKind::Triangle | ElementKind::Quad => 2,
            ElementKind::Tet | ElementKind::Hex => 3,
        }
    }

    pub fn nodes_per_element(self) -> usize {
        match self {
            ElementKind::Segment => 2,
            ElementKind::Triangle => 3,
            ElementKind::Quad | ElementKind::Tet => 4,
            ElementKind::Hex => 8,
        }
    }

    pub fn is_simplex(self) -> bool {
        matches!(self, ElementKind::Segment | ElementKind::Triangle | ElementKind::Tet)
    }

    /// Local node lists of the element's facets.
    pub fn facets(self) -> &'static [&'static [usize]] {
        match self {
            ElementKind::Segment => &[&[0], &[1]],
            ElementKind::Triangle => &[&[0, 1], &[1, 2], &[2, 0]],
            ElementKind::Quad => &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
            ElementKind::Tet => &[&[1, 2, 3], &[0, 2, 3], &[0, 1, 3], &[0, 1, 2]],
            ElementKind::Hex => &[
                &[0, 1, 2, 3],
                &[4, 5, 6, 7],
                &[0, 1, 5, 4],
                &[1, 2, 6, 5],
                &[2, 3, 7, 6],
                &[3, 0, 4, 7],
            ],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Segment => "segment",
            ElementKind::Triangle => "triangle",
            ElementKind::Quad => "quad",
            ElementKind::Tet => "tet",
            ElementKind::Hex => "hex",
        }
    }
}

/// Simplices or tensor-product cells for box meshes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellFamily {
    Simplex,
    Tensor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFacet {
    /// Mesh nodes in the element's local facet order.
    pub nodes: Vec<usize>,
    pub element: usize,
    pub tag: BoundaryTag,
    /// Face of the base `ω₁` for lateral facets, when known.
    pub face_id: Option<usize>,
    /// Unit normal pointing out of the element.
    pub normal: Vec<f64>,
    pub centroid: Vec<f64>,
    /// Length, area, or 1 for the point facets of a 1D mesh.
    pub measure: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    dim: usize,
    kind: ElementKind,
    coords: Vec<f64>,
    connectivity: Vec<usize>,
    boundary: Vec<BoundaryFacet>,
    h_max: f64,
    refine_level: usize,
}

impl Mesh {
    /// Builds a mesh from flat coordinate and connectivity arrays, checks it,
    /// and extracts boundary facets.
    pub fn new(kind: ElementKind, coords: Vec<f64>, connectivity: Vec<usize>) -> Result<Self> {
        let dim = kind.dim();
        let npe = kind.nodes_per_element();
        if coords.len() % dim != 0 || connectivity.len() % npe != 0 {
            return Err(Error::Mesh("array lengths do not match the element kind".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Mesh("non-finite node coordinate".into()));
        }
        let n_nodes = coords.len() / dim;
        let mut used = vec![false; n_nodes];
        for &v in &connectivity {
            if v >= n_nodes {
                return Err(Error::Mesh(format!("node index {v} out of range")));
            }
            used[v] = true;
        }
        if let Some(orphan) = used.iter().position(|u| !u) {
            return Err(Error::Mesh(format!("node {orphan} belongs to no element")));
        }
        let mut mesh = Self {
            dim,
            kind,
            coords,
            connectivity,
            boundary: Vec::new(),
            h_max: 0.0,
            refine_level: 0,
        };
        for e in 0..mesh.num_elements() {
            if !(mesh.element_measure(e) > 0.0) {
                return Err(Error::NonPositiveMeasure(e));
            }
        }
        mesh.h_max = (0..mesh.num_elements()).map(|e| mesh.element_diameter(e)).fold(0.0, f64::max);
        mesh.boundary = mesh.extract_boundary();
        Ok(mesh)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn num_elements(&self) -> usize {
        self.connectivity.len() / self.kind.nodes_per_element()
    }

    #[inline]
    pub fn node(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn element(&self, e: usize) -> &[usize] {
        let npe = self.kind.nodes_per_element();
        &self.connectivity[e * npe..(e + 1) * npe]
    }

    pub fn boundary_facets(&self) -> &[BoundaryFacet] {
        &self.boundary
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn refine_level(&self) -> usize {
        self.refine_level
    }

    pub fn with_refine_level(mut self, level: usize) -> Self {
        self.refine_level = level;
        self
    }

    pub fn element_barycenter(&self, e: usize) -> Vec<f64> {
        let nodes = self.element(e);
        let mut c = vec![0.0; self.dim];
        for &v in nodes {
            for (ci, x) in c.iter_mut().zip(self.node(v)) {
                *ci += x;
            }
        }
        let k = nodes.len() as f64;
        c.iter_mut().for_each(|ci| *ci /= k);
        c
    }

    /// Signed measure (positive for correctly oriented elements).
    pub fn element_measure(&self, e: usize) -> f64 {
        let nodes = self.element(e);
        let p = |i: usize| self.node(nodes[i]);
        match self.kind {
            ElementKind::Segment => p(1)[0] - p(0)[0],
            ElementKind::Triangle => 0.5 * cross2(p(0), p(1), p(2)),
            ElementKind::Quad => {
                // shoelace
                let mut s = 0.0;
                for i in 0..4 {
                    let (a, b) = (p(i), p((i + 1) % 4));
                    s += a[0] * b[1] - a[1] * b[0];
                }
                0.5 * s
            }
            ElementKind::Tet => det3(p(0), p(1), p(2), p(3)) / 6.0,
            ElementKind::Hex => {
                let x: Vec<&[f64]> = nodes.iter().map(|&v| self.node(v)).collect();
                q1_gauss_points(3)
                    .iter()
                    .map(|(s, w)| w * q1_jacobian(&x, 3, s).1)
                    .sum()
            }
        }
    }

    /// Largest distance between two nodes of the element.
    pub fn element_diameter(&self, e: usize) -> f64 {
        let nodes = self.element(e);
        let mut d2 = 0.0f64;
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                d2 = d2.max(dist2(self.node(a), self.node(b)));
            }
        }
        sqrt(d2)
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.num_elements()).map(|e| self.element_measure(e)).sum()
    }

    /// FNV-1a hash over kind, coordinates and connectivity.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(self.kind.name().as_bytes());
        for c in &self.coords {
            eat(&c.to_bits().to_le_bytes());
        }
        for v in &self.connectivity {
            eat(&(*v as u64).to_le_bytes());
        }
        h
    }

    /// Reassigns every boundary tag (and face id) from the facet centroid and
    /// outward normal.
    pub fn tag_boundary<F>(&mut self, mut classify: F) -> Result<()>
    where
        F: FnMut(&[f64], &[f64]) -> Result<(BoundaryTag, Option<usize>)>,
    {
        for f in &mut self.boundary {
            let (tag, face) = classify(&f.centroid, &f.normal)?;
            f.tag = tag;
            f.face_id = face;
        }
        Ok(())
    }

    /// Nodes touching a facet with the given tag, ascending.
    pub fn nodes_with_tag(&self, tag: BoundaryTag) -> Vec<bool> {
        let mut mark = vec![false; self.num_nodes()];
        for f in self.boundary.iter().filter(|f| f.tag == tag) {
            for &v in &f.nodes {
                mark[v] = true;
            }
        }
        mark
    }

    /// Total measure of boundary facets carrying `tag`.
    pub fn tagged_measure(&self, tag: BoundaryTag) -> f64 {
        self.boundary.iter().filter(|f| f.tag == tag).map(|f| f.measure).sum()
    }

    fn extract_boundary(&self) -> Vec<BoundaryFacet> {
        let facets = self.kind.facets();
        let mut keyed: Vec<(Vec<usize>, usize, usize)> = Vec::with_capacity(self.num_elements() * facets.len());
        for e in 0..self.num_elements() {
            let nodes = self.element(e);
            for (lf, local) in facets.iter().enumerate() {
                let mut key: Vec<usize> = local.iter().map(|&i| nodes[i]).collect();
                key.sort_unstable();
                keyed.push((key, e, lf));
            }
        }
        keyed.sort();
        let mut out = Vec::new();
        let mut i = 0;
        while i < keyed.len() {
            let mut j = i + 1;
            while j < keyed.len() && keyed[j].0 == keyed[i].0 {
                j += 1;
            }
            if j - i == 1 {
                let (_, e, lf) = &keyed[i];
                out.push(self.make_facet(*e, *lf));
            }
            i = j;
        }
        out
    }

    fn make_facet(&self, e: usize, lf: usize) -> BoundaryFacet {
        let local = self.kind.facets()[lf];
        let nodes: Vec<usize> = local.iter().map(|&i| self.element(e)[i]).collect();
        let pts: Vec<&[f64]> = nodes.iter().map(|&v| self.node(v)).collect();
        let d = self.dim;
        let mut centroid = vec![0.0; d];
        for p in &pts {
            for k in 0..d {
                centroid[k] += p[k] / pts.len() as f64;
            }
        }
        let (mut normal, measure) = match d {
            1 => (vec![1.0], 1.0),
            2 => {
                let t = [pts[1][0] - pts[0][0], pts[1][1] - pts[0][1]];
                (vec![t[1], -t[0]], sqrt(t[0] * t[0] + t[1] * t[1]))
            }
            _ => {
                let n = cross3(&sub(pts[1], pts[0]), &sub(pts[2], pts[0]));
                let tri = 0.5 * norm2(&n);
                let measure = if pts.len() == 4 {
                    tri + 0.5 * norm2(&cross3(&sub(pts[2], pts[0]), &sub(pts[3], pts[0])))
                } else {
                    tri
                };
                (n.to_vec(), measure)
            }
        };
        let inward = sub(&self.element_barycenter(e), &centroid);
        if crate::math::dot(&normal, &inward) > 0.0 {
            normal.iter_mut().for_each(|c| *c = -*c);
        }
        let len = norm2(&normal);
        normal.iter_mut().for_each(|c| *c /= len);
        BoundaryFacet {
            nodes,
            element: e,
            tag: BoundaryTag::Dirichlet,
            face_id: None,
            normal,
            centroid,
            measure,
        }
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn cross2(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn cross3(u: &[f64], v: &[f64]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn det3(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    let u = sub(b, a);
    let v = sub(c, a);
    let w = sub(d, a);
    let x = cross3(&v, &w);
    u[0] * x[0] + u[1] * x[1] + u[2] * x[2]
}

// Q1 reference cell [0,1]^d; local node k sits at the corner listed here.
const QUAD_CORNERS: [[f64; 3]; 4] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]];
const HEX_CORNERS: [[f64; 3]; 8] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [1.0, 1.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 1.0],
    [1.0, 1.0, 1.0],
    [0.0, 1.0, 1.0],
];

pub(crate) fn q1_corners(d: usize) -> &'static [[f64; 3]] {
    if d == 2 {
        &QUAD_CORNERS
    } else {
        &HEX_CORNERS
    }
}

/// Tensor 2-point Gauss rule on `[0,1]^d`: (point, weight).
pub(crate) fn q1_gauss_points(d: usize) -> Vec<([f64; 3], f64)> {
    let g = 0.5 / sqrt(3.0);
    let pts = [0.5 - g, 0.5 + g];
    let mut out = Vec::new();
    let count = 1usize << d;
    for k in 0..count {
        let mut s = [0.0; 3];
        for (a, sa) in s.iter_mut().enumerate().take(d) {
            *sa = pts[(k >> a) & 1];
        }
        out.push((s, 1.0 / count as f64));
    }
    out
}

/// Reference gradients of the Q1 shape functions at `s`.
pub(crate) fn q1_reference_gradients(d: usize, s: &[f64; 3]) -> Vec<[f64; 3]> {
    q1_corners(d)
        .iter()
        .map(|r| {
            let f = |a: usize| if r[a] == 1.0 { s[a] } else { 1.0 - s[a] };
            let df = |a: usize| if r[a] == 1.0 { 1.0 } else { -1.0 };
            let mut g = [0.0; 3];
            for a in 0..d {
                let mut v = df(a);
                for b in 0..d {
                    if b != a {
                        v *= f(b);
                    }
                }
                g[a] = v;
            }
            g
        })
        .collect()
}

/// Q1 shape function values at `s`.
pub(crate) fn q1_values(d: usize, s: &[f64; 3]) -> Vec<f64> {
    q1_corners(d)
        .iter()
        .map(|r| (0..d).map(|a| if r[a] == 1.0 { s[a] } else { 1.0 - s[a] }).product())
        .collect()
}

/// Jacobian `J_ab = ∂x_a/∂s_b` (row-major `d×d`) and its determinant.
pub(crate) fn q1_jacobian(x: &[&[f64]], d: usize, s: &[f64; 3]) -> ([f64; 9], f64) {
    let grads = q1_reference_gradients(d, s);
    let mut j = [0.0; 9];
    for (xi, g) in x.iter().zip(&grads) {
        for a in 0..d {
            for b in 0..d {
                j[a * d + b] += xi[a] * g[b];
            }
        }
    }
    let det = if d == 2 {
        j[0] * j[3] - j[1] * j[2]
    } else {
        j[0] * (j[4] * j[8] - j[5] * j[7]) - j[1] * (j[3] * j[8] - j[5] * j[6]) + j[2] * (j[3] * j[7] - j[4] * j[6])
    };
    (j, det)
}

/// `n` equal segments of `[a, b]`.
pub fn mesh_interval(a: f64, b: f64, n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::Mesh("interval mesh needs n >= 1".into()));
    }
    if !(a < b) {
        return Err(Error::Mesh(format!("empty interval ({a}, {b})")));
    }
    let coords = (0..=n).map(|i| lerp(a, b, i, n)).collect();
    let connectivity = (0..n).flat_map(|i| [i, i + 1]).collect();
    Mesh::new(ElementKind::Segment, coords, connectivity)
}

fn lerp(a: f64, b: f64, i: usize, n: usize) -> f64 {
    if i == n {
        b
    } else {
        a + (b - a) * (i as f64) / (n as f64)
    }
}

/// Structured mesh of `[ax,bx]×[ay,by]`. Simplex cells split each square
/// along its `(i,j)–(i+1,j+1)` diagonal.
pub fn mesh_box2(ax: f64, bx: f64, ay: f64, by: f64, nx: usize, ny: usize, family: CellFamily) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::Mesh("box mesh needs positive cell counts".into()));
    }
    if !(ax < bx && ay < by) {
        return Err(Error::Mesh("degenerate box".into()));
    }
    let mut coords = Vec::with_capacity(2 * (nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            coords.push(lerp(ax, bx, i, nx));
            coords.push(lerp(ay, by, j, ny));
        }
    }
    let id = |i: usize, j: usize| i + (nx + 1) * j;
    let mut conn = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            match family {
                CellFamily::Tensor => conn.extend_from_slice(&[a, b, c, d]),
                CellFamily::Simplex => conn.extend_from_slice(&[a, b, c, a, c, d]),
            }
        }
    }
    let kind = match family {
        CellFamily::Tensor => ElementKind::Quad,
        CellFamily::Simplex => ElementKind::Triangle,
    };
    Mesh::new(kind, coords, conn)
}

/// Structured mesh of a 3D box. Simplex cells are the extrusion of the
/// simplex mesh of the first two directions.
pub fn mesh_box3(bounds: [(f64, f64); 3], n: [usize; 3], family: CellFamily) -> Result<Mesh> {
    if n.iter().any(|&k| k == 0) {
        return Err(Error::Mesh("box mesh needs positive cell counts".into()));
    }
    if bounds.iter().any(|(a, b)| !(a < b)) {
        return Err(Error::Mesh("degenerate box".into()));
    }
    if family == CellFamily::Simplex {
        let base = mesh_box2(bounds[0].0, bounds[0].1, bounds[1].0, bounds[1].1, n[0], n[1], family)?;
        return extrude(&base, bounds[2].0, bounds[2].1, n[2]);
    }
    let [nx, ny, nz] = n;
    let mut coords = Vec::with_capacity(3 * (nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                coords.push(lerp(bounds[0].0, bounds[0].1, i, nx));
                coords.push(lerp(bounds[1].0, bounds[1].1, j, ny));
                coords.push(lerp(bounds[2].0, bounds[2].1, k, nz));
            }
        }
    }
    let id = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut conn = Vec::with_capacity(8 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for kk in [k, k + 1] {
                    conn.extend_from_slice(&[id(i, j, kk), id(i + 1, j, kk), id(i + 1, j + 1, kk), id(i, j + 1, kk)]);
                }
            }
        }
    }
    Mesh::new(ElementKind::Hex, coords, conn)
}

/// Fan triangulation of the polygon from the origin, each fan triangle
/// refined `refine_level` times by midpoint subdivision.
pub fn mesh_polygon(poly: &ConvexPolygon, refine_level: usize) -> Result<Mesh> {
    if refine_level > 20 {
        return Err(Error::Mesh("refinement level too large".into()));
    }
    Ok(mesh_polygon_scaled(poly, 1.0, 1 << refine_level)?.with_refine_level(refine_level))
}

/// Fan triangulation of `scale·poly`, each fan triangle split into
/// `divisions²` similar triangles. `divisions = 2^k` reproduces `k` rounds
/// of midpoint refinement.
pub fn mesh_polygon_scaled(poly: &ConvexPolygon, scale: f64, divisions: usize) -> Result<Mesh> {
    if divisions == 0 || !(scale > 0.0) {
        return Err(Error::Mesh("polygon mesh needs divisions >= 1 and scale > 0".into()));
    }
    let v = poly.vertices();
    let nv = v.len();
    let n = divisions;
    let mut coords = vec![0.0, 0.0];
    // radial nodes on the segment origin–v_k, i = 1..=n
    for vk in v {
        for i in 1..=n {
            let t = if i == n { 1.0 } else { i as f64 / n as f64 };
            coords.push(scale * t * vk[0]);
            coords.push(scale * t * vk[1]);
        }
    }
    let radial = |k: usize, i: usize| 1 + (k % nv) * n + (i - 1);
    let mut conn = Vec::new();
    let stride = n + 1;
    for k in 0..nv {
        let (p, q) = (v[k], v[(k + 1) % nv]);
        let mut local = vec![usize::MAX; stride * stride];
        for a in 0..=n {
            for b in 0..=(n - a) {
                let id = match (a, b) {
                    (0, 0) => 0,
                    (a, 0) => radial(k, a),
                    (0, b) => radial(k + 1, b),
                    _ => {
                        let id = coords.len() / 2;
                        let (ta, tb) = (a as f64 / n as f64, b as f64 / n as f64);
                        coords.push(scale * (ta * p[0] + tb * q[0]));
                        coords.push(scale * (ta * p[1] + tb * q[1]));
                        id
                    }
                };
                local[a * stride + b] = id;
            }
        }
        let at = |a: usize, b: usize| local[a * stride + b];
        for a in 0..n {
            for b in 0..(n - a) {
                conn.extend_from_slice(&[at(a, b), at(a + 1, b), at(a, b + 1)]);
                if a + b + 2 <= n {
                    conn.extend_from_slice(&[at(a + 1, b), at(a + 1, b + 1), at(a, b + 1)]);
                }
            }
        }
    }
    Mesh::new(ElementKind::Triangle, coords, conn)
}

/// Extrudes a triangle mesh over `[a, b]` in `n` layers. Each prism is split
/// into three tetrahedra by the sorted-global-index rule, so shared prism
/// faces are split the same way from both sides.
pub fn extrude(base: &Mesh, a: f64, b: f64, n: usize) -> Result<Mesh> {
    if base.kind() != ElementKind::Triangle {
        return Err(Error::Mesh("extrusion needs a triangle mesh".into()));
    }
    if n == 0 || !(a < b) {
        return Err(Error::Mesh("extrusion needs n >= 1 and a < b".into()));
    }
    let nb = base.num_nodes();
    let mut coords = Vec::with_capacity(3 * nb * (n + 1));
    for l in 0..=n {
        let z = lerp(a, b, l, n);
        for i in 0..nb {
            coords.extend_from_slice(base.node(i));
            coords.push(z);
        }
    }
    let mut conn = Vec::with_capacity(12 * base.num_elements() * n);
    for e in 0..base.num_elements() {
        if !(base.element_measure(e) > 0.0) {
            return Err(Error::Mesh(format!("base triangle {e} is not counter-clockwise")));
        }
        let mut t = [base.element(e)[0], base.element(e)[1], base.element(e)[2]];
        t.sort_unstable();
        for l in 0..n {
            let lo = |i: usize| l * nb + i;
            let hi = |i: usize| (l + 1) * nb + i;
            let [p, q, r] = t;
            for mut tet in [
                [lo(p), lo(q), lo(r), hi(r)],
                [lo(p), lo(q), hi(q), hi(r)],
                [lo(p), hi(p), hi(q), hi(r)],
            ] {
                let x = |i: usize| &coords[3 * tet[i]..3 * tet[i] + 3];
                if det3(x(0), x(1), x(2), x(3)) < 0.0 {
                    tet.swap(2, 3);
                }
                conn.extend_from_slice(&tet);
            }
        }
    }
    Mesh::new(ElementKind::Tet, coords, conn)
}
