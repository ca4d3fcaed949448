//! The block coefficient matrix `A(ξ) = [A₁₁ A₁₂; A₁₂ᵀ A₂₂]`.
//!
//! Rows and columns `0..m` belong to the base coordinates `X`, the remaining
//! `p` to the cross-section coordinates `ξ`. Entries are expressions in `ξ`
//! only.

use alloc::format;
use alloc::vec::Vec;

use crate::dense::{symmetric_eigen, DenseMatrix};
use crate::expr::{parse_expr, Expr};
use crate::geometry::{CrossSectionSpec, Direction};
use crate::{Error, Result};

/// Default number of sample points per `ξ` direction for [`verify_ellipticity`].
pub const DEFAULT_GRID: usize = 64;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    m: usize,
    p: usize,
    entries: Vec<Expr>,
    constant: Option<DenseMatrix>,
}

impl CoefficientField {
    /// Builds a field from an `(m+p)×(m+p)` row-major grid of expressions.
    pub fn new(m: usize, p: usize, entries: Vec<Expr>) -> Result<Self> {
        let n = m + p;
        if p == 0 || n == 0 {
            return Err(Error::DimensionMismatch("coefficient needs p >= 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n}x{n} = {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().filter_map(Expr::max_var).max() {
            if k >= p {
                return Err(Error::DimensionMismatch(format!("entry uses xi{} but p = {p}", k + 1)));
            }
        }
        let constant = entries
            .iter()
            .map(Expr::constant_value)
            .collect::<Option<Vec<f64>>>()
            .map(|v| DenseMatrix::from_row_major(n, n, v));
        Ok(Self {
            m,
            p,
            entries,
            constant,
        })
    }

    /// Parses a square grid of entry strings.
    pub fn parse<S: AsRef<str>>(m: usize, p: usize, rows: &[Vec<S>]) -> Result<Self> {
        let n = m + p;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("coefficient must be {n}x{n}")));
        }
        let entries = rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|s| parse_expr(s.as_ref(), p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, p, entries)
    }

    pub fn identity(m: usize, p: usize) -> Self {
        Self::from_matrix(m, p, &DenseMatrix::identity(m + p)).expect("identity has the right shape")
    }

    pub fn from_matrix(m: usize, p: usize, a: &DenseMatrix) -> Result<Self> {
        let n = m + p;
        if a.rows() != n || a.cols() != n {
            return Err(Error::DimensionMismatch(format!("coefficient must be {n}x{n}")));
        }
        Self::new(m, p, a.as_slice().iter().map(|&v| Expr::Const(v)).collect())
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m + self.p
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i * self.dim() + j]
    }

    pub fn is_constant(&self) -> bool {
        self.constant.is_some()
    }

    /// `A(ξ)` as a dense matrix.
    pub fn evaluate(&self, xi: &[f64]) -> Result<DenseMatrix> {
        if let Some(c) = &self.constant {
            return Ok(c.clone());
        }
        let n = self.dim();
        let data = self.entries.iter().map(|e| e.eval(xi)).collect::<Result<Vec<_>>>()?;
        Ok(DenseMatrix::from_row_major(n, n, data))
    }

    /// The `p×p` block `A₂₂` as a field with no base coordinates.
    pub fn block22(&self) -> CoefficientField {
        let n = self.dim();
        let entries = (self.m..n)
            .flat_map(|i| (self.m..n).map(move |j| (i, j)))
            .map(|(i, j)| self.entry(i, j).clone())
            .collect();
        CoefficientField::new(0, self.p, entries).expect("sub-block of a valid field")
    }

    /// Row `i` (`i < m`) of the coupling block `A₁₂` evaluated at `ξ`.
    pub fn coupling_row(&self, i: usize, xi: &[f64]) -> Result<Vec<f64>> {
        (self.m..self.dim()).map(|j| self.entry(i, j).eval(xi)).collect()
    }
}

/// Sampled ellipticity and boundedness constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticityBounds {
    pub c_a: f64,
    pub big_c_a: f64,
}

/// Midpoint sample grid over the box `ω₂` with `grid_n` points per direction.
pub fn sample_grid(cross: &CrossSectionSpec, grid_n: usize) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = alloc::vec![Vec::new()];
    for &(a, b) in cross.intervals() {
        let mut next = Vec::with_capacity(pts.len() * grid_n);
        for p in &pts {
            for k in 0..grid_n {
                let mut q = p.clone();
                q.push(a + (k as f64 + 0.5) * (b - a) / grid_n as f64);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Smallest eigenvalue and spectral norm of `A(ξ)` over a sample grid.
///
/// Sample points are cell midpoints so entries singular on `∂ω₂` are
/// tolerated.
pub fn verify_ellipticity(a: &CoefficientField, cross: &CrossSectionSpec, grid_n: usize) -> Result<EllipticityBounds> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument("ellipticity grid needs at least 2 points".into()));
    }
    if cross.dim() != a.p() {
        return Err(Error::DimensionMismatch(format!(
            "coefficient has p = {} but the cross-section has dimension {}",
            a.p(),
            cross.dim()
        )));
    }
    let points = if a.is_constant() {
        alloc::vec![cross.intervals().iter().map(|&(a, b)| 0.5 * (a + b)).collect()]
    } else {
        sample_grid(cross, grid_n)
    };
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for xi in &points {
        let mat = a.evaluate(xi)?;
        let n = mat.rows();
        for i in 0..n {
            for j in (i + 1)..n {
                let (x, y) = (mat.get(i, j), mat.get(j, i));
                let d = (x - y).abs();
                if d > SYMMETRY_TOL * f64::max(1.0, x.abs().max(y.abs())) {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        difference: d,
                    });
                }
            }
        }
        let e = symmetric_eigen(&mat);
        lo = lo.min(e.values[0]);
        hi = hi.max(e.values[0].abs()).max(e.values[n - 1].abs());
    }
    if !(lo > 0.0) {
        return Err(Error::NotElliptic(lo));
    }
    Ok(EllipticityBounds { c_a: lo, big_c_a: hi })
}

/// `A_ν = [[νᵀA₁₁ν, νᵀA₁₂], [(νᵀA₁₂)ᵀ, A₂₂]]`, built symbolically.
pub fn reduce_direction(a: &CoefficientField, nu: &Direction) -> Result<CoefficientField> {
    let m = a.m();
    if nu.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "direction has {} components, coefficient has m = {m}",
            nu.dim()
        )));
    }
    let v = nu.components();
    let p = a.p();
    let n = 1 + p;
    let mut entries = Vec::with_capacity(n * n);
    // A_ν[0][0]
    let mut terms = Vec::new();
    for i in 0..m {
        for j in 0..m {
            terms.push((v[i] * v[j], a.entry(i, j)));
        }
    }
    entries.push(Expr::linear_combination(&terms));
    for c in 0..p {
        let terms: Vec<_> = (0..m).map(|i| (v[i], a.entry(i, m + c))).collect();
        entries.push(Expr::linear_combination(&terms));
    }
    for r in 0..p {
        let terms: Vec<_> = (0..m).map(|i| (v[i], a.entry(m + r, i))).collect();
        entries.push(Expr::linear_combination(&terms));
        for c in 0..p {
            entries.push(a.entry(m + r, m + c).clone());
        }
    }
    CoefficientField::new(1, p, entries)
}

/// `A^B = [[B A₁₁ Bᵀ, B A₁₂], [(B A₁₂)ᵀ, A₂₂]]` for an orthogonal `m×m` matrix `B`.
pub fn conjugate_rotation(a: &CoefficientField, b: &DenseMatrix) -> Result<CoefficientField> {
    let m = a.m();
    if b.rows() != m || b.cols() != m {
        return Err(Error::DimensionMismatch(format!("rotation must be {m}x{m}")));
    }
    let dev = b.transpose().matmul(b).max_abs_diff(&DenseMatrix::identity(m));
    if dev > 1e-12 {
        return Err(Error::NotOrthogonal(dev));
    }
    let n = a.dim();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let e = match (i < m, j < m) {
                (true, true) => {
                    let mut terms = Vec::new();
                    for k in 0..m {
                        for l in 0..m {
                            terms.push((b.get(i, k) * b.get(j, l), a.entry(k, l)));
                        }
                    }
                    Expr::linear_combination(&terms)
                }
                (true, false) => {
                    let terms: Vec<_> = (0..m).map(|k| (b.get(i, k), a.entry(k, j))).collect();
                    Expr::linear_combination(&terms)
                }
                (false, true) => {
                    let terms: Vec<_> = (0..m).map(|k| (b.get(j, k), a.entry(i, k))).collect();
                    Expr::linear_combination(&terms)
                }
                (false, false) => a.entry(i, j).clone(),
            };
            entries.push(e);
        }
    }
    CoefficientField::new(m, a.p(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn coupled() -> CoefficientField {
        CoefficientField::from_matrix(
            2,
            1,
            &DenseMatrix::from_rows(&[&[2.0, 0.0, 1.0], &[0.0, 2.0, 0.0], &[1.0, 0.0, 2.0]]),
        )
        .unwrap()
    }

    #[test]
    fn ellipticity_examples() {
        let cross = CrossSectionSpec::unit();
        let b = verify_ellipticity(&CoefficientField::identity(2, 1), &cross, 8).unwrap();
        assert_eq!((b.c_a, b.big_c_a), (1.0, 1.0));
        let diag = CoefficientField::parse(2, 1, &[vec!["4", "0", "0"], vec!["0", "1", "0"], vec!["0", "0", "1"]]).unwrap();
        let b = verify_ellipticity(&diag, &cross, 8).unwrap();
        assert!((b.c_a - 1.0).abs() < 1e-14 && (b.big_c_a - 4.0).abs() < 1e-14);
        let b = verify_ellipticity(&coupled(), &cross, 8).unwrap();
        assert!((b.c_a - 1.0).abs() < 1e-14 && (b.big_c_a - 3.0).abs() < 1e-14);
    }

    #[test]
    fn ellipticity_failures() {
        let cross = CrossSectionSpec::unit();
        let asym = CoefficientField::parse(1, 1, &[vec!["1", "xi1"], vec!["0", "1"]]).unwrap();
        assert!(matches!(verify_ellipticity(&asym, &cross, 4), Err(Error::NotSymmetric { .. })));
        let indefinite = CoefficientField::parse(1, 1, &[vec!["1", "2"], vec!["2", "1"]]).unwrap();
        assert!(matches!(verify_ellipticity(&indefinite, &cross, 4), Err(Error::NotElliptic(_))));
        let degenerate = CoefficientField::parse(1, 1, &[vec!["1", "0"], vec!["0", "xi1 - 0.5"]]).unwrap();
        assert!(matches!(verify_ellipticity(&degenerate, &cross, 4), Err(Error::NotElliptic(_))));
        assert!(CoefficientField::parse(1, 1, &[vec!["1", "xi2"], vec!["xi2", "1"]]).is_err());
    }

    #[test]
    fn reduce_examples() {
        let xi = [0.3];
        for theta in [0.0, 0.7, 2.0] {
            let r = reduce_direction(&CoefficientField::identity(2, 1), &Direction::from_angle(theta)).unwrap();
            assert!(r.evaluate(&xi).unwrap().max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
        }
        let r = reduce_direction(&coupled(), &Direction::from_angle(0.0)).unwrap();
        assert!(r.is_constant());
        assert_eq!(r.evaluate(&xi).unwrap(), DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]));
        let r = reduce_direction(&coupled(), &Direction::new(vec![0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(r.evaluate(&xi).unwrap(), DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 2.0]]));
        assert!(reduce_direction(&coupled(), &Direction::new(vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn reduce_keeps_expressions() {
        let a = CoefficientField::parse(
            2,
            1,
            &[vec!["2", "0", "sin(xi1)"], vec!["0", "3", "xi1"], vec!["sin(xi1)", "xi1", "1 + xi1"]],
        )
        .unwrap();
        let nu = Direction::from_angle(0.4);
        let r = reduce_direction(&a, &nu).unwrap();
        let (c, s) = (nu.components()[0], nu.components()[1]);
        let xi = 0.8f64;
        let m = r.evaluate(&[xi]).unwrap();
        assert!((m.get(0, 0) - (2.0 * c * c + 3.0 * s * s)).abs() < 1e-14);
        assert!((m.get(0, 1) - (c * libm::sin(xi) + s * xi)).abs() < 1e-14);
        assert!((m.get(1, 1) - 1.8).abs() < 1e-14);
    }

    #[test]
    fn rotation_examples() {
        let a = coupled();
        let same = conjugate_rotation(&a, &DenseMatrix::identity(2)).unwrap();
        assert_eq!(same.evaluate(&[0.5]).unwrap(), a.evaluate(&[0.5]).unwrap());
        let quarter = DenseMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let rot = conjugate_rotation(&a, &quarter).unwrap().evaluate(&[0.5]).unwrap();
        assert_eq!((rot.get(0, 2), rot.get(1, 2)), (0.0, 1.0));
        assert_eq!((rot.get(2, 0), rot.get(2, 1)), (0.0, 1.0));
        let id = conjugate_rotation(&CoefficientField::identity(2, 1), &quarter).unwrap();
        assert_eq!(id.evaluate(&[0.5]).unwrap(), DenseMatrix::identity(3));
        let skew = DenseMatrix::from_rows(&[&[1.0, 0.1], &[0.0, 1.0]]);
        assert!(matches!(conjugate_rotation(&a, &skew), Err(Error::NotOrthogonal(_))));
    }

    #[test]
    fn block22_and_coupling() {
        let a = coupled();
        let b = a.block22();
        assert_eq!((b.m(), b.p()), (0, 1));
        assert_eq!(b.evaluate(&[0.1]).unwrap().get(0, 0), 2.0);
        assert_eq!(a.coupling_row(0, &[0.1]).unwrap(), vec![1.0]);
        assert_eq!(a.coupling_row(1, &[0.1]).unwrap(), vec![0.0]);
    }
}
