//! Closed-form and hand-computed reference values.

use std::f64::consts::PI;

use cylspec_core::assembly::{assemble, interpolate, rayleigh};
use cylspec_core::coefficient::{conjugate_rotation, reduce_direction, verify_ellipticity, CoefficientField};
use cylspec_core::dense::DenseMatrix;
use cylspec_core::eigen::ldl::factorize;
use cylspec_core::eigen::{dense_oracle, smallest_eigenpairs, SolverOptions};
use cylspec_core::expr::parse_expr;
use cylspec_core::geometry::{
    classify_boundary_facet, outward_normals, point_in_scaled_base, BaseSpec, BoundaryTag, ConvexPolygon,
    CrossSectionSpec, CylinderSpec, Direction,
};
use cylspec_core::mesh::{extrude, mesh_interval, mesh_polygon, CellFamily};
use cylspec_core::sparse::SparseSym;
use cylspec_core::spectral::{
    gap_condition_holds, solve_cross_section, solve_full, solve_reduced, BoundaryMode, Discretization,
};

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn const_field(m: usize, p: usize, rows: &[&[f64]]) -> CoefficientField {
    CoefficientField::from_matrix(m, p, &DenseMatrix::from_rows(rows)).unwrap()
}

fn dirichlet_interval(n: usize) -> cylspec_core::mesh::Mesh {
    let mut mesh = mesh_interval(0.0, 1.0, n).unwrap();
    mesh.tag_boundary(|_, _| Ok((BoundaryTag::Dirichlet, None))).unwrap();
    mesh
}

#[test]
fn expression_examples() {
    assert_eq!(parse_expr("1", 1).unwrap().eval(&[0.3]).unwrap(), 1.0);
    assert_eq!(parse_expr("2+3*xi1", 1).unwrap().eval(&[2.0]).unwrap(), 8.0);
    let s = parse_expr("sin(3.141592653589793*xi1)", 1).unwrap().eval(&[0.5]).unwrap();
    assert!((s - 1.0).abs() < 1e-12);
    assert!(parse_expr("2+*3", 1).is_err());
    assert!(parse_expr("xi2", 1).is_err());
}

#[test]
fn ellipticity_examples() {
    let cross = CrossSectionSpec::unit();
    let b = verify_ellipticity(&CoefficientField::identity(2, 1), &cross, 8).unwrap();
    assert_eq!((b.c_a, b.big_c_a), (1.0, 1.0));
    let d = const_field(2, 1, &[&[4.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
    let b = verify_ellipticity(&d, &cross, 8).unwrap();
    assert!((b.c_a - 1.0).abs() < 1e-12 && (b.big_c_a - 4.0).abs() < 1e-12);
    // eigenvalues of [[2,1],[1,2]] are 1 and 3; the middle 2 sits between
    let c = const_field(2, 1, &[&[2.0, 0.0, 1.0], &[0.0, 2.0, 0.0], &[1.0, 0.0, 2.0]]);
    let b = verify_ellipticity(&c, &cross, 8).unwrap();
    assert!((b.c_a - 1.0).abs() < 1e-12 && (b.big_c_a - 3.0).abs() < 1e-12);
}

#[test]
fn reduction_and_rotation_examples() {
    let a = const_field(2, 1, &[&[2.0, 0.0, 1.0], &[0.0, 2.0, 0.0], &[1.0, 0.0, 2.0]]);
    let e1 = reduce_direction(&a, &Direction::new(vec![1.0, 0.0]).unwrap()).unwrap();
    assert_eq!(e1.evaluate(&[0.5]).unwrap(), DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]));
    let e2 = reduce_direction(&a, &Direction::new(vec![0.0, 1.0]).unwrap()).unwrap();
    assert_eq!(e2.evaluate(&[0.5]).unwrap(), DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 2.0]]));
    let iso = reduce_direction(&CoefficientField::identity(2, 1), &Direction::from_angle(0.7)).unwrap();
    assert!(iso.evaluate(&[0.2]).unwrap().max_abs_diff(&DenseMatrix::identity(2)) < 1e-15);
    // rotation by π/2 sends A₁₂ = (1, 0)ᵀ to (0, 1)ᵀ
    let b = DenseMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
    let ab = conjugate_rotation(&a, &b).unwrap().evaluate(&[0.5]).unwrap();
    assert!(ab.get(0, 2).abs() < 1e-15 && (ab.get(1, 2) - 1.0).abs() < 1e-15);
}

#[test]
fn geometry_examples() {
    let cyl = CylinderSpec::new(BaseSpec::interval(-1.0, 1.0).unwrap(), CrossSectionSpec::unit(), 2.0).unwrap();
    assert_eq!(classify_boundary_facet(&cyl, &[2.0, 0.5], &[1.0, 0.0]).unwrap(), BoundaryTag::Neumann);
    assert_eq!(classify_boundary_facet(&cyl, &[0.0, 1.0], &[0.0, 1.0]).unwrap(), BoundaryTag::Dirichlet);
    assert!(classify_boundary_facet(&cyl, &[0.0, 0.5], &[1.0, 0.0]).is_err());
    let square = BaseSpec::Polygon(ConvexPolygon::unit_square());
    let cube = CylinderSpec::new(square.clone(), CrossSectionSpec::unit(), 3.0).unwrap();
    assert_eq!(
        classify_boundary_facet(&cube, &[1.5, 0.2, 0.0], &[0.0, 0.0, -1.0]).unwrap(),
        BoundaryTag::Dirichlet
    );
    assert!(point_in_scaled_base(&square, 2.0, &[0.5, 0.5]));
    assert!(!point_in_scaled_base(&square, 2.0, &[3.0, 0.0]));
    // vertex-up hexagon: (0.99, 0) lies just inside the vertex at (1, 0)
    let hex = BaseSpec::Polygon(ConvexPolygon::regular(6, 1.0, PI / 6.0).unwrap());
    assert!(point_in_scaled_base(&hex, 1.0, &[0.99, 0.0]));
    let normals = outward_normals(&BaseSpec::interval(-1.0, 1.0).unwrap());
    assert_eq!(normals[0].0.components(), &[1.0]);
    assert_eq!(normals[1].0.components(), &[-1.0]);
    let flat = BaseSpec::Polygon(ConvexPolygon::regular(6, 1.0, 0.0).unwrap());
    for (k, (n, _)) in outward_normals(&flat).iter().enumerate() {
        let t = k as f64 * PI / 3.0;
        assert!((n.components()[0] - t.cos()).abs() < 1e-12 && (n.components()[1] - t.sin()).abs() < 1e-12);
    }
}

#[test]
fn mesh_examples() {
    let fan = mesh_polygon(&ConvexPolygon::unit_square(), 0).unwrap();
    assert_eq!(fan.num_elements(), 4);
    let tri = ConvexPolygon::new(vec![[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0]]).unwrap();
    let base = mesh_polygon(&tri, 0).unwrap();
    let prism = extrude(&base, 0.0, 2.0, 1).unwrap();
    assert_eq!(prism.num_elements(), 3 * base.num_elements());
    assert!((prism.total_measure() - 2.0 * 2.0).abs() < 1e-12);
    assert!((0..prism.num_elements()).all(|e| prism.element_measure(e) > 0.0));
}

#[test]
fn textbook_p1_matrices() {
    let pair = assemble(&dirichlet_interval(4), &CoefficientField::identity(0, 1), 0).unwrap();
    let (k, m) = (pair.stiffness.to_dense(), pair.mass.to_dense());
    let h = 0.25;
    for i in 0..3 {
        assert!((k.get(i, i) - 2.0 / h).abs() < 1e-12);
        assert!((m.get(i, i) - 4.0 * h / 6.0).abs() < 1e-12);
        if i + 1 < 3 {
            assert!((k.get(i, i + 1) + 1.0 / h).abs() < 1e-12);
            assert!((m.get(i, i + 1) - h / 6.0).abs() < 1e-12);
        }
    }
}

#[test]
fn interpolated_sine_quotient() {
    let mesh = dirichlet_interval(64);
    let pair = assemble(&mesh, &CoefficientField::identity(0, 1), 0).unwrap();
    let x = interpolate(&mesh, &pair, |p| (PI * p[0]).sin()).unwrap();
    let q = rayleigh(&pair, &x).unwrap();
    assert!((q - PI * PI).abs() < 0.01, "{q}");
    let oracle = dense_oracle(&pair, 1).unwrap().values[0];
    // the sampled sine is the discrete eigenvector itself
    assert!((q - oracle).abs() < 1e-10 * oracle);
    let scaled: Vec<f64> = x.iter().map(|v| -3.0 * v).collect();
    assert!((rayleigh(&pair, &scaled).unwrap() - q).abs() < 1e-12 * q);
}

#[test]
fn p1_pencil_closed_form() {
    // (K, M) on 10 cells: λ_k = (6/h²)(1 - cos kπh)/(2 + cos kπh)
    let h: f64 = 0.1;
    let pair = assemble(&dirichlet_interval(10), &CoefficientField::identity(0, 1), 0).unwrap();
    let d = dense_oracle(&pair, 3).unwrap();
    let l = smallest_eigenpairs(&pair, 3, &opts()).unwrap();
    for k in 1..=3 {
        let c = (k as f64 * PI * h).cos();
        let exact = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
        assert!((d.values[k - 1] - exact).abs() < 1e-10 * exact);
        assert!((l.values[k - 1] - exact).abs() < 1e-10 * exact);
    }
}

#[test]
fn ldl_pivots_of_the_laplacian() {
    let a = SparseSym::from_dense(&DenseMatrix::from_rows(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]));
    let f = cylspec_core::eigen::ldl::factorize_with(&a, cylspec_core::eigen::ldl::Ordering::Natural).unwrap();
    let expect = [2.0, 1.5, 4.0 / 3.0];
    for (p, e) in f.pivots().iter().zip(expect) {
        assert!((p - e).abs() < 1e-14);
    }
    let x = [0.3, -1.2, 2.5];
    let y = f.solve(&a.matvec(&x));
    assert!(x.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-12));
    let d = factorize(&SparseSym::from_dense(&DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 3.0]]))).unwrap();
    let mut p = d.pivots().to_vec();
    p.sort_by(f64::total_cmp);
    assert_eq!(p, vec![2.0, 3.0]);
}

#[test]
fn diagonal_pencil() {
    let k = SparseSym::from_dense(&DenseMatrix::from_rows(&[&[2.0, 0.0, 0.0], &[0.0, 3.0, 0.0], &[0.0, 0.0, 10.0]]));
    let i = SparseSym::from_dense(&DenseMatrix::identity(3));
    let r = cylspec_core::eigen::lanczos::smallest_eigenpairs_of(&k, &i, 2, &opts()).unwrap();
    assert!((r.values[0] - 2.0).abs() < 1e-12 && (r.values[1] - 3.0).abs() < 1e-12);
}

#[test]
fn cross_section_value_and_gap_indicator() {
    let cross = CrossSectionSpec::unit();
    let a = const_field(1, 1, &[&[2.0, 0.5], &[0.5, 1.0]]);
    let cs = solve_cross_section(&cross, &a, 64, &opts()).unwrap();
    assert!(cs.mu1 >= PI * PI && cs.mu1 <= PI * PI + 0.01);
    // |b|·‖W′‖ with ‖W′‖² = π² for the normalized sine
    assert!((cs.gap_indicator - 0.5 * PI).abs() < 1e-3, "{}", cs.gap_indicator);
    assert!(gap_condition_holds(&cs, None));
    let none = solve_cross_section(&cross, &CoefficientField::identity(1, 1), 64, &opts()).unwrap();
    assert_eq!(none.gap_indicator, 0.0);
    assert!(!gap_condition_holds(&none, None));
}

#[test]
fn reduced_values_with_and_without_coupling() {
    let cross = CrossSectionSpec::unit();
    let disc = Discretization::new(0.25).with_xi_divisions(32).with_family(CellFamily::Tensor);
    let mu1 = solve_cross_section(&cross, &CoefficientField::identity(1, 1), 32, &opts()).unwrap().mu1;
    let lengths = [4.0, 8.0, 16.0, 32.0];
    let a = const_field(1, 1, &[&[2.0, 0.5], &[0.5, 1.0]]);
    let plus = solve_reduced(&a, &Direction::new(vec![1.0]).unwrap(), &cross, &lengths, &disc, &opts()).unwrap();
    assert!(plus.extrapolated < PI * PI && plus.extrapolated <= mu1 + 1e-8);
    // no coupling along θ = π/2: only the Dirichlet cap at -L lifts Z above μ₁
    let c = const_field(2, 1, &[&[2.0, 0.0, 0.5], &[0.0, 2.0, 0.0], &[0.5, 0.0, 1.0]]);
    let up = solve_reduced(&c, &Direction::from_angle(PI / 2.0), &cross, &lengths, &disc, &opts()).unwrap();
    assert!(up.extrapolated >= mu1 - 1e-10 && up.extrapolated - mu1 < 0.01);
    assert!((up.extrapolated - PI * PI).abs() < 0.05);
}

#[test]
fn separable_no_gap_identity() {
    let square = BaseSpec::Polygon(ConvexPolygon::unit_square());
    let cyl = CylinderSpec::new(square, CrossSectionSpec::unit(), 2.0).unwrap();
    let disc = Discretization::new(0.25).with_xi_divisions(8).with_family(CellFamily::Tensor);
    let mu1 = solve_cross_section(&CrossSectionSpec::unit(), &CoefficientField::identity(2, 1), 8, &opts())
        .unwrap()
        .mu1;
    let full = solve_full(&cyl, &CoefficientField::identity(2, 1), 1, &disc, BoundaryMode::Mixed, &opts(), None).unwrap();
    assert!((full.eigen.values[0] - mu1).abs() < 1e-8);
    let dir = solve_full(&cyl, &CoefficientField::identity(2, 1), 1, &disc, BoundaryMode::Dirichlet, &opts(), None).unwrap();
    assert!(dir.eigen.values[0] > mu1);
}
