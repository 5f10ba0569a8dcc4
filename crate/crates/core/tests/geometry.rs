//! Geometry-kernel checks against independent finite-difference oracles and
//! closed-form expectations.

mod common;

use acmgeo::catalog::{flat_cosym_3, heis_3, hermitian_base, r5_wobble, sphere_3};
use acmgeo::geometry::{
    adapted_frame, christoffel_at, curvature_apply, exterior_derivative_1form, gram_schmidt,
    lie_bracket, random_adapted_frame, riemann_at, rough_laplacian, second_covariant_derivative,
    Point, Ray, TensorField, Valence,
};
use acmgeo::sampling::sample_points;
use acmgeo::ScalarExpr;
use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn christoffel_flat_and_symmetry_point() {
    let s = flat_cosym_3();
    for p in sample_points(s.chart(), 42, 10) {
        let gamma = christoffel_at(s.chart(), &p).unwrap();
        assert!(gamma.iter().all(|g| g.abs() < 1e-14));
    }

    // Stereographic round sphere: all symbols vanish at the origin.
    let s2 = hermitian_base("s2-round").unwrap();
    let origin = s2.chart.point(vec![0.0, 0.0]).unwrap();
    let gamma = christoffel_at(&s2.chart, &origin).unwrap();
    assert!(gamma.iter().all(|g| g.abs() < 1e-14));
}

#[test]
fn christoffel_matches_finite_differences() {
    let s2 = hermitian_base("s2-round").unwrap();
    let p = s2.chart.point(vec![0.5, 0.3]).unwrap();
    let jets = christoffel_at(&s2.chart, &p).unwrap();
    let fd = common::fd_christoffel_at(&s2.chart, p.coords(), 1e-5);
    for (a, b) in jets.iter().zip(&fd) {
        assert_relative_eq!(a, b, epsilon = 1e-6, max_relative = 1e-6);
    }

    let heis = heis_3();
    for p in sample_points(heis.chart(), 42, 5) {
        let jets = christoffel_at(heis.chart(), &p).unwrap();
        let fd = common::fd_christoffel_at(heis.chart(), p.coords(), 1e-5);
        for (a, b) in jets.iter().zip(&fd) {
            assert_relative_eq!(a, b, epsilon = 1e-6, max_relative = 1e-6);
        }
    }
}

#[test]
fn metric_jets_match_finite_differences() {
    // First and second jet derivatives of g against central differences.
    for s in [heis_3(), sphere_3()] {
        let chart = s.chart();
        let dim = chart.dim();
        for p in sample_points(chart, 42, 10) {
            for c in 0..dim {
                let jets = chart.metric_jets(&Ray::axis(&p, c), 2).unwrap();
                let fd1 = common::fd_metric_partial(chart, &p, c, 1e-5);
                for i in 0..dim {
                    for j in 0..dim {
                        assert_relative_eq!(
                            jets[i * dim + j].deriv(1),
                            fd1[(i, j)],
                            epsilon = 1e-6,
                            max_relative = 1e-6
                        );
                    }
                }
                let fd2 = common::fd_metric_second(chart, &p, c, c, 1e-4);
                for i in 0..dim {
                    for j in 0..dim {
                        assert_relative_eq!(
                            jets[i * dim + j].deriv(2),
                            fd2[(i, j)],
                            epsilon = 1e-5,
                            max_relative = 1e-5
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn sphere_sectional_curvature_is_one() {
    // Round S^2 (base chart) and round S^3 both have constant curvature +1.
    let s2 = hermitian_base("s2-round").unwrap();
    let p = s2.chart.point(vec![0.4, -0.2]).unwrap();
    let r = riemann_at(&s2.chart, &p).unwrap();
    let g = s2.chart.metric_at(&p).unwrap();
    let k = common::sectional(
        &r,
        &g,
        &DVector::from_vec(vec![1.0, 0.0]),
        &DVector::from_vec(vec![0.0, 1.0]),
    );
    assert_relative_eq!(k, 1.0, epsilon = 1e-9);

    let s3 = sphere_3();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for p in sample_points(s3.chart(), 42, 20) {
        let r = riemann_at(s3.chart(), &p).unwrap();
        let g = s3.chart().metric_at(&p).unwrap();
        for _ in 0..3 {
            let x = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let y = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let k = common::sectional(&r, &g, &x, &y);
            assert_relative_eq!(k, 1.0, epsilon = 1e-6);
        }
    }
}

#[test]
fn riemann_matches_fd_pipeline() {
    let s3 = sphere_3();
    let p = s3.chart().point(vec![0.3, -0.25, 0.4]).unwrap();
    let r = riemann_at(s3.chart(), &p).unwrap();
    let fd = common::fd_riemann_at(s3.chart(), &p);
    for (a, b) in r.iter().zip(&fd) {
        assert_relative_eq!(a, b, epsilon = 1e-6, max_relative = 1e-6);
    }
}

#[test]
fn flat_curvature_vanishes() {
    let s = flat_cosym_3();
    let p = s.chart().point(vec![0.7, -0.4, 0.1]).unwrap();
    let r = riemann_at(s.chart(), &p).unwrap();
    assert!(r.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn metric_is_parallel() {
    for s in [flat_cosym_3(), heis_3(), sphere_3(), r5_wobble()] {
        let chart = s.chart();
        let metric_field = TensorField::from_exprs(
            chart.clone(),
            Valence::new(0, 2),
            chart.metric_exprs().to_vec(),
        )
        .unwrap();
        let nabla_g = metric_field.covariant_derivative(None).unwrap();
        for p in sample_points(chart, 42, 50) {
            let v = nabla_g.value_at(&p).unwrap();
            let worst = v.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(worst < 1e-8, "|nabla g| = {worst:.3e} on {}", chart.name());
        }
    }
}

#[test]
fn parallel_structure_on_flat_chart() {
    let s = flat_cosym_3();
    for p in sample_points(s.chart(), 42, 20) {
        let ntheta = s.nabla_theta_at(&p).unwrap();
        assert!(ntheta.iter().all(|v| v.abs() < 1e-14));
        let nxi = s.nabla_xi_at(&p).unwrap();
        assert!(nxi.iter().all(|v| v.abs() < 1e-14));
    }
}

#[test]
fn heis_xi_is_geodesic_but_not_parallel() {
    let s = heis_3();
    for p in sample_points(s.chart(), 42, 20) {
        let nxi = s.nabla_xi_at(&p).unwrap();
        assert!(nxi.norm() > 1e-2, "nabla xi should not vanish");
        let xi = s.xi_at(&p).unwrap();
        assert!((nxi * xi).norm() < 1e-8, "integral curves should be geodesic");
    }
}

#[test]
fn sphere_nabla_xi_equals_theta() {
    // On the round 3-sphere the Hopf field satisfies nabla xi = theta, which
    // exercises Christoffel symbols and structure jets together.
    let s = sphere_3();
    for p in sample_points(s.chart(), 42, 25) {
        let nxi = s.nabla_xi_at(&p).unwrap();
        let theta = s.theta_at(&p).unwrap();
        assert!((nxi - theta).norm() < 1e-9);
    }
}

#[test]
fn ricci_identity_on_sphere() {
    let s = sphere_3();
    let xi_field = s.xi_field();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in sample_points(s.chart(), 42, 20) {
        let x = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let y = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let dxy = second_covariant_derivative(&xi_field, None, &p, &x, &y).unwrap();
        let dyx = second_covariant_derivative(&xi_field, None, &p, &y, &x).unwrap();
        let r = riemann_at(s.chart(), &p).unwrap();
        let xi = s.xi_at(&p).unwrap();
        let rxy = curvature_apply(&r, 3, &x, &y, &xi);
        let lhs = dxy.as_vector() - dyx.as_vector();
        assert!((lhs - rxy).norm() < 1e-6);
    }
}

#[test]
fn rough_laplacian_flat_and_hopf() {
    let flat = flat_cosym_3();
    let p = flat.chart().point(vec![0.3, 0.4, -0.2]).unwrap();
    let lap = rough_laplacian(&flat.xi_field(), None, &p).unwrap();
    assert!(lap.as_vector().norm() < 1e-14);

    // The Hopf field is a unit harmonic vector field.
    let s = sphere_3();
    for p in sample_points(s.chart(), 42, 15) {
        let lap = rough_laplacian(&s.xi_field(), None, &p).unwrap().as_vector();
        let g = s.chart().metric_at(&p).unwrap();
        let ginv = s.chart().inverse_metric_at(&p).unwrap();
        let nxi = s.nabla_xi_at(&p).unwrap();
        let grad_sq = (&ginv * (nxi.transpose() * &g * &nxi)).trace();
        let xi = s.xi_at(&p).unwrap();
        let res = lap - xi * grad_sq;
        assert!(res.norm() < 1e-6, "|residual| = {:.3e}", res.norm());
        assert_relative_eq!(grad_sq, 2.0, epsilon = 1e-9);
    }
}

#[test]
fn rough_laplacian_frame_independent() {
    // The trace form must agree with explicit frame sums in two random frames.
    let s = heis_3();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in sample_points(s.chart(), 42, 5) {
        let lap = rough_laplacian(&s.xi_field(), None, &p).unwrap().as_vector();
        let xi = s.xi_at(&p).unwrap();
        let dd = s
            .xi_field()
            .covariant_derivative(None)
            .unwrap()
            .covariant_derivative(None)
            .unwrap()
            .value_at(&p)
            .unwrap();
        for _ in 0..2 {
            let frame = random_adapted_frame(s.chart(), &p, &xi, &mut rng).unwrap();
            let mut sum = DVector::zeros(3);
            for e in &frame.vectors {
                for a in 0..3 {
                    let mut acc = 0.0;
                    for c in 0..3 {
                        for f in 0..3 {
                            acc += dd.data[(a * 3 + c) * 3 + f] * e[c] * e[f];
                        }
                    }
                    sum[a] -= acc;
                }
            }
            assert!((&sum - &lap).norm() < 1e-8);
        }
    }
}

#[test]
fn lie_bracket_cases() {
    let s = flat_cosym_3();
    let p = s.chart().point(vec![0.2, 0.5, -0.3]).unwrap();
    let d1 = s.coordinate_field(0);
    let d2 = s.coordinate_field(1);
    assert!(lie_bracket(&d1, &d2, &p).unwrap().norm() < 1e-15);

    // [x2 d1, d2] = -d1.
    let vars = ["x1", "x2", "x3"];
    let x2d1 = TensorField::from_exprs(
        s.chart().clone(),
        Valence::new(1, 0),
        vec![
            ScalarExpr::parse("x2", &vars).unwrap(),
            ScalarExpr::parse("0", &vars).unwrap(),
            ScalarExpr::parse("0", &vars).unwrap(),
        ],
    )
    .unwrap();
    let b = lie_bracket(&x2d1, &d2, &p).unwrap();
    assert!((b - DVector::from_vec(vec![-1.0, 0.0, 0.0])).norm() < 1e-14);
}

#[test]
fn bracket_equals_connection_torsion() {
    // [X,Y] = nabla_X Y - nabla_Y X for polynomial fields on a curved chart.
    let s = sphere_3();
    let vars = ["x1", "x2", "x3"];
    let xf = TensorField::from_exprs(
        s.chart().clone(),
        Valence::new(1, 0),
        vec![
            ScalarExpr::parse("x2*x3 + 0.5", &vars).unwrap(),
            ScalarExpr::parse("x1^2 - x3", &vars).unwrap(),
            ScalarExpr::parse("x1*x2", &vars).unwrap(),
        ],
    )
    .unwrap();
    let yf = TensorField::from_exprs(
        s.chart().clone(),
        Valence::new(1, 0),
        vec![
            ScalarExpr::parse("x3^2", &vars).unwrap(),
            ScalarExpr::parse("0.3 - x1", &vars).unwrap(),
            ScalarExpr::parse("x2", &vars).unwrap(),
        ],
    )
    .unwrap();
    for p in sample_points(s.chart(), 42, 20) {
        let bracket = lie_bracket(&xf, &yf, &p).unwrap();
        let nx = xf.covariant_derivative(None).unwrap().value_at(&p).unwrap();
        let ny = yf.covariant_derivative(None).unwrap().value_at(&p).unwrap();
        let xv = xf.value_at(&p).unwrap().as_vector();
        let yv = yf.value_at(&p).unwrap().as_vector();
        let mut torsion = DVector::zeros(3);
        for a in 0..3 {
            let mut acc = 0.0;
            for c in 0..3 {
                acc += ny.data[a * 3 + c] * xv[c] - nx.data[a * 3 + c] * yv[c];
            }
            torsion[a] = acc - bracket[a];
        }
        assert!(torsion.norm() < 1e-8);
    }
}

#[test]
fn exterior_derivative_cases() {
    // eta = dz on the flat chart is closed.
    let flat = flat_cosym_3();
    let p = flat.chart().point(vec![0.1, 0.2, 0.3]).unwrap();
    let eta = flat.eta_field();
    let d12 = exterior_derivative_1form(&eta, &p, &flat.coordinate_field(0), &flat.coordinate_field(1))
        .unwrap();
    assert!(d12.abs() < 1e-15);

    // eta = (dz - x2 dx1)/2: d eta(d1, d2) = (d_1 eta_2 - d_2 eta_1)/2 = 1/4.
    let heis = heis_3();
    let p = heis.chart().point(vec![0.4, -0.7, 0.2]).unwrap();
    let eta = heis.eta_field();
    let x = heis.coordinate_field(0);
    let y = heis.coordinate_field(1);
    let val = exterior_derivative_1form(&eta, &p, &x, &y).unwrap();
    assert_relative_eq!(val, 0.25, epsilon = 1e-13);
    // Antisymmetry.
    let rev = exterior_derivative_1form(&eta, &p, &y, &x).unwrap();
    assert_relative_eq!(val, -rev, epsilon = 1e-13);
    let same = exterior_derivative_1form(&eta, &p, &x, &x).unwrap();
    assert!(same.abs() < 1e-14);
}

#[test]
fn adapted_frames() {
    // Flat chart: the adapted frame is a permuted standard basis.
    let flat = flat_cosym_3();
    let p = flat.chart().point(vec![0.1, 0.1, 0.1]).unwrap();
    let xi = flat.xi_at(&p).unwrap();
    let frame = adapted_frame(flat.chart(), &p, &xi).unwrap();
    assert_eq!(frame.vectors.len(), 3);
    assert!((frame.vectors[2].clone() - xi).norm() < 1e-15);
    for v in &frame.vectors[..2] {
        assert!(v[2].abs() < 1e-15);
    }

    // Orthonormality and horizontality on curved charts.
    for s in [heis_3(), sphere_3()] {
        for p in sample_points(s.chart(), 42, 20) {
            let xi = s.xi_at(&p).unwrap();
            let frame = adapted_frame(s.chart(), &p, &xi).unwrap();
            let gram = frame.gram(s.chart(), &p).unwrap();
            assert!((gram - DMatrix::<f64>::identity(3, 3)).norm() < 1e-12);
            let eta = s.eta_at(&p).unwrap();
            for v in &frame.vectors[..2] {
                assert!(eta.dot(v).abs() < 1e-12);
            }
            assert!((frame.vectors[2].clone() - xi).norm() < 1e-12);
        }
    }

    // Degenerate input is rejected.
    let p = heis_3().chart().point(vec![0.1, 0.1, 0.1]).unwrap();
    let heis = heis_3();
    let bad = heis.xi_at(&p).unwrap() * 1.5;
    assert!(adapted_frame(heis.chart(), &p, &bad).is_err());
}

#[test]
fn gram_schmidt_requires_independence() {
    let flat = flat_cosym_3();
    let p = flat.chart().point(vec![0.0, 0.0, 0.0]).unwrap();
    let seeds = vec![
        DVector::from_vec(vec![1.0, 0.0, 0.0]),
        DVector::from_vec(vec![1.0, 1e-12, 0.0]),
    ];
    assert!(gram_schmidt(flat.chart(), &p, &seeds).is_err());
}

#[test]
fn point_validation_and_wrapping() {
    let s = heis_3();
    assert!(s.chart().point(vec![0.0, 0.0, 2.0]).is_err());
    assert!(s.chart().point(vec![0.0, 0.0]).is_err());
    // Periodic axes wrap.
    let tp = acmgeo::catalog::twist("flat-c1", "1", "1").unwrap();
    let p: Point = tp.structure.chart().point(vec![0.1, 0.2, 7.0]).unwrap();
    assert!(p.coords()[2] < std::f64::consts::TAU);
}
