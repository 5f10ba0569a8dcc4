//! Structure invariants and the three equivalent normality routes.

use acmgeo::catalog::{
    flat_cosym_3, heis_3, is_normal, r5_wobble, sphere_3, standard_twists, structure,
};
use acmgeo::geometry::{vec_g_norm, TensorField, Valence};
use acmgeo::sampling::sample_points;
use acmgeo::AcmStructure;
use acmgeo::ScalarExpr;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CATALOG_IDS: [&str; 4] = ["flat-cosym-3", "heis-3", "sphere-3", "r5-wobble"];

fn all_structures() -> Vec<(String, AcmStructure, bool)> {
    let mut out: Vec<(String, AcmStructure, bool)> = CATALOG_IDS
        .iter()
        .map(|id| (id.to_string(), structure(id).unwrap(), is_normal(id).unwrap()))
        .collect();
    for (name, tp) in standard_twists() {
        out.push((name.to_string(), tp.structure.clone(), true));
    }
    out
}

#[test]
fn structure_invariants_hold_everywhere() {
    for (name, s, _) in all_structures() {
        for p in sample_points(s.chart(), 42, 40) {
            let c = s.compatibility_at(&p).unwrap();
            assert!(
                c.max() < 1e-10,
                "{name}: compatibility residual {:.3e} at {:?}",
                c.max(),
                p.coords()
            );
        }
    }
}

#[test]
fn corrupted_theta_is_flagged() {
    let s = heis_3();
    let vars = ["x1", "x2", "x3"];
    let mut theta: Vec<ScalarExpr> = s.theta_exprs().to_vec();
    theta[1] = ScalarExpr::parse("1 + 0.1", &vars).unwrap();
    let bad = AcmStructure::new(s.chart().clone(), theta, s.xi_exprs().to_vec(), s.eta_exprs().to_vec())
        .unwrap();
    let p = bad.chart().point(vec![0.3, 0.2, -0.1]).unwrap();
    let c = bad.compatibility_at(&p).unwrap();
    assert!(c.square_identity > 0.05, "perturbation must show up: {c:?}");
}

#[test]
fn nijenhuis_antisymmetric_and_tensorial() {
    let s = heis_3();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in sample_points(s.chart(), 42, 10) {
        let x = s.coordinate_field(0);
        let y = s.coordinate_field(1);
        let nxy = s.nijenhuis(&p, &x, &y).unwrap();
        let nyx = s.nijenhuis(&p, &y, &x).unwrap();
        assert!((&nxy + &nyx).norm() < 1e-12, "antisymmetry");

        // Tensoriality: a linear-coefficient extension with the same values
        // at p gives the same result.
        let value_x = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let value_y = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let slope = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-0.5..0.5));
        let x2 = TensorField::affine_vector(s.chart().clone(), &p, value_x, slope.clone());
        let y2 = TensorField::affine_vector(s.chart().clone(), &p, value_y, slope);
        let n2 = s.nijenhuis(&p, &x2, &y2).unwrap();
        assert!((&nxy - &n2).norm() < 1e-8, "tensoriality: {:.3e}", (&nxy - &n2).norm());
    }
}

#[test]
fn flat_nijenhuis_vanishes() {
    let s = flat_cosym_3();
    let p = s.chart().point(vec![0.5, -0.5, 0.5]).unwrap();
    for c in 0..3 {
        for d in 0..3 {
            let n = s
                .nijenhuis(&p, &s.coordinate_field(c), &s.coordinate_field(d))
                .unwrap();
            assert!(n.norm() < 1e-14);
        }
    }
}

#[test]
fn tri_equivalence_of_normality_routes() {
    // The three routes must agree: all small on normal structures, all large
    // on the wobble, never a mixed verdict.
    for (name, s, normal) in all_structures() {
        let points = sample_points(s.chart(), 42, 30);
        let lift = s.lift().unwrap();
        let mut worst = [0.0f64; 3];
        for p in &points {
            worst[0] = worst[0].max(s.normality_sweep(p).unwrap());
            worst[1] = worst[1].max(s.covariant_normality_sweep(p).unwrap());
            worst[2] = worst[2].max(lift.nijenhuis_sweep(p).unwrap());
        }
        if normal {
            for (k, w) in worst.iter().enumerate() {
                assert!(*w < 1e-7, "{name}: route {k} residual {w:.3e}");
            }
        } else {
            for (k, w) in worst.iter().enumerate() {
                assert!(*w > 1e-4, "{name}: route {k} residual {w:.3e} should be large");
            }
        }
    }
}

#[test]
fn wobble_normality_is_visibly_broken() {
    let s = r5_wobble();
    let mut seen = 0.0f64;
    for p in sample_points(s.chart(), 42, 20) {
        seen = seen.max(s.normality_sweep(&p).unwrap());
    }
    assert!(seen > 1e-2, "generic wobble residual {seen:.3e}");
}

#[test]
fn lift_squares_to_minus_id() {
    for (name, s, _) in all_structures() {
        let lift = s.lift().unwrap();
        for p in sample_points(s.chart(), 42, 10) {
            let mut coords = p.coords().to_vec();
            coords.push(0.3);
            let lp = lift.chart.point(coords).unwrap();
            let r = lift.square_residual(&lp).unwrap();
            assert!(r < 1e-10, "{name}: |Jt^2 + Id| = {r:.3e}");
        }
    }
}

#[test]
fn covariant_normality_route_consequences() {
    // Substituting X = xi into the covariant route gives the xi-direction
    // identities; they must vanish on normal catalogs.
    for (name, s, normal) in all_structures() {
        if !normal {
            continue;
        }
        for p in sample_points(s.chart(), 42, 20) {
            let xi = s.xi_at(&p).unwrap();
            let g = s.chart().metric_at(&p).unwrap();
            for d in 0..s.dim() {
                let mut y = DVector::zeros(s.dim());
                y[d] = 1.0;
                let r = s.covariant_normality_residual(&p, &xi, &y).unwrap();
                assert!(
                    vec_g_norm(&r, &g) < 1e-8,
                    "{name}: xi-substitution residual {:.3e}",
                    vec_g_norm(&r, &g)
                );
            }
            assert!(s.normality_consequence_residual(&p).unwrap() < 1e-8, "{name}");
        }
    }
}

#[test]
fn killing_residuals_on_normal_catalogs() {
    for (name, s, normal) in all_structures() {
        if !normal {
            continue;
        }
        for p in sample_points(s.chart(), 42, 20) {
            let k = s.killing_residual(&p).unwrap();
            assert!(k.max() < 1e-8, "{name}: killing residuals {k:?}");
        }
    }
}

#[test]
fn bracket_pairing_identity_for_killing_field() {
    // g([X,Y], xi) = -2 g(Y, nabla_X xi) for horizontal fields on normal
    // structures.
    for s in [heis_3(), sphere_3()] {
        let theta = s.theta_field();
        let _ = &theta;
        for p in sample_points(s.chart(), 42, 10) {
            let g = s.chart().metric_at(&p).unwrap();
            let eta = s.eta_field();
            let xi_f = s.xi_field();
            for c in 0..3 {
                for d in (c + 1)..3 {
                    // Horizontal projections of coordinate fields, as fields.
                    let x = TensorField::project_horizontal(s.contact(), &s.coordinate_field(c));
                    let y = TensorField::project_horizontal(s.contact(), &s.coordinate_field(d));
                    let b = acmgeo::geometry::lie_bracket(&x, &y, &p).unwrap();
                    let xi = xi_f.value_at(&p).unwrap().as_vector();
                    let lhs = (b.transpose() * &g * &xi)[(0, 0)];
                    let nxi = s.nabla_xi_at(&p).unwrap();
                    let xv = x.value_at(&p).unwrap().as_vector();
                    let yv = y.value_at(&p).unwrap().as_vector();
                    let rhs = -2.0 * (yv.transpose() * &g * (&nxi * &xv))[(0, 0)];
                    assert!((lhs - rhs).abs() < 1e-8, "bracket pairing {:.3e}", (lhs - rhs).abs());
                    let _ = &eta;
                }
            }
        }
    }
}

#[test]
fn horizontal_holomorphy_on_normal_catalogs() {
    for (name, s, normal) in all_structures() {
        let points = sample_points(s.chart(), 42, 15);
        let mut worst = 0.0f64;
        for p in &points {
            let g = s.chart().metric_at(&p).unwrap();
            let eta = s.eta_at(&p).unwrap();
            let xi = s.xi_at(&p).unwrap();
            for c in 0..s.dim() {
                for d in 0..s.dim() {
                    let mut x = DVector::zeros(s.dim());
                    x[c] = 1.0;
                    let mut y = DVector::zeros(s.dim());
                    y[d] = 1.0;
                    let hx = &x - &xi * eta.dot(&x);
                    let hy = &y - &xi * eta.dot(&y);
                    let r = s.horizontal_holomorphy_residual(&p, &hx, &hy).unwrap();
                    worst = worst.max(vec_g_norm(&r, &g));
                }
            }
        }
        if normal {
            assert!(worst < 1e-8, "{name}: holomorphy residual {worst:.3e}");
        } else {
            assert!(worst > 1e-4, "{name}: expected broken holomorphy, got {worst:.3e}");
        }
    }
}

#[test]
fn non_horizontal_inputs_are_rejected() {
    let s = heis_3();
    let p = s.chart().point(vec![0.2, 0.3, 0.1]).unwrap();
    let xi = s.xi_at(&p).unwrap();
    let mut y = DVector::zeros(3);
    y[0] = 1.0;
    assert!(s.horizontal_holomorphy_residual(&p, &xi, &y).is_err());
}
