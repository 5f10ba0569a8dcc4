//! Built-in charts and structures used by the test suites and the CLI.

use crate::acms::AcmStructure;
use crate::dsl::ScalarExpr;
use crate::error::{GeomError, GeomResult};
use crate::fibration::{build_twisted_product, HermitianBase, TwistedProduct};
use crate::geometry::chart::{Axis, ChartManifold};
use std::sync::Arc;

/// Descriptor of one catalog entry, for `catalog list`.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub dim: usize,
    pub normal: Option<bool>,
    pub description: &'static str,
    pub parameters: Option<&'static str>,
}

pub fn catalog_list() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            id: "flat-cosym-3",
            dim: 3,
            normal: Some(true),
            description: "flat R^3 with parallel structure: theta(dx)=dy, xi=dz",
            parameters: None,
        },
        CatalogEntry {
            id: "heis-3",
            dim: 3,
            normal: Some(true),
            description: "Heisenberg group, eta = (dz - x2 dx1)/2, xi = 2 dz, Sasakian",
            parameters: None,
        },
        CatalogEntry {
            id: "sphere-3",
            dim: 3,
            normal: Some(true),
            description: "round S^3 in a stereographic chart with the Hopf field",
            parameters: None,
        },
        CatalogEntry {
            id: "r5-wobble",
            dim: 5,
            normal: Some(false),
            description: "R^5 with a coordinate-dependent complex-structure block (not normal)",
            parameters: None,
        },
        CatalogEntry {
            id: "twist",
            dim: 0,
            normal: None,
            description: "twisted product base x S^1 with metric f^2 g + F^2 dt^2",
            parameters: Some("base: one of flat-c1|s2-round|flat-c2; f: expression in base coordinates; F: expression in base coordinates and t"),
        },
    ]
}

pub fn base_catalog_list() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            id: "flat-c1",
            dim: 2,
            normal: None,
            description: "flat R^2 with the standard rotation J",
            parameters: None,
        },
        CatalogEntry {
            id: "s2-round",
            dim: 2,
            normal: None,
            description: "round S^2 in a stereographic chart (Kaehler)",
            parameters: None,
        },
        CatalogEntry {
            id: "flat-c2",
            dim: 4,
            normal: None,
            description: "flat R^4 with the standard block J (Kaehler)",
            parameters: None,
        },
    ]
}

fn exprs(srcs: &[&str], vars: &[&str]) -> Vec<ScalarExpr> {
    srcs.iter()
        .map(|s| ScalarExpr::parse(s, vars).unwrap_or_else(|e| panic!("catalog expression `{s}`: {e}")))
        .collect()
}

/// Flat cosymplectic R^3.
pub fn flat_cosym_3() -> AcmStructure {
    let vars = ["x1", "x2", "x3"];
    let chart = ChartManifold::new(
        "flat-cosym-3",
        vec![Axis::open(-2.0, 2.0), Axis::open(-2.0, 2.0), Axis::open(-2.0, 2.0)],
        vars.iter().map(|s| s.to_string()).collect(),
        exprs(&["1", "0", "0", "0", "1", "0", "0", "0", "1"], &vars),
    )
    .expect("static chart");
    let theta = exprs(&["0", "-1", "0", "1", "0", "0", "0", "0", "0"], &vars);
    let xi = exprs(&["0", "0", "1"], &vars);
    let eta = exprs(&["0", "0", "1"], &vars);
    AcmStructure::new(chart, theta, xi, eta).expect("static structure")
}

/// Heisenberg group with its standard Sasakian structure.
pub fn heis_3() -> AcmStructure {
    let vars = ["x1", "x2", "x3"];
    let chart = ChartManifold::new(
        "heis-3",
        vec![Axis::open(-1.5, 1.5), Axis::open(-1.5, 1.5), Axis::open(-1.5, 1.5)],
        vars.iter().map(|s| s.to_string()).collect(),
        exprs(
            &[
                "(1 + x2^2)/4", "0", "-x2/4",
                "0", "1/4", "0",
                "-x2/4", "0", "1/4",
            ],
            &vars,
        ),
    )
    .expect("static chart");
    // theta(d1) = -d2, theta(d2) = d1 + x2 d3, theta(d3) = 0.
    let theta = exprs(
        &[
            "0", "1", "0",
            "-1", "0", "0",
            "0", "x2", "0",
        ],
        &vars,
    );
    let xi = exprs(&["0", "0", "2"], &vars);
    let eta = exprs(&["-x2/2", "0", "1/2"], &vars);
    AcmStructure::new(chart, theta, xi, eta).expect("static structure")
}

/// Round S^3 (stereographic chart) with the Hopf field and its Sasakian structure.
///
/// The three quadratic vector fields below are the pushforwards of the
/// left-invariant quaternionic frame; `e1` is the Hopf field, the structure
/// endomorphism maps `e2 -> e3 -> -e2` and kills `e1`.
pub fn sphere_3() -> AcmStructure {
    let vars = ["x1", "x2", "x3"];
    let rho = "(x1^2 + x2^2 + x3^2)";
    let lam2 = format!("4/(1 + {rho})^2");
    let e1 = [
        "(1 + x1^2 - x2^2 - x3^2)/2".to_string(),
        "x1*x2 - x3".to_string(),
        "x1*x3 + x2".to_string(),
    ];
    let e2 = [
        "x1*x2 + x3".to_string(),
        "(1 - x1^2 + x2^2 - x3^2)/2".to_string(),
        "x2*x3 - x1".to_string(),
    ];
    let e3 = [
        "x1*x3 - x2".to_string(),
        "x2*x3 + x1".to_string(),
        "(1 - x1^2 - x2^2 + x3^2)/2".to_string(),
    ];

    let mut metric = Vec::with_capacity(9);
    for a in 0..3 {
        for b in 0..3 {
            metric.push(if a == b { lam2.clone() } else { "0".to_string() });
        }
    }
    let chart = ChartManifold::new(
        "sphere-3",
        vec![Axis::open(-0.8, 0.8), Axis::open(-0.8, 0.8), Axis::open(-0.8, 0.8)],
        vars.iter().map(|s| s.to_string()).collect(),
        exprs(&metric.iter().map(|s| s.as_str()).collect::<Vec<_>>(), &vars),
    )
    .expect("static chart");

    // theta^a_b = lam2 * (e3^a e2^b - e2^a e3^b): sends e2 -> e3, e3 -> -e2, e1 -> 0.
    let mut theta = Vec::with_capacity(9);
    for a in 0..3 {
        for b in 0..3 {
            theta.push(format!(
                "({lam2}) * (({}) * ({}) - ({}) * ({}))",
                e3[a], e2[b], e2[a], e3[b]
            ));
        }
    }
    let eta: Vec<String> = e1.iter().map(|c| format!("({lam2}) * ({c})")).collect();

    let theta = exprs(&theta.iter().map(|s| s.as_str()).collect::<Vec<_>>(), &vars);
    let xi = exprs(&e1.iter().map(|s| s.as_str()).collect::<Vec<_>>(), &vars);
    let eta = exprs(&eta.iter().map(|s| s.as_str()).collect::<Vec<_>>(), &vars);
    AcmStructure::new(chart, theta, xi, eta).expect("static structure")
}

/// R^5 with a position-dependent orthogonal complex-structure block; fails
/// normality at generic points.
pub fn r5_wobble() -> AcmStructure {
    let vars = ["x1", "x2", "x3", "x4", "x5"];
    let mut metric = Vec::with_capacity(25);
    for a in 0..5 {
        for b in 0..5 {
            metric.push(if a == b { "1" } else { "0" });
        }
    }
    let chart = ChartManifold::new(
        "r5-wobble",
        vec![
            Axis::open(-1.0, 1.0),
            Axis::open(-1.0, 1.0),
            Axis::open(-1.0, 1.0),
            Axis::open(-1.0, 1.0),
            Axis::open(-1.0, 1.0),
        ],
        vars.iter().map(|s| s.to_string()).collect(),
        exprs(&metric, &vars),
    )
    .expect("static chart");

    // J = R(x2) J0 R(x2)^T where R rotates the (x1,x3) plane by x2.
    let c = "cos(x2)";
    let s = "sin(x2)";
    let z = "0";
    let theta_rows: [[String; 5]; 5] = [
        [z.into(), format!("-{c}"), z.into(), s.into(), z.into()],
        [c.into(), z.into(), s.into(), z.into(), z.into()],
        [z.into(), format!("-{s}"), z.into(), format!("-{c}"), z.into()],
        [format!("-{s}"), z.into(), c.into(), z.into(), z.into()],
        [z.into(), z.into(), z.into(), z.into(), z.into()],
    ];
    let theta_flat: Vec<&str> = theta_rows.iter().flatten().map(|s| s.as_str()).collect();
    let theta = exprs(&theta_flat, &vars);
    let xi = exprs(&["0", "0", "0", "0", "1"], &vars);
    let eta = exprs(&["0", "0", "0", "0", "1"], &vars);
    AcmStructure::new(chart, theta, xi, eta).expect("static structure")
}

/// Hermitian base charts for twisted products.
pub fn hermitian_base(id: &str) -> GeomResult<HermitianBase> {
    match id {
        "flat-c1" => {
            let vars = ["x1", "x2"];
            let chart = ChartManifold::new(
                "flat-c1",
                vec![Axis::open(-1.0, 1.0), Axis::open(-1.0, 1.0)],
                vars.iter().map(|s| s.to_string()).collect(),
                exprs(&["1", "0", "0", "1"], &vars),
            )?;
            HermitianBase::new(chart, exprs(&["0", "-1", "1", "0"], &vars))
        }
        "s2-round" => {
            let vars = ["x1", "x2"];
            let lam2 = "4/(1 + x1^2 + x2^2)^2";
            let chart = ChartManifold::new(
                "s2-round",
                vec![Axis::open(-0.9, 0.9), Axis::open(-0.9, 0.9)],
                vars.iter().map(|s| s.to_string()).collect(),
                exprs(&[lam2, "0", "0", lam2], &vars),
            )?;
            HermitianBase::new(chart, exprs(&["0", "-1", "1", "0"], &vars))
        }
        "flat-c2" => {
            let vars = ["x1", "x2", "x3", "x4"];
            let mut metric = Vec::with_capacity(16);
            for a in 0..4 {
                for b in 0..4 {
                    metric.push(if a == b { "1" } else { "0" });
                }
            }
            let chart = ChartManifold::new(
                "flat-c2",
                vec![
                    Axis::open(-1.0, 1.0),
                    Axis::open(-1.0, 1.0),
                    Axis::open(-1.0, 1.0),
                    Axis::open(-1.0, 1.0),
                ],
                vars.iter().map(|s| s.to_string()).collect(),
                exprs(&metric, &vars),
            )?;
            let j = [
                "0", "-1", "0", "0",
                "1", "0", "0", "0",
                "0", "0", "0", "-1",
                "0", "0", "1", "0",
            ];
            HermitianBase::new(chart, exprs(&j, &vars))
        }
        other => Err(GeomError::Dimension(format!("unknown base chart `{other}`"))),
    }
}

/// Resolve a named structure from the catalog.
pub fn structure(id: &str) -> Option<AcmStructure> {
    match id {
        "flat-cosym-3" => Some(flat_cosym_3()),
        "heis-3" => Some(heis_3()),
        "sphere-3" => Some(sphere_3()),
        "r5-wobble" => Some(r5_wobble()),
        _ => None,
    }
}

/// Whether a catalog structure is normal (used by equivalence tests).
pub fn is_normal(id: &str) -> Option<bool> {
    catalog_list().iter().find(|e| e.id == id).and_then(|e| e.normal)
}

/// Build a twisted product from catalog base id and warping expressions.
pub fn twist(base_id: &str, f: &str, big_f: &str) -> GeomResult<TwistedProduct> {
    let base = hermitian_base(base_id)?;
    build_twisted_product(base, f, big_f)
}

/// The twisted-product instances exercised by the verification suites.
pub fn standard_twists() -> Vec<(&'static str, Arc<TwistedProduct>)> {
    let mk = |b, f, ff| Arc::new(twist(b, f, ff).expect("static twist instance"));
    vec![
        ("twist-flat", mk("flat-c1", "1", "1")),
        ("twist-s2-ft", mk("s2-round", "1", "1 + 0.3*sin(t)")),
        ("twist-s2-f", mk("s2-round", "1 + 0.2*x1^2/(1 + x1^2 + x2^2)", "1")),
        ("twist-c2-f", mk("flat-c2", "1 + 0.1*x1^2 + 0.05*x2*x3", "1")),
    ]
}
