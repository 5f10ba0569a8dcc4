//! Manifest-driven check orchestration shared by the CLI and test suites.

use crate::acms::AcmStructure;
use crate::catalog;
use crate::dsl::ScalarExpr;
use crate::error::GeomError;
use crate::fibration::{
    self, base_harmonicity_at, conformal_curvature_check, conformal_lee_check,
    submersion_crosscheck, SubmersionContext, TwistedProduct,
};
use crate::geometry::chart::{Axis, ChartManifold, Point};
use crate::geometry::connection::riemann_at;
use crate::geometry::frame::adapted_frame;
use crate::geometry::tensor::Valence;
use crate::geometry::TensorField;
use crate::harmonicity::ContactConnection;
use crate::report::{CheckReport, Environment, Report, Verdict};
use crate::sampling::sample_points;
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("E_PARSE {location}: {message}")]
    Parse { location: String, message: String },
    #[error("E_CATALOG unknown id `{0}`")]
    Catalog(String),
    #[error("E_CATALOG unknown check `{0}`")]
    Check(String),
    #[error("E_DOMAIN {location}: {source}")]
    Domain { location: String, source: GeomError },
    #[error("E_MANIFEST {0}")]
    Manifest(String),
}

fn domain_err(location: &str) -> impl Fn(GeomError) -> InputError + '_ {
    move |source| InputError::Domain { location: location.to_string(), source }
}

// ---------------------------------------------------------------------------
// Manifest model
// ---------------------------------------------------------------------------

fn default_samples() -> usize {
    100
}

fn default_seed() -> u64 {
    crate::sampling::DEFAULT_SEED
}

fn default_tolerance() -> f64 {
    1e-6
}

fn default_jet_order() -> usize {
    3
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub manifold: ManifoldSpec,
    pub checks: Vec<String>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_jet_order")]
    pub jet_order: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ManifoldSpec {
    Catalog { catalog: String },
    Twist { twist: TwistSpec },
    Custom { custom: CustomSpec },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSpec {
    pub base: String,
    pub f: String,
    #[serde(rename = "F")]
    pub big_f: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    pub dim: usize,
    /// Per-axis `[lo, hi]` or `[lo, hi, 1.0]` for periodic axes.
    pub domain: Vec<Vec<f64>>,
    #[serde(default)]
    pub coords: Option<Vec<String>>,
    pub metric: Vec<String>,
    pub theta: Vec<String>,
    pub xi: Vec<String>,
    pub eta: Vec<String>,
}

/// A resolved manifold: a bare structure or a twisted product (which also
/// carries its structure).
pub enum Handle {
    Structure { id: String, structure: AcmStructure },
    Twist { id: String, product: Arc<TwistedProduct> },
}

impl Handle {
    pub fn structure(&self) -> &AcmStructure {
        match self {
            Handle::Structure { structure, .. } => structure,
            Handle::Twist { product, .. } => &product.structure,
        }
    }

    pub fn id(&self) -> &str {
        match self {
            Handle::Structure { id, .. } => id,
            Handle::Twist { id, .. } => id,
        }
    }

    pub fn product(&self) -> Option<&Arc<TwistedProduct>> {
        match self {
            Handle::Twist { product, .. } => Some(product),
            _ => None,
        }
    }
}

fn parse_field(
    srcs: &[String],
    vars: &[&str],
    location: &str,
) -> Result<Vec<ScalarExpr>, InputError> {
    srcs.iter()
        .enumerate()
        .map(|(i, s)| {
            ScalarExpr::parse(s, vars).map_err(|e| InputError::Parse {
                location: format!("{location}[{i}]"),
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn resolve_manifold(spec: &ManifoldSpec) -> Result<Handle, InputError> {
    match spec {
        ManifoldSpec::Catalog { catalog: id } => match catalog::structure(id) {
            Some(structure) => Ok(Handle::Structure { id: id.clone(), structure }),
            None => Err(InputError::Catalog(id.clone())),
        },
        ManifoldSpec::Twist { twist } => {
            let product = catalog::twist(&twist.base, &twist.f, &twist.big_f).map_err(|e| {
                match e {
                    GeomError::Dimension(msg) if msg.starts_with("unknown base") => {
                        InputError::Catalog(twist.base.clone())
                    }
                    GeomError::Dimension(msg) if msg.starts_with("warping") => {
                        InputError::Parse { location: "twist".into(), message: msg }
                    }
                    other => InputError::Domain { location: "twist".into(), source: other },
                }
            })?;
            Ok(Handle::Twist {
                id: format!("twist({}, f={}, F={})", twist.base, twist.f, twist.big_f),
                product: Arc::new(product),
            })
        }
        ManifoldSpec::Custom { custom } => {
            let dim = custom.dim;
            if custom.domain.len() != dim {
                return Err(InputError::Manifest(format!(
                    "custom manifold: {} domain axes for dim {dim}",
                    custom.domain.len()
                )));
            }
            let default_names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
            let names = custom.coords.clone().unwrap_or(default_names);
            if names.len() != dim {
                return Err(InputError::Manifest("custom manifold: coords length != dim".into()));
            }
            let vars: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let mut axes = Vec::with_capacity(dim);
            for (i, d) in custom.domain.iter().enumerate() {
                match d.as_slice() {
                    [lo, hi] => axes.push(Axis::open(*lo, *hi)),
                    [lo, hi, p] if *p != 0.0 => axes.push(Axis::periodic(*lo, *hi)),
                    [lo, hi, _] => axes.push(Axis::open(*lo, *hi)),
                    _ => {
                        return Err(InputError::Manifest(format!(
                            "custom manifold: domain[{i}] must be [lo, hi] or [lo, hi, periodic]"
                        )))
                    }
                }
            }
            let metric = parse_field(&custom.metric, &vars, "metric")?;
            let theta = parse_field(&custom.theta, &vars, "theta")?;
            let xi = parse_field(&custom.xi, &vars, "xi")?;
            let eta = parse_field(&custom.eta, &vars, "eta")?;
            let chart = ChartManifold::new("custom", axes, names.clone(), metric)
                .map_err(|e| InputError::Domain { location: "custom chart".into(), source: e })?;
            let structure = AcmStructure::new(chart, theta, xi, eta)
                .map_err(|e| InputError::Domain { location: "custom structure".into(), source: e })?;
            Ok(Handle::Structure { id: "custom".into(), structure })
        }
    }
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

pub const CHECK_NAMES: &[&str] = &[
    "geometry",
    "compat",
    "normality",
    "normality-cov",
    "normality-lift",
    "tri-equivalence",
    "killing",
    "horizontal-holomorphy",
    "xi-harmonic",
    "hse1",
    "hse2",
    "hse1-identity",
    "hse2-identity",
    "combined",
    "combined-coherence",
    "rbar-split",
    "sphere-commutator",
    "lee-trace",
    "horizontal-bracket",
    "harmonic-map",
    "oneill",
    "submersion",
    "conformal-lee",
    "conformal-curvature",
    "base-harmonicity",
];

struct Ctx<'a> {
    handle: &'a Handle,
    points: Vec<Point>,
    tolerance: f64,
    seed: u64,
}

impl Ctx<'_> {
    fn sweep(
        &self,
        name: &str,
        mut f: impl FnMut(&Point) -> Result<f64, GeomError>,
    ) -> Result<CheckReport, InputError> {
        let mut worst = 0.0f64;
        for p in &self.points {
            worst = worst.max(f(p).map_err(domain_err(name))?);
        }
        Ok(CheckReport::from_max(name, self.points.len(), worst, self.tolerance))
    }
}

fn deterministic_affine_fields(s: &AcmStructure, p: &Point) -> (TensorField, TensorField) {
    let dim = s.dim();
    let mk = |salt: usize| {
        let value = DVector::from_fn(dim, |a, _| ((a + salt) as f64 * 0.7 + 0.3).sin() + 0.2);
        let slope =
            DMatrix::from_fn(dim, dim, |a, e| ((a * dim + e + 3 * salt) as f64 * 0.41).cos() * 0.5);
        TensorField::affine_vector(s.chart().clone(), p, value, slope)
    };
    (mk(1), mk(2))
}

fn geometry_residual(s: &AcmStructure, p: &Point) -> Result<f64, GeomError> {
    let chart = s.chart();
    let dim = s.dim();
    chart.validate_metric_at(p)?;
    let g = chart.metric_at(p)?;

    // Metric compatibility of the connection.
    let metric_field =
        TensorField::from_exprs(chart.clone(), Valence::new(0, 2), chart.metric_exprs().to_vec())?;
    let ng = metric_field.covariant_derivative(None)?.value_at(p)?;
    let mut worst = ng.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    // Torsion-free: [X,Y] = nabla_X Y - nabla_Y X for affine probe fields.
    let (xf, yf) = deterministic_affine_fields(s, p);
    let bracket = crate::geometry::connection::lie_bracket(&xf, &yf, p)?;
    let nx = xf.covariant_derivative(None)?.value_at(p)?;
    let ny = yf.covariant_derivative(None)?.value_at(p)?;
    let xv = xf.value_at(p)?.as_vector();
    let yv = yf.value_at(p)?.as_vector();
    let mut torsion = DVector::zeros(dim);
    for a in 0..dim {
        let mut acc = 0.0;
        for c in 0..dim {
            acc += ny.data[a * dim + c] * xv[c] - nx.data[a * dim + c] * yv[c];
        }
        torsion[a] = acc - bracket[a];
    }
    worst = worst.max(crate::geometry::tensor::vec_g_norm(&torsion, &g));

    // Curvature antisymmetries and the first Bianchi identity.
    let r = riemann_at(chart, p)?;
    let at = |a: usize, b: usize, c: usize, d: usize| r[((a * dim + b) * dim + c) * dim + d];
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    worst = worst.max((at(a, b, c, d) + at(a, b, d, c)).abs());
                    worst = worst
                        .max((at(a, b, c, d) + at(a, c, d, b) + at(a, d, b, c)).abs());
                    // Lowered antisymmetry in the last pair.
                    let mut low1 = 0.0;
                    let mut low2 = 0.0;
                    for e in 0..dim {
                        low1 += g[(a, e)] * at(e, b, c, d);
                        low2 += g[(b, e)] * at(e, a, c, d);
                    }
                    worst = worst.max((low1 + low2).abs());
                }
            }
        }
    }

    // Adapted frame orthonormality.
    let xi = s.xi_at(p)?;
    let frame = adapted_frame(chart, p, &xi)?;
    let gram = frame.gram(chart, p)?;
    worst = worst.max((gram - DMatrix::<f64>::identity(dim, dim)).norm());
    Ok(worst)
}

fn tri_equivalence_report(ctx: &Ctx) -> Result<CheckReport, InputError> {
    let s = ctx.handle.structure();
    let name = "tri-equivalence";
    let mut worst = [0.0f64; 3];
    for p in &ctx.points {
        worst[0] = worst[0].max(s.normality_sweep(p).map_err(domain_err(name))?);
        worst[1] = worst[1].max(s.covariant_normality_sweep(p).map_err(domain_err(name))?);
    }
    let lift = s.lift().map_err(domain_err(name))?;
    for p in &ctx.points {
        worst[2] = worst[2].max(lift.nijenhuis_sweep(p).map_err(domain_err(name))?);
    }
    let all_small = worst.iter().all(|&w| w < 1e-7);
    let all_large = worst.iter().all(|&w| w > 1e-4);
    let max = worst.iter().cloned().fold(0.0f64, f64::max);
    let verdict = if all_small || all_large { Verdict::Pass } else { Verdict::Fail };
    Ok(CheckReport {
        name: name.into(),
        points: ctx.points.len(),
        max_residual: max,
        tolerance: 1e-7,
        verdict,
    })
}

fn combined_coherence_report(ctx: &Ctx) -> Result<CheckReport, InputError> {
    let s = ctx.handle.structure();
    let name = "combined-coherence";
    let cc = ContactConnection::new(s);
    let mut conj = 0.0f64;
    let mut comb = 0.0f64;
    let mut xi_h = 0.0f64;
    let mut blocks = 0.0f64;
    for p in &ctx.points {
        let d = cc.point_data(p).map_err(domain_err(name))?;
        let hse1 = d.endo_norm(&cc.hse1_residual(p).map_err(domain_err(name))?);
        let hse2 = d.vec_norm(&cc.hse2_residual(p).map_err(domain_err(name))?);
        let combined = cc.combined_residual(p).map_err(domain_err(name))?;
        let xi_res = cc.xi_harmonic_residual(p).map_err(domain_err(name))?;
        conj = conj.max(hse1.max(hse2));
        comb = comb.max(d.endo_norm(&combined));
        xi_h = xi_h.max(d.vec_norm(&xi_res));

        let proj = d.projector();
        let block_f = &proj * &combined * &proj;
        let hse1_cf = cc.hse1_curvature_form(p).map_err(domain_err(name))?;
        blocks = blocks.max(d.endo_norm(&(block_f - hse1_cf)));
        let xi_col = &combined * &d.xi - xi_res.scale(2.0);
        blocks = blocks.max(d.vec_norm(&xi_col));
    }
    // Coherence only binds where xi is harmonic.
    let verdict = if xi_h < 1e-7 {
        let a = fibration::band_classify(conj, 1e-7, 1e-4);
        let b = fibration::band_classify(comb, 1e-7, 1e-4);
        if fibration::band_consistent(a, b) && blocks < ctx.tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    } else {
        Verdict::Inconclusive
    };
    Ok(CheckReport {
        name: name.into(),
        points: ctx.points.len(),
        max_residual: blocks,
        tolerance: ctx.tolerance,
        verdict,
    })
}

fn run_check(ctx: &Ctx, name: &str) -> Result<CheckReport, InputError> {
    let s = ctx.handle.structure();
    let cc = ContactConnection::new(s);
    match name {
        "geometry" => ctx.sweep(name, |p| geometry_residual(s, p)),
        "compat" => ctx.sweep(name, |p| Ok(s.compatibility_at(p)?.max())),
        "normality" => ctx.sweep(name, |p| s.normality_sweep(p)),
        "normality-cov" => ctx.sweep(name, |p| s.covariant_normality_sweep(p)),
        "normality-lift" => {
            let lift = s.lift().map_err(domain_err(name))?;
            ctx.sweep(name, |p| lift.nijenhuis_sweep(p))
        }
        "tri-equivalence" => tri_equivalence_report(ctx),
        "killing" => ctx.sweep(name, |p| {
            Ok(s.killing_residual(p)?.max().max(s.normality_consequence_residual(p)?))
        }),
        "horizontal-holomorphy" => ctx.sweep(name, |p| {
            let d = cc.point_data(p)?;
            let proj = d.projector();
            let dim = d.dim;
            let mut worst = 0.0f64;
            for c in 0..dim {
                for e in 0..dim {
                    let mut x = DVector::zeros(dim);
                    x[c] = 1.0;
                    let mut y = DVector::zeros(dim);
                    y[e] = 1.0;
                    let r = s.horizontal_holomorphy_residual(p, &(&proj * x), &(&proj * y))?;
                    worst = worst.max(d.vec_norm(&r));
                }
            }
            Ok(worst)
        }),
        "xi-harmonic" => ctx.sweep(name, |p| {
            let d = cc.point_data(p)?;
            Ok(d.vec_norm(&cc.xi_harmonic_residual(p)?))
        }),
        "hse1" => ctx.sweep(name, |p| {
            let d = cc.point_data(p)?;
            Ok(d.endo_norm(&cc.hse1_residual(p)?))
        }),
        "hse2" => ctx.sweep(name, |p| {
            let d = cc.point_data(p)?;
            Ok(d.vec_norm(&cc.hse2_residual(p)?))
        }),
        "hse1-identity" => ctx.sweep(name, |p| {
            let d = cc.point_data(p)?;
            let lhs = cc.hse1_residual(p)?;
            let rhs = cc.hse1_curvature_form(p)?;
            Ok(d.endo_norm(&(lhs - rhs)))
        }),
        "hse2-identity" => ctx.sweep(name, |p| {
            let d = cc.point_data(p)?;
            let (_, sub) = cc.hse2_curvature_form(p)?;
            Ok(d.vec_norm(&sub))
        }),
        "combined" => ctx.sweep(name, |p| {
            let d = cc.point_data(p)?;
            Ok(d.endo_norm(&cc.combined_residual(p)?))
        }),
        "combined-coherence" => combined_coherence_report(ctx),
        "rbar-split" => ctx.sweep(name, |p| cc.rbar_split_sweep(p)),
        "sphere-commutator" => ctx.sweep(name, |p| cc.sphere_commutator_residual(p)),
        "lee-trace" => ctx.sweep(name, |p| cc.lee_trace_residual(p)),
        "horizontal-bracket" => ctx.sweep(name, |p| {
            let d = cc.point_data(p)?;
            let proj = d.projector();
            let dim = d.dim;
            let mut worst = 0.0f64;
            for c in 0..dim {
                let mut x = DVector::zeros(dim);
                x[c] = 1.0;
                let sigma = &proj * x;
                let n = d.vec_norm(&sigma);
                if n < 1e-8 {
                    continue;
                }
                worst = worst.max(cc.horizontal_bracket_residual(p, &(sigma / n))?);
            }
            Ok(worst)
        }),
        "harmonic-map" => ctx.sweep(name, |p| cc.harmonic_map_sweep(p)),
        "oneill" => {
            let tp = ctx
                .handle
                .product()
                .ok_or_else(|| InputError::Manifest("check `oneill` needs a twist manifold".into()))?;
            ctx.sweep(name, |p| {
                let sc = SubmersionContext::new(&tp.structure);
                let mut worst = sc.projection_residual(p)?;
                let d = cc.point_data(p)?;
                let dim = d.dim;
                // T_xi X = 0 for horizontal X; A vertical antisymmetry.
                for c in 0..dim {
                    let mut x = DVector::zeros(dim);
                    x[c] = 1.0;
                    let hx = d.projector() * x;
                    let (_, t) = sc.oneill_at(p, &d.xi, &hx)?;
                    worst = worst.max(d.vec_norm(&t));
                }
                for c in 0..dim {
                    for e in 0..dim {
                        let mut x = DVector::zeros(dim);
                        x[c] = 1.0;
                        let mut y = DVector::zeros(dim);
                        y[e] = 1.0;
                        let hx = d.projector() * x;
                        let hy = d.projector() * y;
                        let (a_xy, _) = sc.oneill_at(p, &hx, &hy)?;
                        let (a_yx, _) = sc.oneill_at(p, &hy, &hx)?;
                        let vsum = d.eta.dot(&a_xy) + d.eta.dot(&a_yx);
                        worst = worst.max(vsum.abs());
                    }
                }
                // Vertical part of A against brackets of basic lifts.
                for c in 0..tp.base_dim() {
                    for e in 0..tp.base_dim() {
                        let x = tp.basic_lift(c);
                        let y = tp.basic_lift(e);
                        worst = worst.max(sc.vertical_bracket_residual(p, &x, &y)?);
                    }
                }
                Ok(worst)
            })
        }
        "submersion" => {
            let tp = ctx.handle.product().ok_or_else(|| {
                InputError::Manifest("check `submersion` needs a twist manifold".into())
            })?;
            let base_points = sample_points(&tp.base.chart, ctx.seed, ctx.points.len().min(24));
            let report = submersion_crosscheck(tp, &ctx.points, &base_points)
                .map_err(domain_err(name))?;
            let max = report.all().iter().cloned().fold(0.0f64, f64::max);
            let verdict = if report.section_consistent && report.map_consistent {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            Ok(CheckReport {
                name: name.into(),
                points: ctx.points.len(),
                max_residual: max,
                tolerance: ctx.tolerance,
                verdict,
            })
        }
        "conformal-lee" => {
            let tp = ctx.handle.product().ok_or_else(|| {
                InputError::Manifest("check `conformal-lee` needs a twist manifold".into())
            })?;
            let base_points = sample_points(&tp.base.chart, ctx.seed, ctx.points.len().min(24));
            let mut worst = 0.0f64;
            for p in &base_points {
                let (r1, r2) = conformal_lee_check(&tp.base, &tp.f, p).map_err(domain_err(name))?;
                worst = worst.max(r1.max(r2));
            }
            Ok(CheckReport::from_max(name, base_points.len(), worst, ctx.tolerance))
        }
        "conformal-curvature" => {
            let tp = ctx.handle.product().ok_or_else(|| {
                InputError::Manifest("check `conformal-curvature` needs a twist manifold".into())
            })?;
            let base_points = sample_points(&tp.base.chart, ctx.seed, ctx.points.len().min(24));
            let mut worst = 0.0f64;
            for p in &base_points {
                worst = worst
                    .max(conformal_curvature_check(&tp.base, &tp.f, p).map_err(domain_err(name))?);
            }
            let mut report = CheckReport::from_max(name, base_points.len(), worst, ctx.tolerance);
            if report.verdict == Verdict::Fail {
                // Disagreement flags the printed identity, not the build.
                report = report.with_verdict(Verdict::Flagged);
            }
            Ok(report)
        }
        "base-harmonicity" => {
            let tp = ctx.handle.product().ok_or_else(|| {
                InputError::Manifest("check `base-harmonicity` needs a twist manifold".into())
            })?;
            let scaled = tp.base.scaled(&tp.f).map_err(domain_err(name))?;
            let base_points = sample_points(&scaled.chart, ctx.seed, ctx.points.len().min(24));
            let mut worst = 0.0f64;
            for p in &base_points {
                let bh = base_harmonicity_at(&scaled, p).map_err(domain_err(name))?;
                worst = worst.max(bh.minus_two_convention());
            }
            Ok(CheckReport::from_max(name, base_points.len(), worst, ctx.tolerance))
        }
        other => Err(InputError::Check(other.to_string())),
    }
}

/// Run every requested check; deterministic for fixed (manifest, seed).
pub fn run_checks(manifest: &Manifest) -> Result<Report, InputError> {
    if manifest.checks.is_empty() {
        return Err(InputError::Manifest("no checks requested".into()));
    }
    if !(manifest.jet_order == 2 || manifest.jet_order == 3) {
        return Err(InputError::Manifest(format!(
            "jet_order must be 2 or 3, got {}",
            manifest.jet_order
        )));
    }
    for name in &manifest.checks {
        if !CHECK_NAMES.contains(&name.as_str()) {
            return Err(InputError::Check(name.clone()));
        }
    }
    let handle = resolve_manifold(&manifest.manifold)?;
    let points = sample_points(handle.structure().chart(), manifest.seed, manifest.samples);
    // Validate the metric once up front so bad custom manifests fail as input errors.
    for p in points.iter().take(8) {
        handle
            .structure()
            .chart()
            .validate_metric_at(p)
            .map_err(|e| InputError::Domain { location: "metric validation".into(), source: e })?;
    }
    let ctx = Ctx { handle: &handle, points, tolerance: manifest.tolerance, seed: manifest.seed };
    let mut checks = Vec::with_capacity(manifest.checks.len());
    for name in &manifest.checks {
        checks.push(run_check(&ctx, name)?);
    }
    let overall = Report::overall_of(&checks);
    Ok(Report {
        manifold: handle.id().to_string(),
        environment: Environment {
            seed: manifest.seed,
            samples: manifest.samples,
            tolerance: manifest.tolerance,
            jet_order: manifest.jet_order,
        },
        checks,
        overall,
    })
}
