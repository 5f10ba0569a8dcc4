//! Twisted products base x S^1, submersion projections and O'Neill tensors,
//! and the conformal-change identities for the base complex structure.

use crate::acms::AcmStructure;
use crate::dsl::ScalarExpr;
use crate::error::{GeomError, GeomResult};
use crate::geometry::chart::{Axis, ChartManifold, Point};
use crate::geometry::connection::{lie_bracket, riemann_at};
use crate::geometry::field::TensorField;
use crate::geometry::frame::gram_schmidt;
use crate::geometry::tensor::{endo_g_norm, vec_g_norm, Valence};
use crate::harmonicity::ContactConnection;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::TAU;
use std::sync::Arc;

/// An even-dimensional chart with a compatible integrable complex structure.
#[derive(Clone)]
pub struct HermitianBase {
    pub chart: Arc<ChartManifold>,
    j_exprs: Vec<ScalarExpr>,
}

impl HermitianBase {
    pub fn new(chart: Arc<ChartManifold>, j_exprs: Vec<ScalarExpr>) -> GeomResult<HermitianBase> {
        let dim = chart.dim();
        if dim % 2 != 0 {
            return Err(GeomError::NonHermitianBase(format!("odd dimension {dim}")));
        }
        if j_exprs.len() != dim * dim {
            return Err(GeomError::Dimension("complex structure needs dim^2 components".into()));
        }
        Ok(HermitianBase { chart, j_exprs })
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn j_field(&self) -> TensorField {
        TensorField::from_exprs(self.chart.clone(), Valence::new(1, 1), self.j_exprs.clone())
            .expect("validated at construction")
    }

    pub fn j_exprs(&self) -> &[ScalarExpr] {
        &self.j_exprs
    }

    /// Max of the Hermitian-structure residuals at a point:
    /// `|J^2 + Id|`, `|g(J.,J.) - g|` and the Nijenhuis tensor of J.
    pub fn validate_at(&self, p: &Point) -> GeomResult<f64> {
        let dim = self.dim();
        let g = self.chart.metric_at(p)?;
        let ginv = self.chart.inverse_metric_at(p)?;
        let j = self.j_field().value_at(p)?.as_endo();
        let sq = &j * &j + DMatrix::<f64>::identity(dim, dim);
        let compat = j.transpose() * &g * &j - &g;
        let compat_norm = (&ginv * &compat * &ginv * &compat).trace().max(0.0).sqrt();
        let mut worst = endo_g_norm(&sq, &g, &ginv).max(compat_norm);

        let jf = self.j_field();
        for c in 0..dim {
            for d in c + 1..dim {
                let mut xd = vec![0.0; dim];
                xd[c] = 1.0;
                let mut yd = vec![0.0; dim];
                yd[d] = 1.0;
                let x = TensorField::constant(self.chart.clone(), Valence::new(1, 0), xd);
                let y = TensorField::constant(self.chart.clone(), Valence::new(1, 0), yd);
                let jx = TensorField::apply_endo(&jf, &x);
                let jy = TensorField::apply_endo(&jf, &y);
                let n = &j * (&j * lie_bracket(&x, &y, p)?) + lie_bracket(&jx, &jy, p)?
                    - &j * lie_bracket(&jx, &y, p)?
                    - &j * lie_bracket(&x, &jy, p)?;
                worst = worst.max(vec_g_norm(&n, &g));
            }
        }
        Ok(worst)
    }

    /// The same base with metric scaled to `f^2 g`.
    pub fn scaled(&self, f: &ScalarExpr) -> GeomResult<HermitianBase> {
        let dim = self.dim();
        let f2 = f.clone().powi(2);
        let mut metric = Vec::with_capacity(dim * dim);
        for e in self.chart.metric_exprs() {
            metric.push(f2.clone().mul(e.clone()));
        }
        let chart = ChartManifold::new(
            format!("{}-scaled", self.chart.name()),
            self.chart.axes().to_vec(),
            self.chart.coord_names().iter().map(|s| s.to_string()).collect(),
            metric,
        )?;
        Ok(HermitianBase { chart, j_exprs: self.j_exprs.clone() })
    }
}

/// The twisted product base x S^1 with metric `f^2 g + F^2 dt^2` and its
/// almost contact structure.
pub struct TwistedProduct {
    pub base: HermitianBase,
    pub f: ScalarExpr,
    pub big_f: ScalarExpr,
    pub structure: AcmStructure,
}

impl TwistedProduct {
    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    /// Basic lift of a base coordinate field.
    pub fn basic_lift(&self, c: usize) -> TensorField {
        let dim = self.structure.dim();
        assert!(c < dim - 1);
        let mut data = vec![0.0; dim];
        data[c] = 1.0;
        TensorField::constant(self.structure.chart().clone(), Valence::new(1, 0), data)
    }

    /// Base point under the projection (drop the circle coordinate).
    pub fn project_point(&self, p: &Point) -> GeomResult<Point> {
        let mut coords = p.coords().to_vec();
        coords.pop();
        self.base.chart.point(coords)
    }
}

fn lattice(chart: &ChartManifold, per_axis: usize) -> Vec<Point> {
    let dim = chart.dim();
    let axes = chart.axes();
    let mut out = Vec::new();
    let total = per_axis.pow(dim as u32);
    for k in 0..total {
        let mut rem = k;
        let mut coords = Vec::with_capacity(dim);
        for a in axes.iter() {
            let i = rem % per_axis;
            rem /= per_axis;
            let frac = (i as f64 + 0.5) / per_axis as f64;
            coords.push(a.lo + frac * a.width());
        }
        if let Ok(p) = chart.point(coords) {
            out.push(p);
        }
    }
    out
}

/// Assemble a twisted product. `f` is an expression over the base
/// coordinates, `big_f` over base coordinates plus `t`; both must stay away
/// from zero on the domain.
pub fn build_twisted_product(
    base: HermitianBase,
    f_src: &str,
    big_f_src: &str,
) -> GeomResult<TwistedProduct> {
    let base_dim = base.dim();
    let base_names = base.chart.coord_names();
    let f = ScalarExpr::parse(f_src, &base_names).map_err(|e| {
        GeomError::Dimension(format!("warping f: {e}"))
    })?;
    let mut product_names: Vec<&str> = base_names.clone();
    product_names.push("t");
    let big_f = ScalarExpr::parse(big_f_src, &product_names).map_err(|e| {
        GeomError::Dimension(format!("warping F: {e}"))
    })?;

    // Hermitian-base and nonvanishing preconditions, on a coarse lattice.
    for p in lattice(&base.chart, 3) {
        let res = base.validate_at(&p)?;
        if res > 1e-8 {
            return Err(GeomError::NonHermitianBase(format!(
                "residual {res:.3e} at {:?}",
                p.coords()
            )));
        }
    }

    let dim = base_dim + 1;
    let mut axes = base.chart.axes().to_vec();
    axes.push(Axis::periodic(0.0, TAU));
    let names: Vec<String> = product_names.iter().map(|s| s.to_string()).collect();

    let f2 = f.clone().powi(2);
    let mut metric = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            let expr = if a < base_dim && b < base_dim {
                f2.clone().mul(base.chart.metric_exprs()[a * base_dim + b].clone())
            } else if a == base_dim && b == base_dim {
                big_f.clone().powi(2)
            } else {
                ScalarExpr::constant(0.0)
            };
            metric.push(expr);
        }
    }
    let chart = ChartManifold::new(
        format!("twist({})", base.chart.name()),
        axes,
        names,
        metric,
    )?;

    let mut min_f = f64::INFINITY;
    let mut min_big_f = f64::INFINITY;
    for p in lattice(&chart, 3) {
        min_f = min_f.min(f.eval_values(&p.coords()[..base_dim])?.abs());
        min_big_f = min_big_f.min(big_f.eval_values(p.coords())?.abs());
    }
    if min_f <= 1e-3 {
        return Err(GeomError::VanishingWarp { name: "f", min: min_f });
    }
    if min_big_f <= 1e-3 {
        return Err(GeomError::VanishingWarp { name: "F", min: min_big_f });
    }

    let mut theta = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            theta.push(if a < base_dim && b < base_dim {
                base.j_exprs[a * base_dim + b].clone()
            } else {
                ScalarExpr::constant(0.0)
            });
        }
    }
    let mut xi = vec![ScalarExpr::constant(0.0); base_dim];
    xi.push(ScalarExpr::constant(1.0).div(big_f.clone()));
    let mut eta = vec![ScalarExpr::constant(0.0); base_dim];
    eta.push(big_f.clone());

    let structure = AcmStructure::new(chart, theta, xi, eta)?;
    Ok(TwistedProduct { base, f, big_f, structure })
}

/// Horizontal/vertical projections and O'Neill tensors of the submersion
/// determined by a unit vertical field.
pub struct SubmersionContext<'a> {
    pub structure: &'a AcmStructure,
}

impl<'a> SubmersionContext<'a> {
    pub fn new(structure: &'a AcmStructure) -> SubmersionContext<'a> {
        SubmersionContext { structure }
    }

    /// (H, V) projector matrices at a point.
    pub fn projections_at(&self, p: &Point) -> GeomResult<(DMatrix<f64>, DMatrix<f64>)> {
        let dim = self.structure.dim();
        let xi = self.structure.xi_at(p)?;
        let eta = self.structure.eta_at(p)?;
        let v = DMatrix::from_fn(dim, dim, |a, b| xi[a] * eta[b]);
        let h = DMatrix::<f64>::identity(dim, dim) - &v;
        Ok((h, v))
    }

    /// Projection-algebra residual: `H+V-Id`, `H^2-H`, `V^2-V`, `HV`, `eta o V - eta`.
    pub fn projection_residual(&self, p: &Point) -> GeomResult<f64> {
        let (h, v) = self.projections_at(p)?;
        let dim = self.structure.dim();
        let eta = self.structure.eta_at(p)?;
        let id = DMatrix::<f64>::identity(dim, dim);
        let mut worst = (&h + &v - &id).norm();
        worst = worst.max((&h * &h - &h).norm());
        worst = worst.max((&v * &v - &v).norm());
        worst = worst.max((&h * &v).norm());
        worst = worst.max((v.transpose() * &eta - &eta).norm());
        Ok(worst)
    }

    /// O'Neill tensors on value arguments:
    /// `A_E G = H (nabla_{HE} V)(G) - V (nabla_{HE} V)(G)` (and T with VE),
    /// both tensorial through the derivative of the vertical projector.
    pub fn oneill_at(
        &self,
        p: &Point,
        e: &DVector<f64>,
        gvec: &DVector<f64>,
    ) -> GeomResult<(DVector<f64>, DVector<f64>)> {
        let s = self.structure;
        let dim = s.dim();
        let (h, v) = self.projections_at(p)?;
        let vfield = TensorField::from_exprs(
            s.chart().clone(),
            Valence::new(1, 1),
            s.contact().v_exprs.clone(),
        )?;
        let nv = vfield.covariant_derivative(None)?.value_at(p)?;
        let nv_dir = |dir: &DVector<f64>| -> DMatrix<f64> {
            DMatrix::from_fn(dim, dim, |a, b| {
                (0..dim).map(|c| nv.data[(a * dim + b) * dim + c] * dir[c]).sum()
            })
        };
        let he = &h * e;
        let ve = &v * e;
        let a_part = nv_dir(&he) * gvec;
        let t_part = nv_dir(&ve) * gvec;
        let a = &h * &a_part - &v * &a_part;
        let t = &h * &t_part - &v * &t_part;
        Ok((a, t))
    }

    /// `V(A_X Y) - (1/2) V([X, Y])` for horizontal vector fields; zero by
    /// O'Neill's integrability formula.
    pub fn vertical_bracket_residual(
        &self,
        p: &Point,
        x: &TensorField,
        y: &TensorField,
    ) -> GeomResult<f64> {
        let s = self.structure;
        let (_, v) = self.projections_at(p)?;
        let xv = x.value_at(p)?.as_vector();
        let yv = y.value_at(p)?.as_vector();
        let (a_xy, _) = self.oneill_at(p, &xv, &yv)?;
        let bracket = lie_bracket(x, y, p)?;
        let g = s.chart().metric_at(p)?;
        Ok(vec_g_norm(&(&v * a_xy - (&v * bracket).scale(0.5)), &g))
    }
}

/// Curvature commutator and Lee term of an (almost) Hermitian chart:
/// `Rcomm = [sum_i R(F_i, J F_i), J]` and `Lee = nabla_{delta J} J`.
pub struct BaseHarmonicity {
    pub rcomm: DMatrix<f64>,
    pub lee_term: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
}

impl BaseHarmonicity {
    /// |Rcomm + 2 Lee| — the combination matching the merged odd-dimensional equation.
    pub fn minus_two_convention(&self) -> f64 {
        endo_g_norm(&(&self.rcomm + self.lee_term.scale(2.0)), &self.g, &self.ginv)
    }

    /// |Rcomm - Lee| — the alternative printed coefficient.
    pub fn plus_one_convention(&self) -> f64 {
        endo_g_norm(&(&self.rcomm - &self.lee_term), &self.g, &self.ginv)
    }
}

pub fn base_harmonicity_at(base: &HermitianBase, p: &Point) -> GeomResult<BaseHarmonicity> {
    let dim = base.dim();
    let chart = base.chart.as_ref();
    let g = chart.metric_at(p)?;
    let ginv = chart.inverse_metric_at(p)?;
    let j = base.j_field().value_at(p)?.as_endo();
    let nj = base.j_field().covariant_derivative(None)?.value_at(p)?;
    let r = riemann_at(chart, p)?;

    // Full-frame trace m^{cd} = J^d_e g^{ce}.
    let mut rsum = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            let mut acc = 0.0;
            for c in 0..dim {
                for d in 0..dim {
                    let mut m = 0.0;
                    for e in 0..dim {
                        m += j[(d, e)] * ginv[(c, e)];
                    }
                    acc += r[((a * dim + b) * dim + c) * dim + d] * m;
                }
            }
            rsum[(a, b)] = acc;
        }
    }
    let rcomm = &rsum * &j - &j * &rsum;

    let lee = DVector::from_fn(dim, |a, _| {
        let mut acc = 0.0;
        for b in 0..dim {
            for c in 0..dim {
                acc += nj.data[(a * dim + b) * dim + c] * ginv[(b, c)];
            }
        }
        acc
    });
    let lee_term = DMatrix::from_fn(dim, dim, |a, b| {
        (0..dim).map(|c| nj.data[(a * dim + b) * dim + c] * lee[c]).sum()
    });
    Ok(BaseHarmonicity { rcomm, lee_term, g, ginv })
}

/// Lee field `delta J` of a Hermitian chart.
pub fn base_lee_field(base: &HermitianBase, p: &Point) -> GeomResult<DVector<f64>> {
    let dim = base.dim();
    let ginv = base.chart.inverse_metric_at(p)?;
    let nj = base.j_field().covariant_derivative(None)?.value_at(p)?;
    Ok(DVector::from_fn(dim, |a, _| {
        let mut acc = 0.0;
        for b in 0..dim {
            for c in 0..dim {
                acc += nj.data[(a * dim + b) * dim + c] * ginv[(b, c)];
            }
        }
        acc
    }))
}

/// Harmonic-map pairing of the base complex structure for a direction X:
/// `sum_{i,j} <(nabla_{E_i} J)(E_j), [R(E_i, X), J] E_j>`.
pub fn base_harmonic_map_residual(
    base: &HermitianBase,
    p: &Point,
    x: &DVector<f64>,
) -> GeomResult<f64> {
    let dim = base.dim();
    let chart = base.chart.as_ref();
    let g = chart.metric_at(p)?;
    let j = base.j_field().value_at(p)?.as_endo();
    let nj = base.j_field().covariant_derivative(None)?.value_at(p)?;
    let r = riemann_at(chart, p)?;
    let mut seeds = Vec::with_capacity(dim);
    for e in 0..dim {
        let mut v = DVector::zeros(dim);
        v[e] = 1.0;
        seeds.push(v);
    }
    let frame = gram_schmidt(chart, p, &seeds)?;
    let ip = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &g * v)[(0, 0)];
    let nj_dir = |dir: &DVector<f64>| -> DMatrix<f64> {
        DMatrix::from_fn(dim, dim, |a, b| {
            (0..dim).map(|c| nj.data[(a * dim + b) * dim + c] * dir[c]).sum()
        })
    };
    let mut total = 0.0;
    for e_i in &frame.vectors {
        let nji = nj_dir(e_i);
        for e_j in &frame.vectors {
            let lhs = &nji * e_j;
            let rx = crate::geometry::connection::curvature_apply(&r, dim, e_i, x, &(&j * e_j));
            let rx2 = crate::geometry::connection::curvature_apply(&r, dim, e_i, x, e_j);
            let commut = rx - &j * rx2;
            total += ip(&lhs, &commut);
        }
    }
    Ok(total)
}

pub fn base_harmonic_map_sweep(base: &HermitianBase, p: &Point) -> GeomResult<f64> {
    let dim = base.dim();
    let mut worst = 0.0f64;
    for c in 0..dim {
        let mut x = DVector::zeros(dim);
        x[c] = 1.0;
        worst = worst.max(base_harmonic_map_residual(base, p, &x)?.abs());
    }
    Ok(worst)
}

/// Residuals of the conformal Lee-field formula
/// `delta_{f^2 g} J = (1/f^2) delta_g J + 2(n-1)/f^3 J grad_g f`
/// and of the expanded conformal derivative identity evaluated on probe
/// vectors. Both computed through two independent Christoffel pipelines.
pub fn conformal_lee_check(
    base: &HermitianBase,
    f: &ScalarExpr,
    p: &Point,
) -> GeomResult<(f64, f64)> {
    let dim = base.dim();
    let n = dim / 2;
    let scaled = base.scaled(f)?;
    let lee_scaled = base_lee_field(&scaled, p)?;

    let g = base.chart.metric_at(p)?;
    let ginv = base.chart.inverse_metric_at(p)?;
    let j = base.j_field().value_at(p)?.as_endo();
    let lee_g = base_lee_field(base, p)?;

    let fv = f.eval_values(p.coords())?;
    let fjet: Vec<f64> = {
        let mut out = vec![0.0; dim];
        for (c, slot) in out.iter_mut().enumerate() {
            let ray = crate::geometry::chart::Ray::axis(p, c);
            *slot = f.eval(&ray.seed(1))?.deriv(1);
        }
        out
    };
    let df = DVector::from_column_slice(&fjet);
    let grad_f = &ginv * &df;

    let formula = &lee_g / (fv * fv) + (&j * &grad_f).scale(2.0 * (n as f64 - 1.0) / (fv * fv * fv));
    let g_scaled = scaled.chart.metric_at(p)?;
    let res1 = vec_g_norm(&(lee_scaled.clone() - formula), &g_scaled);

    // Expanded identity for (nabla^{f^2 g}_{delta_{f^2g} J} J)(X) in terms of
    // unscaled-metric quantities, evaluated on probe vectors.
    let nj_scaled = scaled.j_field().covariant_derivative(None)?.value_at(p)?;
    let nj = base.j_field().covariant_derivative(None)?.value_at(p)?;
    let nj_dir = |data: &[f64], dir: &DVector<f64>| -> DMatrix<f64> {
        DMatrix::from_fn(dim, dim, |a, b| {
            (0..dim).map(|c| data[(a * dim + b) * dim + c] * dir[c]).sum()
        })
    };
    let lhs_mat = nj_dir(&nj_scaled.data, &lee_scaled);
    let f3 = fv * fv * fv;
    let term1 = nj_dir(&nj.data, &lee_g).scale(1.0 / (fv * fv));
    let term2 = nj_dir(&nj.data, &(&j * &grad_f)).scale(2.0 * (n as f64 - 1.0) / f3);
    let ip = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &g * v)[(0, 0)];

    let mut res2 = 0.0f64;
    for c in 0..dim {
        let mut x = DVector::zeros(dim);
        x[c] = 1.0;
        let jx = &j * &x;
        let lhs = &lhs_mat * &x;
        let rhs = &term1 * &x
            + &term2 * &x
            + (&lee_g * (jx.dot(&df) / f3))
            - ((&j * &lee_g) * (x.dot(&df) / f3))
            - (&grad_f * (ip(&lee_g, &jx) / f3))
            + ((&j * &grad_f) * (ip(&lee_g, &x) / f3));
        res2 = res2.max(vec_g_norm(&(lhs - rhs), &g_scaled));
    }
    Ok((res1, res2))
}

/// Two-pipeline residual of the conformal curvature-trace identity
/// `[R^{f^2 g}(F_i, J F_i), J] = [R^g(f F_i, f J F_i), J]` with `F_i`
/// f^2 g-orthonormal.
pub fn conformal_curvature_check(
    base: &HermitianBase,
    f: &ScalarExpr,
    p: &Point,
) -> GeomResult<f64> {
    let scaled = base.scaled(f)?;
    let lhs = base_harmonicity_at(&scaled, p)?;
    let rhs = base_harmonicity_at(base, p)?;
    // rhs.rcomm is the g-pipeline trace over a g-orthonormal frame, which is
    // exactly the right-hand side with the two f factors absorbed.
    let g = base.chart.metric_at(p)?;
    let ginv = base.chart.inverse_metric_at(p)?;
    Ok(endo_g_norm(&(&lhs.rcomm - &rhs.rcomm), &g, &ginv))
}

/// Verdict bands for biconditional checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandVerdict {
    Small,
    Large,
    Inconclusive,
}

pub fn band_classify(residual: f64, small: f64, large: f64) -> BandVerdict {
    if residual < small {
        BandVerdict::Small
    } else if residual > large {
        BandVerdict::Large
    } else {
        BandVerdict::Inconclusive
    }
}

pub fn band_consistent(a: BandVerdict, b: BandVerdict) -> bool {
    !matches!(
        (a, b),
        (BandVerdict::Small, BandVerdict::Large) | (BandVerdict::Large, BandVerdict::Small)
    )
}

/// Residuals linking harmonicity of the total space of a twisted product
/// (constant f: a Riemannian submersion up to homothety) with the base.
#[derive(Clone, Debug)]
pub struct SubmersionReport {
    pub hse1: f64,
    pub hse2: f64,
    pub harmonic_map: f64,
    pub base_j: f64,
    pub xi_harmonic: f64,
    pub lee_xi: f64,
    pub base_map: f64,
    pub xi_energy: f64,
    pub section_consistent: bool,
    pub map_consistent: bool,
}

impl SubmersionReport {
    pub fn all(&self) -> [f64; 8] {
        [
            self.hse1,
            self.hse2,
            self.harmonic_map,
            self.base_j,
            self.xi_harmonic,
            self.lee_xi,
            self.base_map,
            self.xi_energy,
        ]
    }
}

/// Evaluate the section/map equivalences of a constant-f twisted product.
pub fn submersion_crosscheck(
    tp: &TwistedProduct,
    points: &[Point],
    base_points: &[Point],
) -> GeomResult<SubmersionReport> {
    // Constant-f precondition.
    let mut max_grad = 0.0f64;
    for bp in base_points {
        for c in 0..tp.base_dim() {
            let ray = crate::geometry::chart::Ray::axis(bp, c);
            max_grad = max_grad.max(tp.f.eval(&ray.seed(1))?.deriv(1).abs());
        }
    }
    if max_grad > 1e-12 {
        return Err(GeomError::NonConstantWarp(max_grad));
    }

    let cc = ContactConnection::new(&tp.structure);
    let mut hse1 = 0.0f64;
    let mut hse2 = 0.0f64;
    let mut hmap = 0.0f64;
    let mut xi_harm = 0.0f64;
    let mut lee_xi = 0.0f64;
    let mut xi_energy = 0.0f64;
    for p in points {
        let d = cc.point_data(p)?;
        hse1 = hse1.max(d.endo_norm(&cc.hse1_residual(p)?));
        hse2 = hse2.max(d.vec_norm(&cc.hse2_residual(p)?));
        hmap = hmap.max(cc.harmonic_map_sweep(p)?);
        xi_harm = xi_harm.max(d.vec_norm(&cc.xi_harmonic_residual(p)?));
        lee_xi = lee_xi.max(d.vec_norm(&(&d.nxi * d.lee_theta())));
        xi_energy = xi_energy.max(cc.xi_energy_derivative(p)?.abs());
    }

    let scaled = tp.base.scaled(&tp.f)?;
    let mut base_j = 0.0f64;
    let mut base_map = 0.0f64;
    for bp in base_points {
        let bh = base_harmonicity_at(&scaled, bp)?;
        base_j = base_j.max(bh.minus_two_convention());
        base_map = base_map.max(base_harmonic_map_sweep(&scaled, bp)?);
    }

    let small = 1e-7;
    let large = 1e-4;
    let section_a = band_classify(hse1.max(hse2), small, large);
    let section_b = band_classify(base_j.max(xi_harm).max(lee_xi), small, large);
    let map_a = band_classify(hse1.max(hse2).max(hmap), small, large);
    let map_b = band_classify(
        base_j.max(xi_harm).max(lee_xi).max(base_map).max(xi_energy),
        small,
        large,
    );
    Ok(SubmersionReport {
        hse1,
        hse2,
        harmonic_map: hmap,
        base_j,
        xi_harmonic: xi_harm,
        lee_xi,
        base_map,
        xi_energy,
        section_consistent: band_consistent(section_a, section_b),
        map_consistent: band_consistent(map_a, map_b),
    })
}

/// Compare the contact-sub-bundle block of the merged residual on the twisted
/// product against the two candidate base combinations on `(B, f^2 g)`.
/// Returns (|block - (Rcomm + 2 Lee) lift|, |block - (Rcomm - Lee) lift|).
pub fn example_block_comparison(
    tp: &TwistedProduct,
    p: &Point,
) -> GeomResult<(f64, f64)> {
    let base_dim = tp.base_dim();
    let cc = ContactConnection::new(&tp.structure);
    let d = cc.point_data(p)?;
    let combined = cc.combined_residual(p)?;
    let proj = d.projector();
    let block = &proj * combined * &proj;

    let bp = tp.project_point(p)?;
    let scaled = tp.base.scaled(&tp.f)?;
    let bh = base_harmonicity_at(&scaled, &bp)?;
    let dim = tp.structure.dim();
    let lift = |m: &DMatrix<f64>| -> DMatrix<f64> {
        DMatrix::from_fn(dim, dim, |a, b| {
            if a < base_dim && b < base_dim {
                m[(a, b)]
            } else {
                0.0
            }
        })
    };
    let cand_minus2 = lift(&(&bh.rcomm + bh.lee_term.scale(2.0)));
    let cand_plus1 = lift(&(&bh.rcomm - &bh.lee_term));
    Ok((
        d.endo_norm(&(&block - cand_minus2)),
        d.endo_norm(&(&block - cand_plus1)),
    ))
}

/// Pullback of horizontal curvature through the submersion for a constant-f
/// product: `g(R(F_i, tF_i) Z, H)` on the total space against the base
/// curvature of `(B, f^2 g)` plus the vertical-bracket correction terms.
pub fn submersion_curvature_identity(tp: &TwistedProduct, p: &Point) -> GeomResult<f64> {
    let base_dim = tp.base_dim();
    let dim = tp.structure.dim();
    let bp = tp.project_point(p)?;
    let scaled = tp.base.scaled(&tp.f)?;

    let mut seeds = Vec::new();
    for e in 0..base_dim {
        let mut v = DVector::zeros(base_dim);
        v[e] = 1.0;
        seeds.push(v);
    }
    let base_frame = gram_schmidt(&scaled.chart, &bp, &seeds)?;
    let jb = scaled.j_field().value_at(&bp)?.as_endo();
    let r_base = riemann_at(&scaled.chart, &bp)?;
    let g_base = scaled.chart.metric_at(&bp)?;

    let r_tot = riemann_at(tp.structure.chart(), p)?;
    let g_tot = tp.structure.chart().metric_at(p)?;
    let theta = tp.structure.theta_at(p)?;

    let lift = |v: &DVector<f64>| -> DVector<f64> {
        DVector::from_fn(dim, |a, _| if a < base_dim { v[a] } else { 0.0 })
    };

    let mut worst = 0.0f64;
    for fi in &base_frame.vectors {
        let fi_l = lift(fi);
        let tfi_l = &theta * &fi_l;
        let jfi = &jb * fi;
        for z in &base_frame.vectors {
            for h in &base_frame.vectors {
                let lhs_vec = crate::geometry::connection::curvature_apply(
                    &r_tot,
                    dim,
                    &fi_l,
                    &tfi_l,
                    &lift(z),
                );
                let lhs = (lhs_vec.transpose() * &g_tot * lift(h))[(0, 0)];
                let rhs_vec = crate::geometry::connection::curvature_apply(
                    &r_base, base_dim, fi, &jfi, z,
                );
                let rhs = (rhs_vec.transpose() * &g_base * h)[(0, 0)];
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(worst)
}
