//! Almost contact metric structures and the three normality routes.

use crate::dsl::ScalarExpr;
use crate::error::{GeomError, GeomResult};
use crate::geometry::chart::{Axis, ChartManifold, Point};
use crate::geometry::connection::{exterior_derivative_1form, lie_bracket};
use crate::geometry::field::{ContactData, TensorField};
use crate::geometry::tensor::{endo_g_norm, vec_g_norm, Valence};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// The triple (theta, xi, eta) over a chart, with the derived projector data.
#[derive(Clone)]
pub struct AcmStructure {
    chart: Arc<ChartManifold>,
    theta_exprs: Vec<ScalarExpr>,
    xi_exprs: Vec<ScalarExpr>,
    eta_exprs: Vec<ScalarExpr>,
    contact: Arc<ContactData>,
}

/// Residuals of the pointwise structure identities.
#[derive(Clone, Debug)]
pub struct CompatibilityResiduals {
    /// |eta(xi) - 1|
    pub unit_pairing: f64,
    /// |theta^2 + Id - eta (x) xi|
    pub square_identity: f64,
    /// max(|theta xi|, |eta o theta|)
    pub kernel: f64,
    /// |g(theta., theta.) - g + eta (x) eta|
    pub metric_compat: f64,
}

impl CompatibilityResiduals {
    pub fn max(&self) -> f64 {
        self.unit_pairing
            .max(self.square_identity)
            .max(self.kernel)
            .max(self.metric_compat)
    }
}

impl AcmStructure {
    pub fn new(
        chart: Arc<ChartManifold>,
        theta_exprs: Vec<ScalarExpr>,
        xi_exprs: Vec<ScalarExpr>,
        eta_exprs: Vec<ScalarExpr>,
    ) -> GeomResult<AcmStructure> {
        let dim = chart.dim();
        if theta_exprs.len() != dim * dim || xi_exprs.len() != dim || eta_exprs.len() != dim {
            return Err(GeomError::Dimension(
                "structure component counts do not match the chart dimension".into(),
            ));
        }
        let contact = ContactData::new(dim, &xi_exprs, &eta_exprs);
        Ok(AcmStructure { chart, theta_exprs, xi_exprs, eta_exprs, contact })
    }

    pub fn chart(&self) -> &Arc<ChartManifold> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn contact(&self) -> &Arc<ContactData> {
        &self.contact
    }

    pub fn theta_field(&self) -> TensorField {
        TensorField::from_exprs(self.chart.clone(), Valence::new(1, 1), self.theta_exprs.clone())
            .expect("validated at construction")
    }

    pub fn xi_field(&self) -> TensorField {
        TensorField::from_exprs(self.chart.clone(), Valence::new(1, 0), self.xi_exprs.clone())
            .expect("validated at construction")
    }

    pub fn eta_field(&self) -> TensorField {
        TensorField::from_exprs(self.chart.clone(), Valence::new(0, 1), self.eta_exprs.clone())
            .expect("validated at construction")
    }

    pub fn theta_exprs(&self) -> &[ScalarExpr] {
        &self.theta_exprs
    }

    pub fn xi_exprs(&self) -> &[ScalarExpr] {
        &self.xi_exprs
    }

    pub fn eta_exprs(&self) -> &[ScalarExpr] {
        &self.eta_exprs
    }

    pub fn theta_at(&self, p: &Point) -> GeomResult<DMatrix<f64>> {
        Ok(self.theta_field().value_at(p)?.as_endo())
    }

    pub fn xi_at(&self, p: &Point) -> GeomResult<DVector<f64>> {
        Ok(self.xi_field().value_at(p)?.as_vector())
    }

    pub fn eta_at(&self, p: &Point) -> GeomResult<DVector<f64>> {
        Ok(self.eta_field().value_at(p)?.as_covector())
    }

    /// `nabla theta` at a point: `out[(a*dim+b)*dim+c] = (nabla_c theta)^a_b`.
    pub fn nabla_theta_at(&self, p: &Point) -> GeomResult<Vec<f64>> {
        Ok(self.theta_field().covariant_derivative(None)?.value_at(p)?.data)
    }

    /// `nabla xi` at a point as a matrix `(a, c) -> (nabla_c xi)^a`.
    pub fn nabla_xi_at(&self, p: &Point) -> GeomResult<DMatrix<f64>> {
        let t = self.xi_field().covariant_derivative(None)?.value_at(p)?;
        let dim = self.dim();
        Ok(DMatrix::from_fn(dim, dim, |a, c| t.data[a * dim + c]))
    }

    /// Pointwise structure-identity residuals.
    pub fn compatibility_at(&self, p: &Point) -> GeomResult<CompatibilityResiduals> {
        let dim = self.dim();
        let g = self.chart.metric_at(p)?;
        let ginv = self
            .chart
            .metric_at(p)?
            .try_inverse()
            .ok_or(GeomError::SingularMetric("compatibility check"))?;
        let theta = self.theta_at(p)?;
        let xi = self.xi_at(p)?;
        let eta = self.eta_at(p)?;

        let unit_pairing = (eta.dot(&xi) - 1.0).abs();

        let mut square = &theta * &theta + DMatrix::<f64>::identity(dim, dim);
        for a in 0..dim {
            for b in 0..dim {
                square[(a, b)] -= xi[a] * eta[b];
            }
        }
        let square_identity = endo_g_norm(&square, &g, &ginv);

        let theta_xi = &theta * &xi;
        let eta_theta = theta.transpose() * &eta;
        let eta_theta_norm = (eta_theta.transpose() * &ginv * &eta_theta)[(0, 0)].max(0.0).sqrt();
        let kernel = vec_g_norm(&theta_xi, &g).max(eta_theta_norm);

        // g(theta X, theta Y) - g(X, Y) + eta(X) eta(Y), as a (0,2) tensor.
        let mut compat = theta.transpose() * &g * &theta - &g;
        for a in 0..dim {
            for b in 0..dim {
                compat[(a, b)] += eta[a] * eta[b];
            }
        }
        // Norm with both indices raised by g^{-1}.
        let metric_compat = (&ginv * &compat * &ginv * &compat).trace().max(0.0).sqrt();

        Ok(CompatibilityResiduals { unit_pairing, square_identity, kernel, metric_compat })
    }

    /// Coordinate vector field `d/dx^c` as a constant field.
    pub fn coordinate_field(&self, c: usize) -> TensorField {
        let dim = self.dim();
        let mut data = vec![0.0; dim];
        data[c] = 1.0;
        TensorField::constant(self.chart.clone(), Valence::new(1, 0), data)
    }

    /// Nijenhuis tensor of theta on two vector fields:
    /// `N(X,Y) = theta^2 [X,Y] + [tX, tY] - t[tX, Y] - t[X, tY]`.
    pub fn nijenhuis(&self, p: &Point, x: &TensorField, y: &TensorField) -> GeomResult<DVector<f64>> {
        let theta_field = self.theta_field();
        let tx = TensorField::apply_endo(&theta_field, x);
        let ty = TensorField::apply_endo(&theta_field, y);
        let theta = self.theta_at(p)?;
        let b_xy = lie_bracket(x, y, p)?;
        let b_txty = lie_bracket(&tx, &ty, p)?;
        let b_txy = lie_bracket(&tx, y, p)?;
        let b_xty = lie_bracket(x, &ty, p)?;
        Ok(&theta * (&theta * b_xy) + b_txty - &theta * b_txy - &theta * b_xty)
    }

    /// Normality residual `N_theta(X,Y) + 2 d eta(X,Y) xi`.
    pub fn normality_residual(
        &self,
        p: &Point,
        x: &TensorField,
        y: &TensorField,
    ) -> GeomResult<DVector<f64>> {
        let n = self.nijenhuis(p, x, y)?;
        let eta = self.eta_field();
        let deta = exterior_derivative_1form(&eta, p, x, y)?;
        let xi = self.xi_at(p)?;
        Ok(n + xi * (2.0 * deta))
    }

    /// Max g-norm of the normality residual over coordinate argument pairs.
    pub fn normality_sweep(&self, p: &Point) -> GeomResult<f64> {
        let dim = self.dim();
        let g = self.chart.metric_at(p)?;
        let mut worst = 0.0f64;
        for c in 0..dim {
            for d in c + 1..dim {
                let r = self.normality_residual(p, &self.coordinate_field(c), &self.coordinate_field(d))?;
                worst = worst.max(vec_g_norm(&r, &g));
            }
        }
        Ok(worst)
    }

    /// Covariant-derivative characterization of normality, pointwise in the
    /// argument values:
    /// `(nabla_X theta)(Y) - (nabla_tX theta)(tY) + <Y, nabla_tX xi> xi + eta(Y) nabla_tX xi`.
    pub fn covariant_normality_residual(
        &self,
        p: &Point,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> GeomResult<DVector<f64>> {
        let dim = self.dim();
        let g = self.chart.metric_at(p)?;
        let theta = self.theta_at(p)?;
        let xi = self.xi_at(p)?;
        let eta = self.eta_at(p)?;
        let ntheta = self.nabla_theta_at(p)?;
        let nxi = self.nabla_xi_at(p)?;

        let nabla_dir_theta = |dir: &DVector<f64>| -> DMatrix<f64> {
            DMatrix::from_fn(dim, dim, |a, b| {
                (0..dim).map(|c| ntheta[(a * dim + b) * dim + c] * dir[c]).sum()
            })
        };
        let tx = &theta * x;
        let ty = &theta * y;
        let lhs = nabla_dir_theta(x) * y;
        let mid = nabla_dir_theta(&tx) * ty;
        let nxi_tx = &nxi * &tx;
        let pair = (y.transpose() * &g * &nxi_tx)[(0, 0)];
        Ok(lhs - mid + &xi * pair + &nxi_tx * eta.dot(y))
    }

    /// Sup of the covariant normality residual over coordinate argument pairs.
    pub fn covariant_normality_sweep(&self, p: &Point) -> GeomResult<f64> {
        let dim = self.dim();
        let g = self.chart.metric_at(p)?;
        let mut worst = 0.0f64;
        for c in 0..dim {
            for d in 0..dim {
                let mut x = DVector::zeros(dim);
                x[c] = 1.0;
                let mut y = DVector::zeros(dim);
                y[d] = 1.0;
                let r = self.covariant_normality_residual(p, &x, &y)?;
                worst = worst.max(vec_g_norm(&r, &g));
            }
        }
        Ok(worst)
    }

    /// Holomorphy of the induced connection on the contact sub-bundle:
    /// `(nbar_{JX} J)(JY) - (nbar_X J)(Y)` for horizontal X, Y.
    pub fn horizontal_holomorphy_residual(
        &self,
        p: &Point,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> GeomResult<DVector<f64>> {
        let eta = self.eta_at(p)?;
        for v in [x, y] {
            let comp = eta.dot(v).abs();
            if comp > 1e-10 {
                return Err(GeomError::NonHorizontal(comp));
            }
        }
        let dim = self.dim();
        let theta = self.theta_at(p)?;
        let xi = self.xi_at(p)?;
        let ntheta = self.nabla_theta_at(p)?;
        let project = |v: DVector<f64>| -> DVector<f64> {
            let c = eta.dot(&v);
            v - &xi * c
        };
        let nabla_dir_theta = |dir: &DVector<f64>| -> DMatrix<f64> {
            DMatrix::from_fn(dim, dim, |a, b| {
                (0..dim).map(|c| ntheta[(a * dim + b) * dim + c] * dir[c]).sum()
            })
        };
        let tx = &theta * x;
        let ty = &theta * y;
        let lhs = project(nabla_dir_theta(&tx) * ty);
        let rhs = project(nabla_dir_theta(x) * y);
        Ok(lhs - rhs)
    }

    /// Killing-type residuals forced by normality: the symmetrized `nabla xi`,
    /// plus `nabla_xi xi` and `nabla_xi theta`.
    pub fn killing_residual(&self, p: &Point) -> GeomResult<KillingResiduals> {
        let dim = self.dim();
        let g = self.chart.metric_at(p)?;
        let ginv = self.chart.inverse_metric_at(p)?;
        let nxi = self.nabla_xi_at(p)?;
        let xi = self.xi_at(p)?;
        // (L_xi g)(X,Y) = g(nabla_X xi, Y) + g(nabla_Y xi, X)
        let a = &g * &nxi;
        let sym = &a + a.transpose();
        let killing = (&ginv * &sym * &ginv * &sym).trace().max(0.0).sqrt();
        let geodesic = vec_g_norm(&(&nxi * &xi), &g);
        let ntheta = self.nabla_theta_at(p)?;
        let ntheta_xi = DMatrix::from_fn(dim, dim, |a_, b| {
            (0..dim).map(|c| ntheta[(a_ * dim + b) * dim + c] * xi[c]).sum()
        });
        let preserves_theta = endo_g_norm(&ntheta_xi, &g, &ginv);
        Ok(KillingResiduals { killing, geodesic, preserves_theta })
    }

    /// Consequences of normality written without frames:
    /// `nabla_X xi + theta(nabla_tX xi)` and `theta(nabla_xi xi)`.
    pub fn normality_consequence_residual(&self, p: &Point) -> GeomResult<f64> {
        let g = self.chart.metric_at(p)?;
        let theta = self.theta_at(p)?;
        let nxi = self.nabla_xi_at(p)?;
        let xi = self.xi_at(p)?;
        // -nabla_X xi = theta(nabla_{theta X} xi) columnwise over coordinate X.
        let m = &nxi + &theta * &nxi * &theta;
        let mut worst = 0.0f64;
        for c in 0..self.dim() {
            worst = worst.max(vec_g_norm(&DVector::from_column_slice(m.column(c).as_slice()), &g));
        }
        worst = worst.max(vec_g_norm(&(&theta * (&nxi * &xi)), &g));
        Ok(worst)
    }

    /// The lifted almost complex structure on chart x R.
    pub fn lift(&self) -> GeomResult<LiftedComplexStructure> {
        LiftedComplexStructure::new(self)
    }
}

#[derive(Clone, Debug)]
pub struct KillingResiduals {
    pub killing: f64,
    pub geodesic: f64,
    pub preserves_theta: f64,
}

impl KillingResiduals {
    pub fn max(&self) -> f64 {
        self.killing.max(self.geodesic).max(self.preserves_theta)
    }
}

/// The product chart with the lifted almost complex structure
/// `Jt (X + f d/dw) = theta X - f xi + eta(X) d/dw`.
pub struct LiftedComplexStructure {
    pub chart: Arc<ChartManifold>,
    pub j_exprs: Vec<ScalarExpr>,
}

impl LiftedComplexStructure {
    fn new(s: &AcmStructure) -> GeomResult<LiftedComplexStructure> {
        let dim = s.dim();
        let lifted_dim = dim + 1;
        let mut axes: Vec<Axis> = s.chart.axes().to_vec();
        axes.push(Axis::open(-10.0, 10.0));
        let mut names: Vec<String> = s.chart.coord_names().iter().map(|s| s.to_string()).collect();
        names.push("w".into());
        // Product metric g + dw^2 (the complex structure check only needs brackets).
        let mut metric = Vec::with_capacity(lifted_dim * lifted_dim);
        for a in 0..lifted_dim {
            for b in 0..lifted_dim {
                if a < dim && b < dim {
                    metric.push(s.chart.metric_exprs()[a * dim + b].clone());
                } else if a == dim && b == dim {
                    metric.push(ScalarExpr::constant(1.0));
                } else {
                    metric.push(ScalarExpr::constant(0.0));
                }
            }
        }
        let chart = ChartManifold::new(format!("{}*R", s.chart.name()), axes, names, metric)?;

        let mut j = Vec::with_capacity(lifted_dim * lifted_dim);
        for a in 0..lifted_dim {
            for b in 0..lifted_dim {
                let expr = if a < dim && b < dim {
                    s.theta_exprs[a * dim + b].clone()
                } else if a < dim && b == dim {
                    s.xi_exprs[a].clone().neg()
                } else if a == dim && b < dim {
                    s.eta_exprs[b].clone()
                } else {
                    ScalarExpr::constant(0.0)
                };
                j.push(expr);
            }
        }
        Ok(LiftedComplexStructure { chart, j_exprs: j })
    }

    pub fn j_field(&self) -> TensorField {
        TensorField::from_exprs(self.chart.clone(), Valence::new(1, 1), self.j_exprs.clone())
            .expect("constructed consistently")
    }

    /// |Jt^2 + Id| at a lifted point.
    pub fn square_residual(&self, p: &Point) -> GeomResult<f64> {
        let j = self.j_field().value_at(p)?.as_endo();
        let dim = self.chart.dim();
        let r = &j * &j + DMatrix::<f64>::identity(dim, dim);
        Ok(r.norm())
    }

    /// Nijenhuis tensor of the lift on coordinate fields c, d.
    pub fn nijenhuis(&self, p: &Point, c: usize, d: usize) -> GeomResult<DVector<f64>> {
        let dim = self.chart.dim();
        let jf = self.j_field();
        let mk = |axis: usize| {
            let mut data = vec![0.0; dim];
            data[axis] = 1.0;
            TensorField::constant(self.chart.clone(), Valence::new(1, 0), data)
        };
        let x = mk(c);
        let y = mk(d);
        let jx = TensorField::apply_endo(&jf, &x);
        let jy = TensorField::apply_endo(&jf, &y);
        let j = jf.value_at(p)?.as_endo();
        let b_xy = lie_bracket(&x, &y, p)?;
        let b_jxjy = lie_bracket(&jx, &jy, p)?;
        let b_jxy = lie_bracket(&jx, &y, p)?;
        let b_xjy = lie_bracket(&x, &jy, p)?;
        Ok(&j * (&j * b_xy) + b_jxjy - &j * b_jxy - &j * b_xjy)
    }

    /// Max euclidean norm of the lifted Nijenhuis tensor over coordinate pairs
    /// at the lift of `p` (w = 0).
    pub fn nijenhuis_sweep(&self, base_point: &Point) -> GeomResult<f64> {
        let mut coords = base_point.coords().to_vec();
        coords.push(0.0);
        let p = self.chart.point(coords)?;
        let dim = self.chart.dim();
        let mut worst = 0.0f64;
        for c in 0..dim {
            for d in c + 1..dim {
                worst = worst.max(self.nijenhuis(&p, c, d)?.norm());
            }
        }
        Ok(worst)
    }
}
