//! Tensor fields evaluated along rays, with exact jet propagation.
//!
//! Every field implements [`FieldEval`]: given a ray `s -> p + s*dir` it
//! returns the truncated Taylor expansion of each component along the ray.
//! Derived fields (covariant derivatives) obtain the coordinate partials they
//! need from polarization identities over a handful of auxiliary rays, so
//! differentiation nests to the full jet order without finite differencing.

use crate::dsl::ScalarExpr;
use crate::error::{GeomError, GeomResult};
use crate::geometry::chart::{ChartManifold, Point, Ray};
use crate::geometry::connection::{adapted_connection_jets, christoffel_jets};
use crate::geometry::tensor::{multi_indices, Tensor, Valence};
use crate::jet::{Jet, MAX_ORDER};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Which connection corrects a tensor slot under covariant differentiation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotConn {
    /// Levi-Civita connection of the chart metric.
    LeviCivita,
    /// Connection adapted to the contact splitting (projects onto the
    /// contact sub-bundle and its orthogonal complement).
    Contact,
}

/// Shared data of a contact splitting: the vertical projector `V^a_b = xi^a eta_b`.
#[derive(Debug)]
pub struct ContactData {
    pub v_exprs: Vec<ScalarExpr>,
    pub xi_exprs: Vec<ScalarExpr>,
    pub eta_exprs: Vec<ScalarExpr>,
}

impl ContactData {
    pub fn new(dim: usize, xi: &[ScalarExpr], eta: &[ScalarExpr]) -> Arc<ContactData> {
        let mut v_exprs = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                v_exprs.push(xi[a].clone().mul(eta[b].clone()));
            }
        }
        Arc::new(ContactData {
            v_exprs,
            xi_exprs: xi.to_vec(),
            eta_exprs: eta.to_vec(),
        })
    }
}

pub trait FieldEval: Send + Sync {
    fn eval_ray(&self, ray: &Ray, order: usize) -> GeomResult<Vec<Jet>>;
}

/// A typed tensor field over a chart, evaluable along rays.
#[derive(Clone)]
pub struct TensorField {
    chart: Arc<ChartManifold>,
    valence: Valence,
    conns: Arc<Vec<SlotConn>>,
    eval: Arc<dyn FieldEval>,
}

impl TensorField {
    pub fn from_exprs(
        chart: Arc<ChartManifold>,
        valence: Valence,
        exprs: Vec<ScalarExpr>,
    ) -> GeomResult<TensorField> {
        if exprs.len() != valence.components(chart.dim()) {
            return Err(GeomError::Dimension(format!(
                "field needs {} components, got {}",
                valence.components(chart.dim()),
                exprs.len()
            )));
        }
        Ok(TensorField {
            chart,
            valence,
            conns: Arc::new(vec![SlotConn::LeviCivita; valence.rank()]),
            eval: Arc::new(ExprField { exprs }),
        })
    }

    pub fn constant(chart: Arc<ChartManifold>, valence: Valence, data: Vec<f64>) -> TensorField {
        assert_eq!(data.len(), valence.components(chart.dim()));
        TensorField {
            chart,
            valence,
            conns: Arc::new(vec![SlotConn::LeviCivita; valence.rank()]),
            eval: Arc::new(ConstField { data }),
        }
    }

    /// Vector field with affine components `v^a + m^a_e (x^e - p^e)`.
    pub fn affine_vector(
        chart: Arc<ChartManifold>,
        base: &Point,
        value: DVector<f64>,
        slope: DMatrix<f64>,
    ) -> TensorField {
        TensorField {
            chart,
            valence: Valence::new(1, 0),
            conns: Arc::new(vec![SlotConn::LeviCivita]),
            eval: Arc::new(AffineVectorField {
                base: base.coords().to_vec(),
                value: value.iter().copied().collect(),
                slope: slope.iter().copied().collect(),
                rows: slope.nrows(),
            }),
        }
    }

    /// Pointwise application of a (1,1) field to a vector field.
    pub fn apply_endo(endo: &TensorField, vec: &TensorField) -> TensorField {
        assert_eq!((endo.valence.con, endo.valence.cov), (1, 1));
        assert_eq!((vec.valence.con, vec.valence.cov), (1, 0));
        TensorField {
            chart: endo.chart.clone(),
            valence: Valence::new(1, 0),
            conns: Arc::new(vec![SlotConn::LeviCivita]),
            eval: Arc::new(ApplyEndoField { endo: endo.clone(), vec: vec.clone() }),
        }
    }

    /// Pointwise pairing of a one-form with a vector field (a scalar field).
    pub fn pairing(form: &TensorField, vec: &TensorField) -> TensorField {
        assert_eq!((form.valence.con, form.valence.cov), (0, 1));
        assert_eq!((vec.valence.con, vec.valence.cov), (1, 0));
        TensorField {
            chart: form.chart.clone(),
            valence: Valence::new(0, 0),
            conns: Arc::new(Vec::new()),
            eval: Arc::new(PairingField { form: form.clone(), vec: vec.clone() }),
        }
    }

    /// Projection of a vector field onto the contact sub-bundle: `v - eta(v) xi`.
    pub fn project_horizontal(contact: &Arc<ContactData>, vec: &TensorField) -> TensorField {
        assert_eq!((vec.valence.con, vec.valence.cov), (1, 0));
        TensorField {
            chart: vec.chart.clone(),
            valence: Valence::new(1, 0),
            conns: Arc::new(vec![SlotConn::LeviCivita]),
            eval: Arc::new(ProjectField { contact: contact.clone(), vec: vec.clone() }),
        }
    }

    /// Reinterpret the slots as contact-bundle slots (for the induced connection).
    pub fn with_contact_slots(&self) -> TensorField {
        let mut out = self.clone();
        out.conns = Arc::new(vec![SlotConn::Contact; self.valence.rank()]);
        out
    }

    /// Covariant derivative; appends one covariant (direction) slot. Slots
    /// marked [`SlotConn::Contact`] are corrected with the adapted connection,
    /// the direction slot of an earlier derivative with Levi-Civita.
    pub fn covariant_derivative(
        &self,
        contact: Option<&Arc<ContactData>>,
    ) -> GeomResult<TensorField> {
        let needs_contact = self.conns.iter().any(|c| *c == SlotConn::Contact);
        if needs_contact && contact.is_none() {
            return Err(GeomError::Dimension(
                "contact slots need contact data for differentiation".into(),
            ));
        }
        let mut conns: Vec<SlotConn> = self.conns.as_ref().clone();
        conns.push(SlotConn::LeviCivita);
        Ok(TensorField {
            chart: self.chart.clone(),
            valence: Valence::new(self.valence.con, self.valence.cov + 1),
            conns: Arc::new(conns),
            eval: Arc::new(CovDerivField {
                inner: self.clone(),
                contact: contact.cloned(),
            }),
        })
    }

    pub fn chart(&self) -> &Arc<ChartManifold> {
        &self.chart
    }

    pub fn valence(&self) -> Valence {
        self.valence
    }

    pub fn eval_ray(&self, ray: &Ray, order: usize) -> GeomResult<Vec<Jet>> {
        if order > MAX_ORDER {
            return Err(GeomError::JetOrder { requested: order, max: MAX_ORDER });
        }
        self.eval.eval_ray(ray, order)
    }

    pub fn value_at(&self, p: &Point) -> GeomResult<Tensor> {
        let jets = self.eval_ray(&Ray::at_point(p), 0)?;
        Ok(Tensor::from_data(
            self.chart.dim(),
            self.valence,
            jets.iter().map(|j| j.value()).collect(),
        ))
    }

    /// Coordinate partials of every component at `p`: `out[c][comp]`.
    pub fn partials_at(&self, p: &Point) -> GeomResult<Vec<Vec<f64>>> {
        let ray = Ray::at_point(p);
        let parts = partials_along_ray(self.chart.dim(), 0, &ray, |r, o| self.eval_ray(r, o))?;
        Ok(parts
            .into_iter()
            .map(|jets| jets.iter().map(|j| j.value()).collect())
            .collect())
    }
}

struct ExprField {
    exprs: Vec<ScalarExpr>,
}

impl FieldEval for ExprField {
    fn eval_ray(&self, ray: &Ray, order: usize) -> GeomResult<Vec<Jet>> {
        let seeds = ray.seed(order);
        self.exprs
            .iter()
            .map(|e| e.eval(&seeds).map_err(GeomError::from))
            .collect()
    }
}

struct ConstField {
    data: Vec<f64>,
}

impl FieldEval for ConstField {
    fn eval_ray(&self, _ray: &Ray, order: usize) -> GeomResult<Vec<Jet>> {
        Ok(self.data.iter().map(|&v| Jet::constant(v, order)).collect())
    }
}

struct AffineVectorField {
    base: Vec<f64>,
    value: Vec<f64>,
    slope: Vec<f64>,
    rows: usize,
}

impl FieldEval for AffineVectorField {
    fn eval_ray(&self, ray: &Ray, order: usize) -> GeomResult<Vec<Jet>> {
        let seeds = ray.seed(order);
        let dim = self.base.len();
        let mut out = Vec::with_capacity(self.rows);
        for a in 0..self.rows {
            let mut acc = Jet::constant(self.value[a], order);
            for e in 0..dim {
                // nalgebra iterators are column-major: slope[(a, e)] = slope[e*rows + a]
                let m = self.slope[e * self.rows + a];
                if m != 0.0 {
                    let dx = seeds[e] - Jet::constant(self.base[e], order);
                    acc = acc + dx.scale(m);
                }
            }
            out.push(acc);
        }
        Ok(out)
    }
}

struct ApplyEndoField {
    endo: TensorField,
    vec: TensorField,
}

impl FieldEval for ApplyEndoField {
    fn eval_ray(&self, ray: &Ray, order: usize) -> GeomResult<Vec<Jet>> {
        let e = self.endo.eval_ray(ray, order)?;
        let v = self.vec.eval_ray(ray, order)?;
        let dim = self.endo.chart.dim();
        let mut out = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut acc = Jet::constant(0.0, order);
            for b in 0..dim {
                acc = acc + e[a * dim + b] * v[b];
            }
            out.push(acc);
        }
        Ok(out)
    }
}

struct PairingField {
    form: TensorField,
    vec: TensorField,
}

impl FieldEval for PairingField {
    fn eval_ray(&self, ray: &Ray, order: usize) -> GeomResult<Vec<Jet>> {
        let f = self.form.eval_ray(ray, order)?;
        let v = self.vec.eval_ray(ray, order)?;
        let mut acc = Jet::constant(0.0, order);
        for (a, b) in f.iter().zip(&v) {
            acc = acc + *a * *b;
        }
        Ok(vec![acc])
    }
}

struct ProjectField {
    contact: Arc<ContactData>,
    vec: TensorField,
}

impl FieldEval for ProjectField {
    fn eval_ray(&self, ray: &Ray, order: usize) -> GeomResult<Vec<Jet>> {
        let v = self.vec.eval_ray(ray, order)?;
        let seeds = ray.seed(order);
        let dim = v.len();
        let mut out = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut acc = v[a];
            for b in 0..dim {
                let vab = self.contact.v_exprs[a * dim + b].eval(&seeds)?;
                acc = acc - vab * v[b];
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// Coordinate partials of a ray-evaluable quantity, one jet order down.
///
/// Returns `out[c][comp]` = jets of `d_c f` along the ray at `order`, using
/// polarization of directional derivatives: the coefficient of `s^m/m!` in
/// `d_c f(p + s u)` is the symmetric (m+1)-form `D^{m+1} f` evaluated on
/// `(u, ..., u, e_c)`, recovered from directional jets along `u`, `e_c`,
/// `u + e_c` and `u - e_c`.
pub fn partials_along_ray<F>(
    dim: usize,
    order: usize,
    ray: &Ray,
    eval: F,
) -> GeomResult<Vec<Vec<Jet>>>
where
    F: Fn(&Ray, usize) -> GeomResult<Vec<Jet>>,
{
    if order + 1 > MAX_ORDER {
        return Err(GeomError::JetOrder { requested: order + 1, max: MAX_ORDER });
    }
    let up = order + 1;
    let along_dir = if order >= 1 {
        Some(eval(ray, up)?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(dim);
    for c in 0..dim {
        let e_c = {
            let mut dir = vec![0.0; dim];
            dir[c] = 1.0;
            Ray { base: ray.base.clone(), dir }
        };
        let jc = eval(&e_c, up)?;
        let ncomp = jc.len();
        let jsum = if order >= 1 {
            let mut dir = ray.dir.clone();
            dir[c] += 1.0;
            Some(eval(&Ray { base: ray.base.clone(), dir }, up)?)
        } else {
            None
        };
        let jdiff = if order >= 2 {
            let mut dir = ray.dir.clone();
            dir[c] -= 1.0;
            Some(eval(&Ray { base: ray.base.clone(), dir }, up)?)
        } else {
            None
        };
        let mut comps = Vec::with_capacity(ncomp);
        for k in 0..ncomp {
            let mut coeffs = [0.0; MAX_ORDER + 1];
            coeffs[0] = jc[k].deriv(1);
            if order >= 1 {
                let d2s = jsum.as_ref().unwrap()[k].deriv(2);
                let d2u = along_dir.as_ref().unwrap()[k].deriv(2);
                let d2c = jc[k].deriv(2);
                coeffs[1] = 0.5 * (d2s - d2u - d2c);
            }
            if order >= 2 {
                let d3s = jsum.as_ref().unwrap()[k].deriv(3);
                let d3d = jdiff.as_ref().unwrap()[k].deriv(3);
                let d3c = jc[k].deriv(3);
                coeffs[2] = (d3s - d3d - 2.0 * d3c) / 6.0;
            }
            comps.push(Jet::from_derivs(&coeffs[..=order]));
        }
        out.push(comps);
    }
    Ok(out)
}

struct CovDerivField {
    inner: TensorField,
    contact: Option<Arc<ContactData>>,
}

impl FieldEval for CovDerivField {
    fn eval_ray(&self, ray: &Ray, order: usize) -> GeomResult<Vec<Jet>> {
        let chart = &self.inner.chart;
        let dim = chart.dim();
        let vals = self.inner.eval_ray(ray, order)?;
        let parts = partials_along_ray(dim, order, ray, |r, o| self.inner.eval_ray(r, o))?;
        let gamma = christoffel_jets(chart, ray, order)?;
        let delta = if self.inner.conns.iter().any(|c| *c == SlotConn::Contact) {
            Some(adapted_connection_jets(
                chart,
                self.contact.as_ref().expect("checked at construction"),
                ray,
                order,
            )?)
        } else {
            None
        };
        let conn = |kind: SlotConn, a: usize, c: usize, b: usize| -> Jet {
            let flat = (a * dim + c) * dim + b;
            match kind {
                SlotConn::LeviCivita => gamma[flat],
                SlotConn::Contact => delta.as_ref().unwrap()[flat],
            }
        };

        let val = self.inner.valence;
        let rank = val.rank();
        let inner_flat = |idx: &[usize]| -> usize {
            let mut out = 0;
            for &i in idx {
                out = out * dim + i;
            }
            out
        };

        let mut out = vec![Jet::constant(0.0, order); vals.len() * dim];
        for idx in multi_indices(dim, rank) {
            let base_flat = inner_flat(&idx);
            for c in 0..dim {
                let mut acc = parts[c][base_flat];
                for slot in 0..rank {
                    let kind = self.inner.conns[slot];
                    let upper = slot < val.con;
                    let held = idx[slot];
                    let mut idx2 = idx.clone();
                    for d in 0..dim {
                        idx2[slot] = d;
                        let v = vals[inner_flat(&idx2)];
                        if upper {
                            acc = acc + conn(kind, held, c, d) * v;
                        } else {
                            acc = acc - conn(kind, d, c, held) * v;
                        }
                    }
                    idx2[slot] = held;
                }
                out[base_flat * dim + c] = acc;
            }
        }
        Ok(out)
    }
}
