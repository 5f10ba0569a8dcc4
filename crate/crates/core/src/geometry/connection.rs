//! Levi-Civita connection, curvature, and the connection adapted to a
//! contact splitting, all propagated through jets.

use crate::error::{GeomError, GeomResult};
use crate::geometry::chart::{ChartManifold, Point, Ray};
use crate::geometry::field::{partials_along_ray, ContactData, TensorField};
use crate::geometry::tensor::{multi_indices, Tensor};
use crate::jet::Jet;
use nalgebra::DVector;
use std::sync::Arc;

/// Invert a jet-valued matrix by Gauss elimination with partial pivoting.
pub fn jet_mat_inverse(m: &[Jet], dim: usize, order: usize) -> GeomResult<Vec<Jet>> {
    let mut a: Vec<Jet> = m.to_vec();
    let mut inv: Vec<Jet> = (0..dim * dim)
        .map(|k| Jet::constant(if k % (dim + 1) == 0 { 1.0 } else { 0.0 }, order))
        .collect();
    for col in 0..dim {
        let mut pivot = col;
        for row in col + 1..dim {
            if a[row * dim + col].value().abs() > a[pivot * dim + col].value().abs() {
                pivot = row;
            }
        }
        if a[pivot * dim + col].value().abs() < 1e-13 {
            return Err(GeomError::SingularMetric("inverting a jet matrix"));
        }
        if pivot != col {
            for k in 0..dim {
                a.swap(col * dim + k, pivot * dim + k);
                inv.swap(col * dim + k, pivot * dim + k);
            }
        }
        let diag = a[col * dim + col];
        let dinv = diag.recip();
        for k in 0..dim {
            a[col * dim + k] = a[col * dim + k] * dinv;
            inv[col * dim + k] = inv[col * dim + k] * dinv;
        }
        for row in 0..dim {
            if row == col {
                continue;
            }
            let factor = a[row * dim + col];
            if factor.value() == 0.0 && factor == Jet::constant(0.0, order) {
                continue;
            }
            for k in 0..dim {
                a[row * dim + k] = a[row * dim + k] - factor * a[col * dim + k];
                inv[row * dim + k] = inv[row * dim + k] - factor * inv[col * dim + k];
            }
        }
    }
    Ok(inv)
}

/// Christoffel symbols as jets along a ray; layout `gamma[(k*dim + i)*dim + j] = G^k_ij`.
pub fn christoffel_jets(chart: &ChartManifold, ray: &Ray, order: usize) -> GeomResult<Vec<Jet>> {
    let dim = chart.dim();
    let g = chart.metric_jets(ray, order)?;
    let gpart = partials_along_ray(dim, order, ray, |r, o| chart.metric_jets(r, o))?;
    let ginv = jet_mat_inverse(&g, dim, order)?;
    let mut out = vec![Jet::constant(0.0, order); dim * dim * dim];
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..=i {
                let mut acc = Jet::constant(0.0, order);
                for l in 0..dim {
                    let term = gpart[i][j * dim + l] + gpart[j][i * dim + l] - gpart[l][i * dim + j];
                    acc = acc + ginv[k * dim + l] * term;
                }
                let val = acc.scale(0.5);
                out[(k * dim + i) * dim + j] = val;
                out[(k * dim + j) * dim + i] = val;
            }
        }
    }
    Ok(out)
}

pub fn christoffel_at(chart: &ChartManifold, p: &Point) -> GeomResult<Vec<f64>> {
    let jets = christoffel_jets(chart, &Ray::at_point(p), 0)?;
    Ok(jets.iter().map(|j| j.value()).collect())
}

/// Riemann tensor `R^a_{b,cd}` at a point, with `R(X,Y)Z = [nabla_X, nabla_Y]Z - nabla_[X,Y] Z`:
/// `R^a_{bcd} = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb`.
/// Layout `((a*dim + b)*dim + c)*dim + d`.
pub fn riemann_at(chart: &ChartManifold, p: &Point) -> GeomResult<Vec<f64>> {
    let dim = chart.dim();
    let gamma0 = christoffel_at(chart, p)?;
    let mut dgamma = Vec::with_capacity(dim);
    for c in 0..dim {
        let jets = christoffel_jets(chart, &Ray::axis(p, c), 1)?;
        dgamma.push(jets.iter().map(|j| j.deriv(1)).collect::<Vec<f64>>());
    }
    Ok(curvature_from_connection(&gamma0, &dgamma, dim))
}

/// Curvature of an arbitrary connection from its coefficients and their
/// coordinate derivatives; coefficient layout `(a*dim + c)*dim + b` with `c`
/// the direction index.
pub fn curvature_from_connection(coeff: &[f64], dcoeff: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let at = |a: usize, c: usize, b: usize| (a * dim + c) * dim + b;
    let mut out = vec![0.0; dim * dim * dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    let mut v = dcoeff[c][at(a, d, b)] - dcoeff[d][at(a, c, b)];
                    for e in 0..dim {
                        v += coeff[at(a, c, e)] * coeff[at(e, d, b)]
                            - coeff[at(a, d, e)] * coeff[at(e, c, b)];
                    }
                    out[((a * dim + b) * dim + c) * dim + d] = v;
                }
            }
        }
    }
    out
}

/// Apply a stored curvature tensor: `(R(X,Y)Z)^a`.
pub fn curvature_apply(
    r: &[f64],
    dim: usize,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> DVector<f64> {
    let mut out = DVector::zeros(dim);
    for a in 0..dim {
        let mut acc = 0.0;
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    acc += r[((a * dim + b) * dim + c) * dim + d] * z[b] * x[c] * y[d];
                }
            }
        }
        out[a] = acc;
    }
    out
}

/// Coefficients of the adapted connection `D_X Y = P grad_X(PY) + Q grad_X(QY)`
/// as jets along a ray; layout `(a*dim + c)*dim + b` with direction `c`.
///
/// On sections of the contact sub-bundle this connection coincides with the
/// induced connection (projection of Levi-Civita), and it preserves the
/// orthogonal splitting, so iterated derivatives of bundle endomorphisms can
/// be taken as ordinary tensor derivatives with these coefficients.
pub fn adapted_connection_jets(
    chart: &ChartManifold,
    contact: &Arc<ContactData>,
    ray: &Ray,
    order: usize,
) -> GeomResult<Vec<Jet>> {
    let dim = chart.dim();
    let gamma = christoffel_jets(chart, ray, order)?;
    let seeds = ray.seed(order);
    let mut v = Vec::with_capacity(dim * dim);
    for e in &contact.v_exprs {
        v.push(e.eval(&seeds)?);
    }
    let vpart = partials_along_ray(dim, order, ray, |r, o| {
        let s = r.seed(o);
        contact
            .v_exprs
            .iter()
            .map(|e| e.eval(&s).map_err(GeomError::from))
            .collect()
    })?;

    let zero = Jet::constant(0.0, order);
    let one = Jet::constant(1.0, order);
    let p = |a: usize, b: usize| -> Jet {
        let d = if a == b { one } else { zero };
        d - v[a * dim + b]
    };
    let q = |a: usize, b: usize| -> Jet { v[a * dim + b] };

    let mut out = vec![zero; dim * dim * dim];
    for c in 0..dim {
        // delta_c = P dP_c + Q dQ_c + P Gamma_c P + Q Gamma_c Q, with
        // dP_c = -dV_c and dQ_c = +dV_c.
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = zero;
                for e in 0..dim {
                    let dv = vpart[c][e * dim + b];
                    acc = acc + (q(a, e) - p(a, e)) * dv;
                    // P Gamma P + Q Gamma Q  =  sum_{e,f}  P_ae Gamma^e_cf P_fb + (Q...)
                    for f in 0..dim {
                        let gamef = gamma[(e * dim + c) * dim + f];
                        acc = acc + p(a, e) * gamef * p(f, b) + q(a, e) * gamef * q(f, b);
                    }
                }
                out[(a * dim + c) * dim + b] = acc;
            }
        }
    }
    Ok(out)
}

/// Curvature of the adapted connection at a point; on horizontal inputs and
/// outputs this is the curvature of the induced contact connection.
pub fn adapted_curvature_at(
    chart: &ChartManifold,
    contact: &Arc<ContactData>,
    p: &Point,
) -> GeomResult<Vec<f64>> {
    let dim = chart.dim();
    let coeff: Vec<f64> = adapted_connection_jets(chart, contact, &Ray::at_point(p), 0)?
        .iter()
        .map(|j| j.value())
        .collect();
    let mut dcoeff = Vec::with_capacity(dim);
    for c in 0..dim {
        let jets = adapted_connection_jets(chart, contact, &Ray::axis(p, c), 1)?;
        dcoeff.push(jets.iter().map(|j| j.deriv(1)).collect::<Vec<f64>>());
    }
    Ok(curvature_from_connection(&coeff, &dcoeff, dim))
}

/// Second covariant derivative `nabla^2_{X,Y} T` (direction slots appended as
/// `..., Y, X`).
pub fn second_covariant_derivative(
    field: &TensorField,
    contact: Option<&Arc<ContactData>>,
    p: &Point,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> GeomResult<Tensor> {
    let dd = field.covariant_derivative(contact)?.covariant_derivative(contact)?;
    let vals = dd.value_at(p)?;
    let dim = field.chart().dim();
    let base = field.valence();
    let mut out = Tensor::zeros(dim, base);
    for idx in multi_indices(dim, base.rank()) {
        let mut acc = 0.0;
        for c in 0..dim {
            for e in 0..dim {
                let mut full = idx.clone();
                full.push(c);
                full.push(e);
                acc += vals.get(&full) * y[c] * x[e];
            }
        }
        out.set(&idx, acc);
    }
    Ok(out)
}

/// Rough Laplacian `nabla^* nabla T = -tr_g nabla^2 T`, sign chosen so that a
/// unit harmonic vector field satisfies `nabla^* nabla xi = |nabla xi|^2 xi`.
pub fn rough_laplacian(
    field: &TensorField,
    contact: Option<&Arc<ContactData>>,
    p: &Point,
) -> GeomResult<Tensor> {
    let dd = field.covariant_derivative(contact)?.covariant_derivative(contact)?;
    let vals = dd.value_at(p)?;
    let dim = field.chart().dim();
    let ginv = field.chart().inverse_metric_at(p)?;
    let base = field.valence();
    let mut out = Tensor::zeros(dim, base);
    for idx in multi_indices(dim, base.rank()) {
        let mut acc = 0.0;
        for c in 0..dim {
            for e in 0..dim {
                let mut full = idx.clone();
                full.push(c);
                full.push(e);
                acc += ginv[(c, e)] * vals.get(&full);
            }
        }
        out.set(&idx, -acc);
    }
    Ok(out)
}

/// Lie bracket of two vector fields at a point.
pub fn lie_bracket(x: &TensorField, y: &TensorField, p: &Point) -> GeomResult<DVector<f64>> {
    let dim = x.chart().dim();
    let xv = x.value_at(p)?;
    let yv = y.value_at(p)?;
    let xp = x.partials_at(p)?;
    let yp = y.partials_at(p)?;
    let mut out = DVector::zeros(dim);
    for a in 0..dim {
        let mut acc = 0.0;
        for c in 0..dim {
            acc += xv.data[c] * yp[c][a] - yv.data[c] * xp[c][a];
        }
        out[a] = acc;
    }
    Ok(out)
}

/// Directional derivative of a scalar field at `p` along `v`.
pub fn directional_derivative(
    scalar: &TensorField,
    p: &Point,
    v: &DVector<f64>,
) -> GeomResult<f64> {
    let parts = scalar.partials_at(p)?;
    Ok((0..v.len()).map(|c| v[c] * parts[c][0]).sum())
}

/// Exterior derivative of a one-form on two vector fields, with the
/// 1/2-normalisation `d eta(X,Y) = (X eta(Y) - Y eta(X) - eta([X,Y])) / 2`.
pub fn exterior_derivative_1form(
    eta: &TensorField,
    p: &Point,
    x: &TensorField,
    y: &TensorField,
) -> GeomResult<f64> {
    let ey = TensorField::pairing(eta, y);
    let ex = TensorField::pairing(eta, x);
    let xv = x.value_at(p)?.as_vector();
    let yv = y.value_at(p)?.as_vector();
    let d1 = directional_derivative(&ey, p, &xv)?;
    let d2 = directional_derivative(&ex, p, &yv)?;
    let bracket = lie_bracket(x, y, p)?;
    let ev = eta.value_at(p)?.as_covector();
    Ok(0.5 * (d1 - d2 - ev.dot(&bracket)))
}
