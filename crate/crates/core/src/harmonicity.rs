//! Harmonic-section and harmonic-map residuals for almost contact metric
//! structures, together with the curvature reformulations valid for normal
//! structures.

use crate::acms::AcmStructure;
use crate::error::{GeomError, GeomResult};
use crate::geometry::chart::{Point, Ray};
use crate::geometry::connection::{
    adapted_connection_jets, adapted_curvature_at, curvature_apply, jet_mat_inverse, lie_bracket,
    riemann_at, rough_laplacian,
};
use crate::geometry::field::TensorField;
use crate::geometry::frame::adapted_frame;
use crate::geometry::tensor::{endo_g_norm, vec_g_norm};
use nalgebra::{DMatrix, DVector};

/// The connection induced on the contact sub-bundle by Levi-Civita, realized
/// through the projector-adapted ambient connection.
pub struct ContactConnection<'a> {
    pub structure: &'a AcmStructure,
}

/// Pointwise ingredients shared by the residual evaluations.
pub struct PointData {
    pub dim: usize,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    pub theta: DMatrix<f64>,
    pub xi: DVector<f64>,
    pub eta: DVector<f64>,
    /// Horizontal trace tensor `h^{bc} = g^{bc} - xi^b xi^c` (= sum F_i x F_i).
    pub h_up: DMatrix<f64>,
    /// `nabla theta`, layout `(a*dim + b)*dim + c` with direction `c`.
    pub ntheta: Vec<f64>,
    /// `nabla xi` as a matrix `(a, c)`.
    pub nxi: DMatrix<f64>,
    /// `B = P o nabla theta`: the induced-connection derivative of the
    /// restricted complex structure on horizontal arguments; same layout as
    /// `ntheta`.
    pub bbar: Vec<f64>,
}

impl PointData {
    pub fn nabla_dir_theta(&self, dir: &DVector<f64>) -> DMatrix<f64> {
        let dim = self.dim;
        DMatrix::from_fn(dim, dim, |a, b| {
            (0..dim).map(|c| self.ntheta[(a * dim + b) * dim + c] * dir[c]).sum()
        })
    }

    pub fn bbar_dir(&self, dir: &DVector<f64>) -> DMatrix<f64> {
        let dim = self.dim;
        DMatrix::from_fn(dim, dim, |a, b| {
            (0..dim).map(|c| self.bbar[(a * dim + b) * dim + c] * dir[c]).sum()
        })
    }

    /// Horizontal projector `P = Id - xi (x) eta`.
    pub fn projector(&self) -> DMatrix<f64> {
        let dim = self.dim;
        DMatrix::from_fn(dim, dim, |a, b| {
            (if a == b { 1.0 } else { 0.0 }) - self.xi[a] * self.eta[b]
        })
    }

    /// Lee field of theta: `delta theta = sum_i (nabla_{F_i} theta)(F_i)`,
    /// computed frame-free through the horizontal trace.
    pub fn lee_theta(&self) -> DVector<f64> {
        let dim = self.dim;
        DVector::from_fn(dim, |a, _| {
            let mut acc = 0.0;
            for b in 0..dim {
                for c in 0..dim {
                    acc += self.ntheta[(a * dim + b) * dim + c] * self.h_up[(b, c)];
                }
            }
            acc
        })
    }

    /// Lee field of the restricted structure: `delta-bar J` via `B`.
    pub fn lee_jbar(&self) -> DVector<f64> {
        let dim = self.dim;
        DVector::from_fn(dim, |a, _| {
            let mut acc = 0.0;
            for b in 0..dim {
                for c in 0..dim {
                    acc += self.bbar[(a * dim + b) * dim + c] * self.h_up[(b, c)];
                }
            }
            acc
        })
    }

    /// Horizontal-frame curvature trace `sum_i R(F_i, theta F_i)` of a stored
    /// curvature tensor (layout `((a*dim+b)*dim+c)*dim+d`).
    pub fn curvature_trace(&self, r: &[f64]) -> DMatrix<f64> {
        let dim = self.dim;
        // m^{cd} = sum_i F_i^c (theta F_i)^d = theta^d_e h^{ce}
        let mut m = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            for d in 0..dim {
                let mut acc = 0.0;
                for e in 0..dim {
                    acc += self.theta[(d, e)] * self.h_up[(c, e)];
                }
                m[(c, d)] = acc;
            }
        }
        DMatrix::from_fn(dim, dim, |a, b| {
            let mut acc = 0.0;
            for c in 0..dim {
                for d in 0..dim {
                    acc += r[((a * dim + b) * dim + c) * dim + d] * m[(c, d)];
                }
            }
            acc
        })
    }

    pub fn commutator_with_theta(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        a * &self.theta - &self.theta * a
    }

    pub fn endo_norm(&self, a: &DMatrix<f64>) -> f64 {
        endo_g_norm(a, &self.g, &self.ginv)
    }

    pub fn vec_norm(&self, v: &DVector<f64>) -> f64 {
        vec_g_norm(v, &self.g)
    }

    pub fn grad_xi_sq(&self) -> f64 {
        (&self.ginv * (self.nxi.transpose() * &self.g * &self.nxi)).trace()
    }
}

impl<'a> ContactConnection<'a> {
    pub fn new(structure: &'a AcmStructure) -> ContactConnection<'a> {
        ContactConnection { structure }
    }

    pub fn point_data(&self, p: &Point) -> GeomResult<PointData> {
        let s = self.structure;
        let dim = s.dim();
        let chart = s.chart();
        let g = chart.metric_at(p)?;
        let ginv = chart.inverse_metric_at(p)?;
        let theta = s.theta_at(p)?;
        let xi = s.xi_at(p)?;
        let eta = s.eta_at(p)?;
        let mut h_up = ginv.clone();
        for b in 0..dim {
            for c in 0..dim {
                h_up[(b, c)] -= xi[b] * xi[c];
            }
        }
        let ntheta = s.nabla_theta_at(p)?;
        let nxi = s.nabla_xi_at(p)?;
        let proj = DMatrix::from_fn(dim, dim, |a, b| {
            (if a == b { 1.0 } else { 0.0 }) - xi[a] * eta[b]
        });
        let mut bbar = vec![0.0; dim * dim * dim];
        for b in 0..dim {
            for c in 0..dim {
                for a in 0..dim {
                    let mut acc = 0.0;
                    for d in 0..dim {
                        acc += proj[(a, d)] * ntheta[(d * dim + b) * dim + c];
                    }
                    bbar[(a * dim + b) * dim + c] = acc;
                }
            }
        }
        Ok(PointData { dim, g, ginv, theta, xi, eta, h_up, ntheta, nxi, bbar })
    }

    /// Induced-connection derivative of a horizontal section:
    /// `nbar_X sigma = nabla_X sigma - g(nabla_X sigma, xi) xi`.
    pub fn nabla_bar(
        &self,
        sigma: &TensorField,
        x: &DVector<f64>,
        p: &Point,
    ) -> GeomResult<DVector<f64>> {
        let d = self.point_data(p)?;
        let sv = sigma.value_at(p)?.as_vector();
        let eta_comp = d.eta.dot(&sv).abs();
        if eta_comp > 1e-10 {
            return Err(GeomError::NonHorizontal(eta_comp));
        }
        let dim = d.dim;
        let nsigma = sigma.covariant_derivative(None)?.value_at(p)?;
        let mut out = DVector::zeros(dim);
        for a in 0..dim {
            out[a] = (0..dim).map(|c| nsigma.data[a * dim + c] * x[c]).sum();
        }
        let vert = (out.transpose() * &d.g * &d.xi)[(0, 0)];
        Ok(out - &d.xi * vert)
    }

    /// `nabla-bar* nabla-bar J` as an ambient endomorphism (full-frame trace,
    /// sign of the positive rough Laplacian).
    pub fn dbar_laplacian_theta(&self, p: &Point) -> GeomResult<DMatrix<f64>> {
        let s = self.structure;
        let w = s
            .theta_field()
            .with_contact_slots()
            .covariant_derivative(Some(s.contact()))?
            .covariant_derivative(Some(s.contact()))?;
        let vals = w.value_at(p)?;
        let dim = s.dim();
        let ginv = s.chart().inverse_metric_at(p)?;
        Ok(DMatrix::from_fn(dim, dim, |a, b| {
            let mut acc = 0.0;
            for c in 0..dim {
                for e in 0..dim {
                    acc += ginv[(c, e)] * vals.data[((a * dim + b) * dim + c) * dim + e];
                }
            }
            -acc
        }))
    }

    /// First harmonic section equation residual `[nbar* nbar J, J]`,
    /// restricted to the contact sub-bundle.
    pub fn hse1_residual(&self, p: &Point) -> GeomResult<DMatrix<f64>> {
        let d = self.point_data(p)?;
        let lap = self.dbar_laplacian_theta(p)?;
        let proj = d.projector();
        Ok(&proj * d.commutator_with_theta(&lap) * &proj)
    }

    /// Curvature form of the first harmonic section equation:
    /// `[Rbar(F_i, J F_i), J] + 2 nbar_{deltabar J} J`.
    pub fn hse1_curvature_form(&self, p: &Point) -> GeomResult<DMatrix<f64>> {
        let s = self.structure;
        let d = self.point_data(p)?;
        let rbar = adapted_curvature_at(s.chart(), s.contact(), p)?;
        let rsum = d.curvature_trace(&rbar);
        let lee = d.lee_jbar();
        let grad_term = d.bbar_dir(&lee);
        let proj = d.projector();
        Ok(&proj * (d.commutator_with_theta(&rsum) + grad_term.scale(2.0)) * &proj)
    }

    /// Curvature of the induced connection applied directly:
    /// `Rbar(X,Y) sigma` from the adapted-connection commutator.
    pub fn rbar_direct(
        &self,
        p: &Point,
        x: &DVector<f64>,
        y: &DVector<f64>,
        sigma: &DVector<f64>,
    ) -> GeomResult<DVector<f64>> {
        let s = self.structure;
        let rbar = adapted_curvature_at(s.chart(), s.contact(), p)?;
        Ok(curvature_apply(&rbar, s.dim(), x, y, sigma))
    }

    /// The splitting `Rbar(X,Y) sigma = P R(X,Y) sigma + r(nabla_X xi, nabla_Y xi) sigma`
    /// with `r` the unit-sphere curvature `r(A,B)C = <B,C> A - <A,C> B`.
    pub fn rbar_split(
        &self,
        p: &Point,
        x: &DVector<f64>,
        y: &DVector<f64>,
        sigma: &DVector<f64>,
    ) -> GeomResult<DVector<f64>> {
        let s = self.structure;
        let d = self.point_data(p)?;
        let r = riemann_at(s.chart(), p)?;
        let ambient = curvature_apply(&r, d.dim, x, y, sigma);
        let proj = d.projector();
        let projected = &proj * ambient;
        let ax = &d.nxi * x;
        let ay = &d.nxi * y;
        let ip = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &d.g * v)[(0, 0)];
        Ok(projected + &ax * ip(&ay, sigma) - &ay * ip(&ax, sigma))
    }

    /// Max residual of the curvature splitting over horizontal projected
    /// coordinate triples (X, Y, sigma).
    pub fn rbar_split_sweep(&self, p: &Point) -> GeomResult<f64> {
        let d = self.point_data(p)?;
        let proj = d.projector();
        let dim = d.dim;
        let mut worst = 0.0f64;
        for c in 0..dim {
            for e in c + 1..dim {
                for sc in 0..dim {
                    let mut x = DVector::zeros(dim);
                    x[c] = 1.0;
                    let mut y = DVector::zeros(dim);
                    y[e] = 1.0;
                    let mut sg = DVector::zeros(dim);
                    sg[sc] = 1.0;
                    let (x, y, sg) = (&proj * x, &proj * y, &proj * sg);
                    let direct = self.rbar_direct(p, &x, &y, &sg)?;
                    let split = self.rbar_split(p, &x, &y, &sg)?;
                    worst = worst.max(d.vec_norm(&(direct - split)));
                }
            }
        }
        Ok(worst)
    }

    /// Commutator of the sphere-curvature trace with theta:
    /// `[sum_i r(nabla_{F_i} xi, nabla_{J F_i} xi), J]`; vanishes for normal
    /// structures.
    pub fn sphere_commutator_residual(&self, p: &Point) -> GeomResult<f64> {
        let d = self.point_data(p)?;
        let a = &d.nxi;
        let h = &d.h_up;
        let first = a * h * d.theta.transpose() * a.transpose() * &d.g;
        let second = a * &d.theta * h * a.transpose() * &d.g;
        let o = first - second;
        Ok(d.endo_norm(&d.commutator_with_theta(&o)))
    }

    pub fn nabla_star_nabla_xi(&self, p: &Point) -> GeomResult<DVector<f64>> {
        let t = rough_laplacian(&self.structure.xi_field(), None, p)?;
        Ok(t.as_vector())
    }

    /// Unit-section harmonicity residual `nabla* nabla xi - |nabla xi|^2 xi`.
    pub fn xi_harmonic_residual(&self, p: &Point) -> GeomResult<DVector<f64>> {
        let d = self.point_data(p)?;
        let lap = self.nabla_star_nabla_xi(p)?;
        Ok(lap - &d.xi * d.grad_xi_sq())
    }

    /// Second harmonic section equation residual:
    /// `nabla* nabla xi - |nabla xi|^2 xi + (1/2) theta( sum_i (nbar_{E_i} J)(nabla_{E_i} xi) )`.
    pub fn hse2_residual(&self, p: &Point) -> GeomResult<DVector<f64>> {
        let d = self.point_data(p)?;
        let base = self.xi_harmonic_residual(p)?;
        let dim = d.dim;
        let mut trace = DVector::zeros(dim);
        for a in 0..dim {
            let mut acc = 0.0;
            for b in 0..dim {
                for c in 0..dim {
                    for e in 0..dim {
                        acc += d.bbar[(a * dim + b) * dim + c] * d.nxi[(b, e)] * d.ginv[(e, c)];
                    }
                }
            }
            trace[a] = acc;
        }
        Ok(base + (&d.theta * trace).scale(0.5))
    }

    /// Curvature form of the second harmonic section equation and the
    /// pointwise trace identity feeding it. Returns `(main, sub)` where
    /// `main = nabla*nabla xi - |nabla xi|^2 xi - (1/2)[R(F_i,tF_i),t](xi) - (nabla_{d theta} theta)(xi)`
    /// and
    /// `sub = sum_i (nabla_{F_i} theta)(nabla_{F_i} xi) - (1/2) R(F_i,tF_i) xi - theta(nabla*nabla xi) - nabla_{d theta} xi`.
    pub fn hse2_curvature_form(&self, p: &Point) -> GeomResult<(DVector<f64>, DVector<f64>)> {
        let s = self.structure;
        let d = self.point_data(p)?;
        let dim = d.dim;
        let r = riemann_at(s.chart(), p)?;
        let rsum = d.curvature_trace(&r);
        let lap = self.nabla_star_nabla_xi(p)?;
        let lee = d.lee_theta();

        let nabla_lee_theta = d.nabla_dir_theta(&lee);
        let main = &lap - &d.xi * d.grad_xi_sq()
            - (d.commutator_with_theta(&rsum) * &d.xi).scale(0.5)
            - &nabla_lee_theta * &d.xi;

        let mut trace = DVector::zeros(dim);
        for a in 0..dim {
            let mut acc = 0.0;
            for b in 0..dim {
                for c in 0..dim {
                    for e in 0..dim {
                        acc += d.ntheta[(a * dim + b) * dim + c] * d.nxi[(b, e)] * d.h_up[(e, c)];
                    }
                }
            }
            trace[a] = acc;
        }
        let sub = trace - (&rsum * &d.xi).scale(0.5) - &d.theta * &lap - &d.nxi * &lee;
        Ok((main, sub))
    }

    /// Merged harmonic-section residual `[R(F_i, theta F_i), theta] + 2 nabla_{delta theta} theta`
    /// on the full tangent space.
    pub fn combined_residual(&self, p: &Point) -> GeomResult<DMatrix<f64>> {
        let s = self.structure;
        let d = self.point_data(p)?;
        let r = riemann_at(s.chart(), p)?;
        let rsum = d.curvature_trace(&r);
        let lee = d.lee_theta();
        Ok(d.commutator_with_theta(&rsum) + d.nabla_dir_theta(&lee).scale(2.0))
    }

    /// Harmonic map pairing for a tangent vector X:
    /// `sum_{i,j} <(nbar_{E_i} J)(F_j), [P R(E_i, X), theta](F_j)> + 8 sum_i <nabla_{E_i} xi, R(E_i, X) xi>`.
    pub fn harmonic_map_residual(&self, p: &Point, x: &DVector<f64>) -> GeomResult<f64> {
        let s = self.structure;
        let d = self.point_data(p)?;
        let r = riemann_at(s.chart(), p)?;
        let frame = adapted_frame(s.chart(), p, &d.xi)?;
        let horiz = &frame.vectors[..d.dim - 1];
        let proj = d.projector();
        let ip = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &d.g * v)[(0, 0)];

        let mut total = 0.0;
        for e_i in &frame.vectors {
            let rx = |w: &DVector<f64>| curvature_apply(&r, d.dim, e_i, x, w);
            for f_j in horiz {
                let bij = d.bbar_dir(e_i) * f_j;
                let commut = &proj * rx(&(&d.theta * f_j)) - &d.theta * (&proj * rx(f_j));
                total += ip(&bij, &commut);
            }
            let second = ip(&(&d.nxi * e_i), &rx(&d.xi));
            total += 8.0 * second;
        }
        Ok(total)
    }

    /// Sup of the harmonic-map residual over coordinate directions.
    pub fn harmonic_map_sweep(&self, p: &Point) -> GeomResult<f64> {
        let dim = self.structure.dim();
        let mut worst = 0.0f64;
        for c in 0..dim {
            let mut x = DVector::zeros(dim);
            x[c] = 1.0;
            worst = worst.max(self.harmonic_map_residual(p, &x)?.abs());
        }
        Ok(worst)
    }

    /// Derivative of the energy density of xi along its own flow:
    /// `xi(|nabla xi|^2 / 2)`, evaluated through jets.
    pub fn xi_energy_derivative(&self, p: &Point) -> GeomResult<f64> {
        let s = self.structure;
        let d = self.point_data(p)?;
        let dim = d.dim;
        let ray = Ray { base: p.coords().to_vec(), dir: d.xi.iter().copied().collect() };
        let nxi_jets = s.xi_field().covariant_derivative(None)?.eval_ray(&ray, 1)?;
        let g_jets = s.chart().metric_jets(&ray, 1)?;
        let ginv_jets = jet_mat_inverse(&g_jets, dim, 1)?;
        let mut sq = crate::jet::Jet::constant(0.0, 1);
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for e in 0..dim {
                        sq = sq
                            + g_jets[a * dim + b]
                                * nxi_jets[a * dim + c]
                                * nxi_jets[b * dim + e]
                                * ginv_jets[c * dim + e];
                    }
                }
            }
        }
        Ok(0.5 * sq.deriv(1))
    }

    /// `nbar_xi J` (vanishes for normal structures): the contact-slot
    /// derivative of theta contracted with xi.
    pub fn dbar_xi_theta_residual(&self, p: &Point) -> GeomResult<f64> {
        let s = self.structure;
        let d = self.point_data(p)?;
        let w = s
            .theta_field()
            .with_contact_slots()
            .covariant_derivative(Some(s.contact()))?
            .value_at(p)?;
        let dim = d.dim;
        let m = DMatrix::from_fn(dim, dim, |a, b| {
            (0..dim).map(|c| w.data[(a * dim + b) * dim + c] * d.xi[c]).sum()
        });
        Ok(d.endo_norm(&m))
    }

    /// Trace identity for the Lee field:
    /// `sum_i (nbar_{J F_i} J)(F_i) - J deltabar J`; vanishes for normal structures.
    pub fn lee_trace_residual(&self, p: &Point) -> GeomResult<f64> {
        let d = self.point_data(p)?;
        let dim = d.dim;
        let mut sum = DVector::zeros(dim);
        for a in 0..dim {
            let mut acc = 0.0;
            for b in 0..dim {
                for c in 0..dim {
                    for e in 0..dim {
                        acc += d.bbar[(a * dim + b) * dim + c] * d.theta[(c, e)] * d.h_up[(b, e)];
                    }
                }
            }
            sum[a] = acc;
        }
        let rhs = &d.theta * d.lee_jbar();
        Ok(d.vec_norm(&(sum - rhs)))
    }

    /// Bracket identity for a horizontal vector extended with vanishing
    /// induced derivative at `p`:
    /// `[E, JE] - (nbar_E J)(E) - 2 <E, nabla_{theta E} xi> xi`.
    pub fn horizontal_bracket_residual(
        &self,
        p: &Point,
        sigma: &DVector<f64>,
    ) -> GeomResult<f64> {
        let s = self.structure;
        let d = self.point_data(p)?;
        let dim = d.dim;
        let eta_comp = d.eta.dot(sigma).abs();
        if eta_comp > 1e-10 {
            return Err(GeomError::NonHorizontal(eta_comp));
        }
        // Affine extension with vanishing adapted derivative at p; its 1-jet
        // agrees with a horizontal section that is nbar-parallel at p.
        let delta = adapted_connection_jets(s.chart(), s.contact(), &Ray::at_point(p), 0)?;
        let slope = DMatrix::from_fn(dim, dim, |a, e| {
            -(0..dim).map(|b| delta[(a * dim + e) * dim + b].value() * sigma[b]).sum::<f64>()
        });
        let ext = TensorField::affine_vector(s.chart().clone(), p, sigma.clone(), slope);
        let theta_field = s.theta_field();
        let jext = TensorField::apply_endo(&theta_field, &ext);
        let bracket = lie_bracket(&ext, &jext, p)?;

        let bsig = d.bbar_dir(sigma) * sigma;
        let pair = (sigma.transpose() * &d.g * (&d.nxi * (&d.theta * sigma)))[(0, 0)];
        let res = bracket - bsig - &d.xi * (2.0 * pair);
        Ok(d.vec_norm(&res))
    }
}
