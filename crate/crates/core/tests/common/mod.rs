//! Finite-difference oracles, independent of the jet pipeline.
//!
//! Everything here differentiates the metric expressions numerically, so any
//! agreement with the jet-based engine is a genuine cross-check.

#![allow(dead_code)]

use acmgeo::geometry::chart::{ChartManifold, Point};
use nalgebra::{DMatrix, DVector};

/// Metric evaluated at raw coordinates (no domain validation, so stencils may
/// step slightly past the sampling margin).
pub fn metric_raw(chart: &ChartManifold, coords: &[f64]) -> DMatrix<f64> {
    let dim = chart.dim();
    DMatrix::from_fn(dim, dim, |i, j| {
        chart.metric_exprs()[i * dim + j]
            .eval_values(coords)
            .expect("metric defined at stencil point")
    })
}

/// Central-difference first partial of the metric.
pub fn fd_metric_partial(chart: &ChartManifold, p: &Point, c: usize, h: f64) -> DMatrix<f64> {
    let mut plus = p.coords().to_vec();
    let mut minus = p.coords().to_vec();
    plus[c] += h;
    minus[c] -= h;
    (metric_raw(chart, &plus) - metric_raw(chart, &minus)) / (2.0 * h)
}

/// Central-difference second partial of the metric.
pub fn fd_metric_second(
    chart: &ChartManifold,
    p: &Point,
    c: usize,
    d: usize,
    h: f64,
) -> DMatrix<f64> {
    if c == d {
        let mut plus = p.coords().to_vec();
        let mut minus = p.coords().to_vec();
        plus[c] += h;
        minus[c] -= h;
        (metric_raw(chart, &plus) + metric_raw(chart, &minus) - metric_raw(chart, p.coords()) * 2.0)
            / (h * h)
    } else {
        let mut pp = p.coords().to_vec();
        let mut pm = p.coords().to_vec();
        let mut mp = p.coords().to_vec();
        let mut mm = p.coords().to_vec();
        pp[c] += h;
        pp[d] += h;
        pm[c] += h;
        pm[d] -= h;
        mp[c] -= h;
        mp[d] += h;
        mm[c] -= h;
        mm[d] -= h;
        (metric_raw(chart, &pp) - metric_raw(chart, &pm) - metric_raw(chart, &mp)
            + metric_raw(chart, &mm))
            / (4.0 * h * h)
    }
}

/// Christoffel symbols from finite differences of the metric; layout
/// `(k*dim + i)*dim + j`.
pub fn fd_christoffel_at(chart: &ChartManifold, coords: &[f64], h: f64) -> Vec<f64> {
    let dim = chart.dim();
    let g = metric_raw(chart, coords);
    let ginv = g.try_inverse().expect("metric invertible");
    let mut dg = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut plus = coords.to_vec();
        let mut minus = coords.to_vec();
        plus[c] += h;
        minus[c] -= h;
        dg.push((metric_raw(chart, &plus) - metric_raw(chart, &minus)) / (2.0 * h));
    }
    let mut out = vec![0.0; dim * dim * dim];
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = 0.0;
                for l in 0..dim {
                    acc += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                out[(k * dim + i) * dim + j] = 0.5 * acc;
            }
        }
    }
    out
}

/// Riemann tensor from a fully finite-difference pipeline (five-point stencil
/// on Christoffel symbols that are themselves finite-difference quantities).
pub fn fd_riemann_at(chart: &ChartManifold, p: &Point) -> Vec<f64> {
    let dim = chart.dim();
    let h_inner = 1e-5;
    let h_outer = 1e-2;
    let gamma = fd_christoffel_at(chart, p.coords(), h_inner);
    let gamma_shift = |c: usize, steps: f64| {
        let mut q = p.coords().to_vec();
        q[c] += steps * h_outer;
        fd_christoffel_at(chart, &q, h_inner)
    };
    let mut dgamma = Vec::with_capacity(dim);
    for c in 0..dim {
        let g2 = gamma_shift(c, 2.0);
        let g1 = gamma_shift(c, 1.0);
        let m1 = gamma_shift(c, -1.0);
        let m2 = gamma_shift(c, -2.0);
        let d: Vec<f64> = (0..dim * dim * dim)
            .map(|k| (-g2[k] + 8.0 * g1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h_outer))
            .collect();
        dgamma.push(d);
    }
    let at = |a: usize, c: usize, b: usize| (a * dim + c) * dim + b;
    let mut out = vec![0.0; dim * dim * dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    let mut v = dgamma[c][at(a, d, b)] - dgamma[d][at(a, c, b)];
                    for e in 0..dim {
                        v += gamma[at(a, c, e)] * gamma[at(e, d, b)]
                            - gamma[at(a, d, e)] * gamma[at(e, c, b)];
                    }
                    out[((a * dim + b) * dim + c) * dim + d] = v;
                }
            }
        }
    }
    out
}

/// Sectional curvature from a stored curvature tensor.
pub fn sectional(
    r: &[f64],
    g: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> f64 {
    let dim = g.nrows();
    let rxyy = acmgeo::geometry::curvature_apply(r, dim, x, y, y);
    let num = (rxyy.transpose() * g * x)[(0, 0)];
    let xx = (x.transpose() * g * x)[(0, 0)];
    let yy = (y.transpose() * g * y)[(0, 0)];
    let xy = (x.transpose() * g * y)[(0, 0)];
    num / (xx * yy - xy * xy)
}
