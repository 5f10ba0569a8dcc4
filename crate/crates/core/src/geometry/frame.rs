//! g-orthonormal frames at a point.

use crate::error::{GeomError, GeomResult};
use crate::geometry::chart::{ChartManifold, Point};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// A g-orthonormal frame at a point.
#[derive(Clone, Debug)]
pub struct Frame {
    pub vectors: Vec<DVector<f64>>,
}

impl Frame {
    /// Gram matrix with respect to the chart metric (identity for a valid frame).
    pub fn gram(&self, chart: &ChartManifold, p: &Point) -> GeomResult<DMatrix<f64>> {
        let g = chart.metric_at(p)?;
        let n = self.vectors.len();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            (self.vectors[i].transpose() * &g * &self.vectors[j])[(0, 0)]
        }))
    }
}

/// Deterministic Gram-Schmidt over the given seed vectors; near-collinear
/// seeds are skipped in order.
pub fn gram_schmidt(
    chart: &ChartManifold,
    p: &Point,
    seeds: &[DVector<f64>],
) -> GeomResult<Frame> {
    let g = chart.metric_at(p)?;
    let ip = |u: &DVector<f64>, v: &DVector<f64>| (u.transpose() * &g * v)[(0, 0)];
    let dim = chart.dim();
    let mut vectors: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for seed in seeds {
        if vectors.len() == dim {
            break;
        }
        let mut v = seed.clone();
        for u in &vectors {
            let c = ip(u, &v);
            v -= u * c;
        }
        let n2 = ip(&v, &v);
        if n2 > 1e-16 {
            vectors.push(v / n2.sqrt());
        }
    }
    if vectors.len() != dim {
        return Err(GeomError::DegenerateFrame(format!(
            "only {} independent directions out of {dim}",
            vectors.len()
        )));
    }
    Ok(Frame { vectors })
}

/// Orthonormal frame adapted to a unit vector `xi`: the first `dim-1` vectors
/// span the g-orthogonal complement and the last one equals `xi`.
pub fn adapted_frame(chart: &ChartManifold, p: &Point, xi: &DVector<f64>) -> GeomResult<Frame> {
    let norm = chart.g_norm(p, xi)?;
    if (norm - 1.0).abs() > 1e-6 {
        return Err(GeomError::DegenerateFrame(format!(
            "|xi| deviates from 1 by {:.3e}",
            (norm - 1.0).abs()
        )));
    }
    let dim = chart.dim();
    let mut seeds = vec![xi.clone()];
    for e in 0..dim {
        let mut v = DVector::zeros(dim);
        v[e] = 1.0;
        seeds.push(v);
    }
    let frame = gram_schmidt(chart, p, &seeds)?;
    let mut vectors = frame.vectors;
    let first = vectors.remove(0);
    vectors.push(first);
    Ok(Frame { vectors })
}

/// Random adapted frame (horizontal part mixed by the RNG), for
/// frame-independence checks.
pub fn random_adapted_frame(
    chart: &ChartManifold,
    p: &Point,
    xi: &DVector<f64>,
    rng: &mut impl Rng,
) -> GeomResult<Frame> {
    let dim = chart.dim();
    let mut seeds = vec![xi.clone()];
    for _ in 0..dim + 2 {
        seeds.push(DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0)));
    }
    let frame = gram_schmidt(chart, p, &seeds)?;
    let mut vectors = frame.vectors;
    let first = vectors.remove(0);
    vectors.push(first);
    Ok(Frame { vectors })
}
