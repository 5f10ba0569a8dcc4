//! Coordinate charts carrying a metric given by scalar expressions.

use crate::dsl::ScalarExpr;
use crate::error::{GeomError, GeomResult};
use crate::jet::Jet;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// One coordinate axis of the chart's domain box.
#[derive(Clone, Debug)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    /// Periodic axes wrap instead of rejecting out-of-range values.
    pub periodic: bool,
}

impl Axis {
    pub fn open(lo: f64, hi: f64) -> Axis {
        Axis { lo, hi, periodic: false }
    }

    pub fn periodic(lo: f64, hi: f64) -> Axis {
        Axis { lo, hi, periodic: true }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A point of a chart, wrapped into the domain box on periodic axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Line `s -> base + s*dir` along which jets are propagated.
#[derive(Clone, Debug)]
pub struct Ray {
    pub base: Vec<f64>,
    pub dir: Vec<f64>,
}

impl Ray {
    pub fn at_point(p: &Point) -> Ray {
        Ray { base: p.0.clone(), dir: vec![0.0; p.0.len()] }
    }

    pub fn axis(p: &Point, axis: usize) -> Ray {
        let mut dir = vec![0.0; p.0.len()];
        dir[axis] = 1.0;
        Ray { base: p.0.clone(), dir }
    }

    /// Seed coordinate jets for evaluation along this ray.
    pub fn seed(&self, order: usize) -> Vec<Jet> {
        self.base
            .iter()
            .zip(&self.dir)
            .map(|(&b, &d)| Jet::seeded(b, d, order))
            .collect()
    }
}

/// A coordinate box with a metric field: the substrate every structure lives on.
#[derive(Debug)]
pub struct ChartManifold {
    name: String,
    dim: usize,
    axes: Vec<Axis>,
    coord_names: Vec<String>,
    /// Row-major dim*dim metric components.
    metric: Vec<ScalarExpr>,
}

impl ChartManifold {
    pub fn new(
        name: impl Into<String>,
        axes: Vec<Axis>,
        coord_names: Vec<String>,
        metric: Vec<ScalarExpr>,
    ) -> GeomResult<Arc<ChartManifold>> {
        let dim = axes.len();
        if metric.len() != dim * dim {
            return Err(GeomError::Dimension(format!(
                "metric needs {} components for dim {dim}, got {}",
                dim * dim,
                metric.len()
            )));
        }
        if coord_names.len() != dim {
            return Err(GeomError::Dimension("coordinate name count != dim".into()));
        }
        Ok(Arc::new(ChartManifold { name: name.into(), dim, axes, coord_names, metric }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn coord_names(&self) -> Vec<&str> {
        self.coord_names.iter().map(|s| s.as_str()).collect()
    }

    pub fn metric_exprs(&self) -> &[ScalarExpr] {
        &self.metric
    }

    /// Wrap periodic coordinates and check the rest against the box.
    pub fn point(&self, coords: Vec<f64>) -> GeomResult<Point> {
        if coords.len() != self.dim {
            return Err(GeomError::Dimension(format!(
                "point has {} coordinates, chart dim is {}",
                coords.len(),
                self.dim
            )));
        }
        let mut out = coords;
        for (axis, (x, a)) in out.iter_mut().zip(&self.axes).enumerate() {
            if a.periodic {
                let w = a.width();
                *x = a.lo + (*x - a.lo).rem_euclid(w);
            } else if *x <= a.lo || *x >= a.hi {
                return Err(GeomError::OutsideDomain { axis, value: *x });
            }
        }
        Ok(Point(out))
    }

    /// Metric components as jets along a ray.
    pub fn metric_jets(&self, ray: &Ray, order: usize) -> GeomResult<Vec<Jet>> {
        let seeds = ray.seed(order);
        self.metric
            .iter()
            .map(|e| e.eval(&seeds).map_err(GeomError::from))
            .collect()
    }

    pub fn metric_at(&self, p: &Point) -> GeomResult<DMatrix<f64>> {
        let jets = self.metric_jets(&Ray::at_point(p), 0)?;
        Ok(DMatrix::from_fn(self.dim, self.dim, |i, j| jets[i * self.dim + j].value()))
    }

    pub fn inverse_metric_at(&self, p: &Point) -> GeomResult<DMatrix<f64>> {
        let g = self.metric_at(p)?;
        g.try_inverse().ok_or(GeomError::SingularMetric("inverting the metric"))
    }

    /// Symmetry and positive-definiteness of the metric at a point.
    pub fn validate_metric_at(&self, p: &Point) -> GeomResult<()> {
        let g = self.metric_at(p)?;
        for i in 0..self.dim {
            for j in 0..i {
                if (g[(i, j)] - g[(j, i)]).abs() > 1e-14 * (1.0 + g[(i, j)].abs()) {
                    return Err(GeomError::Dimension(format!(
                        "metric not symmetric at sampled point: g[{i}{j}] != g[{j}{i}]"
                    )));
                }
            }
        }
        if g.cholesky().is_none() {
            return Err(GeomError::SingularMetric("metric not positive definite at sampled point"));
        }
        Ok(())
    }

    pub fn g_inner(&self, p: &Point, u: &DVector<f64>, v: &DVector<f64>) -> GeomResult<f64> {
        let g = self.metric_at(p)?;
        Ok((u.transpose() * g * v)[(0, 0)])
    }

    pub fn g_norm(&self, p: &Point, u: &DVector<f64>) -> GeomResult<f64> {
        Ok(self.g_inner(p, u, u)?.max(0.0).sqrt())
    }
}
