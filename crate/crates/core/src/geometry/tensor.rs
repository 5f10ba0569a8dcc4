//! Dense tensor values at a point, with a small index toolkit.

use nalgebra::{DMatrix, DVector};

/// Valence of a tensor field: `con` contravariant slots, `cov` covariant slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Valence {
    pub con: usize,
    pub cov: usize,
}

impl Valence {
    pub fn new(con: usize, cov: usize) -> Valence {
        Valence { con, cov }
    }

    pub fn rank(&self) -> usize {
        self.con + self.cov
    }

    pub fn components(&self, dim: usize) -> usize {
        dim.pow(self.rank() as u32)
    }
}

/// Dense tensor value: index layout is contravariant slots first, then
/// covariant, row-major.
#[derive(Clone, Debug)]
pub struct Tensor {
    pub dim: usize,
    pub valence: Valence,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(dim: usize, valence: Valence) -> Tensor {
        Tensor { dim, valence, data: vec![0.0; valence.components(dim)] }
    }

    pub fn from_data(dim: usize, valence: Valence, data: Vec<f64>) -> Tensor {
        assert_eq!(data.len(), valence.components(dim));
        Tensor { dim, valence, data }
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.valence.rank());
        let mut out = 0;
        for &i in idx {
            out = out * self.dim + i;
        }
        out
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let k = self.flat(idx);
        self.data[k] = v;
    }

    /// View a (1,1) tensor as a matrix `A[(a, b)] = T^a_b`.
    pub fn as_endo(&self) -> DMatrix<f64> {
        assert_eq!((self.valence.con, self.valence.cov), (1, 1));
        DMatrix::from_fn(self.dim, self.dim, |a, b| self.data[a * self.dim + b])
    }

    pub fn as_vector(&self) -> DVector<f64> {
        assert_eq!((self.valence.con, self.valence.cov), (1, 0));
        DVector::from_column_slice(&self.data)
    }

    pub fn as_covector(&self) -> DVector<f64> {
        assert_eq!((self.valence.con, self.valence.cov), (0, 1));
        DVector::from_column_slice(&self.data)
    }
}

/// Iterate all multi-indices of the given rank over `dim` values.
pub fn multi_indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0usize; rank];
        for slot in (0..rank).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

/// Frobenius norm of an endomorphism with respect to the metric:
/// `|A|^2 = g_ac g^bd A^a_b A^c_d` (equals the frame Frobenius norm in any
/// g-orthonormal frame).
pub fn endo_g_norm(a: &DMatrix<f64>, g: &DMatrix<f64>, ginv: &DMatrix<f64>) -> f64 {
    let m = g * a * ginv * a.transpose();
    m.trace().max(0.0).sqrt()
}

pub fn vec_g_norm(v: &DVector<f64>, g: &DMatrix<f64>) -> f64 {
    ((v.transpose() * g * v)[(0, 0)]).max(0.0).sqrt()
}
