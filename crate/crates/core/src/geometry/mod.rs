//! Charts, tensor fields, connection and curvature: the numerical substrate.

pub mod chart;
pub mod connection;
pub mod field;
pub mod frame;
pub mod tensor;

pub use chart::{Axis, ChartManifold, Point, Ray};
pub use connection::{
    adapted_curvature_at, christoffel_at, christoffel_jets, curvature_apply,
    directional_derivative, exterior_derivative_1form, lie_bracket, riemann_at, rough_laplacian,
    second_covariant_derivative,
};
pub use field::{ContactData, SlotConn, TensorField};
pub use frame::{adapted_frame, gram_schmidt, random_adapted_frame, Frame};
pub use tensor::{endo_g_norm, multi_indices, vec_g_norm, Tensor, Valence};
