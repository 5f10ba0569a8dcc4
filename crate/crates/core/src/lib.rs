//! Numerical differential geometry for almost contact metric structures on
//! coordinate charts: an expression DSL, jet-based tensor calculus, normality
//! and harmonicity residuals, and twisted-product submersion machinery.

pub mod acms;
pub mod catalog;
pub mod dsl;
pub mod error;
pub mod fibration;
pub mod geometry;
pub mod harmonicity;
pub mod jet;
pub mod report;
pub mod runner;
pub mod sampling;

pub use acms::AcmStructure;
pub use dsl::{ParseError, ScalarExpr};
pub use error::{GeomError, GeomResult};
pub use geometry::{Axis, ChartManifold, Frame, Point, Ray, Tensor, TensorField, Valence};
pub use harmonicity::ContactConnection;
pub use jet::Jet;
pub use report::{CheckReport, Report, Verdict};
