//! Algebraic toolkit for metric connections with skew torsion in low dimensions.

pub mod algebra;
pub mod catalog;
pub mod checks;
pub mod clifford;
pub mod curvature;
pub mod error;
pub mod exterior;
pub mod homogeneous;
pub mod identify;
pub mod linalg;
pub mod nomizu;
pub mod report;
pub mod skew;
pub mod suite;
pub mod tolerance;
pub mod torsion;

pub use error::{Error, Result};
pub use exterior::Multivector;
pub use tolerance::ToleranceConfig;
