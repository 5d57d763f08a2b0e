//! Numerical geometry of the sub-Riemannian 3-sphere.

pub mod calibration;
pub mod error;
pub mod isoperim;
pub mod pansu;
pub mod plateau;
pub mod quadrature;
pub mod s3;
pub mod spline;
pub mod surfaces;

pub use error::{Error, Result};
pub use quadrature::{Estimate, QuadratureSpec};
pub use s3::{Point, TangentVector};
