//! Bergman projections and weighted `L^p` norms on the Hartogs triangle and
//! its model domains, with exact rational arithmetic where the integrals
//! allow it and graded polar quadrature where they do not.

pub mod bergman;
pub mod cli;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod quadrature;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{Domain, Point2C, Weight};
pub use series::{BiIndex, CoeffSeries, ExactSeries, FloatSeries};
