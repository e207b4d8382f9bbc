//! Numerical toolkit for Bergman spaces of circular domains: log-space
//! geometry, rational bases, Gram-based kernel lower bounds, Laurent splits
//! and the ring-of-holes construction of a Bergman complete domain.

pub mod cli;
pub mod closed_forms;
pub mod distance;
pub mod domain;
pub mod error;
pub mod hilbert;
pub mod laurent_split;
pub mod log_scalar;
pub mod quadrature;
pub mod zwonek;

pub use domain::{CircularDomain, ComplexPoint, HoleSpec};
pub use error::{BergmanError, Result};
pub use log_scalar::LogScalar;
