//! Exact polynomial arithmetic, mappings and dominance.

pub mod gaussian;
pub mod linalg;
pub mod mapping;
pub mod polynomial;

pub use gaussian::GaussianRational;
pub use mapping::PolynomialMapping;
pub use polynomial::{Degree, Monomial, Polynomial};
