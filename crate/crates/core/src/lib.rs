//! Symbolic-numeric classification of the asymptotic (non-properness) set of
//! dominant polynomial mappings `C^3 -> C^3` of degree 2.
//!
//! The pipeline: enumerate façons ([`facon`]), build parametrised diverging
//! sequences and take exact limits ([`limit`]), find bounded combinations of
//! coordinates along each façon ([`pertinent`]), and turn the resulting limit
//! parametrisations into implicit surfaces ([`classify`]). [`probe`] is an
//! independent floating-point oracle that samples the asymptotic set directly.

pub mod error;
pub mod classify;
pub mod cli;
pub mod facon;
pub mod limit;
pub mod parser;
pub mod pertinent;
pub mod poly;
pub mod probe;
pub mod suite;
pub mod rng;

pub use error::{Error, Result};
pub use facon::{enumerate_facons, facon_count_formula, group_facons_n3, Facon, FaconGroup, GroupLabel};
pub use parser::{parse_mapping, render_mapping, ParseError};
pub use poly::{Degree, GaussianRational, Polynomial, PolynomialMapping};

/// Toolkit version embedded in reports and cache keys.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
