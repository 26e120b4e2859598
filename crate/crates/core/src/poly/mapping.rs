//! Square polynomial mappings `F: C^n -> C^n`.

use std::fmt;

use num_complex::Complex64;

use super::linalg::poly_determinant;
use super::polynomial::{Degree, Polynomial};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolynomialMapping {
    components: Vec<Polynomial>,
}

impl PolynomialMapping {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::Domain("a mapping needs at least one component".into()));
        }
        if let Some(bad) = components.iter().find(|p| p.num_vars() != n) {
            return Err(Error::VarCountMismatch {
                left: n,
                right: bad.num_vars(),
            });
        }
        Ok(Self { components })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            components: (0..n).map(|i| Polynomial::var(n, i)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    /// Highest total degree over the components.
    pub fn degree(&self) -> Degree {
        self.components
            .iter()
            .map(Polynomial::degree)
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    /// Entry `(i, j)` is `dF_i/dx_j`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        self.components
            .iter()
            .map(|f| (0..self.n()).map(|j| f.derivative(j)).collect())
            .collect()
    }

    pub fn jacobian_determinant(&self) -> Polynomial {
        poly_determinant(&self.jacobian(), self.n())
    }

    /// Dominant iff the Jacobian determinant is not identically zero.
    pub fn is_dominant(&self) -> bool {
        !self.jacobian_determinant().is_zero()
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Vec<Complex64>> {
        self.components.iter().map(|f| f.evaluate(point)).collect()
    }

    /// Numeric Jacobian at a point.
    pub fn jacobian_at(&self, point: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        self.jacobian()
            .iter()
            .map(|row| row.iter().map(|p| p.evaluate(point)).collect())
            .collect()
    }
}

impl fmt::Display for PolynomialMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for PolynomialMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolynomialMapping{self}")
    }
}
