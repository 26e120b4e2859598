//! Laurent polynomials in the sequence index `k` with parameter coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::field::ParamField;
use crate::error::{Error, Result};
use crate::poly::{GaussianRational, Polynomial};

/// `Σ c_e k^e` over a finite set of integer exponents.
#[derive(Clone, PartialEq, Eq)]
pub struct ParamLaurent {
    terms: BTreeMap<i32, ParamField>,
    num_params: usize,
}

impl ParamLaurent {
    pub fn zero(num_params: usize) -> Self {
        Self {
            terms: BTreeMap::new(),
            num_params,
        }
    }

    pub fn constant(c: ParamField) -> Self {
        Self::term(0, c)
    }

    /// `c * k^e`.
    pub fn term(e: i32, c: ParamField) -> Self {
        let mut out = Self::zero(c.num_params());
        out.add_term(e, c);
        out
    }

    pub fn from_terms(num_params: usize, terms: impl IntoIterator<Item = (i32, ParamField)>) -> Result<Self> {
        let mut out = Self::zero(num_params);
        for (e, c) in terms {
            if c.num_params() != num_params {
                return Err(Error::VarCountMismatch {
                    left: num_params,
                    right: c.num_params(),
                });
            }
            out.add_term(e, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, e: i32, c: ParamField) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(e, s);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &ParamField)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coefficient(&self, e: i32) -> ParamField {
        self.terms
            .get(&e)
            .cloned()
            .unwrap_or_else(|| ParamField::zero(self.num_params))
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading(&self) -> Option<(i32, &ParamField)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    /// Coefficients of strictly positive powers, highest first.
    pub fn positive_part(&self) -> Vec<(i32, ParamField)> {
        self.terms
            .range(1..)
            .rev()
            .map(|(e, c)| (*e, c.clone()))
            .collect()
    }

    pub fn scale(&self, c: &ParamField) -> Self {
        let mut out = Self::zero(self.num_params);
        for (e, t) in &self.terms {
            out.add_term(*e, t * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(ParamField::one(self.num_params));
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Applies a parameter substitution to every coefficient.
    pub fn compose_params(&self, images: &[ParamField]) -> Result<Self> {
        let m = images.first().map_or(self.num_params, ParamField::num_params);
        let mut out = Self::zero(m);
        for (e, c) in &self.terms {
            out.add_term(*e, c.compose(images)?);
        }
        Ok(out)
    }

    /// Numeric value at index `k` with the parameters set to `params`.
    pub fn evaluate(&self, k: f64, params: &[GaussianRational]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            acc += c.evaluate_exact(params)?.to_complex() * k.powi(*e);
        }
        Ok(acc)
    }

    pub fn render_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let c = c.render_with(names);
                let c = if c.contains([' ', '/']) { format!("({c})") } else { c };
                match *e {
                    0 => c,
                    1 => format!("{c}*k"),
                    -1 => format!("{c}/k"),
                    e if e > 0 => format!("{c}*k^{e}"),
                    e => format!("{c}/k^{}", -e),
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl<'a> std::ops::Add<&'a ParamLaurent> for &'a ParamLaurent {
    type Output = ParamLaurent;
    fn add(self, rhs: &ParamLaurent) -> ParamLaurent {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> std::ops::Sub<&'a ParamLaurent> for &'a ParamLaurent {
    type Output = ParamLaurent;
    fn sub(self, rhs: &ParamLaurent) -> ParamLaurent {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl<'a> std::ops::Mul<&'a ParamLaurent> for &'a ParamLaurent {
    type Output = ParamLaurent;
    fn mul(self, rhs: &ParamLaurent) -> ParamLaurent {
        let mut out = ParamLaurent::zero(self.num_params);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for ParamLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Polynomial::default_names(self.num_params, "p");
        write!(f, "{}", self.render_with(&names))
    }
}

impl fmt::Debug for ParamLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
