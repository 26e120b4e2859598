//! Rational functions in the sequence parameters.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{GaussianRational, Monomial, Polynomial};

/// `num / den` with `den` not identically zero.
///
/// Kept reduced by constant and monomial content and by exact division when
/// one side divides the other. Equality is decided by cross-multiplication, so
/// a missed common factor never affects correctness.
#[derive(Clone)]
pub struct ParamField {
    num: Polynomial,
    den: Polynomial,
}

impl ParamField {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if num.num_vars() != den.num_vars() {
            return Err(Error::VarCountMismatch {
                left: num.num_vars(),
                right: den.num_vars(),
            });
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let n = p.num_vars();
        Self {
            num: p,
            den: Polynomial::one(n),
        }
    }

    pub fn zero(num_params: usize) -> Self {
        Self::from_poly(Polynomial::zero(num_params))
    }

    pub fn one(num_params: usize) -> Self {
        Self::from_poly(Polynomial::one(num_params))
    }

    pub fn constant(num_params: usize, c: GaussianRational) -> Self {
        Self::from_poly(Polynomial::constant(num_params, c))
    }

    pub fn param(num_params: usize, idx: usize) -> Self {
        Self::from_poly(Polynomial::var(num_params, idx))
    }

    fn reduce(num: Polynomial, den: Polynomial) -> Self {
        let n = num.num_vars();
        if num.is_zero() {
            return Self::zero(n);
        }
        if let Some(c) = den.constant_value() {
            let inv = c.inv().expect("nonzero denominator");
            return Self::from_poly(num.scale(&inv));
        }
        let (mut num, mut den) = (num, den);
        let mc = num.monomial_content();
        let dc = den.monomial_content();
        let common = Monomial(mc.0.iter().zip(&dc.0).map(|(a, b)| *a.min(b)).collect());
        if common.degree() > 0 {
            num = num.div_monomial(&common).expect("content divides");
            den = den.div_monomial(&common).expect("content divides");
        }
        if let Some(q) = num.div_exact(&den) {
            return Self::from_poly(q);
        }
        if let Some(q) = den.div_exact(&num) {
            // num/den = 1/q
            num = Polynomial::one(n);
            den = q;
            if let Some(c) = den.constant_value() {
                return Self::from_poly(num.scale(&c.inv().expect("nonzero")));
            }
        }
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        let inv = lc.inv().expect("nonzero leading coefficient");
        Self {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn num_params(&self) -> usize {
        self.num.num_vars()
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Parameter-free.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if !self.den.is_constant() {
            return None;
        }
        let d = self.den.constant_value()?;
        Some(&self.num.constant_value()? * &d.inv().ok()?)
    }

    /// Parameters the value actually depends on.
    pub fn variables(&self) -> Vec<usize> {
        let mut v = self.num.variables();
        v.extend(self.den.variables());
        v.sort_unstable();
        v.dedup();
        v
    }

    fn add_impl(&self, rhs: &Self) -> Self {
        if self.den.is_one_poly() && rhs.den.is_one_poly() {
            return Self::from_poly(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return Self::reduce(&self.num + &rhs.num, self.den.clone());
        }
        Self::reduce(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }

    fn sub_impl(&self, rhs: &Self) -> Self {
        self.add_impl(&rhs.neg_impl())
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        if self.den.is_one_poly() && rhs.den.is_one_poly() {
            return Self::from_poly(&self.num * &rhs.num);
        }
        Self::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }

    fn neg_impl(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_params());
        }
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        Self {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        let dn = self.num.derivative(var);
        if self.den.is_constant() {
            return Self::reduce(dn, self.den.clone());
        }
        let dd = self.den.derivative(var);
        Self::reduce(
            &(&dn * &self.den) - &(&self.num * &dd),
            &self.den * &self.den,
        )
    }

    pub fn evaluate_exact(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        let d = self.den.evaluate_exact(point)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(&self.num.evaluate_exact(point)? * &d.inv()?)
    }

    /// Replaces parameter `v` by `images[v]`.
    pub fn compose(&self, images: &[ParamField]) -> Result<Self> {
        if images.iter().all(ParamField::is_polynomial) {
            let polys: Vec<Polynomial> = images.iter().map(ParamField::as_polynomial).collect();
            let num = self.num.compose(&polys)?;
            let den = self.den.compose(&polys)?;
            return Self::new(num, den);
        }
        let num = compose_poly(&self.num, images)?;
        let den = compose_poly(&self.den, images)?;
        num.checked_div(&den)
    }

    fn as_polynomial(&self) -> Polynomial {
        let c = self.den.constant_value().expect("polynomial field element");
        self.num.scale(&c.inv().expect("nonzero"))
    }

    /// The value as a polynomial, if it is one.
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        self.is_polynomial().then(|| self.as_polynomial())
    }

    pub fn render_with(&self, names: &[String]) -> String {
        if self.den.is_one_poly() {
            return self.num.render_with(names);
        }
        format!(
            "({})/({})",
            self.num.render_with(names),
            self.den.render_with(names)
        )
    }
}

fn compose_poly(p: &Polynomial, images: &[ParamField]) -> Result<ParamField> {
    if images.len() != p.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: p.num_vars(),
            got: images.len(),
        });
    }
    let target = images.first().map_or(0, ParamField::num_params);
    let mut powers: Vec<Vec<ParamField>> = images
        .iter()
        .map(|f| vec![ParamField::one(target), f.clone()])
        .collect();
    let mut acc = ParamField::zero(target);
    for (m, c) in p.terms() {
        let mut t = ParamField::constant(target, c.clone());
        for (v, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            while powers[v].len() <= e as usize {
                let next = powers[v].last().unwrap() * &images[v];
                powers[v].push(next);
            }
            t = &t * &powers[v][e as usize];
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

trait IsOnePoly {
    fn is_one_poly(&self) -> bool;
}

impl IsOnePoly for Polynomial {
    fn is_one_poly(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl std::ops::$trait<&ParamField> for &ParamField {
            type Output = ParamField;
            fn $method(self, rhs: &ParamField) -> ParamField {
                self.$imp(rhs)
            }
        }
        impl std::ops::$trait for ParamField {
            type Output = ParamField;
            fn $method(self, rhs: ParamField) -> ParamField {
                self.$imp(&rhs)
            }
        }
    };
}

field_binop!(Add, add, add_impl);
field_binop!(Sub, sub, sub_impl);
field_binop!(Mul, mul, mul_impl);

impl std::ops::Neg for &ParamField {
    type Output = ParamField;
    fn neg(self) -> ParamField {
        self.neg_impl()
    }
}

impl std::ops::Neg for ParamField {
    type Output = ParamField;
    fn neg(self) -> ParamField {
        self.neg_impl()
    }
}

impl PartialEq for ParamField {
    fn eq(&self, other: &Self) -> bool {
        if self.num_params() != other.num_params() {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for ParamField {}

impl From<Polynomial> for ParamField {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for ParamField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Polynomial::default_names(self.num_params(), "p");
        write!(f, "{}", self.render_with(&names))
    }
}

impl fmt::Debug for ParamField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: usize) -> ParamField {
        ParamField::param(2, i)
    }

    #[test]
    fn reduces_common_factors() {
        let a = &p(0) * &p(1);
        let q = a.checked_div(&p(1)).unwrap();
        assert!(q.is_polynomial());
        assert_eq!(q, p(0));
        let r = p(0).checked_div(&(&p(0) * &p(1))).unwrap();
        assert_eq!(r, p(1).inv().unwrap());
    }

    #[test]
    fn arithmetic_round_trip() {
        let x = (p(0) + ParamField::one(2)).checked_div(&p(1)).unwrap();
        let y = &(&x * &p(1)) - &ParamField::one(2);
        assert_eq!(y, p(0));
        assert!(ParamField::zero(2).inv().is_err());
    }

    #[test]
    fn derivative_of_quotient() {
        // d/dp0 (p0 / p1) = 1 / p1
        let q = p(0).checked_div(&p(1)).unwrap();
        assert_eq!(q.derivative(0), p(1).inv().unwrap());
        // d/dp1 (p0 / p1) = -p0 / p1^2
        let expect = (-p(0)).checked_div(&p(1).pow(2)).unwrap();
        assert_eq!(q.derivative(1), expect);
    }

    #[test]
    fn compose_with_rational_images() {
        // (p0 + p1) with p0 -> 1/p1
        let f = p(0) + p(1);
        let out = f.compose(&[p(1).inv().unwrap(), p(1)]).unwrap();
        let expect = (ParamField::one(2) + p(1).pow(2)).checked_div(&p(1)).unwrap();
        assert_eq!(out, expect);
    }
}
