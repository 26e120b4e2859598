//! Exact Gaussian rationals `a + b*i` with `a, b` in Q.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigRational::from_integer(v.into()), BigRational::zero())
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::new(BigRational::new(num.into(), den.into()), BigRational::zero())
    }

    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(
            BigRational::new(re_num.into(), re_den.into()),
            BigRational::new(im_num.into(), im_den.into()),
        )
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2`, always rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Least common multiple of the real and imaginary denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }

    /// Exact square root when it exists in Q(i).
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let modulus = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(2.into());
        let re = rational_sqrt(&((&modulus + &self.re) / &two))?;
        let mut im = rational_sqrt(&((&modulus - &self.re) / &two))?;
        if self.im.is_negative() {
            im = -im;
        }
        let root = Self::new(re, im);
        (&root * &root == *self).then_some(root)
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(v: BigRational) -> Self {
        Self::new(v, BigRational::zero())
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::new(&self.re * &rhs.re, BigRational::zero());
        }
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

/// Panics on division by zero, like the primitive numeric types.
impl Div for GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("division by zero Gaussian rational")
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> Self {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders as `a/b+c/d*i`; zero parts are omitted, `i` alone for unit imaginary part.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let im_abs = self.im.abs();
        let im_str = if im_abs.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", fmt_rational(&im_abs))
        };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{im_str}")
            } else {
                write!(f, "{im_str}")
            }
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{sign}{im_str}", fmt_rational(&self.re))
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Accepts the display form; used in tests and by the Python bindings.
    fn from_str(s: &str) -> Result<Self> {
        let poly = crate::parser::parse_expression(s, 0)
            .map_err(|e| Error::Domain(format!("not a Gaussian rational: {s}: {e}")))?;
        poly.constant_value()
            .ok_or_else(|| Error::Domain(format!("not a constant: {s}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_reduced_form() {
        let a = GaussianRational::from_frac(2, 4);
        let b = GaussianRational::from_frac(-1, -2);
        assert_eq!(a, b);
        assert_eq!(a.re.denom(), &BigInt::from(2));
    }

    #[test]
    fn inverse_and_division() {
        let z = GaussianRational::from_parts(1, 2, 1, 1);
        let w = z.inv().unwrap();
        assert_eq!(&z * &w, GaussianRational::one());
        assert!(GaussianRational::zero().inv().is_err());
    }

    #[test]
    fn exact_square_roots() {
        let z = GaussianRational::from_parts(3, 1, 4, 1);
        let r = z.sqrt().unwrap();
        assert_eq!(&r * &r, z);
        assert_eq!(GaussianRational::from_int(-1).sqrt(), Some(GaussianRational::i()));
        assert!(GaussianRational::from_int(2).sqrt().is_none());
    }

    #[test]
    fn display() {
        assert_eq!(GaussianRational::from_parts(1, 2, 1, 1).to_string(), "1/2+i");
        assert_eq!(GaussianRational::from_parts(0, 1, -1, 2).to_string(), "-1/2*i");
        assert_eq!(GaussianRational::from_int(-3).to_string(), "-3");
    }
}
