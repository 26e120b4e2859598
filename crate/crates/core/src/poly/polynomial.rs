//! Sparse multivariate polynomials over the Gaussian rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::gaussian::GaussianRational;
use crate::error::{Error, Result};

/// Exponent vector, ordered graded-lexicographically with `x1 > x2 > ...`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, var: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[var] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total degree; the zero polynomial has degree `NegInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, GaussianRational>,
    num_vars: usize,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            terms: BTreeMap::new(),
            num_vars,
        }
    }

    pub fn constant(num_vars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(num_vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(num_vars), c);
        }
        p
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, GaussianRational::one())
    }

    /// The coordinate function `x_{var+1}` (0-based `var`).
    pub fn var(num_vars: usize, var: usize) -> Self {
        assert!(var < num_vars, "variable index {var} out of range");
        Self::monomial(num_vars, Monomial::var(num_vars, var), GaussianRational::one())
    }

    pub fn monomial(num_vars: usize, m: Monomial, c: GaussianRational) -> Self {
        assert_eq!(m.0.len(), num_vars);
        let mut p = Self::zero(num_vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, merging and pruning.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, GaussianRational)>,
    {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::VarCountMismatch {
                    left: num_vars,
                    right: e.len(),
                });
            }
            p.add_term(Monomial(e), &c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(Monomial::degree)
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            Some(GaussianRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Variables that occur in some term.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.num_vars)
            .filter(|&v| self.terms.keys().any(|m| m.0[v] > 0))
            .collect()
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch {
                left: self.num_vars,
                right: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = Self::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        Self {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
            num_vars: self.num_vars,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.num_vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            out.add_term(m2, &(c * &GaussianRational::from_int(e as i64)));
        }
        out
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: point.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= x.powu(e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn evaluate_exact(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: point.len(),
            });
        }
        // Cache powers per variable; terms share them heavily.
        let mut powers: Vec<Vec<GaussianRational>> = point
            .iter()
            .map(|x| vec![GaussianRational::one(), x.clone()])
            .collect();
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[v];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &point[v];
                    cache.push(next);
                }
                t = &t * &cache[e as usize];
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Composition: replaces `x_j` by `images[j]`; all images share a variable count.
    pub fn compose(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: images.len(),
            });
        }
        let target_vars = images.first().map_or(0, Polynomial::num_vars);
        if let Some(bad) = images.iter().find(|p| p.num_vars != target_vars) {
            return Err(Error::VarCountMismatch {
                left: target_vars,
                right: bad.num_vars,
            });
        }
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(target_vars), p.clone()])
            .collect();
        let mut acc = Polynomial::zero(target_vars);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target_vars, c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[v];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &images[v];
                    cache.push(next);
                }
                t = &t * &cache[e as usize];
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Substitutes a single variable by a polynomial in the same ring.
    pub fn substitute_var(&self, var: usize, value: &Polynomial) -> Polynomial {
        let images: Vec<Polynomial> = (0..self.num_vars)
            .map(|v| {
                if v == var {
                    value.clone()
                } else {
                    Polynomial::var(self.num_vars, v)
                }
            })
            .collect();
        self.compose(&images).expect("same ring")
    }

    /// Largest monomial dividing every term (the zero polynomial gives `1`).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one(self.num_vars);
        };
        let mut g = first.0.clone();
        for m in it {
            for (a, b) in g.iter_mut().zip(&m.0) {
                *a = (*a).min(*b);
            }
        }
        Monomial(g)
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Polynomial> {
        if !self.terms.keys().all(|t| m.divides(t)) {
            return None;
        }
        Some(Self {
            terms: self.terms.iter().map(|(t, c)| (t.div(m), c.clone())).collect(),
            num_vars: self.num_vars,
        })
    }

    /// Exact division; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = divisor.leading()?;
        let lc_inv = lc.inv().ok()?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.num_vars);
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = m.div(lm);
            let qc = c * &lc_inv;
            let step = Polynomial::monomial(self.num_vars, qm, qc);
            rem = &rem - &(&step * divisor);
            quot = &quot + &step;
        }
        Some(quot)
    }

    /// Makes the leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }

    /// Writes `self = a * v + b` when `self` has degree at most one in `var`.
    pub fn split_linear(&self, var: usize) -> Option<(Polynomial, Polynomial)> {
        if self.degree_in(var) > 1 {
            return None;
        }
        let mut a = Polynomial::zero(self.num_vars);
        let mut b = Polynomial::zero(self.num_vars);
        for (m, c) in &self.terms {
            if m.0[var] == 1 {
                let mut m2 = m.clone();
                m2.0[var] = 0;
                a.add_term(m2, c);
            } else {
                b.add_term(m.clone(), c);
            }
        }
        Some((a, b))
    }

    /// Re-embeds into a ring with `num_vars` variables, keeping the first ones.
    pub fn with_num_vars(&self, num_vars: usize) -> Result<Polynomial> {
        let mut out = Polynomial::zero(num_vars);
        for (m, c) in &self.terms {
            if m.0.iter().skip(num_vars).any(|&e| e > 0) {
                return Err(Error::Structural(format!(
                    "polynomial uses variables beyond {num_vars}"
                )));
            }
            let mut e = m.0.clone();
            e.resize(num_vars, 0);
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    /// Renders with explicit variable names.
    pub fn render_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = render_monomial(m, names);
            let (negative, body) = render_coefficient(c);
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            match (body, mono.is_empty()) {
                (None, true) => out.push('1'),
                (None, false) => out.push_str(&mono),
                (Some(b), true) => out.push_str(&b),
                (Some(b), false) => {
                    out.push_str(&b);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }

    pub fn default_names(num_vars: usize, prefix: &str) -> Vec<String> {
        (1..=num_vars).map(|i| format!("{prefix}{i}")).collect()
    }
}

fn render_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (v, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[v].clone()),
            _ => parts.push(format!("{}^{e}", names[v])),
        }
    }
    parts.join("*")
}

/// Returns (sign, magnitude text); `None` text means a unit magnitude.
fn render_coefficient(c: &GaussianRational) -> (bool, Option<String>) {
    if c.im.is_zero() {
        let neg = c.re.is_negative();
        let a = c.re.abs();
        return (neg, (!a.is_one()).then(|| GaussianRational::from(a).to_string()));
    }
    if c.re.is_zero() {
        let neg = c.im.is_negative();
        let a = c.im.abs();
        let body = if a.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", GaussianRational::from(a))
        };
        return (neg, Some(body));
    }
    (false, Some(format!("({c})")))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_with(&Self::default_names(self.num_vars, "x")))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({self})", self.num_vars)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl std::ops::$trait<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            /// Panics on a variable-count mismatch; use the `try_` form to recover.
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$try(rhs).expect("polynomial variable counts differ")
            }
        }
        impl std::ops::$trait for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$try(&rhs).expect("polynomial variable counts differ")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-GaussianRational::one())
    }
}

impl std::ops::Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Polynomial {
        Polynomial::var(3, i)
    }

    #[test]
    fn additive_inverse_is_zero() {
        let p = &x(0) + &(-&x(0));
        assert!(p.is_zero());
        assert_eq!(p.degree(), Degree::NegInfinity);
    }

    #[test]
    fn like_terms_merge() {
        let m = &x(0) * &x(1);
        let s = &m + &m;
        assert_eq!(s, m.scale(&GaussianRational::from_int(2)));
        assert_eq!(s.to_string(), "2*x1*x2");
    }

    #[test]
    fn distribution_and_absorption() {
        let p = &(&x(0) - &x(1)) * &x(0);
        assert_eq!(p.to_string(), "x1^2 - x1*x2");
        assert!((&p * &Polynomial::zero(3)).is_zero());
    }

    #[test]
    fn mismatch_is_structural_error() {
        let a = Polynomial::var(2, 0);
        assert!(matches!(
            a.try_add(&x(0)),
            Err(Error::VarCountMismatch { .. })
        ));
        assert!(a.try_mul(&x(0)).is_err());
    }

    #[test]
    fn rendering_uses_graded_lex_descending() {
        let half_i = GaussianRational::from_parts(0, 1, -1, 2);
        let p = &x(0).pow(2) + &(&x(1) * &x(2)).scale(&half_i);
        assert_eq!(p.to_string(), "x1^2 - 1/2*i*x2*x3");
        let c = Polynomial::constant(3, GaussianRational::from_parts(1, 2, 1, 1));
        assert_eq!((&c * &x(0)).to_string(), "(1/2+i)*x1");
    }

    #[test]
    fn evaluation() {
        let p = &(&x(0) * &x(1)) * &x(2);
        let v = p
            .evaluate(&[2.0.into(), 3.0.into(), 4.0.into()])
            .unwrap();
        assert_eq!(v, Complex64::new(24.0, 0.0));
        let z = Polynomial::zero(3).evaluate(&[1.0.into(); 3]).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
        // (1+i)^2 = 2i
        let q = &x(0).pow(2) - &x(1);
        let v = q
            .evaluate(&[Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0), 0.0.into()])
            .unwrap();
        assert!(v.norm() < 1e-15);
        assert!(q.evaluate(&[1.0.into()]).is_err());
    }

    #[test]
    fn exact_division() {
        let a = &x(0) - &x(1);
        let b = &x(0) + &x(2);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!((&prod + &Polynomial::one(3)).div_exact(&a), None);
    }

    #[test]
    fn derivative_and_split() {
        let p = &(&x(0) * &x(1)) + &x(1).pow(2);
        assert_eq!(p.derivative(1), &x(0) + &x(1).scale(&GaussianRational::from_int(2)));
        let (a, b) = p.split_linear(0).unwrap();
        assert_eq!(a, x(1));
        assert_eq!(b, x(1).pow(2));
        assert!(p.split_linear(1).is_none());
    }
}
