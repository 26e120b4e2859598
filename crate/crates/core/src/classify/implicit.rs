//! Implicit equations of degree at most 2 for a parametrised set in C^3, and
//! the surface types they describe.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limit::ParamField;
use crate::poly::linalg::{self, Matrix};
use crate::poly::{GaussianRational, Monomial, Polynomial};
use crate::rng::{derive_seed, random_integer_point, rng_from_seed};

/// Sample points per draw; at least the 10 monomials plus slack.
const SAMPLE_POINTS: usize = 14;
const ATTEMPTS: u64 = 3;
/// Relations found from samples are re-checked symbolically.
const SAMPLE_BOUND: i64 = 100;

/// Monomials of degree <= 2 in three variables, graded-lex descending.
pub(crate) fn monomials(max_degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in (0..=max_degree).rev() {
        for a in (0..=d).rev() {
            for b in (0..=d - a).rev() {
                out.push(Monomial(vec![a, b, d - a - b]));
            }
        }
    }
    out
}

fn eval_monomial(m: &Monomial, p: &[GaussianRational]) -> GaussianRational {
    let mut acc = GaussianRational::from_int(1);
    for (v, &e) in m.0.iter().enumerate() {
        for _ in 0..e {
            acc = &acc * &p[v];
        }
    }
    acc
}

fn sample_images(param: &[ParamField], seed: u64) -> Vec<Vec<GaussianRational>> {
    let m = param[0].num_params();
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < SAMPLE_POINTS && tries < SAMPLE_POINTS * 4 {
        tries += 1;
        let point = random_integer_point(&mut rng, m, SAMPLE_BOUND);
        if let Ok(img) = param.iter().map(|f| f.evaluate_exact(&point)).collect::<Result<Vec<_>>>() {
            out.push(img);
        }
    }
    out
}

/// Canonical basis of the relations among `monos` satisfied by every image.
fn relations(images: &[Vec<GaussianRational>], monos: &[Monomial]) -> Vec<Polynomial> {
    let rows: Matrix = images
        .iter()
        .take(monos.len() + 4)
        .map(|p| monos.iter().map(|m| eval_monomial(m, p)).collect())
        .collect();
    let mut basis: Matrix = linalg::nullspace_fraction_free(&rows, monos.len());
    if basis.is_empty() {
        return Vec::new();
    }
    // Row-reduce so the basis is unique with leading coefficients 1.
    let pivots = linalg::rref(&mut basis);
    basis
        .iter()
        .take(pivots.len())
        .map(|row| {
            let terms = monos
                .iter()
                .zip(row)
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m.0.clone(), c.clone()));
            Polynomial::from_terms(3, terms).expect("three variables")
        })
        .collect()
}

/// Polynomial relations of lowest degree (at most 2) among the three
/// coordinates of `param`, monic under graded-lex order.
pub fn implicitize_exact(param: &[ParamField], seed: u64) -> Result<Vec<Polynomial>> {
    if param.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: param.len(),
        });
    }
    for attempt in 0..ATTEMPTS {
        let a = sample_images(param, derive_seed(seed, &[attempt, 0]));
        let b = sample_images(param, derive_seed(seed, &[attempt, 1]));
        if a.len() < SAMPLE_POINTS || b.len() < SAMPLE_POINTS {
            continue;
        }
        let mut agreed = None;
        for deg in 1..=2 {
            let monos = monomials(deg);
            let ra = relations(&a, &monos);
            let rb = relations(&b, &monos);
            if ra != rb {
                agreed = None;
                break;
            }
            if !ra.is_empty() || deg == 2 {
                agreed = Some(ra);
                break;
            }
        }
        let Some(eqs) = agreed else { continue };
        if eqs.iter().all(|e| vanishes_on(e, param)) {
            return Ok(eqs);
        }
    }
    Err(Error::Genericity(
        "implicit equations disagree between independent samples".into(),
    ))
}

/// Exact check that `eq` vanishes identically on the parametrisation.
pub fn vanishes_on(eq: &Polynomial, param: &[ParamField]) -> bool {
    ParamField::from_poly(eq.clone())
        .compose(param)
        .map(|f| f.is_zero())
        .unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeomType {
    Plane,
    Paraboloid,
    LowerDimensional,
    /// A surface of degree <= 2 not of the two expected shapes, or none found.
    Unmatched,
}

/// Plane: one degree-1 equation. Paraboloid: one degree-2 equation whose
/// quadratic part is the square of a linear form `l` and whose linear part is
/// not a multiple of `l`.
pub fn surface_type(eqs: &[Polynomial]) -> GeomType {
    let [eq] = eqs else {
        return GeomType::Unmatched;
    };
    match eq.degree().finite() {
        Some(1) => GeomType::Plane,
        Some(2) if is_parabolic(eq) => GeomType::Paraboloid,
        _ => GeomType::Unmatched,
    }
}

fn is_parabolic(eq: &Polynomial) -> bool {
    let half = GaussianRational::from_frac(1, 2);
    let mut q: Matrix = vec![vec![GaussianRational::zero(); 3]; 3];
    let mut lin = vec![GaussianRational::zero(); 3];
    for (m, c) in eq.terms() {
        let vars: Vec<usize> = (0..3).flat_map(|v| std::iter::repeat(v).take(m.0[v] as usize)).collect();
        match vars.as_slice() {
            [i, j] if i == j => q[*i][*i] = c.clone(),
            [i, j] => {
                q[*i][*j] = c * &half;
                q[*j][*i] = c * &half;
            }
            [i] => lin[*i] = c.clone(),
            _ => {}
        }
    }
    if linalg::rank(&q) != 1 {
        return false;
    }
    let l = q.iter().find(|r| r.iter().any(|c| !c.is_zero())).expect("rank 1").clone();
    linalg::rank(&vec![l, lin]) == 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expression;

    fn par(m: usize, i: usize) -> ParamField {
        ParamField::param(m, i)
    }

    fn eq(s: &str) -> Polynomial {
        parse_expression(s, 3).unwrap()
    }

    #[test]
    fn monomial_order() {
        let m = monomials(2);
        assert_eq!(m.len(), 10);
        assert_eq!(m[0], Monomial(vec![2, 0, 0]));
        assert_eq!(m[9], Monomial(vec![0, 0, 0]));
    }

    #[test]
    fn plane_from_zero_coordinate() {
        let p = [ParamField::zero(2), par(2, 0), par(2, 1)];
        assert_eq!(implicitize_exact(&p, 1).unwrap(), vec![eq("x1")]);
    }

    #[test]
    fn parabola_cylinder() {
        let p = [par(2, 0), par(2, 1), par(2, 0).pow(2)];
        let eqs = implicitize_exact(&p, 1).unwrap();
        assert_eq!(eqs, vec![eq("x1^2 - x3")]);
        assert_eq!(surface_type(&eqs), GeomType::Paraboloid);
    }

    #[test]
    fn coordinate_equality() {
        let p = [par(2, 0), par(2, 0), par(2, 1)];
        let eqs = implicitize_exact(&p, 1).unwrap();
        assert_eq!(eqs, vec![eq("x1 - x2")]);
        assert_eq!(surface_type(&eqs), GeomType::Plane);
    }

    #[test]
    fn rational_parametrisation() {
        // (u, v/u, v): x1*x2 - x3 = 0 is not parabolic.
        let p = [par(2, 0), par(2, 1).checked_div(&par(2, 0)).unwrap(), par(2, 1)];
        let eqs = implicitize_exact(&p, 5).unwrap();
        assert_eq!(eqs, vec![eq("x1*x2 - x3")]);
        assert_eq!(surface_type(&eqs), GeomType::Unmatched);
    }

    #[test]
    fn curves_have_several_equations() {
        let p = [par(1, 0), par(1, 0), ParamField::zero(1)];
        let eqs = implicitize_exact(&p, 1).unwrap();
        assert_eq!(eqs, vec![eq("x1 - x2"), eq("x3")]);
        assert_eq!(surface_type(&eqs), GeomType::Unmatched);
    }

    #[test]
    fn quadric_shapes() {
        assert_eq!(surface_type(&[eq("x1^2 + x2")]), GeomType::Paraboloid);
        assert_eq!(surface_type(&[eq("x1^2 + 2*x1*x2 + x2^2 + x3")]), GeomType::Paraboloid);
        // linear part along the squared form: two parallel planes
        assert_eq!(surface_type(&[eq("x1^2 + x1 + 1")]), GeomType::Unmatched);
        assert_eq!(surface_type(&[eq("x1^2 + x2^2 + x3")]), GeomType::Unmatched);
        assert_eq!(surface_type(&[]), GeomType::Unmatched);
    }
}
