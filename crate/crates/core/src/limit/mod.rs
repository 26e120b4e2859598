//! Exact limits of polynomials along parametrised diverging sequences.

mod ansatz;
mod field;
mod laurent;

pub use ansatz::{substitute, SequenceAnsatz, TemplateInfo, TEMPLATE_DEPTH};
pub(crate) use ansatz::param_name;
pub use field::ParamField;
pub use laurent::ParamLaurent;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{linalg, PolynomialMapping};
use crate::rng::{random_point, rng_from_seed};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LimitValue {
    DivergesToInfinity,
    Finite(ParamField),
}

/// Coarse shape of a limit, used when comparing façons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitCategory {
    Diverges,
    Zero,
    FixedNonzero,
    Varying,
}

impl LimitValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, LimitValue::Finite(_))
    }

    pub fn value(&self) -> Option<&ParamField> {
        match self {
            LimitValue::Finite(v) => Some(v),
            LimitValue::DivergesToInfinity => None,
        }
    }

    /// Finite and parameter-free.
    pub fn is_fixed(&self) -> bool {
        self.value().is_some_and(ParamField::is_constant)
    }

    pub fn category(&self) -> LimitCategory {
        match self {
            LimitValue::DivergesToInfinity => LimitCategory::Diverges,
            LimitValue::Finite(v) if v.is_zero() => LimitCategory::Zero,
            LimitValue::Finite(v) if v.is_constant() => LimitCategory::FixedNonzero,
            LimitValue::Finite(_) => LimitCategory::Varying,
        }
    }

    pub fn render_with(&self, names: &[String]) -> String {
        match self {
            LimitValue::DivergesToInfinity => "inf".into(),
            LimitValue::Finite(v) => v.render_with(names),
        }
    }
}

pub fn limit(l: &ParamLaurent) -> LimitValue {
    if l.max_exponent().is_some_and(|e| e > 0) {
        LimitValue::DivergesToInfinity
    } else {
        LimitValue::Finite(l.coefficient(0))
    }
}

pub fn limit_map(f: &PolynomialMapping, s: &SequenceAnsatz) -> Result<Vec<LimitValue>> {
    f.components()
        .iter()
        .map(|c| Ok(limit(&substitute(c, s)?)))
        .collect()
}

/// Generic rank of the Jacobian of finite limits with respect to the parameters.
pub fn varying_rank(limits: &[LimitValue], seed: u64) -> Result<usize> {
    let values = limits
        .iter()
        .map(|l| {
            l.value()
                .cloned()
                .ok_or_else(|| Error::Contract("varying rank of a diverging limit".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    field_rank(&values, seed)
}

/// Attempts at a random point before settling on the best rank seen.
const RANK_ATTEMPTS: usize = 3;

/// Jacobian rank of `values` with respect to the parameters, evaluated exactly at
/// random points.
pub fn field_rank(values: &[ParamField], seed: u64) -> Result<usize> {
    let Some(first) = values.first() else {
        return Ok(0);
    };
    let m = first.num_params();
    if values.iter().any(|v| v.num_params() != m) {
        return Err(Error::Structural("limits live over different parameter sets".into()));
    }
    let grads: Vec<Vec<(usize, ParamField)>> = values
        .iter()
        .map(|v| v.variables().into_iter().map(|p| (p, v.derivative(p))).collect())
        .collect();
    if grads.iter().all(Vec::is_empty) {
        return Ok(0);
    }
    let mut rng = rng_from_seed(seed);
    let mut best = 0;
    for _ in 0..RANK_ATTEMPTS {
        let point = random_point(&mut rng, m);
        let mut rows = Vec::with_capacity(values.len());
        let mut ok = true;
        for g in &grads {
            let mut row = vec![crate::poly::GaussianRational::default(); m];
            for (p, d) in g {
                match d.evaluate_exact(&point) {
                    Ok(v) => row[*p] = v,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            rows.push(row);
        }
        if ok {
            best = best.max(linalg::rank(&rows));
            if best == values.len().min(m) {
                break;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expression, parse_mapping};
    use crate::poly::GaussianRational;

    fn par(m: usize, i: usize) -> ParamField {
        ParamField::param(m, i)
    }

    fn one(m: usize) -> ParamField {
        ParamField::one(m)
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// `(k + α/k, k + β/k, k + γ/k)`.
    fn three_close() -> SequenceAnsatz {
        let coords = (0..3)
            .map(|i| ParamLaurent::from_terms(3, [(1, one(3)), (-1, par(3, i))]).unwrap())
            .collect();
        SequenceAnsatz::new(coords, names(&["a", "b", "g"])).unwrap()
    }

    /// `(1/k, α2, k α3 / α2)`.
    fn plane_sequence() -> SequenceAnsatz {
        let x1 = ParamLaurent::term(-1, one(2));
        let x2 = ParamLaurent::constant(par(2, 0));
        let x3 = ParamLaurent::term(1, par(2, 1).checked_div(&par(2, 0)).unwrap());
        SequenceAnsatz::new(vec![x1, x2, x3], names(&["a2", "a3"])).unwrap()
    }

    fn poly(s: &str) -> crate::poly::Polynomial {
        parse_expression(s, 3).unwrap()
    }

    #[test]
    fn paired_difference_times_coordinate() {
        let s = three_close();
        let l = substitute(&poly("(x1 - x2)*x1"), &s).unwrap();
        let a_minus_b = &par(3, 0) - &par(3, 1);
        assert_eq!(l.coefficient(0), a_minus_b);
        assert_eq!(l.coefficient(-2), &par(3, 0) * &a_minus_b);
        assert_eq!(l.max_exponent(), Some(0));
        assert_eq!(limit(&l), LimitValue::Finite(a_minus_b));
        let l5 = substitute(&poly("(x1 - x3)*x3"), &s).unwrap();
        assert_eq!(limit(&l5), LimitValue::Finite(&par(3, 0) - &par(3, 2)));
    }

    #[test]
    fn triple_product_along_plane_sequence() {
        let l = substitute(&poly("x1*x2*x3"), &plane_sequence()).unwrap();
        assert_eq!(limit(&l), LimitValue::Finite(par(2, 1)));
    }

    #[test]
    fn limit_tags() {
        let m = 2;
        let div = ParamLaurent::from_terms(m, [(1, one(m))]).unwrap();
        assert_eq!(limit(&div), LimitValue::DivergesToInfinity);
        let v = ParamLaurent::from_terms(m, [(0, &par(m, 0) - &par(m, 1)), (-2, par(m, 0))]).unwrap();
        assert_eq!(limit(&v).category(), LimitCategory::Varying);
        let c = |x: i64| ParamField::constant(m, GaussianRational::from_int(x));
        let f = ParamLaurent::from_terms(m, [(0, c(5)), (-1, c(3))]).unwrap();
        assert_eq!(limit(&f), LimitValue::Finite(c(5)));
        assert!(limit(&f).is_fixed());
        assert_eq!(limit(&ParamLaurent::zero(m)).category(), LimitCategory::Zero);
    }

    #[test]
    fn mapping_limits() {
        let f = parse_mapping("dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3").unwrap();
        let lim = limit_map(&f, &plane_sequence()).unwrap();
        assert_eq!(
            lim,
            vec![
                LimitValue::Finite(ParamField::zero(2)),
                LimitValue::Finite(par(2, 0)),
                LimitValue::Finite(par(2, 1)),
            ]
        );
        let id = PolynomialMapping::identity(3);
        assert!(limit_map(&id, &three_close()).unwrap().contains(&LimitValue::DivergesToInfinity));
    }

    #[test]
    fn paraboloid_sequence_limits_and_numeric_value() {
        // x1 = μ, x2 = λ/k, x3 = k
        let f = parse_mapping("dim 3\nF1 = x1\nF2 = x2*x3\nF3 = x2 + x1^2").unwrap();
        let s = SequenceAnsatz::new(
            vec![
                ParamLaurent::constant(par(2, 0)),
                ParamLaurent::term(-1, par(2, 1)),
                ParamLaurent::term(1, one(2)),
            ],
            names(&["mu", "lam"]),
        )
        .unwrap();
        let lim = limit_map(&f, &s).unwrap();
        let expect = [par(2, 0), par(2, 1), par(2, 0).pow(2)];
        for (l, e) in lim.iter().zip(&expect) {
            assert_eq!(l.value().unwrap(), e);
        }
        let params = [GaussianRational::from_parts(3, 2, -1, 3), GaussianRational::from_int(2)];
        let x = s.evaluate(1e6, &params).unwrap();
        let y = f.evaluate(&x).unwrap();
        for (yi, e) in y.iter().zip(&expect) {
            let target = e.evaluate_exact(&params).unwrap().to_complex();
            assert!((yi - target).norm() < 1e-5);
        }
    }

    #[test]
    fn rank_of_limit_vectors() {
        let m = 2;
        let fin = |v: ParamField| LimitValue::Finite(v);
        let (l, u) = (par(m, 0), par(m, 1));
        let z = ParamField::zero(m);
        let v = [fin(z.clone()), fin(l.clone()), fin(l.clone()), fin(l.clone()), fin(u.clone())];
        assert_eq!(varying_rank(&v, 1).unwrap(), 2);
        let zeros = [fin(z.clone()), fin(z.clone()), fin(z)];
        assert_eq!(varying_rank(&zeros, 1).unwrap(), 0);
        let curve = [fin(l.clone()), fin(l.pow(2)), fin(u)];
        assert_eq!(varying_rank(&curve, 1).unwrap(), 2);
        assert!(varying_rank(&[LimitValue::DivergesToInfinity], 1).is_err());
    }

    #[test]
    fn template_shape() {
        let facon: crate::facon::Facon = "(3)[1]".parse().unwrap();
        let (s, info) = SequenceAnsatz::template(&facon, &[1]).unwrap();
        // x1, x2: k^0..k^-2; x3: k^1..k^-2
        assert_eq!(s.num_params(), 3 + 3 + 4);
        assert_eq!(info.leading, vec![6]);
        assert_eq!(info.fixed_slots, vec![(1, 0)]);
        assert_eq!(s.coord(3).max_exponent(), Some(1));
        assert!(s.check_facon(&facon).is_err());
    }
}
