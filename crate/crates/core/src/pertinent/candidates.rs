//! The closed list of candidate pertinent variables for `n = 3`, `d = 2`.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limit::{substitute, LimitCategory, ParamField, SequenceAnsatz};
use crate::poly::{GaussianRational, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `x_i`
    Single,
    /// `x_i + ν x_j`
    LinearPair,
    /// `(x_i + ν x_j) x_l`
    ScaledProduct,
    /// `x_i + ν x_j x_l`
    MixedProduct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nu {
    Unknown,
    Value(GaussianRational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PertinentCandidate {
    pub family: Family,
    /// 1-based; unused slots are 0.
    pub indices: [usize; 3],
    pub nu: Nu,
}

impl PertinentCandidate {
    fn new(family: Family, indices: [usize; 3]) -> Self {
        Self {
            family,
            indices,
            nu: Nu::Unknown,
        }
    }

    pub fn with_nu(&self, nu: GaussianRational) -> Result<Self> {
        if nu.is_zero() {
            return Err(Error::Domain("ν must be nonzero".into()));
        }
        Ok(Self {
            nu: Nu::Value(nu),
            ..self.clone()
        })
    }

    /// `(P, Q)` with the candidate equal to `P + ν Q`; `Q = 0` for singles.
    pub fn parts(&self, n: usize) -> (Polynomial, Polynomial) {
        let x = |i: usize| Polynomial::var(n, i - 1);
        let [i, j, l] = self.indices;
        match self.family {
            Family::Single => (x(i), Polynomial::zero(n)),
            Family::LinearPair => (x(i), x(j)),
            Family::ScaledProduct => (&x(i) * &x(l), &x(j) * &x(l)),
            Family::MixedProduct => (x(i), &x(j) * &x(l)),
        }
    }

    /// The polynomial for a concrete `ν`.
    pub fn polynomial(&self, n: usize) -> Option<Polynomial> {
        let (p, q) = self.parts(n);
        match (&self.nu, self.family) {
            (_, Family::Single) => Some(p),
            (Nu::Value(v), _) => Some(&p + &q.scale(v)),
            (Nu::Unknown, _) => None,
        }
    }
}

impl fmt::Display for PertinentCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nu = match &self.nu {
            Nu::Unknown => "nu".to_string(),
            Nu::Value(v) => format!("({v})"),
        };
        let [i, j, l] = self.indices;
        match self.family {
            Family::Single => write!(f, "x{i}"),
            Family::LinearPair => write!(f, "x{i} + {nu}*x{j}"),
            Family::ScaledProduct => write!(f, "(x{i} + {nu}*x{j})*x{l}"),
            Family::MixedProduct => write!(f, "x{i} + {nu}*x{j}*x{l}"),
        }
    }
}

/// All 33 candidates in a fixed order: singles, linear pairs, scaled products,
/// mixed products; indices in lexicographic order within each family.
pub fn candidate_pertinents(n: usize, d: u32) -> Result<Vec<PertinentCandidate>> {
    if (n, d) != (3, 2) {
        return Err(Error::Unsupported(format!(
            "candidate pertinent variables are only tabulated for n = 3, d = 2 (got n = {n}, d = {d}); \
             the general construction is future work"
        )));
    }
    let r = 1..=3usize;
    let mut out = Vec::new();
    for i in r.clone() {
        out.push(PertinentCandidate::new(Family::Single, [i, 0, 0]));
    }
    for i in r.clone() {
        for j in r.clone().filter(|&j| j != i) {
            out.push(PertinentCandidate::new(Family::LinearPair, [i, j, 0]));
        }
    }
    for i in r.clone() {
        for j in r.clone().filter(|&j| j != i) {
            for l in r.clone() {
                out.push(PertinentCandidate::new(Family::ScaledProduct, [i, j, l]));
            }
        }
    }
    for i in r.clone() {
        for j in r.clone().filter(|&j| j != i) {
            for l in r.clone().filter(|&l| l != i && l != j) {
                out.push(PertinentCandidate::new(Family::MixedProduct, [i, j, l]));
            }
        }
    }
    Ok(out)
}

/// Limit of a candidate along an ansatz.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateLimit {
    /// `ν` was pinned (or the candidate has none).
    Concrete(ParamField),
    /// Both parts stay bounded separately, so any `ν` works; limit `p + ν q`.
    Symbolic { p: ParamField, q: ParamField },
}

impl CandidateLimit {
    pub fn category(&self) -> LimitCategory {
        let cat = |v: &ParamField| crate::limit::LimitValue::Finite(v.clone()).category();
        match self {
            CandidateLimit::Concrete(v) => cat(v),
            CandidateLimit::Symbolic { p, q } => cat(p).max(cat(q)),
        }
    }
}

/// Why a candidate is unbounded along an ansatz.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivergenceWitness {
    /// Power of `k` whose coefficient cannot be cancelled.
    pub exponent: i32,
    pub reason: String,
}

/// Resolves `ν` (if any) so the candidate stays bounded along `s`.
pub fn resolve_candidate(
    cand: &PertinentCandidate,
    s: &SequenceAnsatz,
) -> Result<std::result::Result<(PertinentCandidate, CandidateLimit), DivergenceWitness>> {
    let (p, q) = cand.parts(s.n());
    let lp = substitute(&p, s)?;
    let lq = substitute(&q, s)?;
    let mut exps: Vec<i32> = lp
        .positive_part()
        .iter()
        .chain(lq.positive_part().iter())
        .map(|(e, _)| *e)
        .collect();
    exps.sort_unstable_by(|a, b| b.cmp(a));
    exps.dedup();
    let p0 = lp.coefficient(0);
    let q0 = lq.coefficient(0);
    if exps.is_empty() {
        if cand.family == Family::Single {
            return Ok(Ok((cand.clone(), CandidateLimit::Concrete(p0))));
        }
        return Ok(Ok((cand.clone(), CandidateLimit::Symbolic { p: p0, q: q0 })));
    }
    let mut nu: Option<GaussianRational> = None;
    for &e in &exps {
        let pe = lp.coefficient(e);
        let qe = lq.coefficient(e);
        if qe.is_zero() {
            if pe.is_zero() {
                continue;
            }
            return Ok(Err(DivergenceWitness {
                exponent: e,
                reason: "leading term has nothing to cancel against".into(),
            }));
        }
        let ratio = (-&pe).checked_div(&qe)?;
        let Some(v) = ratio.constant_value() else {
            return Ok(Err(DivergenceWitness {
                exponent: e,
                reason: "cancellation needs a parameter-dependent coefficient".into(),
            }));
        };
        if v.is_zero() {
            return Ok(Err(DivergenceWitness {
                exponent: e,
                reason: "cancellation needs a zero coefficient".into(),
            }));
        }
        match &nu {
            None => nu = Some(v),
            Some(old) if *old == v => {}
            Some(_) => {
                return Ok(Err(DivergenceWitness {
                    exponent: e,
                    reason: "no single coefficient cancels every divergent power".into(),
                }))
            }
        }
    }
    let v = nu.expect("some exponent pinned ν");
    let limit = &p0 + &q0.scale(&v);
    Ok(Ok((cand.with_nu(v)?, CandidateLimit::Concrete(limit))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::ParamLaurent;

    #[test]
    fn thirty_three_candidates() {
        let c = candidate_pertinents(3, 2).unwrap();
        assert_eq!(c.len(), 33);
        let count = |f: Family| c.iter().filter(|x| x.family == f).count();
        assert_eq!(
            [Family::Single, Family::LinearPair, Family::ScaledProduct, Family::MixedProduct].map(count),
            [3, 6, 18, 6]
        );
        let names: Vec<String> = c.iter().map(ToString::to_string).collect();
        assert!(names.contains(&"x3".to_string()));
        assert!(names.contains(&"(x1 + nu*x2)*x3".to_string()));
        assert!(candidate_pertinents(4, 2).is_err());
        assert!(candidate_pertinents(3, 3).is_err());
    }

    fn close_pair() -> SequenceAnsatz {
        // (k + a/k, k + b/k, g)
        let m = 3;
        let one = ParamField::one(m);
        let x = |p: usize| ParamLaurent::from_terms(m, [(1, one.clone()), (-1, ParamField::param(m, p))]).unwrap();
        let x3 = ParamLaurent::constant(ParamField::param(m, 2));
        SequenceAnsatz::new(vec![x(0), x(1), x3], vec!["a".into(), "b".into(), "g".into()]).unwrap()
    }

    #[test]
    fn nu_is_pinned_by_cancellation() {
        let c = candidate_pertinents(3, 2).unwrap();
        let pair = c.iter().find(|x| x.to_string() == "x1 + nu*x2").unwrap();
        let (res, lim) = resolve_candidate(pair, &close_pair()).unwrap().unwrap();
        assert_eq!(res.nu, Nu::Value(GaussianRational::from_int(-1)));
        assert_eq!(lim, CandidateLimit::Concrete(ParamField::zero(3)));
        let single = &c[0];
        assert!(resolve_candidate(single, &close_pair()).unwrap().is_err());
    }

    #[test]
    fn bounded_parts_leave_nu_free() {
        let c = candidate_pertinents(3, 2).unwrap();
        // x3 + nu*x1*x2 diverges; (x3 + nu*x1)*x3 diverges; x3 alone is bounded
        let x3 = c.iter().find(|x| x.to_string() == "x3").unwrap();
        let (_, lim) = resolve_candidate(x3, &close_pair()).unwrap().unwrap();
        assert_eq!(lim.category(), LimitCategory::Varying);
        let scaled = c.iter().find(|x| x.to_string() == "(x1 + nu*x2)*x3").unwrap();
        let (res, _) = resolve_candidate(scaled, &close_pair()).unwrap().unwrap();
        assert_eq!(res.nu, Nu::Value(GaussianRational::from_int(-1)));
    }
}
