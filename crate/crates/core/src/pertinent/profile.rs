//! Joint restriction of bounded candidates over the façons of one stratum.

use super::{BranchOutcome, CandidateLimit, Family, Nu};
use crate::error::{Error, Result};
use crate::facon::Facon;
use crate::limit::{field_rank, LimitCategory, LimitValue, ParamField};
use crate::poly::{GaussianRational, Polynomial};
use crate::rng::derive_seed;

/// A bounded polynomial with its limit along each façon of the profile.
#[derive(Debug, Clone)]
pub struct ProfileEntry {
    pub label: String,
    /// Monic under graded-lex order.
    pub polynomial: Polynomial,
    pub limits: Vec<ParamField>,
    pub category: LimitCategory,
}

#[derive(Debug, Clone)]
pub struct PertinentProfile {
    pub facons: Vec<Facon>,
    pub entries: Vec<ProfileEntry>,
    /// Varying rank of the entry limits, per façon.
    pub ranks: Vec<usize>,
    /// Jacobian rank of the entry polynomials in the source variables.
    pub independent: usize,
    pub viable: bool,
}

impl PertinentProfile {
    pub fn polynomials(&self) -> Vec<Polynomial> {
        self.entries.iter().map(|e| e.polynomial.clone()).collect()
    }
}

/// Bounded polynomials common to a set of branches, with their limits along
/// each. A candidate keeps the coefficient pinned along any branch and is
/// evaluated with it along the others; if the coefficient is free along all of
/// them, its two parts are bounded on their own and enter separately.
pub fn common_bounded(outcomes: &[BranchOutcome]) -> Vec<(String, Polynomial, Vec<ParamField>)> {
    let Some(first) = outcomes.first() else {
        return Vec::new();
    };
    let n = first.ansatz.n();
    let mut out: Vec<(String, Polynomial, Vec<ParamField>)> = Vec::new();
    let mut push = |p: Polynomial, lims: Vec<ParamField>| {
        if p.is_zero() {
            return;
        }
        let lc = p.leading().map(|(_, c)| c.clone()).expect("nonzero");
        let inv = lc.inv().expect("nonzero");
        let p = p.scale(&inv);
        let lims: Vec<ParamField> = lims.iter().map(|l| l.scale(&inv)).collect();
        if !out.iter().any(|(_, q, _)| *q == p) {
            out.push((p.to_string(), p, lims));
        }
    };
    'cand: for s in &first.surviving {
        let key = (s.candidate.family, s.candidate.indices);
        let mut found = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            match o
                .surviving
                .iter()
                .find(|t| (t.candidate.family, t.candidate.indices) == key)
            {
                Some(t) => found.push(t),
                None => continue 'cand,
            }
        }
        let mut pinned: Option<&GaussianRational> = None;
        for t in &found {
            if let Nu::Value(v) = &t.candidate.nu {
                match pinned {
                    Some(w) if w != v => continue 'cand,
                    _ => pinned = Some(v),
                }
            }
        }
        let (pp, qp) = s.candidate.parts(n);
        match pinned {
            Some(v) => {
                let lims = found
                    .iter()
                    .map(|t| match &t.limit {
                        CandidateLimit::Concrete(l) => l.clone(),
                        CandidateLimit::Symbolic { p, q } => p + &q.scale(v),
                    })
                    .collect();
                push(&pp + &qp.scale(v), lims);
            }
            None => {
                let parts = |first: bool| -> Vec<ParamField> {
                    found
                        .iter()
                        .map(|t| match &t.limit {
                            CandidateLimit::Concrete(l) => l.clone(),
                            CandidateLimit::Symbolic { p, q } => {
                                if first {
                                    p.clone()
                                } else {
                                    q.clone()
                                }
                            }
                        })
                        .collect()
                };
                push(pp, parts(true));
                if s.candidate.family != Family::Single {
                    push(qp, parts(false));
                }
            }
        }
    }
    out
}

fn category(v: &ParamField) -> LimitCategory {
    LimitValue::Finite(v.clone()).category()
}

/// Keeps the bounded polynomials common to every outcome whose limit has the
/// same category (zero, fixed nonzero, varying) along each of them.
///
/// Viable when every façon sees at least two independently varying limits and
/// the kept polynomials have Jacobian rank 3 in the source variables.
pub fn joint_restrict(outcomes: &[BranchOutcome], seed: u64) -> Result<PertinentProfile> {
    restrict(outcomes, seed, true)
}

/// Like [`joint_restrict`] without the category rule: the polynomials bounded
/// along all outcomes, for façons that end up on different components.
pub fn bounded_on_all(outcomes: &[BranchOutcome], seed: u64) -> Result<PertinentProfile> {
    restrict(outcomes, seed, false)
}

fn restrict(outcomes: &[BranchOutcome], seed: u64, same_category: bool) -> Result<PertinentProfile> {
    let Some(first) = outcomes.first() else {
        return Err(Error::Contract("joint restriction of an empty outcome set".into()));
    };
    if outcomes.iter().any(|o| o.mapping != first.mapping) {
        return Err(Error::Structural("outcomes refer to different mappings".into()));
    }
    let mut entries = Vec::new();
    for (label, p, limits) in common_bounded(outcomes) {
        let cat = category(&limits[0]);
        if !same_category || limits.iter().all(|l| category(l) == cat) {
            entries.push(ProfileEntry {
                label,
                polynomial: p,
                limits,
                category: cat,
            });
        }
    }
    let mut ranks = Vec::new();
    for (f, _) in outcomes.iter().enumerate() {
        let vals: Vec<ParamField> = entries.iter().map(|e| e.limits[f].clone()).collect();
        ranks.push(field_rank(&vals, derive_seed(seed, &[f as u64]))?);
    }
    let polys: Vec<ParamField> = entries
        .iter()
        .map(|e| ParamField::from_poly(e.polynomial.clone()))
        .collect();
    let independent = field_rank(&polys, derive_seed(seed, &[u64::MAX]))?;
    let viable = ranks.iter().all(|&r| r >= 2) && independent >= 3;
    Ok(PertinentProfile {
        facons: outcomes.iter().map(|o| o.facon.clone()).collect(),
        entries,
        ranks,
        independent,
        viable,
    })
}

