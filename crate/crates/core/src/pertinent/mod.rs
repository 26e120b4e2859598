//! Which candidate pertinent variables stay bounded along the sequences of a
//! façon, and what the bounded set looks like jointly over several façons.

mod candidates;
mod profile;
pub mod solver;
mod symbolic;

pub use candidates::{
    candidate_pertinents, resolve_candidate, CandidateLimit, DivergenceWitness, Family, Nu,
    PertinentCandidate,
};
pub use profile::{bounded_on_all, common_bounded, joint_restrict, PertinentProfile, ProfileEntry};
pub use symbolic::{set_partitions, symbolic_branches};

use crate::error::{Error, Result};
use crate::facon::Facon;
use crate::limit::{limit_map, substitute, varying_rank, LimitValue, ParamField, SequenceAnsatz};
use crate::poly::{Degree, Polynomial, PolynomialMapping};
use crate::rng::derive_seed;

#[derive(Debug, Clone)]
pub struct SurvivingCandidate {
    pub candidate: PertinentCandidate,
    pub limit: CandidateLimit,
}

#[derive(Debug, Clone)]
pub struct DiscardedCandidate {
    pub candidate: PertinentCandidate,
    pub witness: DivergenceWitness,
}

/// One consistent way for sequences of a façon to run.
#[derive(Debug, Clone)]
pub struct BranchOutcome {
    pub facon: Facon,
    /// `None` for mapping-independent branches.
    pub mapping: Option<PolynomialMapping>,
    /// Weights or cancellation pattern that produced the branch.
    pub label: String,
    pub ansatz: SequenceAnsatz,
    /// Limits of the mapping components (mapping branches only).
    pub limits: Option<Vec<LimitValue>>,
    pub rank: Option<usize>,
    pub surviving: Vec<SurvivingCandidate>,
    pub discarded: Vec<DiscardedCandidate>,
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub seed: u64,
    /// Leading powers tried for diverging coordinates: `1..=max_weight`.
    pub max_weight: i32,
    pub max_nodes: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            seed: crate::rng::DEFAULT_SEED,
            max_weight: 2,
            max_nodes: solver::MAX_NODES,
        }
    }
}

/// Counters from a façon analysis that did not make it into outcomes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnalysisStats {
    pub unsolved: usize,
    pub truncated: bool,
}

fn evaluate_candidates(
    s: &SequenceAnsatz,
) -> Result<(Vec<SurvivingCandidate>, Vec<DiscardedCandidate>)> {
    let mut surviving = Vec::new();
    let mut discarded = Vec::new();
    for cand in candidate_pertinents(3, 2)? {
        match resolve_candidate(&cand, s)? {
            Ok((candidate, limit)) => surviving.push(SurvivingCandidate { candidate, limit }),
            Err(witness) => discarded.push(DiscardedCandidate {
                candidate: cand,
                witness,
            }),
        }
    }
    Ok((surviving, discarded))
}

/// Branches along which every component of a degree-2 mapping stays bounded.
pub fn survivors_for_facon(
    f: &PolynomialMapping,
    kappa: &Facon,
    opts: &AnalysisOptions,
) -> Result<Vec<BranchOutcome>> {
    if f.n() != 3 || f.degree() != Degree::Finite(2) {
        return Err(Error::Contract(format!(
            "pertinent analysis needs a degree-2 mapping of C^3, got degree {} in dimension {}",
            f.degree(),
            f.n()
        )));
    }
    Ok(analyze_facon(f, kappa, opts)?.0)
}

/// Like [`survivors_for_facon`] without the degree restriction; also reports
/// solver counters.
pub fn analyze_facon(
    f: &PolynomialMapping,
    kappa: &Facon,
    opts: &AnalysisOptions,
) -> Result<(Vec<BranchOutcome>, AnalysisStats)> {
    if kappa.n() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            got: kappa.n(),
        });
    }
    let mut outcomes: Vec<BranchOutcome> = Vec::new();
    let mut stats = AnalysisStats::default();
    let with_candidates = f.n() == 3;
    for weights in weight_vectors(kappa.inf_set().len(), opts.max_weight) {
        let (ansatz, info) = SequenceAnsatz::template(kappa, &weights)?;
        let m = ansatz.num_params();
        let mut constraints = Vec::new();
        for comp in f.components() {
            for (_, c) in substitute(comp, &ansatz)?.positive_part() {
                constraints.push(c.numerator().clone());
            }
        }
        let nonzero = info.leading.iter().map(|&p| Polynomial::var(m, p)).collect();
        let report = solver::solve(m, constraints, nonzero, opts.max_nodes);
        stats.unsolved += report.unsolved;
        stats.truncated |= report.truncated;
        for sol in report.solutions {
            let Some(images) = settle_fixed_slots(sol, &info.fixed_slots) else {
                continue;
            };
            let s = ansatz.compose_params(&images)?;
            if s.check_facon(kappa).is_err() {
                continue;
            }
            if outcomes.iter().any(|o| o.ansatz == s) {
                continue;
            }
            let limits = limit_map(f, &s)?;
            if !limits.iter().all(LimitValue::is_finite) {
                continue;
            }
            let seed = derive_seed(opts.seed, &[outcomes.len() as u64]);
            let rank = varying_rank(&limits, seed)?;
            let (surviving, discarded) = if with_candidates {
                evaluate_candidates(&s)?
            } else {
                (Vec::new(), Vec::new())
            };
            outcomes.push(BranchOutcome {
                facon: kappa.clone(),
                mapping: Some(f.clone()),
                label: format!("weights {weights:?}"),
                ansatz: s,
                limits: Some(limits),
                rank: Some(rank),
                surviving,
                discarded,
            });
        }
    }
    Ok((outcomes, stats))
}

fn weight_vectors(len: usize, max_weight: i32) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (1..=max_weight).map(move |w| {
                    let mut v = v.clone();
                    v.push(w);
                    v
                })
            })
            .collect();
    }
    out
}

/// A fixed coordinate's `k^0` value must be parameter-free. If the solver left
/// it as a free parameter, it is set to 0; any other dependence rejects the branch.
fn settle_fixed_slots(sol: solver::Solution, slots: &[(usize, usize)]) -> Option<Vec<ParamField>> {
    let solver::Solution {
        mut images,
        mut nonzero,
    } = sol;
    for &(_, p) in slots {
        let v = &images[p];
        if v.is_constant() {
            continue;
        }
        let m = v.num_params();
        if *v != ParamField::param(m, p) {
            return None;
        }
        let sub: Vec<ParamField> = (0..m)
            .map(|q| {
                if q == p {
                    ParamField::zero(m)
                } else {
                    ParamField::param(m, q)
                }
            })
            .collect();
        images = images
            .iter()
            .map(|f| f.compose(&sub))
            .collect::<Result<Vec<_>>>()
            .ok()?;
        nonzero = nonzero
            .iter()
            .map(|z| {
                ParamField::from_poly(z.clone())
                    .compose(&sub)
                    .map(|f| f.numerator().clone())
            })
            .collect::<Result<Vec<_>>>()
            .ok()?;
        if nonzero.iter().any(Polynomial::is_zero) {
            return None;
        }
    }
    Some(images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expression, parse_mapping};

    fn mapping(src: &str) -> PolynomialMapping {
        parse_mapping(src).unwrap()
    }

    fn facon(s: &str) -> Facon {
        s.parse().unwrap()
    }

    fn poly(s: &str) -> Polynomial {
        parse_expression(s, 3).unwrap()
    }

    fn opts() -> AnalysisOptions {
        AnalysisOptions::default()
    }

    #[test]
    fn triple_product_realizes_plane_facon() {
        let f = mapping("dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3");
        let (out, _) = analyze_facon(&f, &facon("(3)[1]"), &opts()).unwrap();
        let best = out.iter().max_by_key(|o| o.rank).unwrap();
        assert_eq!(best.rank, Some(2));
        assert!(best.limits.as_ref().unwrap()[0].value().unwrap().is_zero());
        let (none, _) = analyze_facon(&f, &facon("(1)"), &opts()).unwrap();
        assert!(none.is_empty());
        assert!(survivors_for_facon(&f, &facon("(3)[1]"), &opts()).is_err());
    }

    #[test]
    fn paraboloid_branch() {
        let f = mapping("dim 3\nF1 = x1\nF2 = x2*x3\nF3 = x2 + x1^2");
        let out = survivors_for_facon(&f, &facon("(3)[2]"), &opts()).unwrap();
        let best = out.iter().find(|o| o.rank == Some(2)).expect("a 2-dimensional branch");
        let lim: Vec<ParamField> = best.limits.as_ref().unwrap().iter().map(|l| l.value().unwrap().clone()).collect();
        assert_eq!(lim[2], lim[0].pow(2));
        assert!(best.surviving.iter().any(|s| s.candidate.to_string() == "x1"));
        for s in &best.surviving {
            assert_ne!(s.candidate.to_string(), "x3");
        }
    }

    fn branch<'a>(all: &'a [BranchOutcome], label: &str) -> &'a BranchOutcome {
        all.iter().find(|b| b.label == label).unwrap_or_else(|| panic!("no branch {label}"))
    }

    #[test]
    fn two_facon_plane_profile() {
        let k = symbolic_branches(&facon("(1,2,3)")).unwrap();
        let k2 = symbolic_branches(&facon("(1,2)[3]")).unwrap();
        let a = branch(&k, "lead {x1,x2,x3} next {x1,x2,x3}");
        let b = branch(&k2, "lead {x1,x2} next {x1,x2} x3->0");
        let prof = joint_restrict(&[a.clone(), b.clone()], 1).unwrap();
        let polys = prof.polynomials();
        for p in ["x1 - x2", "(x1 - x2)*x1", "(x1 - x2)*x2", "(x1 - x3)*x3"] {
            assert!(polys.contains(&poly(p).monic()), "{p}");
        }
        assert!(!polys.contains(&poly("(x1 - x2)*x3").monic()));
        assert!(prof.viable);

        // x1 - x2 tends to a nonzero value along the second façon.
        let c = branch(&k2, "lead {x1,x2} next {x1}{x2} x3->0");
        let prof = joint_restrict(&[a.clone(), c.clone()], 1).unwrap();
        let polys = prof.polynomials();
        assert!(polys.contains(&poly("(x1 - x3)*x3").monic()));
        assert!(!polys.contains(&poly("x1 - x2").monic()));
        assert!(!prof.viable);
    }

    #[test]
    fn cancellation_levels_decide_viability() {
        let k = symbolic_branches(&facon("(1,2,3)")).unwrap();
        let k2 = symbolic_branches(&facon("(1,2)[3]")).unwrap();
        let tends_to_zero = branch(&k, "lead {x1,x2,x3} next {x1,x2,x3}");
        let nonzero = branch(&k, "lead {x1,x2,x3} next {x1}{x2}{x3}");
        let viable_with = |b: &BranchOutcome| {
            k2.iter().any(|o| joint_restrict(&[b.clone(), o.clone()], 3).unwrap().viable)
        };
        assert!(viable_with(tends_to_zero));
        assert!(!viable_with(nonzero));
    }

    #[test]
    fn mixed_mappings_are_rejected() {
        let f = mapping("dim 3\nF1 = x1\nF2 = x2*x3\nF3 = x2 + x1^2");
        let out = survivors_for_facon(&f, &facon("(3)[2]"), &opts()).unwrap();
        let free = symbolic_branches(&facon("(3)[2]")).unwrap();
        assert!(joint_restrict(&[out[0].clone(), free[0].clone()], 1).is_err());
        assert!(joint_restrict(&[], 1).is_err());
    }
}
