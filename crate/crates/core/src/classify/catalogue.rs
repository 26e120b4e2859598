//! Sweep over façon sets for `n = 3`, `d = 2`: build the mapping-free bounded
//! profiles, turn each viable one into witness mappings and classify them.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify_mapping_with, ClassifyOptions, GeomType, TYPE_NAMES};
use crate::error::{Error, Result};
use crate::facon::{enumerate_facons, Facon, GroupLabel};
use crate::pertinent::{bounded_on_all, joint_restrict, symbolic_branches, BranchOutcome, PertinentProfile};
use crate::poly::{Degree, GaussianRational, Polynomial, PolynomialMapping};
use crate::rng::{derive_seed, rng_from_seed};
use rand::Rng;

/// Group pairs that may share a stratum.
pub const COMPATIBLE_PAIRS: [(GroupLabel, GroupLabel); 8] = [
    (GroupLabel::I, GroupLabel::IV),
    (GroupLabel::I, GroupLabel::V),
    (GroupLabel::I, GroupLabel::VI),
    (GroupLabel::II, GroupLabel::VI),
    (GroupLabel::IV, GroupLabel::V),
    (GroupLabel::IV, GroupLabel::VI),
    (GroupLabel::V, GroupLabel::VI),
    (GroupLabel::VI, GroupLabel::VI),
];

const GENERIC_TRIES: usize = 1;

#[derive(Debug, Clone)]
pub struct CatalogueOptions {
    pub seed: u64,
    /// Witness mappings tried per distinct profile.
    pub max_witnesses: usize,
}

impl Default for CatalogueOptions {
    fn default() -> Self {
        Self {
            seed: crate::rng::DEFAULT_SEED,
            max_witnesses: 3,
        }
    }
}

/// How the façons of a profile relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileRule {
    /// All façons on one stratum: limits must share their category.
    Stratum,
    /// Façons on possibly different components: bounded along all.
    Union,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogueProfile {
    pub facons: Vec<String>,
    pub rule: ProfileRule,
    pub branches: Vec<String>,
    pub polynomials: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogueEntry {
    pub matched_type: u8,
    pub name: String,
    /// Components of the witness mapping.
    pub witness: Vec<String>,
    /// `equation: kind` per component of its asymptotic set.
    pub components: Vec<String>,
    pub realized_facons: Vec<String>,
    pub profile: CatalogueProfile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnmatchedWitness {
    pub witness: Vec<String>,
    pub components: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Catalogue {
    pub version: String,
    pub n: usize,
    pub d: u32,
    pub seed: u64,
    pub entries: Vec<CatalogueEntry>,
    pub facon_sets: usize,
    pub viable_profiles: usize,
    pub witnesses_classified: usize,
    /// Dominant degree-2 witnesses whose set matched none of the types.
    pub unmatched: Vec<UnmatchedWitness>,
    /// Structural assertions that failed on witness reports.
    pub violations: Vec<String>,
}

impl Catalogue {
    pub fn types(&self) -> Vec<u8> {
        self.entries.iter().map(|e| e.matched_type).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalogue serializes")
    }
}

pub fn catalogue(n: usize, d: u32) -> Result<Catalogue> {
    catalogue_with(n, d, &CatalogueOptions::default())
}

fn facon_sets(facons: &[Facon]) -> Vec<(Vec<Facon>, ProfileRule)> {
    let group = |f: &Facon| GroupLabel::of(f).expect("n = 3");
    let compatible = |a: GroupLabel, b: GroupLabel| {
        COMPATIBLE_PAIRS.iter().any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b))
    };
    let mut out: Vec<(Vec<Facon>, ProfileRule)> = facons
        .iter()
        .map(|f| (vec![f.clone()], ProfileRule::Stratum))
        .collect();
    let mut pairs = Vec::new();
    for (i, a) in facons.iter().enumerate() {
        for b in &facons[i + 1..] {
            if compatible(group(a), group(b)) {
                pairs.push(vec![a.clone(), b.clone()]);
            }
        }
    }
    for rule in [ProfileRule::Stratum, ProfileRule::Union] {
        out.extend(pairs.iter().map(|p| (p.clone(), rule)));
    }
    let six: Vec<Facon> = facons
        .iter()
        .filter(|f| group(f) == GroupLabel::VI)
        .cloned()
        .collect();
    out.push((six, ProfileRule::Union));
    out
}

fn branch_combinations(per_facon: &[&Vec<BranchOutcome>]) -> Vec<Vec<BranchOutcome>> {
    let mut combos: Vec<Vec<BranchOutcome>> = vec![Vec::new()];
    for branches in per_facon {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                branches.iter().map(move |b| {
                    let mut c = c.clone();
                    c.push(b.clone());
                    c
                })
            })
            .collect();
    }
    combos
}

/// Up to `cap` triples of profile polynomials, `cap` triples whose last entry
/// is a linear profile polynomial plus a quadratic one or a product of two
/// linear ones (simplest first), and a random combination of the whole profile.
fn witnesses(polys: &[Polynomial], cap: usize, seed: u64) -> Vec<PolynomialMapping> {
    let linear: Vec<&Polynomial> = polys
        .iter()
        .filter(|p| p.degree() == Degree::Finite(1))
        .collect();
    let keep = |c: Vec<Polynomial>, out: &mut Vec<PolynomialMapping>| {
        if let Ok(f) = PolynomialMapping::new(c) {
            if f.degree() == Degree::Finite(2) && f.is_dominant() && !out.contains(&f) {
                out.push(f);
            }
        }
    };
    let m = polys.len();
    let mut plain = Vec::new();
    let mut extended = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for l in j + 1..m {
                keep(vec![polys[i].clone(), polys[j].clone(), polys[l].clone()], &mut plain);
            }
        }
    }
    let mut extra: Vec<Polynomial> = polys
        .iter()
        .filter(|p| p.degree() == Degree::Finite(2))
        .cloned()
        .collect();
    for (a, d) in linear.iter().enumerate() {
        for e in &linear[a..] {
            let q = *d * *e;
            if !extra.iter().any(|p| same_monomials(p, &q)) {
                extra.push(q);
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            for l in 0..m {
                if l == i || l == j || polys[l].degree() != Degree::Finite(1) {
                    continue;
                }
                for q in &extra {
                    let c = &polys[l] + q;
                    keep(vec![polys[i].clone(), polys[j].clone(), c], &mut extended);
                }
            }
        }
    }
    let mut generic = Vec::new();
    let mut rng = rng_from_seed(seed);
    for _ in 0..GENERIC_TRIES {
        let comps = (0..3)
            .map(|_| {
                polys.iter().fold(Polynomial::zero(3), |acc, p| {
                    let c = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
                    &acc + &p.scale(&GaussianRational::from_int(c))
                })
            })
            .collect();
        keep(comps, &mut generic);
    }
    let mut out = generic;
    for mut list in [plain, extended] {
        list.sort_by_cached_key(simplicity);
        list.truncate(cap);
        out.extend(list.into_iter().filter(|f| !out.contains(f)).collect::<Vec<_>>());
    }
    out
}

fn same_monomials(p: &Polynomial, q: &Polynomial) -> bool {
    p.terms().map(|(m, _)| m).eq(q.terms().map(|(m, _)| m))
}

fn profile_summary(facons: &[Facon], rule: ProfileRule, combo: &[BranchOutcome], p: &PertinentProfile) -> CatalogueProfile {
    CatalogueProfile {
        facons: facons.iter().map(ToString::to_string).collect(),
        rule,
        branches: combo.iter().map(|b| b.label.clone()).collect(),
        polynomials: p.polynomials().iter().map(ToString::to_string).collect(),
    }
}

fn simplicity(f: &PolynomialMapping) -> (usize, String) {
    let terms = f.components().iter().map(|c| c.terms().count()).sum();
    (terms, crate::parser::render_mapping(f))
}

/// Realizable asymptotic-set types of dominant degree-2 mappings of `C^3`.
pub fn catalogue_with(n: usize, d: u32, opts: &CatalogueOptions) -> Result<Catalogue> {
    if (n, d) != (3, 2) {
        return Err(Error::Unsupported(format!(
            "the catalogue is implemented for n = 3, d = 2 only (got n = {n}, d = {d})"
        )));
    }
    let facons = enumerate_facons(3)?;
    let branches: BTreeMap<Facon, Vec<BranchOutcome>> = facons
        .iter()
        .map(|f| Ok((f.clone(), symbolic_branches(f)?)))
        .collect::<Result<_>>()?;
    let sets = facon_sets(&facons);

    // Distinct viable polynomial sets, first profile that produced each.
    let found: Vec<Vec<(Vec<String>, CatalogueProfile, Vec<Polynomial>)>> = sets
        .par_iter()
        .enumerate()
        .map(|(si, (set, rule))| -> Result<_> {
            let per: Vec<&Vec<BranchOutcome>> = set.iter().map(|f| &branches[f]).collect();
            let mut local = Vec::new();
            for (ci, combo) in branch_combinations(&per).into_iter().enumerate() {
                let seed = derive_seed(opts.seed, &[si as u64, ci as u64]);
                let profile = match rule {
                    ProfileRule::Stratum => joint_restrict(&combo, seed)?,
                    ProfileRule::Union => bounded_on_all(&combo, seed)?,
                };
                if !profile.viable {
                    continue;
                }
                let mut polys = profile.polynomials();
                polys.sort_by_cached_key(|p| (p.degree().finite(), p.to_string()));
                let key: Vec<String> = polys.iter().map(ToString::to_string).collect();
                local.push((key, profile_summary(set, *rule, &combo, &profile), polys));
            }
            Ok(local)
        })
        .collect::<Result<_>>()?;
    let mut profiles: BTreeMap<BTreeSet<String>, (CatalogueProfile, Vec<Polynomial>)> = BTreeMap::new();
    let mut order = Vec::new();
    for (key, summary, polys) in found.into_iter().flatten() {
        let k: BTreeSet<String> = key.into_iter().collect();
        match profiles.get(&k) {
            Some((old, _)) if old.facons.len() >= summary.facons.len() => {}
            Some(_) => {
                profiles.insert(k, (summary, polys));
            }
            None => {
                order.push(k.clone());
                profiles.insert(k, (summary, polys));
            }
        }
    }

    let mut jobs: Vec<(usize, PolynomialMapping)> = Vec::new();
    for (pi, k) in order.iter().enumerate() {
        for w in witnesses(&profiles[k].1, opts.max_witnesses, derive_seed(opts.seed, &[u64::MAX, pi as u64])) {
            match jobs.iter_mut().find(|(_, v)| *v == w) {
                // Keep the witness attached to the largest façon set producing it.
                Some(job) => {
                    if profiles[k].0.facons.len() > profiles[&order[job.0]].0.facons.len() {
                        job.0 = pi;
                    }
                }
                None => jobs.push((pi, w)),
            }
        }
    }
    let copts = ClassifyOptions {
        seed: opts.seed,
        ..ClassifyOptions::default()
    };
    let reports = jobs
        .par_iter()
        .map(|(_, w)| classify_mapping_with(w, &copts))
        .collect::<Result<Vec<_>>>()?;

    let mut best: BTreeMap<u8, (usize, usize)> = BTreeMap::new();
    let mut unmatched = Vec::new();
    let mut violations = BTreeSet::new();
    for (j, ((_, w), r)) in jobs.iter().zip(&reports).enumerate() {
        for v in r.structural_violations() {
            violations.insert(format!("{}: {v}", crate::parser::render_mapping(w)));
        }
        let components = component_strings(r);
        match r.matched_type {
            Some(t) => {
                // Prefer the simplest witness, then the profile with most façons.
                let key = |k: usize| {
                    let (s, f) = (simplicity(&jobs[k].1), profiles[&order[jobs[k].0]].0.facons.len());
                    (s, std::cmp::Reverse(f))
                };
                let better = match best.get(&t) {
                    Some(&(_, k)) => key(j) < key(k),
                    None => true,
                };
                if better {
                    best.insert(t, (jobs[j].0, j));
                }
            }
            None if !components.is_empty() => unmatched.push(UnmatchedWitness {
                witness: w.components().iter().map(ToString::to_string).collect(),
                components,
            }),
            None => {}
        }
    }
    let entries = best
        .iter()
        .map(|(&t, &(pi, j))| {
            let (w, r) = (&jobs[j].1, &reports[j]);
            CatalogueEntry {
                matched_type: t,
                name: TYPE_NAMES[t as usize - 1].to_string(),
                witness: w.components().iter().map(ToString::to_string).collect(),
                components: component_strings(r),
                realized_facons: r.realized_facons().iter().map(ToString::to_string).collect(),
                profile: profiles[&order[pi]].0.clone(),
            }
        })
        .collect();
    Ok(Catalogue {
        version: crate::VERSION.to_string(),
        n,
        d,
        seed: opts.seed,
        entries,
        facon_sets: sets.len(),
        viable_profiles: order.len(),
        witnesses_classified: jobs.len(),
        unmatched,
        violations: violations.into_iter().collect(),
    })
}

fn component_strings(r: &super::AsymptoticSetReport) -> Vec<String> {
    r.components
        .iter()
        .map(|c| {
            let kind = match c.kind {
                GeomType::Plane => "plane",
                GeomType::Paraboloid => "paraboloid",
                GeomType::LowerDimensional => "lower-dimensional",
                GeomType::Unmatched => "unmatched",
            };
            format!("{}: {kind}", c.equation)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_counts() {
        let facons = enumerate_facons(3).unwrap();
        let sets = facon_sets(&facons);
        assert_eq!(sets.iter().filter(|(s, _)| s.len() == 1).count(), 19);
        assert_eq!(sets.iter().filter(|(s, _)| s.len() == 3).count(), 1);
    }

    #[test]
    fn witnesses_are_dominant_quadratic() {
        let p = |s: &str| crate::parser::parse_expression(s, 3).unwrap();
        let polys = vec![p("x1*x2"), p("x2*x3"), p("x1*x3"), p("x1")];
        let ws = witnesses(&polys, 50, 1);
        assert!(!ws.is_empty());
        assert!(ws.iter().all(|w| w.is_dominant() && w.degree() == Degree::Finite(2)));
    }
}
