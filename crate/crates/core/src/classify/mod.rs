//! Per-mapping asymptotic-set reports and the catalogue of realizable types.

mod catalogue;
pub mod implicit;

pub use catalogue::{
    catalogue, catalogue_with, Catalogue, CatalogueEntry, CatalogueOptions, CatalogueProfile, ProfileRule,
    UnmatchedWitness,
};
pub use implicit::{implicitize_exact, surface_type, vanishes_on, GeomType};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::facon::{enumerate_facons, Facon};
use crate::limit::{LimitValue, ParamField};
use crate::pertinent::{analyze_facon, AnalysisOptions, BranchOutcome};
use crate::poly::{Degree, Polynomial, PolynomialMapping};
use crate::rng::derive_seed;

/// Names used when printing equations in the target space.
pub fn target_names() -> Vec<String> {
    (1..=3).map(|i| format!("α{i}")).collect()
}

pub fn render_equation(eq: &Polynomial) -> String {
    format!("{} = 0", eq.render_with(&target_names()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportMode {
    /// Degree 2: components are matched against the five types.
    Classification,
    /// Other degrees: façon realization and components only.
    FaconRealization,
    /// Degree at most 1: an invertible affine map, or not dominant.
    Affine,
}

/// Geometry of one branch's limit set.
#[derive(Debug, Clone)]
pub struct StratumDescription {
    pub facons: Vec<Facon>,
    pub dimension: usize,
    pub limit_parametrization: Vec<ParamField>,
    pub param_names: Vec<String>,
    pub implicit_equations: Vec<Polynomial>,
    pub geom_type: GeomType,
}

/// Builds the stratum of one mapping branch.
pub fn stratum_geometry(outcome: &BranchOutcome, seed: u64) -> Result<StratumDescription> {
    let limits = outcome
        .limits
        .as_ref()
        .ok_or_else(|| Error::Contract("stratum geometry needs a mapping branch".into()))?;
    let param = limits
        .iter()
        .map(|l| l.value().cloned())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Contract("stratum geometry of a diverging branch".into()))?;
    let dimension = outcome.rank.unwrap_or(0);
    let implicit_equations = if param.len() == 3 {
        implicitize_exact(&param, seed)?
    } else {
        Vec::new()
    };
    let geom_type = if dimension < 2 {
        GeomType::LowerDimensional
    } else {
        surface_type(&implicit_equations)
    };
    Ok(StratumDescription {
        facons: vec![outcome.facon.clone()],
        dimension,
        limit_parametrization: param,
        param_names: outcome.ansatz.param_names().to_vec(),
        implicit_equations,
        geom_type,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchSummary {
    pub label: String,
    pub ansatz: String,
    pub limits: Vec<String>,
    pub dimension: usize,
    pub equations: Vec<String>,
    pub geometry: GeomType,
    /// Bounded candidates with their limits.
    pub pertinent: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FaconAnalysis {
    pub facon: String,
    pub realized: bool,
    pub branches: Vec<BranchSummary>,
    pub unsolved_branches: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Component {
    pub equation: String,
    #[serde(rename = "type")]
    pub kind: GeomType,
    pub facons: Vec<String>,
    #[serde(skip)]
    pub polynomial: Polynomial,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerStratum {
    pub facon: String,
    pub dimension: usize,
    pub limits: Vec<String>,
    /// Indices into `components` of the surfaces containing this stratum.
    pub contained_in: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticSetReport {
    pub version: String,
    pub mapping: String,
    pub dominant: bool,
    pub degree: Option<u32>,
    pub mode: ReportMode,
    pub facon_analysis: Vec<FaconAnalysis>,
    pub components: Vec<Component>,
    pub lower_dimensional: Vec<LowerStratum>,
    pub matched_type: Option<u8>,
    /// `S_F` found empty.
    pub proper: bool,
    pub notes: Vec<String>,
    pub oracle_residual: Option<f64>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
}

impl AsymptoticSetReport {
    pub fn realized_facons(&self) -> Vec<String> {
        self.facon_analysis
            .iter()
            .filter(|a| a.realized)
            .map(|a| a.facon.clone())
            .collect()
    }

    pub fn component_polynomials(&self) -> Vec<Polynomial> {
        self.components.iter().map(|c| c.polynomial.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Violations of the structural facts every degree-2 report must satisfy:
    /// at most two façons per surface, two only on a plane, and a paraboloid
    /// never next to anything but a single plane.
    pub fn structural_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.components {
            if c.facons.len() > 2 {
                out.push(format!("{} carries {} façons", c.equation, c.facons.len()));
            }
            if c.facons.len() == 2 && c.kind != GeomType::Plane {
                out.push(format!("{} carries two façons but is not a plane", c.equation));
            }
        }
        let planes = self.components.iter().filter(|c| c.kind == GeomType::Plane).count();
        let parab = self.components.iter().filter(|c| c.kind == GeomType::Paraboloid).count();
        if parab > 0 && !(parab == 1 && planes <= 1 && planes + parab == self.components.len()) {
            out.push(format!("paraboloid next to {planes} plane(s) and {parab} paraboloid(s)"));
        }
        for l in &self.lower_dimensional {
            if l.contained_in.is_empty() && !self.components.is_empty() {
                out.push(format!("lower-dimensional stratum of {} lies on no component", l.facon));
            }
        }
        out
    }
}

/// Type number for a multiset of component shapes.
pub fn match_type(kinds: &[GeomType]) -> Option<u8> {
    let planes = kinds.iter().filter(|k| **k == GeomType::Plane).count();
    let parab = kinds.iter().filter(|k| **k == GeomType::Paraboloid).count();
    if planes + parab != kinds.len() {
        return None;
    }
    match (planes, parab) {
        (1, 0) => Some(1),
        (0, 1) => Some(2),
        (2, 0) => Some(3),
        (1, 1) => Some(4),
        (3, 0) => Some(5),
        _ => None,
    }
}

pub const TYPE_NAMES: [&str; 5] = [
    "plane",
    "paraboloid",
    "two planes",
    "plane and paraboloid",
    "three planes",
];

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub seed: u64,
    pub max_weight: i32,
    pub max_nodes: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        let a = AnalysisOptions::default();
        Self {
            seed: a.seed,
            max_weight: a.max_weight,
            max_nodes: a.max_nodes,
        }
    }
}

pub fn classify_mapping(f: &PolynomialMapping) -> Result<AsymptoticSetReport> {
    classify_mapping_with(f, &ClassifyOptions::default())
}

pub fn classify_mapping_with(f: &PolynomialMapping, opts: &ClassifyOptions) -> Result<AsymptoticSetReport> {
    if f.n() != 3 {
        return Err(Error::Unsupported(format!(
            "asymptotic-set analysis is implemented for C^3 -> C^3 only (got n = {})",
            f.n()
        )));
    }
    let dominant = f.is_dominant();
    let degree = f.degree().finite();
    let mut notes = Vec::new();
    let mode = match f.degree() {
        Degree::Finite(2) => ReportMode::Classification,
        Degree::Finite(d) if d >= 3 => {
            notes.push(format!(
                "degree {d}: type matching is only defined for degree 2; showing façon realization"
            ));
            ReportMode::FaconRealization
        }
        _ => ReportMode::Affine,
    };
    let mut report = AsymptoticSetReport {
        version: crate::VERSION.to_string(),
        mapping: f.to_string(),
        dominant,
        degree,
        mode,
        facon_analysis: Vec::new(),
        components: Vec::new(),
        lower_dimensional: Vec::new(),
        matched_type: None,
        proper: false,
        notes,
        oracle_residual: None,
        seed: opts.seed,
        tolerances: BTreeMap::new(),
    };
    if !dominant {
        report.notes.push("Jacobian determinant vanishes identically: not dominant".into());
    }
    if mode == ReportMode::Affine {
        if dominant {
            report.proper = true;
            report.notes.push("affine automorphism: proper, S_F = ∅".into());
        }
        return Ok(report);
    }

    let facons = enumerate_facons(3)?;
    let analyses: Vec<Result<(Vec<BranchOutcome>, crate::pertinent::AnalysisStats)>> = facons
        .par_iter()
        .enumerate()
        .map(|(i, kappa)| {
            let a = AnalysisOptions {
                seed: derive_seed(opts.seed, &[1, i as u64]),
                max_weight: opts.max_weight,
                max_nodes: opts.max_nodes,
            };
            analyze_facon(f, kappa, &a)
        })
        .collect();

    let mut strata: Vec<(usize, StratumDescription)> = Vec::new();
    for (i, (kappa, res)) in facons.iter().zip(analyses).enumerate() {
        let (outcomes, stats) = res?;
        let mut branches = Vec::new();
        for (b, o) in outcomes.iter().enumerate() {
            let st = stratum_geometry(o, derive_seed(opts.seed, &[2, i as u64, b as u64]))?;
            branches.push(summarize(o, &st));
            strata.push((i, st));
        }
        report.facon_analysis.push(FaconAnalysis {
            facon: kappa.to_string(),
            realized: !outcomes.is_empty(),
            branches,
            unsolved_branches: stats.unsolved,
            truncated: stats.truncated,
        });
    }

    // Surfaces: merge branches with equal implicit equations.
    let mut surfaces: Vec<(Vec<Polynomial>, GeomType, Vec<usize>)> = Vec::new();
    for (i, st) in strata.iter().filter(|(_, s)| s.dimension >= 2) {
        match surfaces.iter_mut().find(|(e, _, _)| *e == st.implicit_equations) {
            Some((_, _, fs)) => {
                if !fs.contains(i) {
                    fs.push(*i);
                }
            }
            None => surfaces.push((st.implicit_equations.clone(), st.geom_type, vec![*i])),
        }
    }
    surfaces.sort_by_key(|(eqs, _, _)| {
        eqs.iter()
            .map(|e| (e.degree().finite().unwrap_or(0), e.to_string()))
            .collect::<Vec<_>>()
    });
    for (eqs, kind, fs) in &surfaces {
        let polynomial = eqs.first().cloned().unwrap_or_else(|| Polynomial::zero(3));
        let equation = if eqs.is_empty() {
            "no relation of degree <= 2".to_string()
        } else {
            eqs.iter().map(render_equation).collect::<Vec<_>>().join(", ")
        };
        report.components.push(Component {
            equation,
            kind: *kind,
            facons: fs.iter().map(|&i| facons[i].to_string()).collect(),
            polynomial,
        });
    }
    for (i, st) in strata.iter().filter(|(_, s)| s.dimension < 2) {
        let contained_in = surfaces
            .iter()
            .enumerate()
            .filter(|(_, (eqs, _, _))| {
                !eqs.is_empty() && eqs.iter().all(|e| vanishes_on(e, &st.limit_parametrization))
            })
            .map(|(c, _)| c)
            .collect();
        let lower = LowerStratum {
            facon: facons[*i].to_string(),
            dimension: st.dimension,
            limits: st
                .limit_parametrization
                .iter()
                .map(|v| v.render_with(&st.param_names))
                .collect(),
            contained_in,
        };
        let seen = report
            .lower_dimensional
            .iter()
            .any(|l| l.facon == lower.facon && l.limits == lower.limits);
        if !seen {
            report.lower_dimensional.push(lower);
        }
    }
    report.proper = report.components.is_empty() && report.lower_dimensional.is_empty();
    if report.proper {
        report.notes.push("no façon is realized: proper, S_F = ∅".into());
    }
    if mode == ReportMode::Classification && dominant {
        let kinds: Vec<GeomType> = report.components.iter().map(|c| c.kind).collect();
        report.matched_type = match_type(&kinds);
        if report.matched_type.is_none() && !report.proper {
            report.notes.push("component shapes match none of the five types".into());
        }
    }
    Ok(report)
}

fn summarize(o: &BranchOutcome, st: &StratumDescription) -> BranchSummary {
    let names = o.ansatz.param_names();
    BranchSummary {
        label: o.label.clone(),
        ansatz: o.ansatz.render(),
        limits: o
            .limits
            .iter()
            .flatten()
            .map(|l: &LimitValue| l.render_with(names))
            .collect(),
        dimension: st.dimension,
        equations: st.implicit_equations.iter().map(render_equation).collect(),
        geometry: st.geom_type,
        pertinent: o
            .surviving
            .iter()
            .map(|s| {
                let lim = match &s.limit {
                    crate::pertinent::CandidateLimit::Concrete(v) => v.render_with(names),
                    crate::pertinent::CandidateLimit::Symbolic { p, q } => {
                        format!("{} + nu*({})", p.render_with(names), q.render_with(names))
                    }
                };
                format!("{} -> {}", s.candidate, lim)
            })
            .collect(),
    }
}
