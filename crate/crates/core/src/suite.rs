//! Self-check suite behind `asympt check`: façon counts, algebraic laws,
//! numeric agreement of limits, and golden reports.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::classify::{classify_mapping_with, ClassifyOptions, GeomType};
use crate::error::Result;
use crate::facon::{enumerate_facons, facon_count_formula, group_facons_n3};
use crate::limit::{limit, substitute, LimitValue, SequenceAnsatz};
use crate::parser::{parse_mapping, render_mapping};
use crate::pertinent::symbolic_branches;
use crate::poly::{GaussianRational, Polynomial, PolynomialMapping};
use crate::rng::{derive_seed, rng_from_seed, SeededRng};

/// Sample values of `k` for the convergence check.
pub const CONVERGENCE_KS: [i64; 4] = [1_000, 10_000, 100_000, 1_000_000];
/// Largest admissible log-log slope of the limit error.
pub const MAX_SLOPE: f64 = -0.9;
/// Relative threshold for a numerically singular Jacobian.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Relative tolerance of the numeric evaluation homomorphism.
pub const EVAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn small_coefficient(rng: &mut SeededRng, bound: i64) -> GaussianRational {
    let den = rng.gen_range(1..=3);
    let re = rng.gen_range(-bound..=bound);
    let im = if rng.gen_bool(0.3) { rng.gen_range(-bound..=bound) } else { 0 };
    GaussianRational::from_parts(re, den, im, den)
}

/// Random polynomial with up to `max_terms` terms of degree at most `max_degree`.
pub fn random_polynomial(rng: &mut SeededRng, n: usize, max_degree: u32, max_terms: usize) -> Polynomial {
    let terms = rng.gen_range(1..=max_terms);
    let mut p = Polynomial::zero(n);
    for _ in 0..terms {
        let mut exps = vec![0u32; n];
        let deg = rng.gen_range(0..=max_degree);
        for _ in 0..deg {
            exps[rng.gen_range(0..n)] += 1;
        }
        let c = small_coefficient(rng, 10);
        let t = Polynomial::from_terms(n, [(exps, c)]).expect("valid exponents");
        p = &p + &t;
    }
    p
}

/// Random mapping of `C^3` of degree exactly 2. About a third are built not
/// to be dominant: either `F3 = aF1 + bF2 + c`, or `F3 = F1^2 + c` with `F1`
/// linear.
pub fn random_mapping(rng: &mut SeededRng) -> PolynomialMapping {
    let b = random_polynomial(rng, 3, 2, 6);
    let (a, c) = match rng.gen_range(0..6) {
        0 => {
            let l = random_polynomial(rng, 3, 1, 3);
            let sq = &(&l * &l) + &Polynomial::constant(3, small_coefficient(rng, 5));
            (l, sq)
        }
        1 => {
            let a = random_polynomial(rng, 3, 2, 6);
            let c = &(&a.scale(&small_coefficient(rng, 5)) + &b.scale(&small_coefficient(rng, 5)))
                + &Polynomial::constant(3, small_coefficient(rng, 5));
            (a, c)
        }
        _ => (random_polynomial(rng, 3, 2, 6), random_polynomial(rng, 3, 2, 6)),
    };
    let mut comps = vec![a, b, c];
    if comps.iter().all(|p| p.degree().finite().unwrap_or(0) < 2) {
        // Force degree 2 without touching the dependent third component.
        let mut exps = vec![0u32; 3];
        exps[rng.gen_range(0..3)] += 1;
        exps[rng.gen_range(0..3)] += 1;
        let q = Polynomial::from_terms(3, [(exps, GaussianRational::one())]).expect("valid exponents");
        comps[1] = &comps[1] + &q;
    }
    PolynomialMapping::new(comps).expect("three components")
}

fn random_ansatz(rng: &mut SeededRng) -> Result<SequenceAnsatz> {
    let facons = enumerate_facons(3)?;
    let f = &facons[rng.gen_range(0..facons.len())];
    if rng.gen_bool(0.5) {
        let branches = symbolic_branches(f)?;
        Ok(branches[rng.gen_range(0..branches.len())].ansatz.clone())
    } else {
        let weights: Vec<i32> = (0..f.inf_set().len()).map(|_| rng.gen_range(1..=2)).collect();
        Ok(SequenceAnsatz::template(f, &weights)?.0)
    }
}

fn timed(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    }
}

pub fn facon_counts(max_n: usize) -> Result<(bool, String)> {
    let three = enumerate_facons(3)?;
    let sizes: Vec<usize> = group_facons_n3(&three)?.iter().map(|g| g.members.len()).collect();
    let mut ok = three.len() == 19 && sizes == [1, 3, 3, 3, 6, 3];
    let mut detail = format!("n=3: {} façons, groups {sizes:?}", three.len());
    for n in 1..=max_n {
        let formula = facon_count_formula(n)?;
        let listed = enumerate_facons(n)?.len() as u128;
        if formula != listed {
            ok = false;
            detail.push_str(&format!("; n={n}: formula {formula} vs enumeration {listed}"));
        }
    }
    Ok((ok, detail))
}

pub fn ring_laws(trials: usize, seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_from_seed(seed);
    for t in 0..trials {
        let a = random_polynomial(&mut rng, 3, 3, 5);
        let b = random_polynomial(&mut rng, 3, 3, 5);
        let c = random_polynomial(&mut rng, 3, 3, 5);
        if &(&a + &b) + &c != &a + &(&b + &c) || &a * &(&b + &c) != &(&a * &b) + &(&a * &c) {
            return Ok((false, format!("trial {t}: a={a}, b={b}, c={c}")));
        }
    }
    Ok((true, format!("{trials} trials")))
}

pub fn evaluation_homomorphism(trials: usize, seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_from_seed(seed);
    for t in 0..trials {
        let a = random_polynomial(&mut rng, 3, 3, 5);
        let b = random_polynomial(&mut rng, 3, 3, 5);
        let x: Vec<Complex64> = (0..3)
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let lhs = (&a * &b).evaluate(&x)?;
        let rhs = a.evaluate(&x)? * b.evaluate(&x)?;
        if (lhs - rhs).norm() > EVAL_TOLERANCE * lhs.norm().max(rhs.norm()).max(1.0) {
            return Ok((false, format!("trial {t}: {lhs} vs {rhs}")));
        }
    }
    Ok((true, format!("{trials} trials")))
}

pub fn round_trip(trials: usize, seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_from_seed(seed);
    for t in 0..trials {
        let f = random_mapping(&mut rng);
        let text = render_mapping(&f);
        let g = parse_mapping(&text)?;
        if g != f || render_mapping(&g) != text {
            return Ok((false, format!("trial {t}: {text}")));
        }
    }
    Ok((true, format!("{trials} mappings")))
}

pub fn substitution_homomorphism(trials: usize, seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_from_seed(seed);
    for t in 0..trials {
        let s = random_ansatz(&mut rng)?;
        let p = random_polynomial(&mut rng, 3, 2, 4);
        let q = random_polynomial(&mut rng, 3, 2, 4);
        let sum = substitute(&(&p + &q), &s)?;
        let prod = substitute(&(&p * &q), &s)?;
        let (sp, sq) = (substitute(&p, &s)?, substitute(&q, &s)?);
        if sum != &sp + &sq || prod != &sp * &sq {
            return Ok((false, format!("trial {t}: p={p}, q={q}, s={}", s.render())));
        }
    }
    Ok((true, format!("{trials} trials")))
}

/// Numeric rank of the Jacobian at a random point, singular values below
/// `RANK_THRESHOLD` times the largest counted as zero.
pub fn numeric_rank(f: &PolynomialMapping, rng: &mut SeededRng) -> Result<usize> {
    let x: Vec<Complex64> = (0..f.n())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let j = f.jacobian_at(&x)?;
    let m = DMatrix::from_fn(f.n(), f.n(), |r, c| j[r][c]);
    let sv = m.singular_values();
    let top = sv.max();
    Ok(sv.iter().filter(|&&s| s > RANK_THRESHOLD * top.max(f64::MIN_POSITIVE)).count())
}

pub fn dominance_agreement(trials: usize, seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_from_seed(seed);
    let mut dominant = 0;
    for t in 0..trials {
        let f = random_mapping(&mut rng);
        let symbolic = f.is_dominant();
        let numeric = numeric_rank(&f, &mut rng)? == f.n();
        if symbolic != numeric {
            return Ok((false, format!("trial {t}: {}", render_mapping(&f))));
        }
        dominant += symbolic as usize;
    }
    Ok((true, format!("{trials} mappings, {dominant} dominant")))
}

fn exact_point(s: &SequenceAnsatz, k: i64, params: &[GaussianRational]) -> Result<Vec<GaussianRational>> {
    let kk = GaussianRational::from_int(k);
    let k_inv = kk.inv()?;
    s.coords()
        .iter()
        .map(|c| {
            let mut acc = GaussianRational::zero();
            for (e, coef) in c.terms() {
                let base = if e >= 0 { &kk } else { &k_inv };
                acc += &(&coef.evaluate_exact(params)? * &base.pow(e.unsigned_abs()));
            }
            Ok(acc)
        })
        .collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Draws `pairs` (polynomial, ansatz) pairs with finite, non-constant limits
/// and returns the log-log slope of `|p(x(k)) - limit|` over
/// [`CONVERGENCE_KS`] for each. `p(x(k))` is evaluated directly at the exact
/// point, independently of the series expansion that produced the limit.
pub fn convergence_slopes(pairs: usize, seed: u64) -> Result<Vec<(String, f64)>> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < pairs && attempts < 200 * pairs {
        attempts += 1;
        let s = random_ansatz(&mut rng)?;
        let p = random_polynomial(&mut rng, 3, 2, 3);
        let LimitValue::Finite(lim) = limit(&substitute(&p, &s)?) else {
            continue;
        };
        let params: Vec<GaussianRational> = (0..s.num_params())
            .map(|_| {
                let v = small_coefficient(&mut rng, 3);
                if v.is_zero() { GaussianRational::one() } else { v }
            })
            .collect();
        let Ok(target) = lim.evaluate_exact(&params) else {
            continue;
        };
        let mut errs = Vec::new();
        for &k in &CONVERGENCE_KS {
            let x = exact_point(&s, k, &params)?;
            errs.push((&p.evaluate_exact(&x)? - &target).to_complex().norm());
        }
        if errs.iter().any(|e| *e == 0.0 || !e.is_finite()) {
            continue;
        }
        let xs: Vec<f64> = CONVERGENCE_KS.iter().map(|&k| (k as f64).ln()).collect();
        let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        out.push((format!("{p} along {}", s.render()), slope(&xs, &ys)));
    }
    Ok(out)
}

pub fn limit_convergence(pairs: usize, seed: u64) -> Result<(bool, String)> {
    let slopes = convergence_slopes(pairs, seed)?;
    let worst = slopes.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
    let ok = slopes.len() == pairs && worst <= MAX_SLOPE;
    Ok((ok, format!("{} pairs, worst slope {worst:.3}", slopes.len())))
}

/// Golden mappings with expected realized façons / components / type.
pub struct Golden {
    pub name: &'static str,
    pub source: &'static str,
    pub components: &'static [&'static str],
    pub matched_type: Option<u8>,
    pub facons: Option<&'static [&'static str]>,
    pub dominant: bool,
}

pub const GOLDENS: [Golden; 5] = [
    Golden {
        name: "triple product",
        source: "dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3",
        components: &["α1 = 0", "α2 = 0"],
        matched_type: None,
        facons: Some(&["(3)[1]", "(3)[2]", "(3)[1,2]"]),
        dominant: true,
    },
    Golden {
        name: "paraboloid",
        source: "dim 3\nF1 = x1\nF2 = x2*x3\nF3 = x2 + x1^2",
        components: &["α1^2 - α3 = 0"],
        matched_type: Some(2),
        facons: None,
        dominant: true,
    },
    Golden {
        name: "two planes",
        source: "dim 3\nF1 = x1*x2\nF2 = x2*x3\nF3 = x3",
        components: &["α2 = 0", "α3 = 0"],
        matched_type: Some(3),
        facons: None,
        dominant: true,
    },
    Golden {
        name: "identity",
        source: "dim 3\nF1 = x1\nF2 = x2\nF3 = x3",
        components: &[],
        matched_type: None,
        facons: Some(&[]),
        dominant: true,
    },
    Golden {
        name: "not dominant",
        source: "dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2",
        components: &["α1*α2 - α3 = 0"],
        matched_type: None,
        facons: None,
        dominant: false,
    },
];

pub fn golden(g: &Golden, seed: u64) -> Result<(bool, String)> {
    let f = parse_mapping(g.source)?;
    let opts = ClassifyOptions {
        seed,
        ..ClassifyOptions::default()
    };
    let r = classify_mapping_with(&f, &opts)?;
    let comps: Vec<&str> = r.components.iter().map(|c| c.equation.as_str()).collect();
    let mut problems = r.structural_violations();
    if comps != g.components {
        problems.push(format!("components {comps:?}"));
    }
    if r.matched_type != g.matched_type {
        problems.push(format!("type {:?}", r.matched_type));
    }
    if r.dominant != g.dominant {
        problems.push(format!("dominant {}", r.dominant));
    }
    if let Some(fs) = g.facons {
        if r.realized_facons() != fs {
            problems.push(format!("façons {:?}", r.realized_facons()));
        }
    }
    if g.matched_type == Some(2) && !r.components.iter().any(|c| c.kind == GeomType::Paraboloid) {
        problems.push("no paraboloid component".into());
    }
    Ok((problems.is_empty(), if problems.is_empty() { "as expected".into() } else { problems.join("; ") }))
}

/// Runs the suite; `quick` keeps it to a few seconds. `inject` names a check
/// whose result is forced to fail, for testing the failure path.
pub fn run_suite(quick: bool, seed: u64, inject: Option<&str>) -> Vec<CheckResult> {
    let trials = if quick { 20 } else { 200 };
    let mappings = if quick { 20 } else { 100 };
    let s = |i: u64| derive_seed(seed, &[i]);
    let mut out = vec![
        timed("facon counts", || facon_counts(if quick { 4 } else { 6 })),
        timed("ring laws", || ring_laws(trials, s(1))),
        timed("evaluation homomorphism", || evaluation_homomorphism(trials, s(2))),
        timed("parse/render round trip", || round_trip(mappings, s(3))),
        timed("substitution homomorphism", || substitution_homomorphism(trials, s(4))),
        timed("dominance agreement", || dominance_agreement(mappings, s(5))),
        timed("limit convergence", || limit_convergence(if quick { 10 } else { 50 }, s(6))),
    ];
    for g in GOLDENS.iter().filter(|g| !quick || g.name == "identity" || g.name == "triple product") {
        out.push(timed(&format!("golden: {}", g.name), || golden(g, seed)));
    }
    if let Some(name) = inject {
        for r in out.iter_mut().filter(|r| r.name == name) {
            r.passed = false;
            r.detail = format!("injected fault ({})", r.detail);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs: Vec<f64> = [1.0f64, 2.0, 3.0].iter().map(|v| v.ln()).collect();
        let ys: Vec<f64> = [1.0f64, 2.0, 3.0].iter().map(|v| (1.0 / v).ln()).collect();
        assert!((slope(&xs, &ys) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn quick_suite_passes_and_injection_fails() {
        let r = run_suite(true, 7, Some("ring laws"));
        for c in &r {
            assert_eq!(c.passed, c.name != "ring laws", "{c:?}");
        }
    }
}
