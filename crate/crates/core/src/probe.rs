//! Numeric oracle: sample diverging points whose images stay bounded, fit
//! low-degree surfaces to the images and compare with a symbolic report.
//!
//! Sample points are exact dyadic Gaussian rationals and the mapping is
//! evaluated exactly before rounding, so cancellations between huge terms do
//! not lose precision.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::implicit::monomials;
use crate::classify::AsymptoticSetReport;
use crate::error::{Error, Result};
use crate::facon::{enumerate_facons, Facon};
use crate::pertinent::set_partitions;
use crate::poly::{GaussianRational, Monomial, Polynomial, PolynomialMapping};
use crate::rng::{derive_seed, rng_from_seed, SeededRng};

/// Points a component must own within the fit tolerance.
pub const MIN_SUPPORT: usize = 10;
/// Points a signature cluster needs before it is fitted.
pub const MIN_CLUSTER: usize = 30;
/// Two smallest singular values closer than this factor make a fit ambiguous.
pub const AMBIGUITY_RATIO: f64 = 10.0;

/// Ratios tried between coordinates of one balancing block.
const RATIOS: [(i64, i64); 6] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2)];
/// Random coefficients are multiples of `2^-DYADIC_BITS`.
const DYADIC_BITS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub radius_start: f64,
    pub radius_factor: f64,
    pub steps: usize,
    pub image_bound: f64,
    /// Samples drawn per radius, spread evenly over the façon templates.
    pub samples_per_radius: usize,
    pub seed: u64,
    pub fit_tolerance: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            radius_start: 1e2,
            radius_factor: 10.0,
            steps: 7,
            image_bound: 1e3,
            samples_per_radius: 8000,
            seed: crate::rng::DEFAULT_SEED,
            fit_tolerance: 1e-4,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(format!("probe config: {m}")));
        if !(self.radius_start >= 10.0) || !self.radius_start.is_finite() {
            return bad("radius start must be at least 10");
        }
        if !(self.radius_factor >= 2.0) || !self.radius_factor.is_finite() {
            return bad("radius factor must be at least 2");
        }
        if self.steps < 2 {
            return bad("at least 2 radius steps are needed");
        }
        if !(self.image_bound > 0.0) || !self.image_bound.is_finite() {
            return bad("image bound must be positive and finite");
        }
        if self.samples_per_radius == 0 {
            return bad("samples per radius must be positive");
        }
        if !(self.fit_tolerance > 0.0 && self.fit_tolerance <= 1e-2) {
            return bad("fit tolerance must lie in (0, 1e-2]");
        }
        if !self.radii().last().is_some_and(|r| r.is_finite()) {
            return bad("radius schedule overflows");
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| self.radius_start * self.radius_factor.powi(i as i32))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbePoint {
    pub alpha: [Complex64; 3],
    /// Façon template that produced the preimage.
    pub sig: String,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeCloud {
    pub points: Vec<ProbePoint>,
    /// No bounded image was found anywhere in the schedule.
    pub possibly_proper: bool,
    pub final_radius: f64,
}

impl ProbeCloud {
    /// Points drawn at the largest radius; earlier radii only show the trend.
    pub fn final_points(&self) -> impl Iterator<Item = &ProbePoint> {
        self.points.iter().filter(move |p| p.radius == self.final_radius)
    }

    /// One JSON object per line: `{"alpha":[re,im,re,im,re,im],"sig":"(3)[1]","radius":R}`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let alpha: Vec<f64> = p.alpha.iter().flat_map(|z| [z.re, z.im]).collect();
            let line = serde_json::json!({ "alpha": alpha, "sig": p.sig, "radius": p.radius });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

/// Gaussian integer `(re, im)`.
type Gint = (BigInt, BigInt);

fn gint(re: i64, im: i64) -> Gint {
    (re.into(), im.into())
}

fn gmul(a: &Gint, b: &Gint) -> Gint {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn gadd(a: &Gint, b: &Gint) -> Gint {
    (&a.0 + &b.0, &a.1 + &b.1)
}

fn gscale(a: &Gint, s: &BigInt) -> Gint {
    (&a.0 * s, &a.1 * s)
}

/// Numerator of a random dyadic `z / 2^DYADIC_BITS` with parts in `[-max, max]`.
fn dyadic(rng: &mut SeededRng, max: i64) -> Gint {
    let m = max << DYADIC_BITS;
    gint(rng.gen_range(-m..=m), rng.gen_range(-m..=m))
}

/// Dyadic numerator with modulus in `[1, 2]` after scaling.
fn unit_dyadic(rng: &mut SeededRng) -> Gint {
    let lo = 1i64 << DYADIC_BITS;
    loop {
        let (re, im) = (rng.gen_range(-2 * lo..=2 * lo), rng.gen_range(-2 * lo..=2 * lo));
        let m = re * re + im * im;
        if (lo * lo..=4 * lo * lo).contains(&m) {
            return gint(re, im);
        }
    }
}

/// Twice a block ratio; equal leading terms half of the time.
fn ratio2(rng: &mut SeededRng) -> i64 {
    if rng.gen_bool(0.5) {
        return 2;
    }
    let (p, q) = RATIOS[rng.gen_range(0..RATIOS.len())];
    2 * p / q
}

fn pick<'a, T>(rng: &mut SeededRng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

/// Partitions of every subset of the coordinates, computed once.
struct Partitions(BTreeMap<Vec<usize>, Vec<Vec<Vec<usize>>>>);

impl Partitions {
    fn get(&mut self, items: &[usize]) -> &Vec<Vec<Vec<usize>>> {
        self.0.entry(items.to_vec()).or_insert_with(|| set_partitions(items))
    }
}

/// One preimage for façon `kappa` at radius `R = p/q`, as integers over the
/// common denominator `D = 2^(DYADIC_BITS+1) p^2 q^2`.
///
/// Diverging coordinates are `k (a R + b) + c/R`: coordinates in a block of a
/// random partition share `a` up to a ratio `k`, in a refining block `b` as
/// well. Fixed coordinates are `v + c/R^e` with `v` in {0, 1, -1} and `e` in
/// {1, 2}. Free coordinates are random of size at most 2.
fn draw_point(
    kappa: &Facon,
    (p, q): (&BigInt, &BigInt),
    parts: &mut Partitions,
    rng: &mut SeededRng,
) -> (Vec<Gint>, BigInt) {
    let n = kappa.n();
    let (p2, q2) = (p * p, q * q);
    let d = (&p2 * &q2) << (DYADIC_BITS + 1);
    let two = BigInt::from(2);
    let mut x = vec![gint(0, 0); n];
    let inf: Vec<usize> = kappa.inf_set().iter().copied().collect();
    let lead = pick(rng, parts.get(&inf)).clone();
    // Scale factors for a, b and c/R, with the dyadic 2^-DYADIC_BITS and the
    // half from the ratio already absorbed.
    let sa = &p2 * p * q;
    let sb = &p2 * &q2;
    let sc = &two * p * &q2 * q;
    for block in &lead {
        let a = unit_dyadic(rng);
        let subs = pick(rng, parts.get(block)).clone();
        for (s, sub) in subs.iter().enumerate() {
            let b = dyadic(rng, 2);
            for (t, &i) in sub.iter().enumerate() {
                let k = BigInt::from(if s == 0 && t == 0 { 2 } else { ratio2(rng) });
                let c = dyadic(rng, 2);
                let lead_part = gscale(&gadd(&gscale(&a, &sa), &gscale(&b, &sb)), &k);
                x[i - 1] = gadd(&lead_part, &gscale(&c, &sc));
            }
        }
    }
    for &j in kappa.fixed_set() {
        let v = *pick(rng, &[0i64, 0, 1, -1]);
        let c = dyadic(rng, 2);
        let tail = if rng.gen_bool(0.5) {
            gscale(&c, &sc)
        } else {
            gscale(&c, &(&two * &q2 * &q2))
        };
        x[j - 1] = gadd(&gscale(&gint(v, 0), &d), &tail);
    }
    for i in kappa.free() {
        x[i - 1] = gscale(&dyadic(rng, 2), &(&two * &sb));
    }
    (x, d)
}

fn to_f64(v: &BigInt, d: &BigInt) -> f64 {
    BigRational::new(v.clone(), d.clone()).to_f64().unwrap_or(f64::NAN)
}

/// A polynomial with integer coefficients `coeffs / den`, prepared for
/// evaluation at points given over a common denominator.
struct IntegerPoly {
    terms: Vec<(Vec<u32>, Gint)>,
    den: BigInt,
    degree: u32,
}

impl IntegerPoly {
    fn new(p: &Polynomial) -> Self {
        let den = p
            .terms()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(&c.denominator_lcm()));
        let scale = BigRational::from_integer(den.clone());
        let terms = p
            .terms()
            .map(|(m, c)| {
                let re = (&c.re * &scale).to_integer();
                let im = (&c.im * &scale).to_integer();
                (m.0.clone(), (re, im))
            })
            .collect();
        Self {
            terms,
            den,
            degree: p.degree().finite().unwrap_or(0),
        }
    }

    /// Value at `xs / d`; exact until the final rounding.
    fn evaluate(&self, xs: &[Gint], d: &BigInt) -> Complex64 {
        let mut acc: Gint = (BigInt::zero(), BigInt::zero());
        for (m, c) in &self.terms {
            let mut t = c.clone();
            let mut deg = 0;
            for (x, &e) in xs.iter().zip(m) {
                for _ in 0..e {
                    t = gmul(&t, x);
                }
                deg += e;
            }
            let pad = num_traits::pow(d.clone(), (self.degree - deg) as usize);
            acc.0 += &t.0 * &pad;
            acc.1 += &t.1 * &pad;
        }
        let den = &self.den * num_traits::pow(d.clone(), self.degree as usize);
        Complex64::new(to_f64(&acc.0, &den), to_f64(&acc.1, &den))
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Bounded images of diverging points, over the radius schedule.
pub fn sample_asymptotic(f: &PolynomialMapping, cfg: &ProbeConfig) -> Result<ProbeCloud> {
    if f.n() != 3 {
        return Err(Error::Unsupported(format!(
            "the probe handles mappings of C^3 only (got n = {})",
            f.n()
        )));
    }
    cfg.validate()?;
    let facons = enumerate_facons(3)?;
    let radii = cfg.radii();
    let per_template = cfg.samples_per_radius.div_ceil(facons.len());
    let comps: Vec<IntegerPoly> = f.components().iter().map(IntegerPoly::new).collect();
    let jobs: Vec<(usize, usize)> = (0..radii.len())
        .flat_map(|ri| (0..facons.len()).map(move |fi| (ri, fi)))
        .collect();
    let batches = jobs
        .par_iter()
        .map(|&(ri, fi)| -> Result<Vec<ProbePoint>> {
            let radius = radii[ri];
            let r = BigRational::from_float(radius)
                .ok_or_else(|| Error::Domain("radius is not finite".into()))?;
            let kappa = &facons[fi];
            let sig = kappa.to_string();
            let mut rng = rng_from_seed(derive_seed(cfg.seed, &[ri as u64, fi as u64]));
            let mut parts = Partitions(BTreeMap::new());
            let mut out = Vec::new();
            for _ in 0..per_template {
                let (xs, d) = draw_point(kappa, (r.numer(), r.denom()), &mut parts, &mut rng);
                let xf: Vec<Complex64> = xs
                    .iter()
                    .map(|z| Complex64::new(to_f64(&z.0, &d), to_f64(&z.1, &d)))
                    .collect();
                if norm(&xf) < radius {
                    continue;
                }
                let img: Vec<Complex64> = comps.iter().map(|p| p.evaluate(&xs, &d)).collect();
                if img.iter().all(|z| z.is_finite()) && norm(&img) <= cfg.image_bound {
                    out.push(ProbePoint {
                        alpha: [img[0], img[1], img[2]],
                        sig: sig.clone(),
                        radius,
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<ProbePoint> = batches.into_iter().flatten().collect();
    Ok(ProbeCloud {
        possibly_proper: points.is_empty(),
        points,
        final_radius: *radii.last().expect("at least two radii"),
    })
}

/// One fitted equation.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub sig: String,
    pub points: usize,
    pub degree: u32,
    /// Unit-norm coefficients over the degree <= 2 monomials in graded-lex
    /// descending order (`α1², α1α2, …, 1`).
    #[serde(skip)]
    pub coefficients: Vec<Complex64>,
    pub equation: String,
    /// Smallest singular value over the square root of the point count.
    pub residual: f64,
    pub ambiguous: bool,
}

fn eval_monomial(m: &Monomial, a: &[Complex64; 3]) -> Complex64 {
    m.0.iter()
        .zip(a)
        .fold(Complex64::new(1.0, 0.0), |acc, (&e, z)| acc * z.powu(e))
}

/// Smallest right singular vector of the evaluation matrix; returns the
/// vector, the residual and whether the two smallest singular values are close.
fn smallest_direction(pts: &[[Complex64; 3]], monos: &[Monomial]) -> (Vec<Complex64>, f64, bool) {
    let m = DMatrix::from_fn(pts.len(), monos.len(), |i, j| eval_monomial(&monos[j], &pts[i]));
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smallest = order[0];
    let sigma = svd.singular_values[smallest];
    let ambiguous = order
        .get(1)
        .is_some_and(|&i| svd.singular_values[i] < AMBIGUITY_RATIO * sigma.max(f64::MIN_POSITIVE));
    let v: Vec<Complex64> = v_t.row(smallest).iter().map(|z| z.conj()).collect();
    (v, sigma / (pts.len() as f64).sqrt(), ambiguous)
}

/// Rotates and rescales `v` so its largest entry is real positive, then
/// renders the terms above `1e-6` of it.
fn render_fit(v: &[Complex64], monos: &[Monomial]) -> String {
    let big = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
    if big.norm() == 0.0 {
        return "0 = 0".into();
    }
    let phase = big.conj() / big.norm();
    let mut terms = Vec::new();
    for (c, m) in v.iter().zip(monos) {
        let c = c * phase / big.norm();
        if c.norm() < 1e-6 {
            continue;
        }
        let coef = if c.im.abs() < 1e-9 { format!("{:.6}", c.re) } else { format!("({:.6}{:+.6}i)", c.re, c.im) };
        let vars: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("α{}", i + 1) } else { format!("α{}^{e}", i + 1) })
            .collect();
        terms.push(if vars.is_empty() { coef } else { format!("{coef}*{}", vars.join("*")) });
    }
    format!("{} = 0", terms.join(" + "))
}

/// Per signature cluster of the final radius, the best-fitting equation of
/// degree 1 if one fits within `tolerance`, otherwise of degree `max_degree`.
pub fn fit_implicit(cloud: &ProbeCloud, max_degree: u32, tolerance: f64) -> Result<Vec<FitResult>> {
    if !(1..=2).contains(&max_degree) {
        return Err(Error::Unsupported("fits of degree 1 or 2 only".into()));
    }
    let mut clusters: BTreeMap<&str, Vec<[Complex64; 3]>> = BTreeMap::new();
    for p in cloud.final_points() {
        clusters.entry(p.sig.as_str()).or_default().push(p.alpha);
    }
    let full = monomials(2);
    let mut out = Vec::new();
    for (sig, pts) in clusters {
        if pts.len() < MIN_CLUSTER {
            continue;
        }
        let mut best = None;
        for deg in 1..=max_degree {
            let monos = monomials(deg);
            let (v, residual, ambiguous) = smallest_direction(&pts, &monos);
            let done = residual < tolerance || deg == max_degree;
            if done {
                // Pad to the full monomial list.
                let coefficients: Vec<Complex64> = full
                    .iter()
                    .map(|m| monos.iter().position(|x| x == m).map_or(Complex64::default(), |i| v[i]))
                    .collect();
                best = Some(FitResult {
                    sig: sig.to_string(),
                    points: pts.len(),
                    degree: deg,
                    equation: render_fit(&coefficients, &full),
                    coefficients,
                    residual,
                    ambiguous,
                });
                break;
            }
        }
        out.extend(best);
    }
    Ok(out)
}

/// Agreement between a report and a cloud.
#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckSummary {
    pub points: usize,
    /// Over final-radius points, of the smallest normalized equation value.
    pub max_residual: f64,
    pub p99_residual: f64,
    /// Final-radius points within the tolerance of each component.
    pub support: Vec<usize>,
    /// Components owning fewer than [`MIN_SUPPORT`] points.
    pub unwitnessed: Vec<String>,
    pub flags: Vec<String>,
}

impl CrosscheckSummary {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_residual <= tol && self.unwitnessed.is_empty()
    }
}

fn unit(p: &Polynomial) -> Polynomial {
    let n: f64 = p.terms().map(|(_, c)| c.to_complex().norm_sqr()).sum::<f64>().sqrt();
    match BigRational::from_float(1.0 / n) {
        Some(s) if n > 0.0 => p.scale(&GaussianRational::from(s)),
        _ => p.clone(),
    }
}

pub fn crosscheck(report: &AsymptoticSetReport, cloud: &ProbeCloud, tolerance: f64) -> Result<CrosscheckSummary> {
    let eqs: Vec<Polynomial> = report.component_polynomials().iter().map(unit).collect();
    let pts: Vec<&ProbePoint> = cloud.final_points().collect();
    let mut flags = Vec::new();
    let mut support = vec![0usize; eqs.len()];
    let mut residuals = Vec::with_capacity(pts.len());
    for p in &pts {
        let mut best = f64::INFINITY;
        for (k, e) in eqs.iter().enumerate() {
            let v = e.evaluate(&p.alpha)?.norm();
            if v <= tolerance {
                support[k] += 1;
            }
            best = best.min(v);
        }
        residuals.push(best);
    }
    if eqs.is_empty() && !pts.is_empty() {
        flags.push(format!("{} bounded images but the report has no component", pts.len()));
    }
    residuals.sort_by(f64::total_cmp);
    let max_residual = residuals.last().copied().unwrap_or(0.0);
    let p99_residual = if residuals.is_empty() {
        0.0
    } else {
        residuals[((residuals.len() as f64 * 0.99).ceil() as usize).saturating_sub(1)]
    };
    let unwitnessed: Vec<String> = report
        .components
        .iter()
        .zip(&support)
        .filter(|(_, &s)| s < MIN_SUPPORT)
        .map(|(c, _)| c.equation.clone())
        .collect();
    for u in &unwitnessed {
        flags.push(format!("unwitnessed component {u}"));
    }
    Ok(CrosscheckSummary {
        points: pts.len(),
        max_residual,
        p99_residual,
        support,
        unwitnessed,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_mapping;

    fn map(s: &str) -> PolynomialMapping {
        parse_mapping(s).unwrap()
    }

    fn quick() -> ProbeConfig {
        ProbeConfig {
            samples_per_radius: 2000,
            ..ProbeConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(ProbeConfig::default().validate().is_ok());
        let bad = [
            ProbeConfig { radius_start: 5.0, ..ProbeConfig::default() },
            ProbeConfig { radius_factor: 1.5, ..ProbeConfig::default() },
            ProbeConfig { steps: 1, ..ProbeConfig::default() },
            ProbeConfig { image_bound: f64::INFINITY, ..ProbeConfig::default() },
            ProbeConfig { fit_tolerance: 0.1, ..ProbeConfig::default() },
            ProbeConfig { fit_tolerance: 0.0, ..ProbeConfig::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn identity_gives_empty_cloud() {
        let cfg = ProbeConfig { radius_start: 1e4, steps: 3, ..quick() };
        let c = sample_asymptotic(&PolynomialMapping::identity(3), &cfg).unwrap();
        assert!(c.points.is_empty() && c.possibly_proper);
        let g = map("dim 3\nF1 = x1 + x2^2\nF2 = x2\nF3 = x3");
        assert!(sample_asymptotic(&g, &cfg).unwrap().possibly_proper);
    }

    #[test]
    fn triple_product_cloud_lies_on_two_planes() {
        let f = map("dim 3\nF1 = x1\nF2 = x2\nF3 = x1*x2*x3");
        let c = sample_asymptotic(&f, &quick()).unwrap();
        assert!(!c.possibly_proper);
        for p in c.final_points() {
            let r = p.alpha[0].norm().min(p.alpha[1].norm());
            assert!(r < 1e-6, "{p:?}");
        }
        let again = sample_asymptotic(&f, &quick()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn synthetic_fits() {
        let mut rng = rng_from_seed(3);
        let mut plane = Vec::new();
        let mut parab = Vec::new();
        let mut random = Vec::new();
        for _ in 0..200 {
            let mut z = || {
                let (re, im) = dyadic(&mut rng, 2);
                Complex64::new(to_f64(&re, &BigInt::from(1024)), to_f64(&im, &BigInt::from(1024)))
            };
            let (u, v, w) = (z(), z(), z());
            let pt = |alpha| ProbePoint { alpha, sig: "s".into(), radius: 1.0 };
            plane.push(pt([Complex64::default(), u, v]));
            parab.push(pt([u, v, u * u]));
            random.push(pt([u, v, w]));
        }
        let cloud = |points| ProbeCloud { points, possibly_proper: false, final_radius: 1.0 };
        let f = fit_implicit(&cloud(plane), 2, 1e-4).unwrap();
        assert_eq!(f[0].degree, 1);
        assert!(f[0].residual < 1e-8);
        assert!((f[0].coefficients[6].norm() - 1.0).abs() < 1e-9, "{:?}", f[0]);
        let f = fit_implicit(&cloud(parab), 2, 1e-4).unwrap();
        assert_eq!(f[0].degree, 2);
        assert!(f[0].residual < 1e-6);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f[0].coefficients[0].norm() - s).abs() < 1e-6);
        assert!((f[0].coefficients[8].norm() - s).abs() < 1e-6);
        let f = fit_implicit(&cloud(random), 2, 1e-4).unwrap();
        assert!(f[0].residual > 1e-4);
    }
}
