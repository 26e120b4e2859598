//! Case-splitting solver for "these parameter polynomials vanish" with a few
//! polynomials required to stay nonzero.
//!
//! Each branch either pins one parameter (to 0, to a rational expression in
//! the others, or to a root of a quadratic with an exact square-root
//! discriminant) or records a factor as nonzero. Branches that need anything
//! else are counted as unsolved and dropped.

use std::cmp::Reverse;

use crate::limit::ParamField;
use crate::poly::{GaussianRational, Monomial, Polynomial};

#[derive(Debug, Clone)]
pub struct Solution {
    /// Image of every original parameter in terms of the still-free ones.
    pub images: Vec<ParamField>,
    /// Polynomials assumed nonzero on this branch.
    pub nonzero: Vec<Polynomial>,
}

#[derive(Debug, Clone, Default)]
pub struct SolveReport {
    pub solutions: Vec<Solution>,
    pub unsolved: usize,
    pub truncated: bool,
}

/// Default cap on explored nodes per call.
pub const MAX_NODES: usize = 4000;

struct Node {
    images: Vec<ParamField>,
    constraints: Vec<Polynomial>,
    nonzero: Vec<Polynomial>,
}

pub fn solve(
    num_params: usize,
    constraints: Vec<Polynomial>,
    nonzero: Vec<Polynomial>,
    max_nodes: usize,
) -> SolveReport {
    let images = (0..num_params).map(|p| ParamField::param(num_params, p)).collect();
    let mut stack = vec![Node {
        images,
        constraints,
        nonzero,
    }];
    let mut report = SolveReport::default();
    let mut visited = 0;
    while let Some(node) = stack.pop() {
        visited += 1;
        if visited > max_nodes {
            report.truncated = true;
            break;
        }
        match step(node) {
            Step::Infeasible => {}
            Step::Unsolved => report.unsolved += 1,
            Step::Solved(sol) => {
                if !report.solutions.iter().any(|s| s.images == sol.images) {
                    report.solutions.push(sol);
                }
            }
            Step::Split(children) => stack.extend(children.into_iter().rev()),
        }
    }
    report
}

enum Step {
    Infeasible,
    Unsolved,
    Solved(Solution),
    Split(Vec<Node>),
}

fn step(node: Node) -> Step {
    let Node {
        images,
        constraints,
        nonzero,
    } = node;
    if nonzero.iter().any(Polynomial::is_zero) {
        return Step::Infeasible;
    }
    let mut cs: Vec<Polynomial> = Vec::new();
    for c in constraints {
        if c.is_zero() {
            continue;
        }
        let c = strip_nonzero_factors(c, &nonzero);
        if c.is_constant() {
            return Step::Infeasible;
        }
        let c = c.monic();
        if !cs.contains(&c) {
            cs.push(c);
        }
    }
    if cs.is_empty() {
        return Step::Solved(Solution { images, nonzero });
    }
    let idx = (0..cs.len())
        .min_by_key(|&i| (cs[i].degree().finite().unwrap_or(0), cs[i].len(), i))
        .expect("nonempty");
    let c = cs.swap_remove(idx);
    let m = c.num_vars();

    let content = c.monomial_content();
    if content.degree() > 0 {
        let mut children = Vec::new();
        let vars: Vec<usize> = (0..m).filter(|&v| content.0[v] > 0).collect();
        for &v in &vars {
            children.push(substitute(&images, &cs, &nonzero, v, &ParamField::zero(m)));
        }
        let mut nz = nonzero.clone();
        nz.extend(vars.iter().map(|&v| Polynomial::var(m, v)));
        let mut rest = cs.clone();
        rest.push(c.div_monomial(&content).expect("content divides"));
        children.push(Node {
            images,
            constraints: rest,
            nonzero: nz,
        });
        return Step::Split(children);
    }

    // Linear in some parameter: v = -B/A.
    // Prefer a constant pivot, then a parameter not assumed nonzero, then short
    // expressions, then later parameters (lower powers of k).
    let guarded = |v: usize| nonzero.iter().any(|z| z.variables() == [v] && z.is_monomial());
    let mut best: Option<((bool, bool, usize, Reverse<usize>), usize, Polynomial, Polynomial)> = None;
    for v in c.variables() {
        if let Some((a, b)) = c.split_linear(v) {
            if a.is_zero() {
                continue;
            }
            let key = (!a.is_constant(), guarded(v), b.len() + a.len(), Reverse(v));
            if best.as_ref().map_or(true, |(k, ..)| key < *k) {
                best = Some((key, v, a, b));
            }
        }
    }
    if let Some(((nonconst, ..), v, a, b)) = best {
        let value = ParamField::from_poly(-&b)
            .checked_div(&ParamField::from_poly(a.clone()))
            .expect("nonzero coefficient");
        if !nonconst {
            return Step::Split(vec![substitute(&images, &cs, &nonzero, v, &value)]);
        }
        let mut nz = nonzero.clone();
        nz.push(a.clone());
        let pinned = substitute(&images, &cs, &nz, v, &value);
        let mut degenerate = cs.clone();
        degenerate.push(a);
        degenerate.push(b);
        return Step::Split(vec![
            pinned,
            Node {
                images,
                constraints: degenerate,
                nonzero,
            },
        ]);
    }

    // Quadratic with constant leading coefficient and a square discriminant.
    for v in c.variables() {
        if c.degree_in(v) != 2 {
            continue;
        }
        let co = coefficients_in(&c, v);
        let Some(a2) = co[2].constant_value() else {
            continue;
        };
        let disc = &(&co[1] * &co[1]) - &co[0].scale(&(&a2 * &GaussianRational::from_int(4)));
        let Some(root) = poly_sqrt(&disc) else {
            continue;
        };
        let inv = (&a2 * &GaussianRational::from_int(2)).inv().expect("nonzero");
        let mut children = Vec::new();
        let signs: &[i64] = if root.is_zero() { &[1] } else { &[1, -1] };
        for &sg in signs {
            let val = (&-&co[1] + &root.scale(&GaussianRational::from_int(sg))).scale(&inv);
            children.push(substitute(&images, &cs, &nonzero, v, &ParamField::from_poly(val)));
        }
        return Step::Split(children);
    }
    Step::Unsolved
}

fn substitute(
    images: &[ParamField],
    constraints: &[Polynomial],
    nonzero: &[Polynomial],
    var: usize,
    value: &ParamField,
) -> Node {
    let m = value.num_params();
    let sub: Vec<ParamField> = (0..m)
        .map(|p| {
            if p == var {
                value.clone()
            } else {
                ParamField::param(m, p)
            }
        })
        .collect();
    let apply = |p: &Polynomial| -> Polynomial {
        if p.degree_in(var) == 0 {
            return p.clone();
        }
        ParamField::from_poly(p.clone())
            .compose(&sub)
            .expect("same parameter ring")
            .numerator()
            .clone()
    };
    Node {
        images: images
            .iter()
            .map(|f| {
                if f.variables().contains(&var) {
                    f.compose(&sub).expect("same parameter ring")
                } else {
                    f.clone()
                }
            })
            .collect(),
        constraints: constraints.iter().map(apply).collect(),
        nonzero: nonzero.iter().map(apply).collect(),
    }
}

fn strip_nonzero_factors(mut c: Polynomial, nonzero: &[Polynomial]) -> Polynomial {
    for nz in nonzero.iter().filter(|p| !p.is_constant()) {
        while let Some(q) = c.div_exact(nz) {
            c = q;
        }
    }
    c
}

/// Coefficients of `p` as a polynomial in `var`, lowest degree first.
fn coefficients_in(p: &Polynomial, var: usize) -> Vec<Polynomial> {
    let n = p.num_vars();
    let mut out = vec![Polynomial::zero(n); p.degree_in(var) as usize + 1];
    for (m, c) in p.terms() {
        let e = m.0[var] as usize;
        let mut rest = m.clone();
        rest.0[var] = 0;
        out[e] = &out[e] + &Polynomial::monomial(n, rest, c.clone());
    }
    out
}

/// Exact square root of a polynomial, if it has one.
pub fn poly_sqrt(d: &Polynomial) -> Option<Polynomial> {
    let n = d.num_vars();
    if d.is_zero() {
        return Some(Polynomial::zero(n));
    }
    let (lm, lc) = d.leading()?;
    if lm.0.iter().any(|e| e % 2 == 1) {
        return None;
    }
    let half = Monomial(lm.0.iter().map(|e| e / 2).collect());
    let c = lc.sqrt()?;
    let two_c_inv = (&c * &GaussianRational::from_int(2)).inv().ok()?;
    let mut s = Polynomial::monomial(n, half.clone(), c);
    for _ in 0..=d.len() + 2 {
        let r = d - &(&s * &s);
        let Some((rm, rc)) = r.leading() else {
            return Some(s);
        };
        if !half.divides(rm) {
            return None;
        }
        let t = Polynomial::monomial(n, rm.div(&half), rc * &two_c_inv);
        s = &s + &t;
    }
    let r = d - &(&s * &s);
    r.is_zero().then_some(s)
}
