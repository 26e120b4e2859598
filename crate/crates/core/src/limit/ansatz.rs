//! Parametrised diverging sequences `ξ_k`.

use std::fmt;

use num_complex::Complex64;

use super::field::ParamField;
use super::laurent::ParamLaurent;
use crate::error::{Error, Result};
use crate::facon::Facon;
use crate::poly::{GaussianRational, Polynomial};

/// Lowest power of `k` carried by generated templates.
pub const TEMPLATE_DEPTH: i32 = -2;

/// One Laurent polynomial in `k` per source coordinate.
#[derive(Clone, PartialEq, Eq)]
pub struct SequenceAnsatz {
    coords: Vec<ParamLaurent>,
    param_names: Vec<String>,
}

/// Bookkeeping for an ansatz generated from a façon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateInfo {
    /// Leading powers of the diverging coordinates, in coordinate order.
    pub weights: Vec<i32>,
    /// Parameters that must stay nonzero (leading coefficients of diverging coordinates).
    pub leading: Vec<usize>,
    /// `(coordinate, parameter)` holding the `k^0` value of each fixed coordinate.
    pub fixed_slots: Vec<(usize, usize)>,
}

impl SequenceAnsatz {
    pub fn new(coords: Vec<ParamLaurent>, param_names: Vec<String>) -> Result<Self> {
        if let Some(bad) = coords.iter().find(|c| c.num_params() != param_names.len()) {
            return Err(Error::VarCountMismatch {
                left: param_names.len(),
                right: bad.num_params(),
            });
        }
        Ok(Self {
            coords,
            param_names,
        })
    }

    /// Fully generic template for `facon`: every coefficient from the top power
    /// down to `k^-2` is a fresh parameter. Diverging coordinates start at the
    /// given weights (one per member of `I`, in order); the others at `k^0`.
    pub fn template(facon: &Facon, weights: &[i32]) -> Result<(Self, TemplateInfo)> {
        let n = facon.n();
        if weights.len() != facon.inf_set().len() || weights.iter().any(|&w| w < 1) {
            return Err(Error::Contract(format!(
                "need one positive weight per diverging coordinate of {facon}"
            )));
        }
        let mut tops = vec![0i32; n];
        for (&i, &w) in facon.inf_set().iter().zip(weights) {
            tops[i - 1] = w;
        }
        let mut names = Vec::new();
        let mut slots: Vec<Vec<(i32, usize)>> = vec![Vec::new(); n];
        for (c, &top) in tops.iter().enumerate() {
            for e in (TEMPLATE_DEPTH..=top).rev() {
                slots[c].push((e, names.len()));
                names.push(param_name(c + 1, e));
            }
        }
        let m = names.len();
        let coords = slots
            .iter()
            .map(|s| {
                ParamLaurent::from_terms(m, s.iter().map(|&(e, p)| (e, ParamField::param(m, p))))
            })
            .collect::<Result<Vec<_>>>()?;
        let leading = facon
            .inf_set()
            .iter()
            .map(|&i| slots[i - 1][0].1)
            .collect();
        let fixed_slots = facon
            .fixed_set()
            .iter()
            .map(|&j| (j, slots[j - 1][0].1))
            .collect();
        Ok((
            Self::new(coords, names)?,
            TemplateInfo {
                weights: weights.to_vec(),
                leading,
                fixed_slots,
            },
        ))
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn num_params(&self) -> usize {
        self.param_names.len()
    }

    pub fn param_names(&self) -> &[String] {
        &self.param_names
    }

    pub fn coords(&self) -> &[ParamLaurent] {
        &self.coords
    }

    /// Coordinate `i`, 1-based.
    pub fn coord(&self, i: usize) -> &ParamLaurent {
        &self.coords[i - 1]
    }

    /// Applies a parameter substitution; names are kept.
    pub fn compose_params(&self, images: &[ParamField]) -> Result<Self> {
        if images.len() != self.num_params() {
            return Err(Error::DimensionMismatch {
                expected: self.num_params(),
                got: images.len(),
            });
        }
        let coords = self
            .coords
            .iter()
            .map(|c| c.compose_params(images))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords, self.param_names.clone())
    }

    /// Checks the façon invariants: diverging coordinates have a nonzero
    /// positive top term, fixed ones converge to a parameter-free value, free
    /// ones converge to a parameter-dependent value.
    pub fn check_facon(&self, facon: &Facon) -> Result<()> {
        if facon.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: facon.n(),
                got: self.n(),
            });
        }
        for (idx, c) in self.coords.iter().enumerate() {
            let i = idx + 1;
            let top = c.max_exponent();
            if facon.is_inf(i) {
                if top.map_or(true, |e| e < 1) {
                    return Err(Error::Contract(format!("x{i} does not diverge")));
                }
            } else {
                if top.is_some_and(|e| e > 0) {
                    return Err(Error::Contract(format!("x{i} diverges")));
                }
                let value = c.coefficient(0);
                if facon.is_fixed(i) && !value.is_constant() {
                    return Err(Error::Contract(format!("x{i} limit depends on parameters")));
                }
                if !facon.is_fixed(i) && value.is_constant() {
                    return Err(Error::Contract(format!("x{i} limit is a constant")));
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, k: f64, params: &[GaussianRational]) -> Result<Vec<Complex64>> {
        self.coords.iter().map(|c| c.evaluate(k, params)).collect()
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|c| c.render_with(&self.param_names))
            .collect();
        format!("({})", parts.join(", "))
    }
}

pub(crate) fn param_name(coord: usize, e: i32) -> String {
    if e < 0 {
        format!("c{coord}_m{}", -e)
    } else {
        format!("c{coord}_{e}")
    }
}

/// Exact expansion of `p(x_1(k), ..., x_n(k))`.
pub fn substitute(p: &Polynomial, s: &SequenceAnsatz) -> Result<ParamLaurent> {
    if p.num_vars() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: p.num_vars(),
            got: s.n(),
        });
    }
    let m = s.num_params();
    let mut powers: Vec<Vec<ParamLaurent>> = s
        .coords
        .iter()
        .map(|c| vec![ParamLaurent::constant(ParamField::one(m)), c.clone()])
        .collect();
    let mut acc = ParamLaurent::zero(m);
    for (mono, c) in p.terms() {
        let mut t = ParamLaurent::constant(ParamField::constant(m, c.clone()));
        for (v, &e) in mono.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            while powers[v].len() <= e as usize {
                let next = powers[v].last().unwrap() * &s.coords[v];
                powers[v].push(next);
            }
            t = &t * &powers[v][e as usize];
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

impl fmt::Display for SequenceAnsatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Debug for SequenceAnsatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}
