//! Façons: which source coordinates of a diverging sequence blow up and which
//! converge to point-independent values.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A façon `(I)[J]` with 1-based coordinate indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Facon {
    #[serde(rename = "inf")]
    inf_set: BTreeSet<usize>,
    #[serde(rename = "fixed")]
    fixed_set: BTreeSet<usize>,
    #[serde(skip)]
    n: usize,
}

/// Which branch of the façon count a façon falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaconCase {
    /// `I ∪ J` covers every coordinate.
    Covering,
    /// Not covering and `J` empty.
    InfOnly,
    /// Not covering and `J` nonempty.
    Partial,
}

impl Facon {
    pub fn new<I, J>(n: usize, inf: I, fixed: J) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
        J: IntoIterator<Item = usize>,
    {
        let inf_set: BTreeSet<usize> = inf.into_iter().collect();
        let fixed_set: BTreeSet<usize> = fixed.into_iter().collect();
        if inf_set.is_empty() {
            return Err(Error::Domain("a façon needs at least one diverging coordinate".into()));
        }
        if !inf_set.is_disjoint(&fixed_set) {
            return Err(Error::Domain("diverging and fixed coordinates overlap".into()));
        }
        if inf_set.iter().chain(&fixed_set).any(|&i| i == 0 || i > n) {
            return Err(Error::Domain(format!("façon index outside 1..{n}")));
        }
        Ok(Self {
            inf_set,
            fixed_set,
            n,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inf_set(&self) -> &BTreeSet<usize> {
        &self.inf_set
    }

    pub fn fixed_set(&self) -> &BTreeSet<usize> {
        &self.fixed_set
    }

    pub fn is_inf(&self, coord: usize) -> bool {
        self.inf_set.contains(&coord)
    }

    pub fn is_fixed(&self, coord: usize) -> bool {
        self.fixed_set.contains(&coord)
    }

    /// Coordinates in neither set.
    pub fn free(&self) -> Vec<usize> {
        (1..=self.n)
            .filter(|i| !self.inf_set.contains(i) && !self.fixed_set.contains(i))
            .collect()
    }

    pub fn support_len(&self) -> usize {
        self.inf_set.len() + self.fixed_set.len()
    }

    pub fn case(&self) -> FaconCase {
        if self.support_len() == self.n {
            FaconCase::Covering
        } else if self.fixed_set.is_empty() {
            FaconCase::InfOnly
        } else {
            FaconCase::Partial
        }
    }

    fn sort_key(&self) -> (usize, Vec<usize>, Vec<usize>) {
        (
            self.support_len(),
            self.inf_set.iter().copied().collect(),
            self.fixed_set.iter().copied().collect(),
        )
    }

    /// Parses `(1,2)[3]`, `(3)`, `(2)[1,3]`.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("malformed façon `{s}`"));
        let s = s.trim();
        let rest = s.strip_prefix('(').ok_or_else(bad)?;
        let close = rest.find(')').ok_or_else(bad)?;
        let inf = parse_indices(&rest[..close]).ok_or_else(bad)?;
        let tail = rest[close + 1..].trim();
        let fixed = if tail.is_empty() {
            Vec::new()
        } else {
            let inner = tail
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(bad)?;
            parse_indices(inner).ok_or_else(bad)?
        };
        Facon::new(n, inf, fixed)
    }
}

fn parse_indices(s: &str) -> Option<Vec<usize>> {
    if s.trim().is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|t| t.trim().parse().ok()).collect()
}

impl fmt::Display for Facon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<usize>| {
            s.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        };
        write!(f, "({})", join(&self.inf_set))?;
        if !self.fixed_set.is_empty() {
            write!(f, "[{}]", join(&self.fixed_set))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Facon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Facon {
    type Err = Error;
    /// Assumes `n = 3`.
    fn from_str(s: &str) -> Result<Self> {
        Facon::parse(3, s)
    }
}

/// All façons for dimension `n`, ordered by `|I ∪ J|`, then `I`, then `J`.
pub fn enumerate_facons(n: usize) -> Result<Vec<Facon>> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if n > 16 {
        return Err(Error::Domain("n too large to enumerate".into()));
    }
    let mut out = Vec::new();
    // Each coordinate is diverging (1), fixed (2) or free (0).
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut inf = Vec::new();
        let mut fixed = Vec::new();
        for i in 1..=n {
            match c % 3 {
                1 => inf.push(i),
                2 => fixed.push(i),
                _ => {}
            }
            c /= 3;
        }
        if inf.is_empty() {
            continue;
        }
        // Every disjoint (I, J) with I nonempty falls in exactly one FaconCase.
        out.push(Facon::new(n, inf, fixed)?);
    }
    out.sort_by_key(Facon::sort_key);
    out.dedup();
    Ok(out)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn arrangements(n: u64, t: u64) -> u128 {
    (0..t).map(|i| (n - i) as u128).product()
}

/// `Σ_{t=1}^{n} C(n,t) + Σ_{t=1}^{n-1} C(n,t) + Σ_{t=2}^{n-1} n!/(n-t)!`.
pub fn facon_count_formula(n: usize) -> Result<u128> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let n = n as u64;
    let covering: u128 = (1..=n).map(|t| binomial(n, t)).sum();
    let inf_only: u128 = (1..n).map(|t| binomial(n, t)).sum();
    let partial: u128 = (2..n).map(|t| arrangements(n, t)).sum();
    Ok(covering + inf_only + partial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupLabel {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl GroupLabel {
    pub const ALL: [GroupLabel; 6] = [
        GroupLabel::I,
        GroupLabel::II,
        GroupLabel::III,
        GroupLabel::IV,
        GroupLabel::V,
        GroupLabel::VI,
    ];

    /// Group of a façon for `n = 3`.
    pub fn of(f: &Facon) -> Option<GroupLabel> {
        if f.n() != 3 {
            return None;
        }
        Some(match (f.inf_set().len(), f.fixed_set().len()) {
            (3, 0) => GroupLabel::I,
            (2, 0) => GroupLabel::II,
            (1, 0) => GroupLabel::III,
            (2, 1) => GroupLabel::IV,
            (1, 1) => GroupLabel::V,
            (1, 2) => GroupLabel::VI,
            _ => return None,
        })
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaconGroup {
    pub label: GroupLabel,
    pub members: Vec<Facon>,
}

/// Splits the 19 façons of `n = 3` into groups I..VI.
pub fn group_facons_n3(facons: &[Facon]) -> Result<Vec<FaconGroup>> {
    let expected = enumerate_facons(3)?;
    let mut sorted = facons.to_vec();
    sorted.sort_by_key(Facon::sort_key);
    if sorted != expected {
        return Err(Error::Structural(
            "input is not the complete façon list for n = 3".into(),
        ));
    }
    Ok(GroupLabel::ALL
        .iter()
        .map(|&label| FaconGroup {
            label,
            members: facons
                .iter()
                .filter(|f| GroupLabel::of(f) == Some(label))
                .cloned()
                .collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Facon {
        s.parse().unwrap()
    }

    #[test]
    fn nineteen_facons_for_three_coordinates() {
        let all = enumerate_facons(3).unwrap();
        assert_eq!(all.len(), 19);
        for s in ["(1,2,3)", "(1,2)[3]", "(3)[1,2]", "(1)[2]", "(3)[2]", "(2,3)"] {
            assert!(all.contains(&f(s)), "{s}");
        }
    }

    #[test]
    fn small_dimensions() {
        let one = enumerate_facons(1).unwrap();
        assert_eq!(one, vec![Facon::new(1, [1], []).unwrap()]);
        let two: Vec<String> = enumerate_facons(2).unwrap().iter().map(|f| f.to_string()).collect();
        assert_eq!(two, ["(1)", "(2)", "(1)[2]", "(1,2)", "(2)[1]"]);
        assert!(enumerate_facons(0).is_err());
    }

    #[test]
    fn formula_values() {
        assert_eq!(facon_count_formula(1).unwrap(), 1);
        assert_eq!(facon_count_formula(3).unwrap(), 19);
        assert_eq!(facon_count_formula(4).unwrap(), 65);
        assert!(facon_count_formula(0).is_err());
    }

    #[test]
    fn formula_matches_enumeration_up_to_four() {
        for n in 1..=4 {
            assert_eq!(
                facon_count_formula(n).unwrap(),
                enumerate_facons(n).unwrap().len() as u128,
                "n = {n}"
            );
        }
    }

    #[test]
    fn groups_partition_the_list() {
        let groups = group_facons_n3(&enumerate_facons(3).unwrap()).unwrap();
        let sizes: Vec<usize> = groups.iter().map(|g| g.members.len()).collect();
        assert_eq!(sizes, [1, 3, 3, 3, 6, 3]);
        assert!(groups[3].members.contains(&f("(1,2)[3]")));
        assert!(groups[4].members.contains(&f("(3)[2]")));
        assert!(group_facons_n3(&[f("(1)")]).is_err());
    }

    #[test]
    fn invariants_are_checked() {
        assert!(Facon::new(3, [], [1]).is_err());
        assert!(Facon::new(3, [1], [1]).is_err());
        assert!(Facon::new(3, [4], []).is_err());
        assert_eq!(f("(2)[1,3]").free(), Vec::<usize>::new());
        assert_eq!(f("(2)").free(), vec![1, 3]);
    }
}
