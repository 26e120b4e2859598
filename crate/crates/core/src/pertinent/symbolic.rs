//! Mapping-independent branches: for a façon, the ways diverging coordinates
//! can share leading terms and fixed coordinates can sit at zero or not.

use super::{evaluate_candidates, BranchOutcome};
use crate::error::Result;
use crate::facon::Facon;
use crate::limit::{param_name, ParamField, SequenceAnsatz};
use crate::poly::GaussianRational;

/// All set partitions of `items`, blocks in order of first element.
pub fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        // `first` alone, or joined to one existing block.
        let mut alone = vec![vec![first]];
        alone.extend(p.iter().cloned());
        out.push(alone);
        for b in 0..p.len() {
            let mut q = p.clone();
            q[b].insert(0, first);
            out.push(q);
        }
    }
    for p in &mut out {
        p.sort();
    }
    out
}

/// Partitions refining `coarse` block by block.
fn refinements(coarse: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new()];
    for block in coarse {
        let parts = set_partitions(block);
        out = out
            .into_iter()
            .flat_map(|acc: Vec<Vec<usize>>| {
                parts.iter().map(move |p| {
                    let mut a = acc.clone();
                    a.extend(p.iter().cloned());
                    a
                })
            })
            .collect();
    }
    for p in &mut out {
        p.sort();
    }
    out
}

fn render_partition(p: &[Vec<usize>]) -> String {
    p.iter()
        .map(|b| {
            let s: Vec<String> = b.iter().map(|i| format!("x{i}")).collect();
            format!("{{{}}}", s.join(","))
        })
        .collect::<Vec<_>>()
        .join("")
}

/// Branches for `facon` with every diverging coordinate of weight 1:
/// `x_i = a_i k + b_i + c_i/k + d_i/k^2`. Coordinates in one block of the first
/// partition share `a`, in one block of the refining partition also share `b`.
/// Each fixed coordinate tends to 0 or to 1.
pub fn symbolic_branches(facon: &Facon) -> Result<Vec<BranchOutcome>> {
    let inf: Vec<usize> = facon.inf_set().iter().copied().collect();
    let fixed: Vec<usize> = facon.fixed_set().iter().copied().collect();
    let (template, _) = SequenceAnsatz::template(facon, &vec![1; inf.len()])?;
    let m = template.num_params();
    let idx = |coord: usize, e: i32| {
        let name = param_name(coord, e);
        template
            .param_names()
            .iter()
            .position(|x| *x == name)
            .expect("template parameter")
    };
    let mut out = Vec::new();
    for lead in set_partitions(&inf) {
        for next in refinements(&lead) {
            for mask in 0..(1u32 << fixed.len()) {
                let mut images: Vec<ParamField> = (0..m).map(|p| ParamField::param(m, p)).collect();
                for (level, part) in [(1, &lead), (0, &next)] {
                    for block in part.iter() {
                        let rep = block[0];
                        for &i in &block[1..] {
                            images[idx(i, level)] = ParamField::param(m, idx(rep, level));
                        }
                    }
                }
                let mut label = format!("lead {} next {}", render_partition(&lead), render_partition(&next));
                for (b, &j) in fixed.iter().enumerate() {
                    let value = (mask >> b) & 1;
                    images[idx(j, 0)] = ParamField::constant(m, GaussianRational::from_int(value as i64));
                    label.push_str(&format!(" x{j}->{value}"));
                }
                let ansatz = template.compose_params(&images)?;
                let (surviving, discarded) = evaluate_candidates(&ansatz)?;
                out.push(BranchOutcome {
                    facon: facon.clone(),
                    mapping: None,
                    label,
                    ansatz,
                    limits: None,
                    rank: None,
                    surviving,
                    discarded,
                });
            }
        }
    }
    Ok(out)
}
