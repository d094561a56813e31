use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::sunflower::{find_sunflower, sunflower_threshold, VarTuple};
use super::KernelError;
use crate::builtin;
use crate::formula::{Constraint, Formula, Term};
use crate::relation::{implement_sunflower_restriction, is_mergeable, nonzero_core, Relation, RelationError};

/// Projections of the constraints over one relation onto its
/// non-zero-closed positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FooSet {
    pub relation: String,
    /// Non-zero-closed positions of the relation, 1-based.
    pub positions: Vec<usize>,
    /// Distinct tuples in order of first occurrence.
    pub tuples: Vec<VarTuple>,
}

/// FOO set of the relation at `rel` in `f`'s language. Placeholder
/// arguments project to variable 0.
pub fn foo_set(f: &Formula, rel: usize) -> FooSet {
    let r = f.language().get(rel);
    let positions = nonzero_core(r).positions;
    let mut seen = HashSet::new();
    let tuples = f
        .constraints()
        .iter()
        .filter(|c| c.relation == rel)
        .map(|c| foo_tuple(c, &positions))
        .filter(|t| seen.insert(t.clone()))
        .collect();
    FooSet {
        relation: r.name().to_string(),
        positions,
        tuples,
    }
}

fn foo_tuple(c: &Constraint, positions: &[usize]) -> VarTuple {
    positions.iter().map(|&p| c.args[p - 1].var().unwrap_or(0)).collect()
}

/// Result of [`reduce_formula`].
#[derive(Debug, Clone)]
pub struct Reduced {
    pub formula: Formula,
    /// Number of sunflower replacements performed.
    pub iterations: usize,
    /// `|FOO|` per non-zero-valid relation in use, before each iteration
    /// and once more at the end.
    pub foo_trajectory: Vec<BTreeMap<String, usize>>,
    /// Sum of the values in the matching `foo_trajectory` entry.
    pub measures: Vec<usize>,
    /// Set when a sunflower restriction came out empty: no assignment of
    /// weight at most `k` satisfies the input.
    pub infeasible: bool,
}

/// Indices of relations used by `f` that are not zero-valid.
fn nonzero_valid_in_use(f: &Formula) -> Vec<usize> {
    let mut used: Vec<usize> = f.constraints().iter().map(|c| c.relation).collect();
    used.sort_unstable();
    used.dedup();
    used.retain(|&i| !f.language().get(i).contains_code(0));
    used
}

fn foo_sizes(f: &Formula) -> BTreeMap<String, usize> {
    nonzero_valid_in_use(f)
        .into_iter()
        .map(|i| (f.language().get(i).name().to_string(), foo_set(f, i).tuples.len()))
        .collect()
}

/// Replaces sunflowers of FOO tuples until every non-zero-valid relation
/// has at most `k^d (d!)^2` FOO tuples, `d` being the maximum arity of the
/// language. Weight-at-most-`k` solutions are unchanged.
///
/// `f` must be normalized and its language mergeable. With `k = 0` the
/// formula is returned as is.
pub fn reduce_formula(f: &Formula, k: usize) -> Result<Reduced, KernelError> {
    if let Some(r) = f.language().relations().find(|r| !is_mergeable(r).0) {
        return Err(KernelError::NotMergeableLanguage(r.name().to_string()));
    }
    let d = f.language().max_arity();
    let threshold = sunflower_threshold(d, k);
    let mut g = f.clone();
    let mut out = Reduced {
        formula: f.clone(),
        iterations: 0,
        foo_trajectory: Vec::new(),
        measures: Vec::new(),
        infeasible: false,
    };
    loop {
        let sizes = foo_sizes(&g);
        let measure = sizes.values().sum();
        if let Some(&prev) = out.measures.last() {
            if measure >= prev {
                return Err(RelationError::LemmaContractViolated(format!(
                    "FOO measure did not decrease ({prev} -> {measure})"
                ))
                .into());
            }
        }
        out.foo_trajectory.push(sizes);
        out.measures.push(measure);
        if k == 0 {
            break;
        }
        let over = nonzero_valid_in_use(&g)
            .into_iter()
            .map(|i| (i, foo_set(&g, i)))
            .find(|(_, set)| set.tuples.len() as u128 > threshold);
        let Some((rel, set)) = over else { break };
        let sunflower = find_sunflower(&set.tuples, k).ok_or_else(|| {
            RelationError::LemmaContractViolated(format!(
                "no sunflower among {} FOO tuples of {}",
                set.tuples.len(),
                set.relation
            ))
        })?;
        let core: Vec<usize> = sunflower.core_positions.iter().map(|&c| set.positions[c - 1]).collect();
        let r: Relation = g.language().get(rel).clone();
        let imp = match implement_sunflower_restriction(&r, &core) {
            Ok(imp) => imp,
            Err(RelationError::EmptyRelation) => {
                out.infeasible = true;
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let closed = g.language_mut().intern(imp.closed);
        let implication = if imp.implications.is_empty() {
            None
        } else {
            Some(g.language_mut().intern(builtin::impl2()))
        };
        let members: HashSet<&VarTuple> = sunflower.members.iter().collect();
        let old = std::mem::take(g.constraints_mut());
        let mut seen = HashSet::new();
        for c in old {
            if c.relation != rel || !members.contains(&foo_tuple(&c, &set.positions)) {
                if seen.insert(c.clone()) {
                    g.constraints_mut().push(c);
                }
                continue;
            }
            let mut replacement = vec![Constraint::new(closed, c.args.clone())];
            for &(i, j) in &imp.implications {
                let args: Vec<Term> = vec![c.args[i - 1], c.args[j - 1]];
                replacement.push(Constraint::new(implication.expect("implications exist"), args));
            }
            for c in replacement {
                if seen.insert(c.clone()) {
                    g.constraints_mut().push(c);
                }
            }
        }
        out.iterations += 1;
    }
    out.formula = g;
    Ok(out)
}
