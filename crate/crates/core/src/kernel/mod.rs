//! Polynomial kernelization for mergeable languages.
//!
//! The input formula `F` is only ever changed by substituting the constant 0
//! for variables. Every decision is made on an auxiliary formula `F'` over
//! an extended language that agrees with `F` on all assignments of weight at
//! most `k`; the same substitutions are applied to both.

mod reduce;
mod sunflower;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

pub use reduce::{foo_set, reduce_formula, FooSet, Reduced};
pub use sunflower::{find_sunflower, sunflower_threshold, Sunflower, VarTuple};

use crate::builtin;
use crate::formula::{eliminate_zero_constants, normalize_formula, Constraint, Formula, ModelError, Term};
use crate::relation::{implement_zero_valid_ihsb, zero_closed_positions, ClauseAtom, Relation, RelationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("relation `{0}` is not mergeable")]
    NotMergeableLanguage(String),
    #[error("kernel has {vars} variables, above the bound {bound}")]
    BoundViolated { vars: usize, bound: u128 },
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelOutcome {
    /// The general pipeline ran to the end.
    Reduced,
    /// The input was found unsatisfiable within weight `k`; the kernel is a
    /// fixed unsatisfiable instance.
    TrivialNo,
    /// `k = 0` and the all-zero assignment satisfies the input.
    TrivialYes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub outcome: KernelOutcome,
    pub k: usize,
    pub d: usize,
    pub input_vars: u32,
    pub input_constraints: usize,
    pub iterations: usize,
    pub foo_trajectory: Vec<BTreeMap<String, usize>>,
    pub measures: Vec<usize>,
    /// Variables at non-zero-closed positions of non-zero-valid constraints.
    pub x_size: usize,
    pub implication_nodes: usize,
    pub implication_edges: usize,
    /// Variables set to 0 because they only occur at zero-closed positions.
    pub zero_closed_eliminated: usize,
    /// Variables of `X` that imply at least `k` others.
    pub high_degree_eliminated: usize,
    /// Variables neither in `X` nor implied by it.
    pub unreachable_eliminated: usize,
    pub final_vars: usize,
    pub final_constraints: usize,
    /// Distinct non-zero-valid relations of the final auxiliary formula.
    pub nonzero_valid_relations: usize,
    pub bound: u128,
}

#[derive(Debug, Clone)]
pub struct Kernel {
    /// Over the input language.
    pub formula: Formula,
    pub k: usize,
    /// For each kernel variable, the input variable it stands for, or
    /// `None` for the fresh variables replacing the constant 0.
    pub origin: Vec<Option<u32>>,
    pub report: KernelReport,
}

/// `n·d·(d!)^2·k^(d+1) + n·d·(d!)^2·k^d + k + 1`, saturating.
pub fn kernel_bound(nonzero_valid: usize, d: usize, k: usize) -> u128 {
    let fact: u128 = (1..=d as u128).product();
    let base = (nonzero_valid as u128)
        .saturating_mul(d as u128)
        .saturating_mul(fact.saturating_mul(fact));
    let kd = (k as u128).saturating_pow(d as u32);
    base.saturating_mul(kd.saturating_mul(k as u128))
        .saturating_add(base.saturating_mul(kd))
        .saturating_add(k as u128 + 1)
}

/// Kernelizes `(f, k)`. The result has a satisfying assignment of weight at
/// most `k` iff `f` does, and at most [`kernel_bound`] variables.
///
/// Fails with [`KernelError::NotMergeableLanguage`] unless every relation of
/// the language is mergeable.
pub fn kernelize(f: &Formula, k: usize) -> Result<Kernel, KernelError> {
    if let Some(r) = f.language().relations().find(|r| !crate::relation::is_mergeable(r).0) {
        return Err(KernelError::NotMergeableLanguage(r.name().to_string()));
    }
    let d = f.language().max_arity();
    let mut report = KernelReport {
        outcome: KernelOutcome::Reduced,
        k,
        d,
        input_vars: f.num_vars(),
        input_constraints: f.constraints().len(),
        iterations: 0,
        foo_trajectory: Vec::new(),
        measures: Vec::new(),
        x_size: 0,
        implication_nodes: 0,
        implication_edges: 0,
        zero_closed_eliminated: 0,
        high_degree_eliminated: 0,
        unreachable_eliminated: 0,
        final_vars: 0,
        final_constraints: 0,
        nonzero_valid_relations: 0,
        bound: 0,
    };

    if k == 0 {
        let zeros = vec![false; f.num_vars() as usize];
        return match f.first_violated(&zeros) {
            None => {
                report.outcome = KernelOutcome::TrivialYes;
                finish(Formula::new(f.language().clone(), 0), Vec::new(), k, report)
            }
            Some(_) => trivial_no(f, k, report),
        };
    }

    // (1) normalize, (2) reduce
    let normalized = match normalize_formula(f) {
        Ok((g, _)) => g,
        Err(ModelError::UnsatisfiableConstraint { .. }) => return trivial_no(f, k, report),
        Err(e) => return Err(e.into()),
    };
    let reduced = reduce_formula(&normalized, k)?;
    report.iterations = reduced.iterations;
    report.foo_trajectory = reduced.foo_trajectory;
    report.measures = reduced.measures;
    if reduced.infeasible {
        return trivial_no(f, k, report);
    }
    let mut aux = reduced.formula;
    let mut orig = f.clone();

    // (3) zero-valid constraints become negative clauses and implications
    replace_zero_valid(&mut aux)?;

    // (4) variables only at zero-closed positions
    let universe: BTreeSet<u32> = (1..=f.num_vars()).collect();
    let mut at_nzc: BTreeSet<u32> = BTreeSet::new();
    for c in aux.constraints() {
        let zc = zero_closed_positions(aux.relation_of(c));
        for (i, t) in c.args.iter().enumerate() {
            if let Term::Var(v) = t {
                if zc.binary_search(&(i + 1)).is_err() {
                    at_nzc.insert(*v);
                }
            }
        }
    }
    let dead: BTreeSet<u32> = aux.occurring_vars().difference(&at_nzc).copied().collect();
    report.zero_closed_eliminated = dead.len();
    aux.substitute_zero(&dead);
    orig.substitute_zero(&dead);

    // (5) X and high-degree elimination
    let x = x_set(&aux);
    report.x_size = x.len();
    let graph = implication_graph(&aux);
    report.implication_nodes = graph.keys().chain(graph.values().flatten()).collect::<BTreeSet<_>>().len();
    report.implication_edges = graph.values().map(|s| s.len()).sum();
    let heavy: BTreeSet<u32> = x
        .iter()
        .copied()
        .filter(|&v| reachable(&graph, &[v]).len() > k)
        .collect();
    report.high_degree_eliminated = heavy.len();
    aux.substitute_zero(&heavy);
    orig.substitute_zero(&heavy);

    // (6) keep X and what it implies
    let survivors: Vec<u32> = x.difference(&heavy).copied().collect();
    let keep = reachable(&implication_graph(&aux), &survivors);
    let rest: BTreeSet<u32> = universe.difference(&keep).copied().collect();
    report.unreachable_eliminated = rest.iter().filter(|v| !dead.contains(v) && !heavy.contains(v)).count();
    aux.substitute_zero(&rest);
    orig.substitute_zero(&rest);
    report.nonzero_valid_relations = {
        let mut rels: Vec<usize> = aux
            .constraints()
            .iter()
            .map(|c| c.relation)
            .filter(|&r| !aux.language().get(r).contains_code(0))
            .collect();
        rels.sort_unstable();
        rels.dedup();
        rels.len()
    };

    // (7) constant constraints, then the z-variables
    orig.dedup_constraints();
    let mut violated = false;
    orig.constraints_mut().retain(|c| {
        if c.vars().next().is_some() {
            return true;
        }
        let r = f.language().get(c.relation);
        violated |= !r.contains_code(0);
        false
    });
    if violated {
        return trivial_no(f, k, report);
    }
    let n_before = orig.num_vars();
    let with_z = eliminate_zero_constants(&orig, k);
    let occurring = with_z.occurring_vars();
    let (kernel, old) = with_z.compact(&occurring);
    let origin = old.iter().map(|&v| (v <= n_before).then_some(v)).collect();
    finish(kernel, origin, k, report)
}

fn finish(formula: Formula, origin: Vec<Option<u32>>, k: usize, mut report: KernelReport) -> Result<Kernel, KernelError> {
    report.final_vars = formula.num_vars() as usize;
    report.final_constraints = formula.constraints().len();
    report.bound = kernel_bound(report.nonzero_valid_relations.max(1), report.d, k);
    if report.final_vars as u128 > report.bound {
        return Err(KernelError::BoundViolated {
            vars: report.final_vars,
            bound: report.bound,
        });
    }
    Ok(Kernel {
        formula,
        k,
        origin,
        report,
    })
}

/// `k + 1` constraints `R(x_i, ..., x_i)` over distinct variables, for a
/// relation `R` of the input language that is not zero-valid: each forces
/// its variable to 1.
fn trivial_no(f: &Formula, k: usize, mut report: KernelReport) -> Result<Kernel, KernelError> {
    report.outcome = KernelOutcome::TrivialNo;
    report.nonzero_valid_relations = 1;
    let lang = f.language();
    let rel = (0..lang.len())
        .find(|&i| !lang.get(i).contains_code(0))
        .expect("an unsatisfiable input uses a relation that is not zero-valid");
    let t = lang.get(rel).arity();
    let mut g = Formula::new(lang.clone(), 0);
    for _ in 0..=k {
        let x = Term::Var(g.fresh_var());
        g.push(Constraint::new(rel, vec![x; t]))?;
    }
    let n = g.num_vars() as usize;
    finish(g, vec![None; n], k, report)
}

fn replace_zero_valid(aux: &mut Formula) -> Result<(), KernelError> {
    let old = std::mem::take(aux.constraints_mut());
    let mut out = Vec::with_capacity(old.len());
    for c in old {
        let r = aux.language().get(c.relation).clone();
        if !r.contains_code(0) {
            out.push(c);
            continue;
        }
        let imp = implement_zero_valid_ihsb(&r)?;
        for atom in imp.atoms {
            let (rel, positions) = match atom {
                ClauseAtom::NegativeClause(ps) => {
                    let s = ps.len();
                    let nand = Relation::from_predicate(format!("NAND{s}"), s, |t| t.count_ones() < s)?;
                    (nand, ps)
                }
                ClauseAtom::Implication { from, to } => (builtin::impl2(), vec![from, to]),
                ClauseAtom::Assignment { pos, value } => {
                    let unit = if value { builtin::one() } else { builtin::zero() };
                    (unit, vec![pos])
                }
            };
            let idx = aux.language_mut().intern(rel);
            out.push(Constraint::new(idx, positions.iter().map(|&p| c.args[p - 1]).collect()));
        }
    }
    *aux.constraints_mut() = out;
    aux.dedup_constraints();
    Ok(())
}

fn x_set(aux: &Formula) -> BTreeSet<u32> {
    let mut x = BTreeSet::new();
    for c in aux.constraints() {
        let r = aux.relation_of(c);
        if r.contains_code(0) {
            continue;
        }
        let zc = zero_closed_positions(r);
        for (i, t) in c.args.iter().enumerate() {
            if let (Term::Var(v), Err(_)) = (t, zc.binary_search(&(i + 1))) {
                x.insert(*v);
            }
        }
    }
    x
}

/// Edges `u -> v` of the constraints whose relation is `x -> y`.
fn implication_graph(aux: &Formula) -> BTreeMap<u32, BTreeSet<u32>> {
    let imp = builtin::impl2();
    let mut g: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for c in aux.constraints() {
        if let ([Term::Var(u), Term::Var(v)], true) = (c.args.as_slice(), aux.relation_of(c).same_tuples(&imp)) {
            if u != v {
                g.entry(*u).or_default().insert(*v);
            }
        }
    }
    g
}

/// Sources together with everything reachable from them.
fn reachable(g: &BTreeMap<u32, BTreeSet<u32>>, sources: &[u32]) -> BTreeSet<u32> {
    let mut seen: BTreeSet<u32> = sources.iter().copied().collect();
    let mut stack: Vec<u32> = sources.to_vec();
    while let Some(u) = stack.pop() {
        for &v in g.get(&u).into_iter().flatten() {
            if seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen
}
