//! Exact Min Ones solvers used as oracles and exposed by the CLI.
//!
//! [`solve_brute`] enumerates true-sets by size; [`solve_branch`] is the
//! bounded search tree over falsified constraints; [`solve_propagate`] is a
//! backtracking search with constraint propagation for instances too large
//! for the other two.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Assignment, Formula, Term};

pub const DEFAULT_BRUTE_CAP: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Sat,
    Unsat,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: Status,
    /// A minimum-weight satisfying assignment when SAT.
    pub witness: Option<Assignment>,
    pub optimum: Option<usize>,
}

impl SolveResult {
    fn sat(values: Vec<bool>) -> Self {
        let a = Assignment::new(values);
        Self {
            status: Status::Sat,
            optimum: Some(a.weight()),
            witness: Some(a),
        }
    }

    fn unsat() -> Self {
        Self {
            status: Status::Unsat,
            witness: None,
            optimum: None,
        }
    }

    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("{vars} variables exceed the brute-force cap of {cap}")]
    TooLarge { vars: u32, cap: u32 },
}

pub fn solve_brute(f: &Formula, k: usize) -> Result<SolveResult, SolveError> {
    solve_brute_capped(f, k, DEFAULT_BRUTE_CAP)
}

/// Tries every true-set of size `0..=k`, by size and then lexicographically,
/// and returns the first satisfying one.
pub fn solve_brute_capped(f: &Formula, k: usize, cap: u32) -> Result<SolveResult, SolveError> {
    let n = f.num_vars();
    if n > cap {
        return Err(SolveError::TooLarge { vars: n, cap });
    }
    let n = n as usize;
    let mut values = vec![false; n];
    for size in 0..=k.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            idx.iter().for_each(|&i| values[i] = true);
            if f.satisfied_by(&values) {
                return Ok(SolveResult::sat(values));
            }
            idx.iter().for_each(|&i| values[i] = false);
            // next combination in lexicographic order
            let Some(p) = (0..size).rev().find(|&p| idx[p] < n - size + p) else {
                break;
            };
            idx[p] += 1;
            for q in p + 1..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    Ok(SolveResult::unsat())
}

/// Bounded search tree: extend the current true-set by zeros, pick the first
/// falsified constraint and branch on its false variables in argument order.
/// Budgets `0..=k` are tried in turn, so the witness has minimum weight.
pub fn solve_branch(f: &Formula, k: usize) -> SolveResult {
    let mut values = vec![false; f.num_vars() as usize];
    for budget in 0..=k.min(f.num_vars() as usize) {
        if branch(f, &mut values, budget) {
            return SolveResult::sat(values);
        }
    }
    SolveResult::unsat()
}

fn branch(f: &Formula, values: &mut [bool], budget: usize) -> bool {
    let Some(ci) = f.first_violated(values) else {
        return true;
    };
    if budget == 0 {
        return false;
    }
    let candidates: Vec<u32> = {
        let mut seen = BTreeSet::new();
        f.constraints()[ci]
            .vars()
            .filter(|&v| !values[v as usize - 1] && seen.insert(v))
            .collect()
    };
    for v in candidates {
        values[v as usize - 1] = true;
        if branch(f, values, budget - 1) {
            return true;
        }
        values[v as usize - 1] = false;
    }
    false
}

/// Every inclusion-minimal satisfying assignment of weight at most
/// `max_weight`, sorted by weight and then by true-set.
///
/// Each such assignment is a leaf of the search tree of [`solve_branch`]:
/// following its true variables always finds a falsified constraint with
/// one of them false.
pub fn minimal_solutions(f: &Formula, max_weight: usize) -> Vec<Assignment> {
    let mut leaves: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut values = vec![false; f.num_vars() as usize];
    collect_leaves(f, &mut values, max_weight, &mut leaves);
    let mut sets: Vec<Vec<u32>> = leaves.into_iter().collect();
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut minimal: Vec<Vec<u32>> = Vec::new();
    for s in sets {
        if !minimal.iter().any(|m| m.iter().all(|v| s.binary_search(v).is_ok())) {
            minimal.push(s);
        }
    }
    let n = f.num_vars() as usize;
    minimal.iter().map(|s| Assignment::from_true_set(n, s)).collect()
}

fn collect_leaves(f: &Formula, values: &mut [bool], budget: usize, out: &mut BTreeSet<Vec<u32>>) {
    let Some(ci) = f.first_violated(values) else {
        out.insert((1..=values.len() as u32).filter(|&v| values[v as usize - 1]).collect());
        return;
    };
    if budget == 0 {
        return;
    }
    let mut seen = BTreeSet::new();
    let candidates: Vec<u32> = f.constraints()[ci]
        .vars()
        .filter(|&v| !values[v as usize - 1] && seen.insert(v))
        .collect();
    for v in candidates {
        values[v as usize - 1] = true;
        collect_leaves(f, values, budget - 1, out);
        values[v as usize - 1] = false;
    }
}

const UNSET: u8 = 2;

/// Backtracking search with generalized arc consistency on every
/// constraint, trying 0 before 1, with branch and bound on the weight.
/// Returns a minimum-weight witness of weight at most `k`.
pub fn solve_propagate(f: &Formula, k: usize) -> SolveResult {
    let n = f.num_vars() as usize;
    let mut occurs = vec![false; n];
    for v in f.occurring_vars() {
        occurs[v as usize - 1] = true;
    }
    let mut search = Propagator {
        f,
        occurs,
        bound: k,
        best: None,
        done: false,
    };
    let vals = vec![UNSET; n];
    search.run(vals);
    match search.best {
        Some(values) => SolveResult::sat(values),
        None => SolveResult::unsat(),
    }
}

struct Propagator<'a> {
    f: &'a Formula,
    occurs: Vec<bool>,
    /// Largest weight still worth finding.
    bound: usize,
    best: Option<Vec<bool>>,
    done: bool,
}

impl Propagator<'_> {
    fn run(&mut self, mut vals: Vec<u8>) {
        if self.done || !self.propagate(&mut vals) {
            return;
        }
        let weight = vals.iter().filter(|&&x| x == 1).count();
        if weight > self.bound {
            return;
        }
        let Some(v) = (0..vals.len()).find(|&i| vals[i] == UNSET && self.occurs[i]) else {
            let values: Vec<bool> = vals.iter().map(|&x| x == 1).collect();
            debug_assert!(self.f.satisfied_by(&values));
            match weight.checked_sub(1) {
                Some(b) => self.bound = b,
                None => self.done = true,
            }
            self.best = Some(values);
            return;
        };
        for value in [0u8, 1] {
            if self.done || (value == 1 && weight + 1 > self.bound) {
                return;
            }
            let mut next = vals.clone();
            next[v] = value;
            self.run(next);
        }
    }

    /// Narrows `vals` to a fixpoint; false on a wipe-out.
    fn propagate(&self, vals: &mut [u8]) -> bool {
        loop {
            let mut changed = false;
            for c in self.f.constraints() {
                let r = self.f.relation_of(c);
                let (mut and_mask, mut or_mask, mut any) = (u32::MAX, 0u32, false);
                'tuples: for &code in r.codes() {
                    for (i, t) in c.args.iter().enumerate() {
                        let bit = (code >> i & 1) as u8;
                        match *t {
                            Term::Zero if bit == 1 => continue 'tuples,
                            Term::Var(v) => {
                                let cur = vals[v as usize - 1];
                                if cur != UNSET && cur != bit {
                                    continue 'tuples;
                                }
                                if cur == UNSET
                                    && c.args[..i]
                                        .iter()
                                        .enumerate()
                                        .any(|(j, u)| *u == Term::Var(v) && (code >> j & 1) as u8 != bit)
                                {
                                    continue 'tuples;
                                }
                            }
                            _ => {}
                        }
                    }
                    any = true;
                    and_mask &= code;
                    or_mask |= code;
                }
                if !any {
                    return false;
                }
                for (i, t) in c.args.iter().enumerate() {
                    if let Term::Var(v) = *t {
                        let slot = &mut vals[v as usize - 1];
                        let forced = if and_mask >> i & 1 == 1 {
                            1
                        } else if or_mask >> i & 1 == 0 {
                            0
                        } else {
                            continue;
                        };
                        if *slot == UNSET {
                            *slot = forced;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::formula::ConstraintLanguage;

    fn triangle() -> Formula {
        let lang = ConstraintLanguage::new(vec![builtin::or2(), builtin::even3()]).unwrap();
        let mut f = Formula::new(lang, 3);
        for (a, b) in [(1, 2), (2, 3), (1, 3)] {
            f.add("OR2", &[a, b]).unwrap();
        }
        f
    }

    #[test]
    fn triangle_examples() {
        let f = triangle();
        for solve in [
            |f: &Formula, k| solve_brute(f, k).unwrap(),
            solve_branch,
            solve_propagate,
        ] {
            assert_eq!(solve(&f, 1).status, Status::Unsat);
            let r = solve(&f, 2);
            assert_eq!(r.status, Status::Sat);
            assert_eq!(r.optimum, Some(2));
            assert!(f.evaluate(r.witness.as_ref().unwrap()).unwrap());
        }
        assert_eq!(solve_brute(&f, 2).unwrap().witness.unwrap().true_vars(), vec![1, 2]);
        assert_eq!(solve_branch(&f, 3).witness.unwrap().true_vars(), vec![1, 2]);
    }

    #[test]
    fn empty_and_zero_valid() {
        let lang = ConstraintLanguage::new(vec![builtin::even3()]).unwrap();
        let empty = Formula::new(lang.clone(), 0);
        assert_eq!(solve_brute(&empty, 0).unwrap().optimum, Some(0));
        let mut f = Formula::new(lang, 3);
        f.add("EVEN3", &[1, 2, 3]).unwrap();
        assert_eq!(solve_brute(&f, 0).unwrap().optimum, Some(0));
        assert_eq!(solve_branch(&f, 0).optimum, Some(0));
        assert_eq!(solve_propagate(&f, 0).optimum, Some(0));
    }

    #[test]
    fn brute_cap() {
        let lang = ConstraintLanguage::new(vec![builtin::or2()]).unwrap();
        let f = Formula::new(lang, 25);
        assert_eq!(solve_brute(&f, 1), Err(SolveError::TooLarge { vars: 25, cap: 24 }));
    }

    #[test]
    fn placeholders_and_repeats() {
        let lang = ConstraintLanguage::new(vec![builtin::or2(), builtin::even3()]).unwrap();
        let mut f = Formula::new(lang, 2);
        f.add("OR2", &[1, 0]).unwrap();
        f.add("EVEN3", &[1, 2, 2]).unwrap();
        for r in [solve_brute(&f, 2).unwrap(), solve_branch(&f, 2), solve_propagate(&f, 2)] {
            assert_eq!(r.status, Status::Unsat);
        }
        let mut f = Formula::new(f.language().clone(), 2);
        f.add("EVEN3", &[1, 2, 0]).unwrap();
        f.add("OR2", &[2, 2]).unwrap();
        for r in [solve_brute(&f, 2).unwrap(), solve_branch(&f, 2), solve_propagate(&f, 2)] {
            assert_eq!(r.optimum, Some(2));
        }
    }

    #[test]
    fn minimal_solutions_of_triangle() {
        let sols: Vec<Vec<u32>> = minimal_solutions(&triangle(), 3).iter().map(|a| a.true_vars()).collect();
        assert_eq!(sols, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert!(minimal_solutions(&triangle(), 1).is_empty());
    }
}
