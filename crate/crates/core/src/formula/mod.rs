//! Constraint languages, formulas and assignments.

mod io;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::relation::{transform, BoolTuple, Relation, RelationError, Role};

pub use io::{
    parse_hypergraph, parse_instance, parse_language, write_hypergraph, write_instance, write_language, Hypergraph,
    Instance, ParseError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("duplicate relation name `{0}`")]
    DuplicateRelation(String),
    #[error("constraint language is empty")]
    EmptyLanguage,
    #[error("relation `{relation}` has arity {expected} but got {got} arguments")]
    ArgumentCount {
        relation: String,
        expected: usize,
        got: usize,
    },
    #[error("variable {var} outside universe 1..={num_vars}")]
    VariableOutOfRange { var: u32, num_vars: u32 },
    #[error("assignment covers {got} variables, formula has {expected}")]
    AssignmentSize { expected: usize, got: usize },
    #[error("constraint {index} (`{relation}`) is unsatisfiable after identification")]
    UnsatisfiableConstraint { index: usize, relation: String },
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// A finite list of uniquely named relations.
///
/// Relations added by the kernelizer or by normalization are tagged
/// internal; the relations a language was created with never are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintLanguage {
    relations: Vec<Arc<Relation>>,
    internal: Vec<bool>,
}

impl ConstraintLanguage {
    pub fn new(relations: Vec<Relation>) -> Result<Self, ModelError> {
        if relations.is_empty() {
            return Err(ModelError::EmptyLanguage);
        }
        let mut lang = Self {
            relations: Vec::new(),
            internal: Vec::new(),
        };
        for r in relations {
            lang.push(r, false)?;
        }
        Ok(lang)
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn get(&self, index: usize) -> &Relation {
        &self.relations[index]
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().map(|r| r.as_ref())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name() == name)
    }

    pub fn is_internal(&self, index: usize) -> bool {
        self.internal[index]
    }

    /// Maximum arity over all relations.
    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(|r| r.arity()).max().unwrap_or(0)
    }

    pub fn push(&mut self, relation: Relation, internal: bool) -> Result<usize, ModelError> {
        if self.index_of(relation.name()).is_some() {
            return Err(ModelError::DuplicateRelation(relation.name().to_string()));
        }
        self.relations.push(Arc::new(relation));
        self.internal.push(internal);
        Ok(self.relations.len() - 1)
    }

    /// Index of a relation with the same tuples, adding `relation` as an
    /// internal relation if none exists. Clashing names get a `'` suffix.
    pub fn intern(&mut self, relation: Relation) -> usize {
        if let Some(i) = self.relations.iter().position(|r| r.same_tuples(&relation)) {
            return i;
        }
        let mut name = relation.name().to_string();
        while self.index_of(&name).is_some() {
            name.push('\'');
        }
        self.push(relation.with_name(name), true)
            .expect("name made unique above")
    }

    /// Language restricted to the first `len` relations.
    pub fn truncated(&self, len: usize) -> Self {
        Self {
            relations: self.relations[..len].to_vec(),
            internal: self.internal[..len].to_vec(),
        }
    }
}

/// A constraint argument: a 1-based variable or the constant-0 placeholder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    Zero,
}

impl Term {
    pub fn var(&self) -> Option<u32> {
        match *self {
            Term::Var(v) => Some(v),
            Term::Zero => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    /// Index into the formula's language.
    pub relation: usize,
    pub args: Vec<Term>,
}

impl Constraint {
    pub fn new(relation: usize, args: Vec<Term>) -> Self {
        Self { relation, args }
    }

    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.args.iter().filter_map(|t| t.var())
    }

    pub fn has_placeholder(&self) -> bool {
        self.args.contains(&Term::Zero)
    }

    /// Tuple code of the arguments under `values` (variable `v` at index `v - 1`).
    pub(crate) fn code_under(&self, values: &[bool]) -> u32 {
        self.args.iter().enumerate().fold(0, |acc, (i, t)| match t {
            Term::Var(v) if values[*v as usize - 1] => acc | 1 << i,
            _ => acc,
        })
    }
}

/// A conjunction of constraints over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    language: ConstraintLanguage,
    num_vars: u32,
    constraints: Vec<Constraint>,
}

impl Formula {
    pub fn new(language: ConstraintLanguage, num_vars: u32) -> Self {
        Self {
            language,
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn language(&self) -> &ConstraintLanguage {
        &self.language
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn relation_of(&self, c: &Constraint) -> &Relation {
        self.language.get(c.relation)
    }

    /// Allocates a fresh variable above the current maximum.
    pub fn fresh_var(&mut self) -> u32 {
        self.num_vars += 1;
        self.num_vars
    }

    /// Adds `name(args)`; variable 0 in `args` is the constant-0 placeholder.
    pub fn add(&mut self, name: &str, args: &[u32]) -> Result<(), ModelError> {
        let rel = self
            .language
            .index_of(name)
            .ok_or_else(|| ModelError::UnknownRelation(name.to_string()))?;
        let terms = args
            .iter()
            .map(|&v| if v == 0 { Term::Zero } else { Term::Var(v) })
            .collect();
        self.push(Constraint::new(rel, terms))
    }

    pub fn push(&mut self, c: Constraint) -> Result<(), ModelError> {
        if c.relation >= self.language.len() {
            return Err(ModelError::UnknownRelation(format!("#{}", c.relation)));
        }
        let r = self.language.get(c.relation);
        if r.arity() != c.args.len() {
            return Err(ModelError::ArgumentCount {
                relation: r.name().to_string(),
                expected: r.arity(),
                got: c.args.len(),
            });
        }
        if let Some(v) = c.vars().find(|&v| v == 0 || v > self.num_vars) {
            return Err(ModelError::VariableOutOfRange {
                var: v,
                num_vars: self.num_vars,
            });
        }
        self.constraints.push(c);
        Ok(())
    }

    /// True iff every constraint holds under `a`; placeholders read as 0.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool, ModelError> {
        if a.len() != self.num_vars as usize {
            return Err(ModelError::AssignmentSize {
                expected: self.num_vars as usize,
                got: a.len(),
            });
        }
        Ok(self.satisfied_by(&a.values))
    }

    pub(crate) fn satisfied_by(&self, values: &[bool]) -> bool {
        self.constraints
            .iter()
            .all(|c| self.language.get(c.relation).contains_code(c.code_under(values)))
    }

    /// Index of the first constraint violated under `values`.
    pub(crate) fn first_violated(&self, values: &[bool]) -> Option<usize> {
        self.constraints
            .iter()
            .position(|c| !self.language.get(c.relation).contains_code(c.code_under(values)))
    }

    /// Variables occurring in some constraint, ascending.
    pub fn occurring_vars(&self) -> BTreeSet<u32> {
        self.constraints.iter().flat_map(|c| c.vars()).collect()
    }

    pub fn has_placeholders(&self) -> bool {
        self.constraints.iter().any(|c| c.has_placeholder())
    }

    /// Replaces every occurrence of the variables in `vars` by the
    /// placeholder. The universe is unchanged.
    pub fn substitute_zero(&mut self, vars: &BTreeSet<u32>) {
        for c in &mut self.constraints {
            for t in &mut c.args {
                if let Term::Var(v) = t {
                    if vars.contains(v) {
                        *t = Term::Zero;
                    }
                }
            }
        }
    }

    /// Removes repeated constraints, keeping first occurrences.
    pub fn dedup_constraints(&mut self) {
        let mut seen = std::collections::HashSet::new();
        self.constraints.retain(|c| seen.insert(c.clone()));
    }

    /// Renumbers `keep` (ascending) to `1..=keep.len()`. Every variable in a
    /// constraint must be kept. Returns the new formula and, for each new
    /// variable, its old number.
    pub fn compact(&self, keep: &BTreeSet<u32>) -> (Formula, Vec<u32>) {
        let old: Vec<u32> = keep.iter().copied().collect();
        let map: HashMap<u32, u32> = old.iter().enumerate().map(|(i, &v)| (v, i as u32 + 1)).collect();
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint {
                relation: c.relation,
                args: c
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => Term::Var(map[v]),
                        Term::Zero => Term::Zero,
                    })
                    .collect(),
            })
            .collect();
        (
            Formula {
                language: self.language.clone(),
                num_vars: old.len() as u32,
                constraints,
            },
            old,
        )
    }

    /// Same constraints over another language; relation indices must stay
    /// valid (used to move between a language and its extensions).
    pub(crate) fn with_language(&self, language: ConstraintLanguage) -> Formula {
        debug_assert!(self
            .constraints
            .iter()
            .all(|c| c.relation < language.len()
                && language.get(c.relation).same_tuples(self.language.get(c.relation))));
        Formula {
            language,
            num_vars: self.num_vars,
            constraints: self.constraints.clone(),
        }
    }

    pub(crate) fn constraints_mut(&mut self) -> &mut Vec<Constraint> {
        &mut self.constraints
    }

    pub(crate) fn language_mut(&mut self) -> &mut ConstraintLanguage {
        &mut self.language
    }
}

/// A total assignment to variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![false; n] }
    }

    /// The assignment making exactly `true_vars` true.
    pub fn from_true_set(n: usize, true_vars: &[u32]) -> Self {
        let mut values = vec![false; n];
        for &v in true_vars {
            values[v as usize - 1] = true;
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, var: u32) -> bool {
        self.values[var as usize - 1]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn weight(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }

    pub fn true_vars(&self) -> Vec<u32> {
        (1..=self.values.len() as u32).filter(|&v| self.get(v)).collect()
    }
}

/// Rewrites every constraint with repeated variables or placeholders into a
/// constraint over pairwise-distinct variables, extending the language with
/// the identified/assigned relations. The satisfying assignments are
/// unchanged.
///
/// Constraints left with no variables are dropped when the all-zero tuple
/// satisfies them. Fails with [`ModelError::UnsatisfiableConstraint`] when a
/// constraint becomes unsatisfiable.
pub fn normalize_formula(f: &Formula) -> Result<(Formula, ConstraintLanguage), ModelError> {
    let mut out = Formula::new(f.language.clone(), f.num_vars);
    for (index, c) in f.constraints.iter().enumerate() {
        let distinct: BTreeSet<u32> = c.vars().collect();
        if distinct.len() == c.args.len() {
            out.constraints.push(c.clone());
            continue;
        }
        let r = f.relation_of(c);
        let unsat = || ModelError::UnsatisfiableConstraint {
            index,
            relation: r.name().to_string(),
        };
        if distinct.is_empty() {
            if r.contains(&BoolTuple::zeros(r.arity())) {
                continue;
            }
            return Err(unsat());
        }
        let roles: Vec<Role> = c
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Role::Var(*v as usize),
                Term::Zero => Role::Const(false),
            })
            .collect();
        let t = match transform(r, &roles) {
            Ok(t) => t,
            Err(RelationError::EmptyRelation) => return Err(unsat()),
            Err(e) => return Err(e.into()),
        };
        let rel = out.language.intern(t.relation);
        let args = t.labels.iter().map(|&v| Term::Var(v as u32)).collect();
        out.constraints.push(Constraint::new(rel, args));
    }
    let lang = out.language.clone();
    Ok((out, lang))
}

/// Replaces the constant-0 placeholder by `k + 1` fresh variables
/// `z_1..z_{k+1}`: each constraint containing a placeholder becomes `k + 1`
/// copies, copy `i` using `z_i` at every placeholder position. Under weight
/// at most `k` some `z_i` is 0, so the original constraints are enforced.
pub fn eliminate_zero_constants(f: &Formula, k: usize) -> Formula {
    if !f.has_placeholders() {
        return f.clone();
    }
    let mut out = Formula::new(f.language.clone(), f.num_vars);
    let zs: Vec<u32> = (0..=k).map(|_| out.fresh_var()).collect();
    for c in &f.constraints {
        if !c.has_placeholder() {
            out.constraints.push(c.clone());
            continue;
        }
        for &z in &zs {
            let args = c
                .args
                .iter()
                .map(|t| match t {
                    Term::Zero => Term::Var(z),
                    v => *v,
                })
                .collect();
            out.constraints.push(Constraint::new(c.relation, args));
        }
    }
    out
}
