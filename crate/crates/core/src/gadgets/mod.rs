//! Lower-bound constructions for languages without a polynomial kernel:
//! gadgets forcing constants and equality, selection relations and
//! formulas, and the reduction from Exact Hitting Set.
//!
//! Gadgets are described by [`Recipe`]s over the language. A
//! [`GadgetBuilder`] instantiates recipes into one formula and shares a
//! single forced-true and a single forced-false variable among all of them.

mod constants;
mod ehs;
mod selection;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use constants::{force_constants, ConstantGadgets};
pub use ehs::{exact_hitting_set_exists, reduce_exact_hitting_set, EhsReduction};
pub use selection::{
    build_selection_formula, derive_selection_relation, selection_weight, SelectionFormula, SelectionKind,
    SelectionTemplate,
};

use crate::builtin;
use crate::formula::{Constraint, ConstraintLanguage, Formula, ModelError, Term};
use crate::relation::{Relation, RelationError};
use crate::solve::{solve_propagate, SolveResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("language is not in the no-polynomial-kernel class: {0}")]
    NotApplicable(String),
    #[error("lemma contract violated: {0}")]
    LemmaContractViolated(String),
    #[error("{n} vertices exceed 2^{m}; the direct algorithm applies instead")]
    OutOfScopeFallback { n: u32, m: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<RelationError> for GadgetError {
    fn from(e: RelationError) -> Self {
        GadgetError::LemmaContractViolated(e.to_string())
    }
}

fn violated(msg: impl Into<String>) -> GadgetError {
    GadgetError::LemmaContractViolated(msg.into())
}

/// An argument of a recipe constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    /// Interface variable.
    Param(usize),
    /// Fresh variable private to one instantiation.
    Local(usize),
    /// The shared forced-true variable.
    One,
    /// The shared forced-false variable.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecipeConstraint {
    /// Index into the language.
    pub relation: usize,
    pub slots: Vec<Slot>,
}

/// A conjunction of constraints over the language with symbolic arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recipe {
    pub params: usize,
    pub locals: usize,
    pub constraints: Vec<RecipeConstraint>,
}

impl Recipe {
    pub fn new(params: usize) -> Self {
        Self {
            params,
            locals: 0,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, relation: usize, slots: Vec<Slot>) {
        for s in &slots {
            match *s {
                Slot::Param(i) => assert!(i < self.params, "param {i} out of range"),
                Slot::Local(i) => self.locals = self.locals.max(i + 1),
                _ => {}
            }
        }
        self.constraints.push(RecipeConstraint { relation, slots });
    }

    /// Appends `other` with its params renamed by `params` and its locals
    /// shifted past the current ones.
    pub fn append(&mut self, other: &Recipe, params: &[Slot]) {
        let base = self.locals;
        for c in &other.constraints {
            let slots = c
                .slots
                .iter()
                .map(|s| match *s {
                    Slot::Param(i) => params[i],
                    Slot::Local(i) => Slot::Local(base + i),
                    s => s,
                })
                .collect();
            self.push(c.relation, slots);
        }
        self.locals = self.locals.max(base + other.locals);
    }

    pub fn uses(&self, slot: Slot) -> bool {
        self.constraints.iter().any(|c| c.slots.contains(&slot))
    }

    /// The relation on the params defined by a local-free recipe, reading
    /// `One` as 1 and `Zero` as 0.
    pub fn relation(&self, lang: &ConstraintLanguage, name: impl Into<String>) -> Result<Relation, RelationError> {
        assert_eq!(self.locals, 0, "recipe with locals has no plain relation");
        let codes = (0..1u32 << self.params).filter(|&assign| {
            self.constraints.iter().all(|c| {
                let code = c.slots.iter().enumerate().fold(0u32, |acc, (i, s)| {
                    let bit = match *s {
                        Slot::Param(p) => assign >> p & 1 == 1,
                        Slot::One => true,
                        Slot::Zero | Slot::Local(_) => false,
                    };
                    acc | (bit as u32) << i
                });
                lang.get(c.relation).contains_code(code)
            })
        });
        Relation::from_codes(name, self.params, codes)
    }

    /// Human-readable form, e.g. `EVEN3(x1, x2, one)`.
    pub fn describe(&self, lang: &ConstraintLanguage) -> String {
        let parts: Vec<String> = self
            .constraints
            .iter()
            .map(|c| {
                let args: Vec<String> = c.slots.iter().map(|s| s.to_string()).collect();
                format!("{}({})", lang.get(c.relation).name(), args.join(", "))
            })
            .collect();
        parts.join(" ∧ ")
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Param(i) => write!(f, "x{}", i + 1),
            Slot::Local(i) => write!(f, "u{}", i + 1),
            Slot::One => f.write_str("one"),
            Slot::Zero => f.write_str("zero"),
        }
    }
}

/// Whether a gadget's contract holds for every satisfying assignment or
/// only for those of weight at most `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    Unconditional,
    WeightConditional,
}

impl Guarantee {
    fn and(self, other: Guarantee) -> Guarantee {
        if self == Guarantee::Unconditional && other == Guarantee::Unconditional {
            Guarantee::Unconditional
        } else {
            Guarantee::WeightConditional
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    One,
    Zero,
    Eq,
}

/// A standalone, verified instance of one constant or equality gadget.
#[derive(Debug, Clone, Serialize)]
pub struct GadgetFragment {
    pub kind: GadgetKind,
    #[serde(skip)]
    pub formula: Formula,
    pub constraints: Vec<String>,
    pub interface: Vec<u32>,
    pub internal: Vec<u32>,
    /// Internal variables that are 1 in a minimum-weight solution.
    pub weight_overhead: usize,
    pub guarantee: Guarantee,
}

/// Instantiates recipes into a single formula.
pub struct GadgetBuilder<'g> {
    gadgets: &'g ConstantGadgets,
    formula: Formula,
    one: Option<u32>,
    zero: Option<u32>,
}

impl<'g> GadgetBuilder<'g> {
    pub fn new(gadgets: &'g ConstantGadgets) -> Self {
        Self {
            formula: Formula::new(gadgets.language().clone(), 0),
            gadgets,
            one: None,
            zero: None,
        }
    }

    pub fn fresh(&mut self) -> u32 {
        self.formula.fresh_var()
    }

    /// The shared forced-true variable, created on first use.
    pub fn one_var(&mut self) -> u32 {
        if let Some(v) = self.one {
            return v;
        }
        let v = self.fresh();
        self.one = Some(v);
        let recipe = self.gadgets.one.clone();
        self.apply(&recipe, &[v]);
        v
    }

    /// The shared forced-false variable, created on first use.
    pub fn zero_var(&mut self) -> u32 {
        if let Some(v) = self.zero {
            return v;
        }
        let v = self.fresh();
        self.zero = Some(v);
        let recipe = self.gadgets.zero.clone();
        self.apply(&recipe, &[v]);
        v
    }

    /// Number of shared constants forced true (0 or 1).
    pub fn constant_overhead(&self) -> usize {
        usize::from(self.one.is_some())
    }

    pub fn apply(&mut self, recipe: &Recipe, params: &[u32]) {
        assert_eq!(params.len(), recipe.params);
        let locals: Vec<u32> = (0..recipe.locals).map(|_| self.fresh()).collect();
        for c in &recipe.constraints {
            let args: Vec<Term> = c
                .slots
                .iter()
                .map(|s| {
                    Term::Var(match *s {
                        Slot::Param(i) => params[i],
                        Slot::Local(i) => locals[i],
                        Slot::One => self.one_var(),
                        Slot::Zero => self.zero_var(),
                    })
                })
                .collect();
            self.formula
                .push(Constraint::new(c.relation, args))
                .expect("recipe constraints match the language");
        }
    }

    pub fn force_one(&mut self, x: u32) {
        let r = self.gadgets.one.clone();
        self.apply(&r, &[x]);
    }

    pub fn force_zero(&mut self, x: u32) {
        let r = self.gadgets.zero.clone();
        self.apply(&r, &[x]);
    }

    pub fn equal(&mut self, x: u32, y: u32) {
        let r = self.gadgets.eq.clone();
        self.apply(&r, &[x, y]);
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn into_formula(self) -> Formula {
        self.formula
    }
}

/// Solves `f` with the variables in `ones` forced to 1 and those in
/// `zeros` replaced by the constant 0, within weight `bound`.
pub(crate) fn solve_pinned(f: &Formula, ones: &[u32], zeros: &[u32], bound: usize) -> SolveResult {
    let mut lang = f.language().clone();
    let one = lang.intern(builtin::one());
    let mut g = f.with_language(lang);
    g.substitute_zero(&zeros.iter().copied().collect());
    for &v in ones {
        g.push(Constraint::new(one, vec![Term::Var(v)]))
            .expect("pinned variable in range");
    }
    solve_propagate(&g, bound)
}
