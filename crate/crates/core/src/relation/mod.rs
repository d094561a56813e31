//! Boolean relations in truth-table form and the algebra used by the
//! classifier, the kernelizer and the gadget constructions.
//!
//! A [`Relation`] is an immutable, non-empty set of [`BoolTuple`]s of one
//! arity. It keeps both the sorted tuple list and a `2^arity` membership
//! table, so every closure test here is a plain exhaustive scan.

mod closure;
mod implement;
mod operators;
mod tuple;

use std::fmt;

use thiserror::Error;

pub use closure::{check_property, is_mergeable, Property, PropertyRecord, WitnessQuad};
pub use implement::{
    implement_sunflower_restriction, implement_zero_valid_ihsb, ClauseAtom, ClauseImpl, SunflowerImpl,
};
pub use operators::{
    core_relation, nonzero_core, sunflower_restriction, transform, zero_closed_positions, zero_closure,
    NonzeroCore, Role, Transformed,
};
pub use tuple::{max_arity, tuple_ops, BoolTuple, DEFAULT_MAX_ARITY, HARD_MAX_ARITY};

pub(crate) use tuple::full_mask;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("arity {arity} outside the supported range 1..={max}")]
    ArityOutOfRange { arity: usize, max: usize },
    #[error("relation has no tuples")]
    EmptyRelation,
    #[error("invalid tuple `{0}`")]
    InvalidTuple(String),
    #[error("position {pos} out of range for arity {arity}")]
    PositionOutOfRange { pos: usize, arity: usize },
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("relation `{0}` is not zero-valid")]
    NotZeroValid(String),
    #[error("relation `{0}` is not IHSB-")]
    NotIhsbMinus(String),
    #[error("lemma contract violated: {0}")]
    LemmaContractViolated(String),
}

/// A finite, non-empty Boolean relation.
#[derive(Clone)]
pub struct Relation {
    name: String,
    arity: usize,
    tuples: Vec<u32>,
    table: Vec<u64>,
}

impl Relation {
    pub fn new<I>(name: impl Into<String>, arity: usize, tuples: I) -> Result<Self, RelationError>
    where
        I: IntoIterator<Item = BoolTuple>,
    {
        tuple::check_len(arity)?;
        let mut codes = Vec::new();
        for t in tuples {
            if t.len() != arity {
                return Err(RelationError::ArityMismatch {
                    left: arity,
                    right: t.len(),
                });
            }
            codes.push(t.code());
        }
        Self::from_codes(name, arity, codes)
    }

    /// Builds a relation from tuple codes (position `p` in bit `p - 1`).
    /// Duplicates collapse.
    pub fn from_codes<I>(name: impl Into<String>, arity: usize, codes: I) -> Result<Self, RelationError>
    where
        I: IntoIterator<Item = u32>,
    {
        tuple::check_len(arity)?;
        let mask = full_mask(arity);
        let mut table = vec![0u64; (1usize << arity).div_ceil(64)];
        let mut tuples = Vec::new();
        for code in codes {
            if code & !mask != 0 {
                return Err(RelationError::InvalidTuple(format!("{code:#b}")));
            }
            let (w, b) = (code as usize / 64, code as usize % 64);
            if table[w] >> b & 1 == 0 {
                table[w] |= 1 << b;
                tuples.push(code);
            }
        }
        if tuples.is_empty() {
            return Err(RelationError::EmptyRelation);
        }
        tuples.sort_unstable();
        Ok(Self {
            name: name.into(),
            arity,
            tuples,
            table,
        })
    }

    /// Parses bitstrings such as `["01", "10", "11"]`.
    pub fn from_bitstrings<S: AsRef<str>>(name: impl Into<String>, rows: &[S]) -> Result<Self, RelationError> {
        let tuples = rows
            .iter()
            .map(|s| s.as_ref().parse::<BoolTuple>())
            .collect::<Result<Vec<_>, _>>()?;
        let arity = tuples.first().map(|t| t.len()).ok_or(RelationError::EmptyRelation)?;
        Self::new(name, arity, tuples)
    }

    /// All tuples of the given arity accepted by `pred`.
    pub fn from_predicate(
        name: impl Into<String>,
        arity: usize,
        pred: impl Fn(&BoolTuple) -> bool,
    ) -> Result<Self, RelationError> {
        tuple::check_len(arity)?;
        let codes = (0..1u32 << arity).filter(|&c| pred(&BoolTuple::from_code(c, arity)));
        Self::from_codes(name, arity, codes)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Tuple codes in ascending (colexicographic) order.
    pub fn codes(&self) -> &[u32] {
        &self.tuples
    }

    pub fn tuples(&self) -> impl Iterator<Item = BoolTuple> + '_ {
        self.tuples.iter().map(move |&c| BoolTuple::from_code(c, self.arity))
    }

    /// Tuples as bitstrings in plain lexicographic order (the file order).
    pub fn sorted_bitstrings(&self) -> Vec<String> {
        let mut rows: Vec<String> = self.tuples().map(|t| t.to_string()).collect();
        rows.sort();
        rows
    }

    pub fn contains(&self, t: &BoolTuple) -> bool {
        t.len() == self.arity && self.contains_code(t.code())
    }

    pub fn contains_code(&self, code: u32) -> bool {
        let i = code as usize;
        match self.table.get(i / 64) {
            Some(w) => w >> (i % 64) & 1 == 1,
            None => false,
        }
    }

    /// Same arity and tuple set, names ignored.
    pub fn same_tuples(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.tuples == other.tuples
    }

    pub fn is_subset_of(&self, other: &Relation) -> bool {
        self.arity == other.arity && self.tuples.iter().all(|&c| other.contains_code(c))
    }

    pub(crate) fn check_positions(&self, positions: &[usize]) -> Result<u32, RelationError> {
        let mut mask = 0u32;
        for &p in positions {
            if p == 0 || p > self.arity {
                return Err(RelationError::PositionOutOfRange { pos: p, arity: self.arity });
            }
            mask |= 1 << (p - 1);
        }
        Ok(mask)
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.same_tuples(other)
    }
}

impl Eq for Relation {}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} {{", self.name, self.arity)?;
        for (i, t) in self.tuples().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}

/// Sorted 1-based positions set in `mask`.
pub(crate) fn mask_positions(mask: u32, arity: usize) -> Vec<usize> {
    (1..=arity).filter(|&p| mask >> (p - 1) & 1 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_collapse_and_order_is_colex() {
        let r = Relation::from_bitstrings("R", &["11", "01", "10", "01"]).unwrap();
        assert_eq!(r.len(), 3);
        let order: Vec<String> = r.tuples().map(|t| t.to_string()).collect();
        assert_eq!(order, vec!["10", "01", "11"]);
        assert_eq!(r.sorted_bitstrings(), vec!["01", "10", "11"]);
    }

    #[test]
    fn empty_and_mixed_arity_rejected() {
        assert_eq!(
            Relation::from_codes("E", 2, std::iter::empty()).unwrap_err(),
            RelationError::EmptyRelation
        );
        assert!(matches!(
            Relation::from_bitstrings("M", &["01", "101"]),
            Err(RelationError::ArityMismatch { .. })
        ));
        assert!(matches!(
            Relation::from_codes("Z", 0, [0]),
            Err(RelationError::ArityOutOfRange { .. })
        ));
        assert!(matches!(
            Relation::from_codes("Big", DEFAULT_MAX_ARITY + 1, [0]),
            Err(RelationError::ArityOutOfRange { .. })
        ));
    }

    #[test]
    fn membership() {
        let r = Relation::from_predicate("OR2", 2, |t| t.count_ones() > 0).unwrap();
        assert!(r.contains(&"01".parse().unwrap()));
        assert!(!r.contains(&"00".parse().unwrap()));
        assert!(!r.contains(&"011".parse().unwrap()));
    }
}
