use serde::Serialize;

use super::closure::{check_property, is_mergeable, Property};
use super::operators::{sunflower_restriction, zero_closure};
use super::{full_mask, mask_positions, Relation, RelationError};

/// One conjunct of a [`ClauseImpl`], over 1-based relation positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClauseAtom {
    /// `¬x_i ∨ ¬x_j ∨ ...` over the listed positions.
    NegativeClause(Vec<usize>),
    Implication { from: usize, to: usize },
    Assignment { pos: usize, value: bool },
}

impl ClauseAtom {
    fn holds(&self, code: u32) -> bool {
        let bit = |p: usize| code >> (p - 1) & 1 == 1;
        match self {
            ClauseAtom::NegativeClause(ps) => !ps.iter().all(|&p| bit(p)),
            ClauseAtom::Implication { from, to } => !bit(*from) || bit(*to),
            ClauseAtom::Assignment { pos, value } => bit(*pos) == *value,
        }
    }
}

/// A conjunction of atoms whose satisfying assignments are exactly the
/// tuples of a target relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseImpl {
    pub arity: usize,
    pub atoms: Vec<ClauseAtom>,
}

impl ClauseImpl {
    pub fn holds(&self, code: u32) -> bool {
        self.atoms.iter().all(|a| a.holds(code))
    }

    /// True iff the conjunction has exactly the tuples of `r`.
    pub fn implements(&self, r: &Relation) -> bool {
        self.arity == r.arity() && (0..1u32 << self.arity).all(|c| self.holds(c) == r.contains_code(c))
    }
}

/// Implements a zero-valid relation by all valid implications plus all
/// minimal valid negative clauses, then checks the conjunction is exact.
///
/// Fails with [`RelationError::NotIhsbMinus`] when the check fails, which
/// happens exactly when the relation is not IHSB-.
pub fn implement_zero_valid_ihsb(r: &Relation) -> Result<ClauseImpl, RelationError> {
    if !check_property(r, Property::ZeroValid) {
        return Err(RelationError::NotZeroValid(r.name().to_string()));
    }
    let n = r.arity();
    let codes = r.codes();
    let valid_clause = |s: u32| s != 0 && codes.iter().all(|&c| c & s != s);

    let mut clauses: Vec<Vec<usize>> = (1..=full_mask(n))
        .filter(|&s| valid_clause(s))
        .filter(|&s| {
            let mut bits = s;
            while bits != 0 {
                let low = bits & bits.wrapping_neg();
                if valid_clause(s & !low) {
                    return false;
                }
                bits &= !low;
            }
            true
        })
        .map(|s| mask_positions(s, n))
        .collect();
    clauses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let mut atoms: Vec<ClauseAtom> = clauses.into_iter().map(ClauseAtom::NegativeClause).collect();
    atoms.extend(valid_implications(r, full_mask(n)).into_iter().map(|(from, to)| ClauseAtom::Implication { from, to }));

    let imp = ClauseImpl { arity: n, atoms };
    if !imp.implements(r) {
        return Err(RelationError::NotIhsbMinus(r.name().to_string()));
    }
    Ok(imp)
}

/// All implications `i → j` (`i ≠ j`, both inside `mask`) satisfied by
/// every tuple of `r`, ordered by `(i, j)`.
fn valid_implications(r: &Relation, mask: u32) -> Vec<(usize, usize)> {
    let positions = mask_positions(mask, r.arity());
    let mut out = Vec::new();
    for &i in &positions {
        for &j in &positions {
            if i != j
                && r
                    .codes()
                    .iter()
                    .all(|&c| c >> (i - 1) & 1 == 0 || c >> (j - 1) & 1 == 1)
            {
                out.push((i, j));
            }
        }
    }
    out
}

/// Implementation of a sunflower restriction by its zero-closure on the
/// non-core positions plus implications between non-core positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SunflowerImpl {
    /// The sunflower restriction being implemented.
    pub restricted: Relation,
    /// Zero-closure of `restricted` on every non-core position.
    pub closed: Relation,
    pub implications: Vec<(usize, usize)>,
}

/// Builds and checks the implementation of the sunflower restriction of a
/// mergeable relation with the given core.
///
/// Errors with [`RelationError::EmptyRelation`] if the restriction has no
/// tuples, and with [`RelationError::LemmaContractViolated`] if the
/// conjunction is not exact or the closed relation is not mergeable (both
/// only possible for non-mergeable input).
pub fn implement_sunflower_restriction(r: &Relation, core: &[usize]) -> Result<SunflowerImpl, RelationError> {
    debug_assert!(is_mergeable(r).0, "implement_sunflower_restriction on non-mergeable {}", r.name());
    let core_mask = r.check_positions(core)?;
    let petal_mask = full_mask(r.arity()) & !core_mask;
    let restricted = sunflower_restriction(r, core)?;
    let closed = zero_closure(&restricted, &mask_positions(petal_mask, r.arity()))?;
    let implications = valid_implications(&restricted, petal_mask);

    let exact = (0..1u32 << r.arity()).all(|c| {
        let conj = closed.contains_code(c)
            && implications
                .iter()
                .all(|&(i, j)| c >> (i - 1) & 1 == 0 || c >> (j - 1) & 1 == 1);
        conj == restricted.contains_code(c)
    });
    if !exact {
        return Err(RelationError::LemmaContractViolated(format!(
            "zero-closure plus implications does not implement {}",
            restricted.name()
        )));
    }
    if !is_mergeable(&closed).0 {
        return Err(RelationError::LemmaContractViolated(format!(
            "{} is not mergeable",
            closed.name()
        )));
    }
    Ok(SunflowerImpl {
        restricted,
        closed,
        implications,
    })
}
