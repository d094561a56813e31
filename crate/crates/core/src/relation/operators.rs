use super::{full_mask, mask_positions, Relation, RelationError};

/// Positions `i` such that setting position `i` to 0 in any tuple of `r`
/// stays inside `r`.
pub fn zero_closed_positions(r: &Relation) -> Vec<usize> {
    mask_positions(zero_closed_mask(r), r.arity())
}

pub(crate) fn zero_closed_mask(r: &Relation) -> u32 {
    (0..r.arity())
        .filter(|&i| r.codes().iter().all(|&c| r.contains_code(c & !(1 << i))))
        .fold(0, |m, i| m | 1 << i)
}

/// Smallest superset of `r` that is zero-closed on every position in
/// `positions`.
pub fn zero_closure(r: &Relation, positions: &[usize]) -> Result<Relation, RelationError> {
    let mask = r.check_positions(positions)?;
    if mask == 0 {
        return Ok(r.clone());
    }
    Relation::from_codes(
        format!("{}|zc{}", r.name(), fmt_positions(positions)),
        r.arity(),
        zero_closure_codes(r, mask),
    )
}

/// Every code reachable from a tuple of `r` by clearing bits inside `mask`.
fn zero_closure_codes(r: &Relation, mask: u32) -> Vec<u32> {
    let mut seen = vec![false; 1usize << r.arity()];
    let mut stack: Vec<u32> = r.codes().to_vec();
    let mut out = Vec::new();
    while let Some(c) = stack.pop() {
        if std::mem::replace(&mut seen[c as usize], true) {
            continue;
        }
        out.push(c);
        let mut bits = c & mask;
        while bits != 0 {
            let low = bits & bits.wrapping_neg();
            stack.push(c & !low);
            bits &= !low;
        }
    }
    out
}

/// The non-zero-closed core of a relation: zero-closed positions are forced
/// to 0 and projected away.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonzeroCore {
    /// `None` when every position is zero-closed (the 0-ary "true" relation).
    pub relation: Option<Relation>,
    /// Original 1-based position of each core position, ascending.
    pub positions: Vec<usize>,
}

pub fn nonzero_core(r: &Relation) -> NonzeroCore {
    let zc = zero_closed_mask(r);
    let positions = mask_positions(!zc & full_mask(r.arity()), r.arity());
    if positions.is_empty() {
        return NonzeroCore {
            relation: None,
            positions,
        };
    }
    let codes = r
        .codes()
        .iter()
        .filter(|&&c| c & zc == 0)
        .map(|&c| project(c, &positions));
    // Zero-closed positions can all be cleared at once, so the set is never empty.
    let relation = Relation::from_codes(format!("{}|nzc", r.name()), positions.len(), codes)
        .expect("non-zero-closed core of a non-empty relation is non-empty");
    NonzeroCore {
        relation: Some(relation),
        positions,
    }
}

/// Tuples of `r` whose restriction to `core` extends by zeros to a tuple of
/// `r`.
pub fn sunflower_restriction(r: &Relation, core: &[usize]) -> Result<Relation, RelationError> {
    let mask = r.check_positions(core)?;
    let codes = r.codes().iter().copied().filter(|&c| r.contains_code(c & mask));
    Relation::from_codes(
        format!("{}|core{}", r.name(), fmt_positions(core)),
        r.arity(),
        codes,
    )
}

/// The `|core|`-ary relation of core values that extend by zeros to a tuple
/// of `r`.
pub fn core_relation(r: &Relation, core: &[usize]) -> Result<Relation, RelationError> {
    let mask = r.check_positions(core)?;
    let positions = mask_positions(mask, r.arity());
    if positions.is_empty() {
        return Err(RelationError::ArityOutOfRange { arity: 0, max: r.arity() });
    }
    let codes = r
        .codes()
        .iter()
        .filter(|&&c| c & !mask == 0)
        .map(|&c| project(c, &positions));
    Relation::from_codes(
        format!("{}|corerel{}", r.name(), fmt_positions(&positions)),
        positions.len(),
        codes,
    )
}

/// How one position of a relation is treated by [`transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Positions sharing a label are identified into one variable.
    Var(usize),
    /// The position is assigned a constant.
    Const(bool),
}

/// Result of [`transform`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transformed {
    pub relation: Relation,
    /// Label of each result position, ordered by least original position.
    pub labels: Vec<usize>,
}

/// Identifies and assigns positions of `r` as described by `roles` (one
/// entry per position).
pub fn transform(r: &Relation, roles: &[Role]) -> Result<Transformed, RelationError> {
    if roles.len() != r.arity() {
        return Err(RelationError::ArityMismatch {
            left: r.arity(),
            right: roles.len(),
        });
    }
    let mut labels: Vec<usize> = Vec::new();
    let mut class_of = Vec::with_capacity(roles.len());
    let mut base = 0u32;
    for (i, role) in roles.iter().enumerate() {
        match *role {
            Role::Var(l) => {
                let k = match labels.iter().position(|&x| x == l) {
                    Some(k) => k,
                    None => {
                        labels.push(l);
                        labels.len() - 1
                    }
                };
                class_of.push(Some(k));
            }
            Role::Const(v) => {
                if v {
                    base |= 1 << i;
                }
                class_of.push(None);
            }
        }
    }
    if labels.is_empty() {
        return Err(RelationError::InvalidTransform(
            "every position is assigned; nothing remains".into(),
        ));
    }
    let classes = labels.len();
    let codes = (0..1u32 << classes).filter(|&assign| {
        let full = class_of.iter().enumerate().fold(base, |acc, (i, k)| match k {
            Some(k) if assign >> k & 1 == 1 => acc | 1 << i,
            _ => acc,
        });
        r.contains_code(full)
    });
    let pattern: String = roles
        .iter()
        .map(|role| match *role {
            Role::Const(false) => '0',
            Role::Const(true) => '1',
            Role::Var(l) => {
                let k = labels.iter().position(|&x| x == l).unwrap();
                char::from_digit(10 + k as u32 % 26, 36).unwrap()
            }
        })
        .collect();
    let relation = Relation::from_codes(format!("{}[{}]", r.name(), pattern), classes, codes)?;
    Ok(Transformed { relation, labels })
}

/// Packs the bits of `code` at `positions` into a dense code.
pub(crate) fn project(code: u32, positions: &[usize]) -> u32 {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &p)| acc | ((code >> (p - 1)) & 1) << k)
}

pub(crate) fn fmt_positions(positions: &[usize]) -> String {
    let mut sorted = positions.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let parts: Vec<String> = sorted.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}
