use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use super::RelationError;

/// Arity limit used when `MINONES_MAX_ARITY` is not set.
pub const DEFAULT_MAX_ARITY: usize = 10;

/// Membership tables are `2^arity` bits, so the override is clamped here.
pub const HARD_MAX_ARITY: usize = 20;

/// Maximum relation arity accepted by constructors.
///
/// Read once from the `MINONES_MAX_ARITY` environment variable, falling back
/// to [`DEFAULT_MAX_ARITY`]. Values above [`HARD_MAX_ARITY`] are clamped.
pub fn max_arity() -> usize {
    static MAX: OnceLock<usize> = OnceLock::new();
    *MAX.get_or_init(|| {
        std::env::var("MINONES_MAX_ARITY")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v >= 1)
            .map(|v| v.min(HARD_MAX_ARITY))
            .unwrap_or(DEFAULT_MAX_ARITY)
    })
}

/// A fixed-length Boolean tuple.
///
/// Positions are 1-based. Position `p` is stored in bit `p - 1` of the code,
/// so ordering tuples of equal length by code is colexicographic order on
/// their bitstrings. All deterministic scans in this crate use that order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolTuple {
    len: u8,
    code: u32,
}

impl BoolTuple {
    pub fn new(bits: &[bool]) -> Result<Self, RelationError> {
        check_len(bits.len())?;
        let code = bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0u32, |acc, (i, _)| acc | (1 << i));
        Ok(Self {
            len: bits.len() as u8,
            code,
        })
    }

    /// Builds a tuple from its code. Bits above `len` are masked off.
    pub fn from_code(code: u32, len: usize) -> Self {
        debug_assert!(len <= HARD_MAX_ARITY);
        Self {
            len: len as u8,
            code: code & full_mask(len),
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self::from_code(0, len)
    }

    pub fn ones(len: usize) -> Self {
        Self::from_code(u32::MAX, len)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    /// Value at 1-based position `pos`.
    pub fn get(&self, pos: usize) -> bool {
        debug_assert!(pos >= 1 && pos <= self.len());
        self.code >> (pos - 1) & 1 == 1
    }

    pub fn with(&self, pos: usize, value: bool) -> Self {
        let bit = 1u32 << (pos - 1);
        let code = if value { self.code | bit } else { self.code & !bit };
        Self { len: self.len, code }
    }

    pub fn count_ones(&self) -> usize {
        self.code.count_ones() as usize
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.len()).map(move |p| self.get(p))
    }

    /// 1-based positions holding a 1.
    pub fn ones_positions(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&p| self.get(p)).collect()
    }

    pub fn meet(&self, other: &Self) -> Result<Self, RelationError> {
        self.same_len(other)?;
        Ok(Self::from_code(self.code & other.code, self.len()))
    }

    pub fn join(&self, other: &Self) -> Result<Self, RelationError> {
        self.same_len(other)?;
        Ok(Self::from_code(self.code | other.code, self.len()))
    }

    /// Componentwise order `self ≤ other`.
    pub fn leq(&self, other: &Self) -> Result<bool, RelationError> {
        self.same_len(other)?;
        Ok(self.code & !other.code == 0)
    }

    fn same_len(&self, other: &Self) -> Result<(), RelationError> {
        if self.len != other.len {
            return Err(RelationError::ArityMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }
}

/// Componentwise meet, join and order test of two tuples.
pub fn tuple_ops(a: &BoolTuple, b: &BoolTuple) -> Result<(BoolTuple, BoolTuple, bool), RelationError> {
    Ok((a.meet(b)?, a.join(b)?, a.leq(b)?))
}

pub(crate) fn full_mask(len: usize) -> u32 {
    if len >= 32 {
        u32::MAX
    } else {
        (1u32 << len) - 1
    }
}

pub(crate) fn check_len(len: usize) -> Result<(), RelationError> {
    let max = max_arity();
    if len == 0 || len > max {
        return Err(RelationError::ArityOutOfRange { arity: len, max });
    }
    Ok(())
}

impl fmt::Display for BoolTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BoolTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolTuple({self})")
    }
}

impl FromStr for BoolTuple {
    type Err = RelationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(RelationError::InvalidTuple(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&bits)
    }
}

impl Serialize for BoolTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
