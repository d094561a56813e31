//! Named relations used throughout the docs, tests and the CLI default
//! language.

use crate::formula::ConstraintLanguage;
use crate::relation::Relation;

fn pred(name: &str, arity: usize, f: impl Fn(&[bool]) -> bool) -> Relation {
    Relation::from_predicate(name, arity, |t| {
        let bits: Vec<bool> = t.bits().collect();
        f(&bits)
    })
    .expect("builtin relation is non-empty")
}

/// `x ∨ y`: Min Ones over it is Vertex Cover.
pub fn or2() -> Relation {
    pred("OR2", 2, |t| t[0] || t[1])
}

/// `¬x ∨ ¬y`.
pub fn nand2() -> Relation {
    pred("NAND2", 2, |t| !(t[0] && t[1]))
}

/// `x → y`.
pub fn impl2() -> Relation {
    pred("IMPL", 2, |t| !t[0] || t[1])
}

pub fn eq2() -> Relation {
    pred("EQ", 2, |t| t[0] == t[1])
}

pub fn neq2() -> Relation {
    pred("NEQ", 2, |t| t[0] != t[1])
}

/// `x + y + z = 0 (mod 2)`.
pub fn even3() -> Relation {
    pred("EVEN3", 3, |t| !(t[0] ^ t[1] ^ t[2]))
}

/// `x + y + z = 1 (mod 2)`.
pub fn odd3() -> Relation {
    pred("ODD3", 3, |t| t[0] ^ t[1] ^ t[2])
}

/// `x → (y ∨ z)`.
pub fn impl3() -> Relation {
    pred("IMPL3", 3, |t| !t[0] || t[1] || t[2])
}

/// `(x = y) → z`.
pub fn eq_implies3() -> Relation {
    pred("EQIMPL3", 3, |t| t[0] != t[1] || t[2])
}

/// The 4-ary mergeable relation whose sunflower restriction with core
/// `{1,2,3}` and zero-closure on `{4}` both give back the relation itself.
pub fn r_ex() -> Relation {
    Relation::from_bitstrings("REX", &["0010", "0100", "0101", "1000", "1001", "1110", "1111"])
        .expect("builtin relation is non-empty")
}

pub fn one() -> Relation {
    pred("ONE", 1, |t| t[0])
}

pub fn zero() -> Relation {
    pred("ZERO", 1, |t| !t[0])
}

/// Every relation above, used when no language file is given.
pub fn language() -> ConstraintLanguage {
    ConstraintLanguage::new(vec![
        or2(),
        nand2(),
        impl2(),
        eq2(),
        neq2(),
        even3(),
        odd3(),
        impl3(),
        eq_implies3(),
        r_ex(),
        one(),
        zero(),
    ])
    .expect("builtin names are unique")
}
