use serde::Serialize;

use super::{mask_positions, BoolTuple, Relation};

/// Closure and membership properties decided by [`check_property`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    ZeroValid,
    OneValid,
    Horn,
    DualHorn,
    IhsbMinus,
    Width2Affine,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::ZeroValid,
        Property::OneValid,
        Property::Horn,
        Property::DualHorn,
        Property::IhsbMinus,
        Property::Width2Affine,
    ];
}

/// Exhaustively decides `prop` for `r`.
pub fn check_property(r: &Relation, prop: Property) -> bool {
    let codes = r.codes();
    match prop {
        Property::ZeroValid => r.contains_code(0),
        Property::OneValid => r.contains_code(super::full_mask(r.arity())),
        Property::Horn => codes
            .iter()
            .all(|&a| codes.iter().all(|&b| r.contains_code(a & b))),
        Property::DualHorn => codes
            .iter()
            .all(|&a| codes.iter().all(|&b| r.contains_code(a | b))),
        Property::IhsbMinus => codes.iter().all(|&a| {
            codes
                .iter()
                .all(|&b| codes.iter().all(|&c| r.contains_code(a & (b | c))))
        }),
        Property::Width2Affine => is_width2_affine(r),
    }
}

/// A relation is width-2 affine iff it equals the conjunction of every unary
/// assignment and every binary `=`/`≠` that is valid on it: any
/// implementation uses only such atoms, and `R` satisfies all of them.
fn is_width2_affine(r: &Relation) -> bool {
    let n = r.arity();
    let codes = r.codes();
    let all_ones = codes.iter().fold(u32::MAX, |acc, &c| acc & c);
    let all_zeros = codes.iter().fold(u32::MAX, |acc, &c| acc & !c);
    let mut eqs = Vec::new();
    let mut neqs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let same = codes.iter().all(|&c| (c >> i & 1) == (c >> j & 1));
            let diff = codes.iter().all(|&c| (c >> i & 1) != (c >> j & 1));
            if same {
                eqs.push((i, j));
            }
            if diff {
                neqs.push((i, j));
            }
        }
    }
    let mask = super::full_mask(n);
    let count = (0..1u32 << n)
        .filter(|&c| {
            c & all_zeros & mask == 0
                && c & all_ones == all_ones & mask
                && eqs.iter().all(|&(i, j)| (c >> i & 1) == (c >> j & 1))
                && neqs.iter().all(|&(i, j)| (c >> i & 1) != (c >> j & 1))
        })
        .count();
    count == r.len()
}

/// Four tuples to which the merge operation applies but whose result
/// `alpha ∧ (beta ∨ gamma)` lies outside the relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessQuad {
    pub alpha: BoolTuple,
    pub beta: BoolTuple,
    pub gamma: BoolTuple,
    pub delta: BoolTuple,
    pub produced: BoolTuple,
    /// Positions where `beta = alpha` and `delta = gamma`.
    pub core_positions: Vec<usize>,
    /// Remaining positions; `beta` and `delta` are zero on them.
    pub petal_positions: Vec<usize>,
}

impl WitnessQuad {
    fn from_codes(arity: usize, a: u32, b: u32, c: u32, d: u32) -> Self {
        let mask = super::full_mask(arity);
        let core = !(a ^ b) & !(c ^ d) & mask;
        Self {
            alpha: BoolTuple::from_code(a, arity),
            beta: BoolTuple::from_code(b, arity),
            gamma: BoolTuple::from_code(c, arity),
            delta: BoolTuple::from_code(d, arity),
            produced: BoolTuple::from_code(a & (b | c), arity),
            core_positions: mask_positions(core, arity),
            petal_positions: mask_positions(!core & mask, arity),
        }
    }

    /// Replays the witness: all four tuples in `r`, the merge operation
    /// applies, the produced tuple is missing, and the core/petal split is a
    /// valid partition in the expected form.
    pub fn verify(&self, r: &Relation) -> bool {
        let n = r.arity();
        let (a, b, c, d) = (self.alpha, self.beta, self.gamma, self.delta);
        if [a, b, c, d, self.produced].iter().any(|t| t.len() != n) {
            return false;
        }
        let (ac, bc, cc, dc) = (a.code(), b.code(), c.code(), d.code());
        let members = [a, b, c, d].iter().all(|t| r.contains(t));
        let applies = (ac & dc) & !bc == 0 && bc & !ac == 0 && (bc & cc) & !dc == 0 && dc & !cc == 0;
        let produced = self.produced.code() == ac & (bc | cc) && !r.contains(&self.produced);
        let mut seen = vec![false; n + 1];
        for &p in self.core_positions.iter().chain(&self.petal_positions) {
            if p == 0 || p > n || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        let partition = seen[1..].iter().all(|&s| s);
        let core_form = self
            .core_positions
            .iter()
            .all(|&p| b.get(p) == a.get(p) && d.get(p) == c.get(p));
        let petal_form = self.petal_positions.iter().all(|&p| !b.get(p) && !d.get(p));
        members && applies && produced && partition && core_form && petal_form
    }
}

/// Decides mergeability. On failure returns the first violating quadruple
/// in `(alpha, beta, gamma, delta)` scan order over ascending tuple codes.
pub fn is_mergeable(r: &Relation) -> (bool, Option<WitnessQuad>) {
    let codes = r.codes();
    for &a in codes {
        for &b in codes.iter().filter(|&&b| b & !a == 0) {
            for &c in codes {
                let produced = a & (b | c);
                if r.contains_code(produced) {
                    continue;
                }
                let hit = codes.iter().find(|&&d| {
                    d & !c == 0 && (b & c) & !d == 0 && (a & d) & !b == 0
                });
                if let Some(&d) = hit {
                    return (false, Some(WitnessQuad::from_codes(r.arity(), a, b, c, d)));
                }
            }
        }
    }
    (true, None)
}

/// Every property flag of one relation, plus a witness when it is not
/// mergeable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyRecord {
    pub zero_valid: bool,
    pub one_valid: bool,
    pub horn: bool,
    pub dual_horn: bool,
    pub ihsb_minus: bool,
    pub width2_affine: bool,
    pub mergeable: bool,
    pub witness: Option<WitnessQuad>,
}

impl PropertyRecord {
    pub fn compute(r: &Relation) -> Self {
        let (mergeable, witness) = is_mergeable(r);
        Self {
            zero_valid: check_property(r, Property::ZeroValid),
            one_valid: check_property(r, Property::OneValid),
            horn: check_property(r, Property::Horn),
            dual_horn: check_property(r, Property::DualHorn),
            ihsb_minus: check_property(r, Property::IhsbMinus),
            width2_affine: check_property(r, Property::Width2Affine),
            mergeable,
            witness,
        }
    }

    pub fn get(&self, prop: Property) -> bool {
        match prop {
            Property::ZeroValid => self.zero_valid,
            Property::OneValid => self.one_valid,
            Property::Horn => self.horn,
            Property::DualHorn => self.dual_horn,
            Property::IhsbMinus => self.ihsb_minus,
            Property::Width2Affine => self.width2_affine,
        }
    }
}
