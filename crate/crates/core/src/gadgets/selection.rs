use std::collections::BTreeSet;

use serde::Serialize;

use super::{force_constants, violated, ConstantGadgets, GadgetBuilder, GadgetError, Recipe, Slot};
use crate::builtin;
use crate::classify::{classify_language, Verdict};
use crate::formula::{ConstraintLanguage, Formula};
use crate::relation::{check_property, Property, Relation, WitnessQuad};
use crate::solve::minimal_solutions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SelectionKind {
    /// `(parent, left, right)` with 000, 110, 101 allowed and 100 not.
    R3,
    /// `(l, r, parent, left, right)` with 10110, 10000, 01101, 01000
    /// allowed and 10100, 01100 not.
    R5,
}

/// A selection relation implemented over the language.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionTemplate {
    pub kind: SelectionKind,
    /// Non-mergeable relation the template was derived from.
    pub source: String,
    /// Which branch of the case analysis produced the template.
    pub case: &'static str,
    /// Type of each position of the source relation in the witness.
    pub position_types: Vec<PosType>,
    pub recipe: Recipe,
    pub recipe_text: String,
    /// Tuples of the implemented relation, as bitstrings.
    pub tuples: Vec<String>,
    /// Implementation of `x ≠ y`, present for `R5`.
    pub neq: Option<Recipe>,
    #[serde(skip)]
    relation: Relation,
    #[serde(skip)]
    language: ConstraintLanguage,
}

/// Column pattern of one position across `(alpha, beta, gamma, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PosType {
    C10,
    C01,
    P11,
    P10,
    P01,
    /// 1 in all four tuples.
    Z1,
    /// 0 in all four tuples.
    Z0,
}

fn position_types(q: &WitnessQuad) -> Vec<PosType> {
    (1..=q.alpha.len())
        .map(|p| match (q.alpha.get(p), q.beta.get(p), q.gamma.get(p), q.delta.get(p)) {
            (true, true, false, false) => PosType::C10,
            (false, false, true, true) => PosType::C01,
            (true, false, true, false) => PosType::P11,
            (true, false, false, false) => PosType::P10,
            (false, false, true, false) => PosType::P01,
            (true, true, true, true) => PosType::Z1,
            (false, false, false, false) => PosType::Z0,
            other => unreachable!("merge-applicable quadruple has no column {other:?}"),
        })
        .collect()
}

impl SelectionTemplate {
    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn language(&self) -> &ConstraintLanguage {
        &self.language
    }

    /// Builds the selection formula over `y` inside `b`, returning the
    /// local variables. One variable of `y` (or none, when `y` is empty and
    /// the formula is unsatisfiable) is selected.
    pub fn instantiate(&self, b: &mut GadgetBuilder<'_>, y: &[u32]) -> Vec<u32> {
        match y.len() {
            0 => {
                // nothing can be selected
                let v = b.fresh();
                b.force_one(v);
                b.force_zero(v);
                return vec![v];
            }
            1 => {
                b.force_one(y[0]);
                return Vec::new();
            }
            _ => {}
        }
        let h = ceil_log2(y.len());
        let mut leaves: Vec<u32> = y.to_vec();
        while leaves.len() < 1 << h {
            let pad = b.fresh();
            b.force_zero(pad);
            leaves.push(pad);
        }
        let mut x = Vec::new();
        let pairs: Vec<(u32, u32)> = match self.kind {
            SelectionKind::R3 => Vec::new(),
            SelectionKind::R5 => {
                let neq = self.neq.clone().expect("R5 template carries a disequality");
                (0..h)
                    .map(|_| {
                        let (l, r) = (b.fresh(), b.fresh());
                        b.apply(&neq, &[l, r]);
                        x.extend([l, r]);
                        (l, r)
                    })
                    .collect()
            }
        };
        // levels[i] holds the 2^i nodes at depth i; leaves are at depth h
        let mut levels: Vec<Vec<u32>> = Vec::new();
        for depth in 0..h {
            let nodes: Vec<u32> = (0..1u32 << depth).map(|_| b.fresh()).collect();
            x.extend(&nodes);
            levels.push(nodes);
        }
        levels.push(leaves);
        b.force_one(levels[0][0]);
        for depth in 0..h {
            for (j, &node) in levels[depth].iter().enumerate() {
                let (left, right) = (levels[depth + 1][2 * j], levels[depth + 1][2 * j + 1]);
                let params = match self.kind {
                    SelectionKind::R3 => vec![node, left, right],
                    SelectionKind::R5 => vec![pairs[depth].0, pairs[depth].1, node, left, right],
                };
                b.apply(&self.recipe, &params);
            }
        }
        x
    }
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Local weight of a selection formula over `n` variables.
pub fn selection_weight(kind: SelectionKind, n: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    match kind {
        SelectionKind::R3 => ceil_log2(n),
        SelectionKind::R5 => 2 * ceil_log2(n),
    }
}

fn r3_ok(r: &Relation) -> bool {
    ["000", "110", "101"]
        .iter()
        .all(|t| r.contains(&t.parse().unwrap()))
        && !r.contains(&"100".parse().unwrap())
}

fn r5_ok(r: &Relation) -> bool {
    ["10110", "10000", "01101", "01000"]
        .iter()
        .all(|t| r.contains(&t.parse().unwrap()))
        && !["10100", "01100"].iter().any(|t| r.contains(&t.parse().unwrap()))
}

/// Derives an `R3` or `R5` selection relation from the first
/// non-mergeable relation of a language without a polynomial kernel.
pub fn derive_selection_relation(lang: &ConstraintLanguage) -> Result<SelectionTemplate, GadgetError> {
    let class = classify_language(lang);
    if class.verdict != Verdict::NoPolyKernel {
        return Err(GadgetError::NotApplicable(format!("verdict is {}", class.verdict)));
    }
    let witness = class.witness.expect("NO_POLY_KERNEL carries a witness");
    let rel = lang.index_of(&witness.relation).expect("witness relation in language");
    let r = lang.get(rel);
    let types = position_types(&witness.quad);
    let present: BTreeSet<PosType> = types
        .iter()
        .copied()
        .filter(|t| !matches!(t, PosType::Z1 | PosType::Z0))
        .collect();
    let has = |t: PosType| present.contains(&t);

    // one constraint on the source relation with each type mapped to a slot
    let row = |map: &dyn Fn(PosType) -> Option<Slot>| -> Vec<Slot> {
        types
            .iter()
            .map(|&t| match t {
                PosType::Z1 => Slot::One,
                PosType::Z0 => Slot::Zero,
                t => map(t).unwrap_or(Slot::Zero),
            })
            .collect()
    };
    let p = Slot::Param;
    let r3 = |map: &dyn Fn(PosType) -> Option<Slot>| {
        let mut recipe = Recipe::new(3);
        recipe.push(rel, row(map));
        (SelectionKind::R3, recipe)
    };
    let r5 = |a: &dyn Fn(PosType) -> Option<Slot>, b: &dyn Fn(PosType) -> Option<Slot>| {
        let mut recipe = Recipe::new(5);
        recipe.push(rel, row(a));
        recipe.push(rel, row(b));
        (SelectionKind::R5, recipe)
    };
    // R'(v,x,y) ∧ R'(w,x,z) over (C10, P11, P10)
    let case2 = |p01: Option<Slot>| {
        r5(
            &move |t| match t {
                PosType::C10 => Some(p(0)),
                PosType::P11 => Some(p(2)),
                PosType::P10 => Some(p(3)),
                PosType::P01 => p01,
                _ => None,
            },
            &move |t| match t {
                PosType::C10 => Some(p(1)),
                PosType::P11 => Some(p(2)),
                PosType::P10 => Some(p(4)),
                PosType::P01 => p01,
                _ => None,
            },
        )
    };

    let (case, (kind, recipe)) = if check_property(r, Property::DualHorn) {
        (
            "dual_horn",
            r3(&|t| match t {
                PosType::C10 => Some(Slot::One),
                PosType::P11 => Some(p(0)),
                PosType::P10 => Some(p(1)),
                PosType::C01 | PosType::P01 => Some(p(2)),
                _ => None,
            }),
        )
    } else if present.len() == 3 && (has(PosType::P01) || has(PosType::C01)) {
        (
            "arity3_third_p01_or_c01",
            r3(&|t| match t {
                PosType::P11 => Some(p(0)),
                PosType::P10 => Some(p(1)),
                PosType::C01 | PosType::P01 => Some(p(2)),
                _ => None,
            }),
        )
    } else if present.len() == 3 {
        ("arity3_third_c10", case2(None))
    } else if !has(PosType::C10) {
        (
            "no_c10",
            r3(&|t| match t {
                PosType::P11 => Some(p(0)),
                PosType::P10 => Some(p(1)),
                PosType::C01 | PosType::P01 => Some(p(2)),
                _ => None,
            }),
        )
    } else if !has(PosType::C01) {
        // is (C10, P11, P10, P01) = (0, 1, 0, 0) in R'?
        let mut probe = Recipe::new(4);
        probe.push(
            rel,
            row(&|t| match t {
                PosType::C10 => Some(p(0)),
                PosType::P11 => Some(p(1)),
                PosType::P10 => Some(p(2)),
                PosType::P01 => Some(p(3)),
                _ => None,
            }),
        );
        if !probe.relation(lang, "probe")?.contains_code(0b0010) {
            (
                "no_c01_identify_c10_p10",
                r3(&|t| match t {
                    PosType::P11 => Some(p(0)),
                    PosType::C10 | PosType::P10 => Some(p(1)),
                    PosType::P01 => Some(p(2)),
                    _ => None,
                }),
            )
        } else {
            ("no_c01_pin_p01", case2(Some(Slot::Zero)))
        }
    } else if !has(PosType::P01) {
        (
            "no_p01",
            r5(
                &|t| match t {
                    PosType::C10 => Some(p(0)),
                    PosType::C01 => Some(p(1)),
                    PosType::P11 => Some(p(2)),
                    PosType::P10 => Some(p(3)),
                    _ => None,
                },
                &|t| match t {
                    PosType::C10 => Some(p(1)),
                    PosType::C01 => Some(p(0)),
                    PosType::P11 => Some(p(2)),
                    PosType::P10 => Some(p(4)),
                    _ => None,
                },
            ),
        )
    } else {
        (
            "all_types",
            r5(
                &|t| match t {
                    PosType::C10 => Some(p(0)),
                    PosType::C01 => Some(p(1)),
                    PosType::P11 => Some(p(2)),
                    PosType::P10 => Some(p(3)),
                    PosType::P01 => Some(p(4)),
                    _ => None,
                },
                &|t| match t {
                    PosType::C10 => Some(p(1)),
                    PosType::C01 => Some(p(0)),
                    PosType::P11 => Some(p(2)),
                    PosType::P10 => Some(p(4)),
                    PosType::P01 => Some(p(3)),
                    _ => None,
                },
            ),
        )
    };

    let name = match kind {
        SelectionKind::R3 => "R3",
        SelectionKind::R5 => "R5",
    };
    let relation = recipe.relation(lang, name)?;
    let ok = match kind {
        SelectionKind::R3 => r3_ok(&relation),
        SelectionKind::R5 => r5_ok(&relation),
    };
    if !ok {
        return Err(violated(format!("case {case} gave {relation:?}")));
    }
    let neq = match kind {
        SelectionKind::R3 => None,
        SelectionKind::R5 => Some(derive_neq(lang)?),
    };
    Ok(SelectionTemplate {
        kind,
        source: r.name().to_string(),
        case,
        position_types: types,
        recipe_text: recipe.describe(lang),
        recipe,
        tuples: relation.sorted_bitstrings(),
        neq,
        relation,
        language: lang.clone(),
    })
}

/// `x ≠ y` from a pair of tuples whose join (or meet) leaves the relation:
/// positions where only the first is 1 become `x`, only the second `y`,
/// both 1 `one`, both 0 `zero`. The join gives `≠` or NAND, the meet `≠`
/// or OR; NAND ∧ OR is `≠`.
fn derive_neq(lang: &ConstraintLanguage) -> Result<Recipe, GadgetError> {
    let pair_recipe = |join: bool| -> Option<Recipe> {
        (0..lang.len()).find_map(|i| {
            let r = lang.get(i);
            let codes = r.codes();
            codes.iter().find_map(|&a| {
                codes.iter().find_map(|&b| {
                    let c = if join { a | b } else { a & b };
                    if r.contains_code(c) {
                        return None;
                    }
                    let slots = (0..r.arity())
                        .map(|p| match (a >> p & 1, b >> p & 1) {
                            (1, 0) => Slot::Param(0),
                            (0, 1) => Slot::Param(1),
                            (1, 1) => Slot::One,
                            _ => Slot::Zero,
                        })
                        .collect();
                    let mut recipe = Recipe::new(2);
                    recipe.push(i, slots);
                    Some(recipe)
                })
            })
        })
    };
    let neq = builtin::neq2();
    let join = pair_recipe(true).ok_or_else(|| violated("every relation is dual Horn"))?;
    let meet = pair_recipe(false).ok_or_else(|| violated("every relation is Horn"))?;
    for candidate in [&join, &meet] {
        if candidate.relation(lang, "neq")?.same_tuples(&neq) {
            return Ok(candidate.clone());
        }
    }
    let mut both = join.clone();
    both.append(&meet, &[Slot::Param(0), Slot::Param(1)]);
    if both.relation(lang, "neq")?.same_tuples(&neq) {
        Ok(both)
    } else {
        Err(violated("NAND and OR did not give a disequality"))
    }
}

/// A verified selection formula over `y`.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionFormula {
    pub kind: SelectionKind,
    #[serde(skip)]
    pub formula: Formula,
    pub y: Vec<u32>,
    pub x: Vec<u32>,
    /// True local variables needed to select one variable of `y`.
    pub w: usize,
    /// Forced-true shared constants, not counted in `w`.
    pub constant_overhead: usize,
    /// Weight budget the formula was verified at.
    pub k: usize,
}

/// Builds the selection formula for `n` variables and verifies it by
/// enumerating minimal solutions within weight `k`, which is raised to
/// `w + 2` if smaller so that every single selection fits.
pub fn build_selection_formula(t: &SelectionTemplate, n: usize, k_context: usize) -> Result<SelectionFormula, GadgetError> {
    let w = selection_weight(t.kind, n);
    let k = k_context.max(w + 2);
    let gadgets: ConstantGadgets = force_constants(&t.language, k)?;
    let mut b = GadgetBuilder::new(&gadgets);
    let y: Vec<u32> = (0..n).map(|_| b.fresh()).collect();
    let x = t.instantiate(&mut b, &y);
    let overhead = b.constant_overhead();
    let formula = b.into_formula();
    let s = SelectionFormula {
        kind: t.kind,
        formula,
        y,
        x,
        w,
        constant_overhead: overhead,
        k,
    };
    verify_selection(&s)?;
    Ok(s)
}

fn verify_selection(s: &SelectionFormula) -> Result<(), GadgetError> {
    if s.y.is_empty() {
        return Ok(());
    }
    let sols = minimal_solutions(&s.formula, s.k);
    let count = |a: &crate::formula::Assignment, vs: &[u32]| vs.iter().filter(|&&v| a.get(v)).count();
    if sols.iter().any(|a| count(a, &s.y) == 0) {
        return Err(violated("selection formula satisfiable with no selected variable"));
    }
    for &yi in &s.y {
        let best = sols
            .iter()
            .filter(|a| a.get(yi) && count(a, &s.y) == 1)
            .map(|a| count(a, &s.x))
            .min();
        if best != Some(s.w) {
            return Err(violated(format!(
                "selecting {yi} costs {best:?} local variables, expected {}",
                s.w
            )));
        }
    }
    if sols.iter().any(|a| count(a, &s.x) < s.w) {
        return Err(violated("a solution uses fewer local variables than w"));
    }
    Ok(())
}
