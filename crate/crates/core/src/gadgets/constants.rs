use serde::Serialize;

use super::{solve_pinned, violated, GadgetBuilder, GadgetError, GadgetFragment, GadgetKind, Guarantee, Recipe, Slot};
use crate::builtin;
use crate::classify::{classify_language, Verdict};
use crate::formula::ConstraintLanguage;
use crate::relation::{transform, Role, WitnessQuad};
use crate::solve::solve_propagate;

/// Recipes forcing `x = 1`, `x = 0` and `x = y`, verified at budget `k`.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantGadgets {
    #[serde(skip)]
    language: ConstraintLanguage,
    pub k: usize,
    pub one: Recipe,
    pub zero: Recipe,
    pub eq: Recipe,
    pub one_guarantee: Guarantee,
    pub zero_guarantee: Guarantee,
    pub eq_guarantee: Guarantee,
    pub fragments: Vec<GadgetFragment>,
}

impl ConstantGadgets {
    pub fn language(&self) -> &ConstraintLanguage {
        &self.language
    }

    pub fn fragment(&self, kind: GadgetKind) -> &GadgetFragment {
        self.fragments.iter().find(|f| f.kind == kind).expect("all kinds built")
    }
}

/// Builds and verifies the constant and equality gadgets of a language
/// without a polynomial kernel. Weight-conditional gadgets are correct for
/// assignments of weight at most `k`.
pub fn force_constants(lang: &ConstraintLanguage, k: usize) -> Result<ConstantGadgets, GadgetError> {
    let class = classify_language(lang);
    if class.verdict != Verdict::NoPolyKernel {
        return Err(GadgetError::NotApplicable(format!("verdict is {}", class.verdict)));
    }
    let witness = class.witness.expect("NO_POLY_KERNEL carries a witness");
    let wrel = lang.index_of(&witness.relation).expect("witness relation in language");

    let (one, one_guarantee) = one_recipe(lang, k)?;
    let (zero, zero_guarantee, eq, eq_guarantee) = zero_and_eq(lang, wrel, &witness.quad, k)?;
    let needs_one = |r: &Recipe| r.uses(Slot::One);
    let zero_guarantee = if needs_one(&zero) { zero_guarantee.and(one_guarantee) } else { zero_guarantee };
    let mut eq_guarantee = eq_guarantee;
    if needs_one(&eq) {
        eq_guarantee = eq_guarantee.and(one_guarantee);
    }
    if eq.uses(Slot::Zero) {
        eq_guarantee = eq_guarantee.and(zero_guarantee);
    }
    let mut g = ConstantGadgets {
        language: lang.clone(),
        k,
        one,
        zero,
        eq,
        one_guarantee,
        zero_guarantee,
        eq_guarantee,
        fragments: Vec::new(),
    };
    g.fragments = vec![
        fragment(&g, GadgetKind::One)?,
        fragment(&g, GadgetKind::Zero)?,
        fragment(&g, GadgetKind::Eq)?,
    ];
    Ok(g)
}

/// `R(x, ..., x)` for a one-valid relation that is not zero-valid;
/// otherwise a maximal tuple `I` of such a relation gives a binary relation
/// by identifying the positions of `I` (as `x`) and the others (as `y`),
/// which is either `{10}` or `x ≠ y`.
fn one_recipe(lang: &ConstraintLanguage, k: usize) -> Result<(Recipe, Guarantee), GadgetError> {
    let nzv: Vec<usize> = (0..lang.len()).filter(|&i| !lang.get(i).contains_code(0)).collect();
    let mut recipe = Recipe::new(1);
    if let Some(&i) = nzv.iter().find(|&&i| {
        let r = lang.get(i);
        r.contains_code(crate::relation::full_mask(r.arity()))
    }) {
        recipe.push(i, vec![Slot::Param(0); lang.get(i).arity()]);
        return Ok((recipe, Guarantee::Unconditional));
    }
    let &i = nzv.first().ok_or_else(|| violated("every relation is zero-valid"))?;
    let r = lang.get(i);
    let codes = r.codes();
    let maximal = codes
        .iter()
        .copied()
        .find(|&a| !codes.iter().any(|&b| b != a && a & !b == 0))
        .expect("non-empty relation has a maximal tuple");
    let in_i = |p: usize| maximal >> p & 1 == 1;
    let roles: Vec<Role> = (0..r.arity())
        .map(|p| Role::Var(if in_i(p) { 0 } else { 1 }))
        .collect();
    let binary = transform(r, &roles)?.relation;
    let slots = |y: usize| -> Vec<Slot> {
        (0..r.arity())
            .map(|p| if in_i(p) { Slot::Param(0) } else { Slot::Local(y) })
            .collect()
    };
    let x_only = crate::relation::Relation::from_bitstrings("x", &["10"])?;
    if binary.same_tuples(&x_only) {
        recipe.push(i, slots(0));
        Ok((recipe, Guarantee::Unconditional))
    } else if binary.same_tuples(&builtin::neq2()) {
        for y in 0..=k {
            recipe.push(i, slots(y));
        }
        Ok((recipe, Guarantee::WeightConditional))
    } else {
        Err(violated(format!(
            "identifying a maximal tuple of {} gave {:?}",
            r.name(),
            binary
        )))
    }
}

/// Position classes of a witness: `C_x` where `beta < sigma`, `C_y` where
/// `sigma < alpha`, `C_1` where `beta` is 1, `C_0` where `alpha` is 0.
fn witness_slots(q: &WitnessQuad, x: Slot, y: Slot, c0: Slot) -> Vec<Slot> {
    (1..=q.alpha.len())
        .map(|p| {
            let (a, b, s) = (q.alpha.get(p), q.beta.get(p), q.produced.get(p));
            if b {
                Slot::One
            } else if !a {
                c0
            } else if s {
                x
            } else {
                y
            }
        })
        .collect()
}

type ZeroEq = (Recipe, Guarantee, Recipe, Guarantee);

fn zero_and_eq(lang: &ConstraintLanguage, rel: usize, q: &WitnessQuad, k: usize) -> Result<ZeroEq, GadgetError> {
    let (x, y) = (Slot::Param(0), Slot::Param(1));
    let mut first = Recipe::new(2);
    first.push(rel, witness_slots(q, x, y, y));
    first.push(rel, witness_slots(q, y, x, x));
    let r1 = first.relation(lang, "first")?;
    let eq_rel = builtin::eq2();
    let both_zero = crate::relation::Relation::from_bitstrings("z", &["00"])?;

    if r1.same_tuples(&eq_rel) {
        // x = 0 through a chain of k equalities to fresh variables
        let mut zero = Recipe::new(1);
        for j in 0..k {
            zero.append(&first, &[Slot::Param(0), Slot::Local(j)]);
        }
        zero.locals = k;
        return Ok((zero, Guarantee::WeightConditional, first, Guarantee::Unconditional));
    }
    if !r1.same_tuples(&both_zero) {
        return Err(violated(format!("witness gadget gave {r1:?}")));
    }
    let mut zero = Recipe::new(1);
    zero.append(&first, &[Slot::Param(0), Slot::Local(0)]);

    let mut eq = Recipe::new(2);
    eq.push(rel, witness_slots(q, x, y, Slot::Zero));
    eq.push(rel, witness_slots(q, y, x, Slot::Zero));
    let r2 = eq.relation(lang, "second")?;
    if !r2.same_tuples(&eq_rel) {
        return Err(violated(format!("witness gadget with C_0 pinned gave {r2:?}")));
    }
    Ok((zero, Guarantee::Unconditional, eq, Guarantee::Unconditional))
}

fn fragment(g: &ConstantGadgets, kind: GadgetKind) -> Result<GadgetFragment, GadgetError> {
    let mut b = GadgetBuilder::new(g);
    let interface: Vec<u32> = match kind {
        GadgetKind::One => {
            let x = b.fresh();
            b.force_one(x);
            vec![x]
        }
        GadgetKind::Zero => {
            let x = b.fresh();
            b.force_zero(x);
            vec![x]
        }
        GadgetKind::Eq => {
            let (x, y) = (b.fresh(), b.fresh());
            b.equal(x, y);
            vec![x, y]
        }
    };
    let f = b.into_formula();
    let n = f.num_vars() as usize;
    let guarantee = match kind {
        GadgetKind::One => g.one_guarantee,
        GadgetKind::Zero => g.zero_guarantee,
        GadgetKind::Eq => g.eq_guarantee,
    };
    let bound = match guarantee {
        Guarantee::Unconditional => n,
        Guarantee::WeightConditional => g.k,
    };
    let fail = |what: &str| violated(format!("{kind:?} gadget: {what}"));
    let contract = match kind {
        GadgetKind::One => !solve_pinned(&f, &[], &[interface[0]], bound).is_sat(),
        GadgetKind::Zero => !solve_pinned(&f, &[interface[0]], &[], bound).is_sat(),
        GadgetKind::Eq => {
            let (x, y) = (interface[0], interface[1]);
            !solve_pinned(&f, &[x], &[y], bound).is_sat()
                && !solve_pinned(&f, &[y], &[x], bound).is_sat()
                && solve_pinned(&f, &[x, y], &[], n).is_sat()
        }
    };
    if !contract {
        return Err(fail("contract does not hold"));
    }
    let best = solve_propagate(&f, n);
    let Some(weight_overhead) = best.optimum else {
        return Err(fail("unsatisfiable"));
    };
    Ok(GadgetFragment {
        kind,
        constraints: f
            .constraints()
            .iter()
            .map(|c| {
                let args: Vec<String> = c.args.iter().map(|t| format!("{}", t.var().unwrap_or(0))).collect();
                format!("{}({})", f.relation_of(c).name(), args.join(","))
            })
            .collect(),
        internal: (1..=f.num_vars()).filter(|v| !interface.contains(v)).collect(),
        interface,
        weight_overhead,
        guarantee,
        formula: f,
    })
}
