use std::collections::BTreeSet;

use minones_core::builtin;
use minones_core::formula::{Assignment, ConstraintLanguage, Formula};
use minones_core::kernel::{find_sunflower, kernelize, reduce_formula, Kernel, KernelError, KernelOutcome};
use minones_core::solve::solve_brute;
use proptest::prelude::*;

fn mergeable_language() -> ConstraintLanguage {
    ConstraintLanguage::new(vec![
        builtin::or2(),
        builtin::odd3(),
        builtin::impl2(),
        builtin::eq_implies3(),
        builtin::r_ex(),
    ])
    .unwrap()
}

fn formula(max_vars: u32, max_constraints: usize) -> impl Strategy<Value = Formula> {
    let l = mergeable_language();
    let arities: Vec<usize> = l.relations().map(|r| r.arity()).collect();
    (1..=max_vars).prop_flat_map(move |n| {
        let arities = arities.clone();
        let l = l.clone();
        let constraint = (0..arities.len()).prop_flat_map(move |i| (Just(i), proptest::collection::vec(1..=n, arities[i])));
        proptest::collection::vec(constraint, 0..=max_constraints).prop_map(move |cs| {
            let mut f = Formula::new(l.clone(), n);
            for (i, args) in cs {
                f.add(l.get(i).name(), &args).unwrap();
            }
            f
        })
    })
}

fn assignments(n: usize) -> impl Iterator<Item = Assignment> {
    (0..1u32 << n).map(move |bits| Assignment::new((0..n).map(|i| bits >> i & 1 == 1).collect()))
}

/// Weight-≤k solutions of the input and of the kernel, restricted to the
/// input variables that survive in the kernel.
fn restricted_solutions(f: &Formula, kern: &Kernel, k: usize) -> (BTreeSet<Vec<bool>>, BTreeSet<Vec<bool>>) {
    let surviving: Vec<u32> = kern.origin.iter().flatten().copied().collect();
    let from_input = assignments(f.num_vars() as usize)
        .filter(|a| a.weight() <= k && f.evaluate(a).unwrap())
        .map(|a| surviving.iter().map(|&v| a.get(v)).collect())
        .collect();
    let from_kernel = assignments(kern.formula.num_vars() as usize)
        .filter(|b| {
            let fresh_zero = kern.origin.iter().zip(b.values()).all(|(o, &x)| o.is_some() || !x);
            fresh_zero && b.weight() <= k && kern.formula.evaluate(b).unwrap()
        })
        .map(|b| {
            kern.origin
                .iter()
                .zip(b.values())
                .filter(|(o, _)| o.is_some())
                .map(|(_, &x)| x)
                .collect()
        })
        .collect();
    (from_input, from_kernel)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn kernel_keeps_the_restricted_solution_set(f in formula(11, 24), k in 0usize..=3) {
        let kern = kernelize(&f, k).unwrap();
        let want = solve_brute(&f, k).unwrap().is_sat();
        let got = solve_brute(&kern.formula, kern.k).unwrap().is_sat();
        prop_assert_eq!(want, got);
        prop_assert!((kern.report.final_vars as u128) <= kern.report.bound);
        prop_assert!(kern.report.measures.windows(2).all(|w| w[1] < w[0]));
        if kern.report.outcome == KernelOutcome::Reduced {
            let (a, b) = restricted_solutions(&f, &kern, k);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn kernelizing_a_kernel_changes_nothing(f in formula(12, 30), k in 1usize..=3) {
        let once = kernelize(&f, k).unwrap();
        let twice = kernelize(&once.formula, k).unwrap();
        prop_assert_eq!(twice.formula.num_vars(), once.formula.num_vars());
        prop_assert_eq!(twice.formula.constraints().len(), once.formula.constraints().len());
    }
}

#[test]
fn sunflower_steps_keep_the_decision() {
    // a hub with many ODD3 constraints forces sunflowers with core {1}
    let l = ConstraintLanguage::new(vec![builtin::or2(), builtin::odd3()]).unwrap();
    let mut f = Formula::new(l, 13);
    for x in 2..=13u32 {
        for y in 2..=13u32 {
            if (x + y) % 3 == 0 {
                f.add("ODD3", &[1, x, y]).unwrap();
            }
        }
    }
    let r = reduce_formula(&f, 1).unwrap();
    assert!(r.iterations > 0);
    let kern = kernelize(&f, 1).unwrap();
    assert!(solve_brute(&f, 1).unwrap().is_sat());
    assert!(solve_brute(&kern.formula, 1).unwrap().is_sat());
    assert!(find_sunflower(&[vec![1, 2], vec![1, 3]], 1).is_some());
}

#[test]
fn non_mergeable_input_is_refused() {
    let l = ConstraintLanguage::new(vec![builtin::or2(), builtin::even3()]).unwrap();
    let mut f = Formula::new(l, 3);
    f.add("EVEN3", &[1, 2, 3]).unwrap();
    assert_eq!(
        kernelize(&f, 1).unwrap_err(),
        KernelError::NotMergeableLanguage("EVEN3".into())
    );
}
