use std::collections::BTreeSet;

use minones_core::builtin;
use minones_core::classify::{classify_language, Verdict};
use minones_core::formula::{
    eliminate_zero_constants, normalize_formula, parse_hypergraph, parse_instance, parse_language, write_hypergraph,
    write_instance, write_language, Assignment, ConstraintLanguage, Formula, Hypergraph, Instance,
};
use minones_core::relation::Relation;
use proptest::prelude::*;

fn relation(name: String, max_arity: usize) -> impl Strategy<Value = Relation> {
    (1..=max_arity).prop_flat_map(move |n| {
        let name = name.clone();
        proptest::collection::btree_set(0u32..1 << n, 1..=(1usize << n))
            .prop_map(move |codes| Relation::from_codes(name.clone(), n, codes).unwrap())
    })
}

fn language(max_relations: usize) -> impl Strategy<Value = ConstraintLanguage> {
    (1..=max_relations).prop_flat_map(|m| {
        (0..m)
            .map(|i| relation(format!("R{i}"), 3))
            .collect::<Vec<_>>()
            .prop_map(|rs| ConstraintLanguage::new(rs).unwrap())
    })
}

/// Formulas over the builtin language; variable 0 is the placeholder.
fn formula(max_vars: u32, max_constraints: usize) -> impl Strategy<Value = Formula> {
    let l = builtin::language();
    let arities: Vec<usize> = l.relations().map(|r| r.arity()).collect();
    (1..=max_vars).prop_flat_map(move |n| {
        let arities = arities.clone();
        let l = l.clone();
        let constraint = (0..arities.len()).prop_flat_map(move |i| (Just(i), proptest::collection::vec(0..=n, arities[i])));
        proptest::collection::vec(constraint, 0..=max_constraints).prop_map(move |cs| {
            let mut f = Formula::new(l.clone(), n);
            for (i, args) in cs {
                f.add(l.get(i).name(), &args).unwrap();
            }
            f
        })
    })
}

fn solutions(f: &Formula) -> Vec<Vec<bool>> {
    let n = f.num_vars() as usize;
    (0..1u32 << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|v| f.evaluate(&Assignment::new(v.clone())).unwrap())
        .collect()
}

fn rank(v: Verdict) -> u8 {
    match v {
        Verdict::Ptime => 0,
        Verdict::PolyKernel => 1,
        Verdict::NoPolyKernel => 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalizing_keeps_the_solutions(f in formula(8, 10)) {
        match normalize_formula(&f) {
            Ok((g, _)) => {
                prop_assert!(!g.has_placeholders());
                for c in g.constraints() {
                    let mut vs: Vec<u32> = c.vars().collect();
                    vs.sort_unstable();
                    vs.dedup();
                    prop_assert_eq!(vs.len(), c.args.len());
                }
                prop_assert_eq!(solutions(&f), solutions(&g));
            }
            Err(_) => prop_assert!(solutions(&f).is_empty()),
        }
    }

    #[test]
    fn placeholder_elimination_keeps_low_weight_solutions(f in formula(6, 8), k in 0usize..=3) {
        let g = eliminate_zero_constants(&f, k);
        prop_assert!(!g.has_placeholders());
        let n = f.num_vars() as usize;
        let low = |s: &Vec<bool>| s.iter().filter(|&&x| x).count() <= k;
        let want: BTreeSet<Vec<bool>> = solutions(&f).into_iter().filter(low).collect();
        let got: BTreeSet<Vec<bool>> = solutions(&g).into_iter().filter(low).map(|s| s[..n].to_vec()).collect();
        prop_assert_eq!(want, got);
    }

    #[test]
    fn instances_round_trip(f in formula(10, 12), k in 0usize..20) {
        let text = write_instance(&f, k);
        let back = parse_instance(&text, f.language()).unwrap();
        prop_assert_eq!(&back, &Instance { formula: f, k });
        prop_assert_eq!(write_instance(&back.formula, back.k), text);
    }

    #[test]
    fn languages_round_trip(l in language(4)) {
        let text = write_language(&l);
        let back = parse_language(&text).unwrap();
        prop_assert_eq!(write_language(&back), text);
        for (a, b) in l.relations().zip(back.relations()) {
            prop_assert!(a.same_tuples(b));
        }
    }

    #[test]
    fn hypergraphs_round_trip(
        n in 1u32..8,
        edges in proptest::collection::vec(proptest::collection::vec(1u32..8, 0..4), 0..6),
    ) {
        let edges: Vec<Vec<u32>> = edges.into_iter().map(|e| e.into_iter().filter(|&v| v <= n).collect()).collect();
        let h = Hypergraph::new(n, edges).unwrap();
        let text = write_hypergraph(&h);
        prop_assert_eq!(parse_hypergraph(&text).unwrap(), h);
    }

    #[test]
    fn adding_relations_never_lowers_the_verdict(l in language(3), extra in relation("X".into(), 3)) {
        let small = classify_language(&l);
        let mut rs: Vec<Relation> = l.relations().cloned().collect();
        rs.push(extra);
        let big_lang = ConstraintLanguage::new(rs).unwrap();
        let big = classify_language(&big_lang);
        prop_assert!(rank(small.verdict) <= rank(big.verdict));
        prop_assert!(small.replay(&l));
        prop_assert!(big.replay(&big_lang));
    }
}
