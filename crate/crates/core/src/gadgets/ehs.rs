use serde::Serialize;

use super::{derive_selection_relation, force_constants, selection_weight, GadgetBuilder, GadgetError, SelectionKind};
use crate::formula::{ConstraintLanguage, Formula, Hypergraph};

/// A Min Ones instance equivalent to an Exact Hitting Set instance.
#[derive(Debug, Clone, Serialize)]
pub struct EhsReduction {
    #[serde(skip)]
    pub formula: Formula,
    pub k: usize,
    pub kind: SelectionKind,
    /// Local weight of each edge's selection formula.
    pub edge_weights: Vec<usize>,
    /// Forced-true shared constants included in `k`.
    pub constant_overhead: usize,
    /// `(vertex, edge index, variable)` for every incidence.
    pub occurrences: Vec<(u32, usize, u32)>,
}

/// Reduces `h` to Min Ones over `lang`: the formula has a solution of
/// weight at most `k` iff `h` has a vertex set meeting every edge exactly
/// once. The shared forced-true constant is always created and counted.
pub fn reduce_exact_hitting_set(h: &Hypergraph, lang: &ConstraintLanguage) -> Result<EhsReduction, GadgetError> {
    let template = derive_selection_relation(lang)?;
    let m = h.edges.len();
    if m < 32 && u64::from(h.n) > 1u64 << m {
        return Err(GadgetError::OutOfScopeFallback { n: h.n, m });
    }
    let edge_weights: Vec<usize> = h.edges.iter().map(|e| selection_weight(template.kind, e.len())).collect();
    let k = m + edge_weights.iter().sum::<usize>() + 1;
    let gadgets = force_constants(lang, k)?;
    let mut b = GadgetBuilder::new(&gadgets);
    b.one_var();

    let mut occurrences = Vec::new();
    for (j, e) in h.edges.iter().enumerate() {
        let y: Vec<u32> = e.iter().map(|_| b.fresh()).collect();
        occurrences.extend(e.iter().zip(&y).map(|(&v, &var)| (v, j, var)));
        template.instantiate(&mut b, &y);
    }
    occurrences.sort_unstable();
    for (i, a) in occurrences.iter().enumerate() {
        for c in &occurrences[i + 1..] {
            if c.0 != a.0 {
                break;
            }
            b.equal(a.2, c.2);
        }
    }
    let constant_overhead = b.constant_overhead();
    Ok(EhsReduction {
        formula: b.into_formula(),
        k,
        kind: template.kind,
        edge_weights,
        constant_overhead,
        occurrences,
    })
}

/// Direct check over all vertex subsets.
pub fn exact_hitting_set_exists(h: &Hypergraph) -> bool {
    assert!(h.n < 32, "exhaustive check limited to 31 vertices");
    let masks: Vec<u32> = h
        .edges
        .iter()
        .map(|e| e.iter().fold(0, |acc, &v| acc | 1 << (v - 1)))
        .collect();
    (0..1u32 << h.n).any(|s| masks.iter().all(|&e| (e & s).count_ones() == 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::solve::solve_brute;

    fn lang() -> ConstraintLanguage {
        ConstraintLanguage::new(vec![builtin::or2(), builtin::even3()]).unwrap()
    }

    #[test]
    fn two_edges_sharing_a_vertex() {
        let h = Hypergraph::new(3, vec![vec![1, 2], vec![2, 3]]).unwrap();
        assert!(exact_hitting_set_exists(&h));
        let r = reduce_exact_hitting_set(&h, &lang()).unwrap();
        assert_eq!(r.k, 2 + 1 + 1 + 1);
        assert!(solve_brute(&r.formula, r.k).unwrap().is_sat());
    }

    #[test]
    fn no_exact_hitting_set() {
        let h = Hypergraph::new(2, vec![vec![1], vec![1, 2], vec![2]]).unwrap();
        assert!(!exact_hitting_set_exists(&h));
        let r = reduce_exact_hitting_set(&h, &lang()).unwrap();
        assert!(!solve_brute(&r.formula, r.k).unwrap().is_sat());
    }

    #[test]
    fn too_many_vertices() {
        let h = Hypergraph::new(5, vec![vec![1, 2], vec![3]]).unwrap();
        assert_eq!(
            reduce_exact_hitting_set(&h, &lang()).unwrap_err(),
            GadgetError::OutOfScopeFallback { n: 5, m: 2 }
        );
    }
}
