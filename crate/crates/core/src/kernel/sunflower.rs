use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

/// A tuple of variables, one per position.
pub type VarTuple = Vec<u32>;

/// Members agree on the core positions; a variable at a non-core position
/// appears at non-core positions of at most one member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sunflower {
    /// 1-based, ascending.
    pub core_positions: Vec<usize>,
    /// Variable at each core position.
    pub core_values: Vec<u32>,
    pub members: Vec<VarTuple>,
}

impl Sunflower {
    /// Checks the structural invariants for `t`-tuples.
    pub fn is_valid(&self, t: usize) -> bool {
        if self.members.len() < 2
            || self.core_positions.len() != self.core_values.len()
            || self.core_positions.windows(2).any(|w| w[0] >= w[1])
            || self.core_positions.iter().any(|&p| p == 0 || p > t)
            || self.members.iter().any(|m| m.len() != t)
        {
            return false;
        }
        let distinct: HashSet<&VarTuple> = self.members.iter().collect();
        if distinct.len() != self.members.len() {
            return false;
        }
        let core: BTreeSet<usize> = self.core_positions.iter().copied().collect();
        let mut owner: BTreeMap<u32, usize> = BTreeMap::new();
        for (i, m) in self.members.iter().enumerate() {
            if self.core_positions.iter().zip(&self.core_values).any(|(&p, &v)| m[p - 1] != v) {
                return false;
            }
            for (p, &v) in m.iter().enumerate() {
                if core.contains(&(p + 1)) {
                    continue;
                }
                if *owner.entry(v).or_insert(i) != i {
                    return false;
                }
            }
        }
        true
    }
}

/// `k^t (t!)^2`, saturating.
pub fn sunflower_threshold(t: usize, k: usize) -> u128 {
    let fact: u128 = (1..=t as u128).product();
    (k as u128)
        .checked_pow(t as u32)
        .and_then(|p| p.checked_mul(fact * fact))
        .unwrap_or(u128::MAX)
}

/// Searches `h` for a sunflower with exactly `k + 1` members. Always
/// succeeds when `|h| > k^t (t!)^2` for tuple arity `t`; `None` when `k = 0`
/// or the search fails below that threshold. Duplicate tuples count once.
pub fn find_sunflower(h: &[VarTuple], k: usize) -> Option<Sunflower> {
    let t = h.first()?.len();
    if k == 0 || t == 0 || h.iter().any(|x| x.len() != t) {
        return None;
    }
    let mut seen = HashSet::new();
    let family: Vec<VarTuple> = h.iter().filter(|x| seen.insert(*x)).cloned().collect();
    let s = search(&family, k)?;
    debug_assert!(s.is_valid(t));
    s.is_valid(t).then_some(s)
}

fn search(h: &[VarTuple], k: usize) -> Option<Sunflower> {
    let t = h.first()?.len();
    if h.len() < k + 1 {
        return None;
    }
    if t == 1 {
        return checked(
            Sunflower {
                core_positions: Vec::new(),
                core_values: Vec::new(),
                members: h[..=k].to_vec(),
            },
            t,
        );
    }

    // greedy maximal family of pairwise variable-disjoint tuples
    let mut used: HashSet<u32> = HashSet::new();
    let mut disjoint: Vec<&VarTuple> = Vec::new();
    for x in h {
        if x.iter().all(|v| !used.contains(v)) {
            used.extend(x.iter().copied());
            disjoint.push(x);
        }
    }
    if disjoint.len() > k {
        return checked(
            Sunflower {
                core_positions: Vec::new(),
                core_values: Vec::new(),
                members: disjoint[..=k].iter().map(|x| (*x).clone()).collect(),
            },
            t,
        );
    }

    // every tuple meets `used`; branch on the most frequent (variable, position)
    let mut counts: BTreeMap<(u32, usize), usize> = BTreeMap::new();
    for x in h {
        for (p, &v) in x.iter().enumerate() {
            if used.contains(&v) {
                *counts.entry((v, p)).or_default() += 1;
            }
        }
    }
    let (&(v, p), _) = counts
        .iter()
        .fold(None, |best: Option<(&(u32, usize), &usize)>, e| match best {
            Some(b) if b.1 >= e.1 => Some(b),
            _ => Some(e),
        })?;
    let projected: Vec<VarTuple> = h
        .iter()
        .filter(|x| x[p] == v)
        .map(|x| {
            let mut y = x.clone();
            y.remove(p);
            y
        })
        .collect();
    let inner = search(&projected, k)?;

    let mut core: Vec<(usize, u32)> = inner
        .core_positions
        .iter()
        .zip(&inner.core_values)
        .map(|(&q, &val)| (if q > p { q + 1 } else { q }, val))
        .collect();
    core.push((p + 1, v));
    core.sort_unstable();
    let members = inner
        .members
        .into_iter()
        .map(|mut m| {
            m.insert(p, v);
            m
        })
        .collect();
    checked(
        Sunflower {
            core_positions: core.iter().map(|c| c.0).collect(),
            core_values: core.iter().map(|c| c.1).collect(),
            members,
        },
        t,
    )
}

fn checked(s: Sunflower, t: usize) -> Option<Sunflower> {
    s.is_valid(t).then_some(s)
}
