//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on
//! any failure. Runs without the test harness so the lines always show.

use std::collections::BTreeSet;
use std::time::Instant;

use minones_core::builtin;
use minones_core::classify::{classify_language, PtimeReason, Verdict};
use minones_core::formula::{Assignment, ConstraintLanguage, Formula, Hypergraph};
use minones_core::gadgets::{
    build_selection_formula, derive_selection_relation, force_constants, reduce_exact_hitting_set, selection_weight,
    Guarantee, SelectionFormula, SelectionKind,
};
use minones_core::kernel::{find_sunflower, kernel_bound, kernelize, sunflower_threshold, KernelOutcome, VarTuple};
use minones_core::relation::{
    check_property, core_relation, implement_zero_valid_ihsb, is_mergeable, sunflower_restriction,
    zero_closed_positions, Property, PropertyRecord, Relation,
};
use minones_core::solve::{solve_branch, solve_brute, solve_propagate};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lang(rs: Vec<Relation>) -> ConstraintLanguage {
    ConstraintLanguage::new(rs).unwrap()
}

fn rel(name: &str, rows: &[&str]) -> Relation {
    Relation::from_bitstrings(name, rows).unwrap()
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("worked example relation", c1_worked_example),
        ("mergeability vectors", c2_mergeability),
        ("classifier truth table", c3_classifier),
        ("sunflower threshold", c4_sunflower),
        ("kernelization soundness", c5_kernel_soundness),
        ("kernel scaling", c6_kernel_scaling),
        ("selection formulas", c7_selection),
        ("exact hitting set reduction", c8_ehs),
        ("solver cross-validation", c9_solvers),
        ("small-arity closure audit", c10_closure_audit),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn c1_worked_example() -> Check {
    let r = builtin::r_ex();
    ensure(is_mergeable(&r).0, "R_ex not mergeable")?;
    ensure(zero_closed_positions(&r) == [4], format!("zero-closed {:?}", zero_closed_positions(&r)))?;
    let restricted = sunflower_restriction(&r, &[1, 2, 3]).map_err(|e| e.to_string())?;
    ensure(restricted.same_tuples(&r), "restriction differs from R_ex")?;
    let core = core_relation(&r, &[1, 2, 3]).map_err(|e| e.to_string())?;
    let expected = rel("C", &["001", "010", "100", "111"]);
    ensure(core.same_tuples(&expected), format!("core relation {:?}", core.sorted_bitstrings()))?;
    Ok("mergeable, zero-closed {4}, restriction = R_ex, core {001,010,100,111}".into())
}

fn c2_mergeability() -> Check {
    let got: Vec<(String, bool)> = [builtin::odd3(), builtin::eq_implies3(), builtin::even3(), builtin::or2()]
        .iter()
        .map(|r| (r.name().to_string(), is_mergeable(r).0))
        .collect();
    let want = [true, true, false, true];
    ensure(
        got.iter().map(|g| g.1).eq(want.iter().copied()),
        format!("got {got:?}"),
    )?;
    Ok(got.iter().map(|(n, m)| format!("{n}={m}")).collect::<Vec<_>>().join(" "))
}

fn c3_classifier() -> Check {
    let or2 = lang(vec![builtin::or2()]);
    let even = lang(vec![builtin::even3()]);
    let both = lang(vec![builtin::or2(), builtin::even3()]);
    let a = classify_language(&or2);
    let b = classify_language(&even);
    let c = classify_language(&both);
    ensure(a.verdict == Verdict::PolyKernel, format!("{{OR2}} -> {}", a.verdict))?;
    ensure(
        b.verdict == Verdict::Ptime && b.ptime_reason == PtimeReason::ZeroValid,
        format!("{{EVEN3}} -> {} ({})", b.verdict, b.ptime_reason),
    )?;
    ensure(c.verdict == Verdict::NoPolyKernel, format!("{{OR2,EVEN3}} -> {}", c.verdict))?;
    let w = c.witness.as_ref().ok_or("no witness")?;
    ensure(w.quad.verify(&builtin::even3()) && c.replay(&both), "witness does not replay")?;
    ensure(a.replay(&or2) && b.replay(&even), "evidence does not replay")?;
    Ok(format!("POLY_KERNEL / PTIME(zero_valid) / NO_POLY_KERNEL, witness on {}", w.relation))
}

fn random_family(rng: &mut StdRng, t: usize, size: usize) -> Vec<VarTuple> {
    // enough variables that `size` distinct tuples exist, few enough to collide
    let universe = (2..).find(|&u: &u32| (u as usize).pow(t as u32) >= 3 * size).unwrap();
    let universe = rng.gen_range(universe..=universe * 3);
    let mut family = BTreeSet::new();
    while family.len() < size {
        family.insert((0..t).map(|_| rng.gen_range(1..=universe)).collect::<VarTuple>());
    }
    family.into_iter().collect()
}

fn c4_sunflower() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let mut total = 0;
    for (t, k, size) in [(2, 2, 17), (3, 2, 289)] {
        ensure(sunflower_threshold(t, k) as usize + 1 == size, "threshold arithmetic")?;
        for trial in 0..500 {
            let h = random_family(&mut rng, t, size);
            let s = find_sunflower(&h, k).ok_or(format!("t={t} trial {trial}: no sunflower"))?;
            ensure(
                s.is_valid(t) && s.members.len() == k + 1 && s.members.iter().all(|m| h.contains(m)),
                format!("t={t} trial {trial}: invalid {s:?}"),
            )?;
            total += 1;
        }
    }
    Ok(format!("{total} families, every result a valid 3-member sunflower"))
}

fn random_formula(rng: &mut StdRng, l: &ConstraintLanguage, n: u32, m: usize) -> Formula {
    let mut f = Formula::new(l.clone(), n);
    for _ in 0..m {
        let i = rng.gen_range(0..l.len());
        let args: Vec<u32> = (0..l.get(i).arity()).map(|_| rng.gen_range(1..=n)).collect();
        f.add(l.get(i).name(), &args).unwrap();
    }
    f
}

fn c5_kernel_soundness() -> Check {
    let l = lang(vec![builtin::or2(), builtin::odd3()]);
    let mut rng = StdRng::seed_from_u64(5);
    let (mut reduced_runs, mut max_vars, mut sat) = (0, 0, 0);
    for trial in 0..100 {
        // every fourth instance hangs enough constraints on one hub to pass
        // the sunflower threshold at k = 1
        let hub = trial % 4 == 0;
        let n = if hub { rng.gen_range(10..=14) } else { rng.gen_range(1..=14) };
        let k = if hub { 1 } else { rng.gen_range(0..=3) };
        let m = if hub { rng.gen_range(0..=3) } else { rng.gen_range(0..=3 * n as usize) };
        let mut f = random_formula(&mut rng, &l, n, m);
        if hub {
            for _ in 0..rng.gen_range(40..=80) {
                let (x, y) = (rng.gen_range(2..=n), rng.gen_range(2..=n));
                f.add("ODD3", &[1, x, y]).unwrap();
                if rng.gen_bool(0.3) {
                    f.add("OR2", &[1, x]).unwrap();
                }
            }
        }
        let kern = kernelize(&f, k).map_err(|e| format!("trial {trial}: {e}"))?;
        let want = solve_brute(&f, k).unwrap().is_sat();
        let got = solve_brute(&kern.formula, kern.k).map_err(|e| e.to_string())?.is_sat();
        ensure(want == got, format!("trial {trial}: input {want}, kernel {got}"))?;
        let r = &kern.report;
        let bound = kernel_bound(r.nonzero_valid_relations, 3, k);
        ensure(
            (kern.formula.num_vars() as u128) <= bound.max(r.bound),
            format!("trial {trial}: {} variables above {bound}", kern.formula.num_vars()),
        )?;
        ensure(
            r.measures.windows(2).all(|w| w[1] < w[0]),
            format!("trial {trial}: measures {:?}", r.measures),
        )?;
        reduced_runs += usize::from(r.iterations > 0);
        max_vars = max_vars.max(kern.formula.num_vars());
        sat += usize::from(want);
    }
    Ok(format!(
        "100 instances ({sat} SAT), decisions agree, {reduced_runs} with sunflower steps, max kernel {max_vars} variables"
    ))
}

/// `k` stars, each centre with `k` out-leaves and `k` in-leaves under OR2,
/// and an implication chain of `k - 1` fresh variables below every leaf.
/// No sunflower reaches `k + 1` petals and every leaf implies exactly `k`
/// variables, so nothing is removed.
fn star_chain_family(k: usize) -> Formula {
    let l = lang(vec![builtin::or2(), builtin::impl2()]);
    let mut f = Formula::new(l, 0);
    for _ in 0..k {
        let c = f.fresh_var();
        for side in 0..2 {
            for _ in 0..k {
                let leaf = f.fresh_var();
                let edge = if side == 0 { [c, leaf] } else { [leaf, c] };
                f.add("OR2", &edge).unwrap();
                let mut prev = leaf;
                for _ in 1..k {
                    let next = f.fresh_var();
                    f.add("IMPL", &[prev, next]).unwrap();
                    prev = next;
                }
            }
        }
    }
    f
}

fn c6_kernel_scaling() -> Check {
    let mut points = Vec::new();
    for k in 1..=6usize {
        let f = star_chain_family(k);
        let kern = kernelize(&f, k).map_err(|e| e.to_string())?;
        ensure(kern.report.outcome == KernelOutcome::Reduced, format!("k={k}: {:?}", kern.report.outcome))?;
        ensure(kern.report.d == 2, "arity is not 2")?;
        let vars = kern.report.final_vars;
        ensure((vars as u128) <= kern.report.bound, format!("k={k}: {vars} above bound"))?;
        points.push((k as f64, vars as f64));
    }
    // least-squares slope of log(vars) against log(k)
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let exponent = cov / var;
    let c = points.iter().map(|(k, v)| v / k.powi(3)).fold(0.0, f64::max);
    let counts: Vec<String> = points.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    ensure(exponent <= 3.2, format!("fitted exponent {exponent:.3}"))?;
    Ok(format!(
        "kernel variables {} ; fitted exponent {exponent:.3}, c = {c:.2}",
        counts.join(" ")
    ))
}

/// Exhaustive selection check over every assignment of weight at most `cap`.
fn check_selection(s: &SelectionFormula, cap: usize) -> Result<(), String> {
    let n = s.formula.num_vars() as usize;
    let mut unit = vec![usize::MAX; s.y.len()];
    let mut least = usize::MAX;
    for bits in 0u32..1 << n {
        if bits.count_ones() as usize > cap {
            continue;
        }
        let a = Assignment::new((0..n).map(|i| bits >> i & 1 == 1).collect());
        if !s.formula.evaluate(&a).unwrap() {
            continue;
        }
        let xs = s.x.iter().filter(|&&v| a.get(v)).count();
        let ys: Vec<usize> = (0..s.y.len()).filter(|&i| a.get(s.y[i])).collect();
        ensure(!ys.is_empty(), "satisfiable with Y = 0")?;
        if let [i] = ys[..] {
            unit[i] = unit[i].min(xs);
        }
        least = least.min(xs);
    }
    ensure(unit.iter().all(|&m| m == s.w), format!("unit minima {unit:?}, w = {}", s.w))?;
    ensure(least == s.w, format!("overall minimum {least}, w = {}", s.w))
}

fn c7_selection() -> Check {
    let mut notes = Vec::new();
    for (l, ns, kind) in [
        (lang(vec![builtin::or2(), builtin::even3()]), vec![2usize, 4, 8], SelectionKind::R3),
        (lang(vec![builtin::or2(), rel("AND3", &["000", "010", "100", "111"])]), vec![2, 4], SelectionKind::R5),
    ] {
        let g = force_constants(&l, 1).map_err(|e| e.to_string())?;
        let unconditional = [g.one_guarantee, g.zero_guarantee, g.eq_guarantee]
            .iter()
            .all(|&x| x == Guarantee::Unconditional);
        let t = derive_selection_relation(&l).map_err(|e| e.to_string())?;
        ensure(t.kind == kind, format!("{:?} instead of {kind:?}", t.kind))?;
        for n in ns {
            let s = build_selection_formula(&t, n, 0).map_err(|e| e.to_string())?;
            let h = n.trailing_zeros() as usize;
            let expected = if kind == SelectionKind::R3 { h } else { 2 * h };
            ensure(s.w == expected && selection_weight(kind, n) == expected, format!("n={n}: w={}", s.w))?;
            // weight-conditional gadgets only hold up to the budget they were built for
            let cap = if unconditional { usize::MAX } else { s.k };
            check_selection(&s, cap).map_err(|e| format!("{kind:?} n={n}: {e}"))?;
            let scope = if unconditional { "all weights".to_string() } else { format!("weight <= {cap}") };
            notes.push(format!("{kind:?} n={n} w={} ({scope})", s.w));
        }
    }
    Ok(notes.join(", "))
}

fn naive_exact_hitting_set(h: &Hypergraph) -> bool {
    (0u32..1 << h.n).any(|s| {
        h.edges
            .iter()
            .all(|e| e.iter().filter(|&&v| s >> (v - 1) & 1 == 1).count() == 1)
    })
}

fn random_hypergraph(rng: &mut StdRng) -> Hypergraph {
    let m = rng.gen_range(1..=4usize);
    let n = rng.gen_range(1..=6u32.min(1 << m));
    let edges = (0..m)
        .map(|_| {
            // empty edges are rare but allowed
            let p = if rng.gen_bool(0.05) { 0.0 } else { rng.gen_range(0.2..0.7) };
            let mut e: Vec<u32> = (1..=n).filter(|_| rng.gen_bool(p)).collect();
            if e.is_empty() && p > 0.0 {
                e.push(rng.gen_range(1..=n));
            }
            e
        })
        .collect();
    Hypergraph::new(n, edges).unwrap()
}

fn c8_ehs() -> Check {
    let mut rng = StdRng::seed_from_u64(8);
    let langs = [
        lang(vec![builtin::or2(), builtin::even3()]),
        lang(vec![builtin::or2(), rel("AND3", &["000", "010", "100", "111"])]),
    ];
    let (mut yes, mut brute_checked) = (0, 0);
    for trial in 0..200 {
        let h = random_hypergraph(&mut rng);
        let l = &langs[trial % 2];
        let red = reduce_exact_hitting_set(&h, l).map_err(|e| format!("trial {trial}: {e}"))?;
        let k = h.edges.len() + red.edge_weights.iter().sum::<usize>() + red.constant_overhead;
        ensure(red.k == k, format!("trial {trial}: k = {} vs {k}", red.k))?;
        let want = naive_exact_hitting_set(&h);
        let got = solve_propagate(&red.formula, red.k).is_sat();
        ensure(want == got, format!("trial {trial}: {h:?} expected {want}, reduction {got}"))?;
        if red.formula.num_vars() <= 22 {
            let brute = solve_brute(&red.formula, red.k).unwrap().is_sat();
            ensure(brute == want, format!("trial {trial}: brute force {brute}"))?;
            brute_checked += 1;
        }
        yes += usize::from(want);
    }
    Ok(format!("200 hypergraphs ({yes} with an exact hitting set), all agree; {brute_checked} also by brute force"))
}

fn c9_solvers() -> Check {
    let l = builtin::language();
    let mut rng = StdRng::seed_from_u64(9);
    let mut sat = 0;
    for trial in 0..1000 {
        let n = rng.gen_range(1..=16);
        let k = rng.gen_range(0..=4);
        let m = rng.gen_range(0..=2 * n as usize);
        let f = random_formula(&mut rng, &l, n, m);
        let a = solve_brute(&f, k).unwrap();
        let b = solve_branch(&f, k);
        ensure(
            a.status == b.status && a.optimum == b.optimum,
            format!("trial {trial}: brute {:?}/{:?}, branch {:?}/{:?}", a.status, a.optimum, b.status, b.optimum),
        )?;
        if let Some(w) = &b.witness {
            ensure(f.evaluate(w).unwrap() && w.weight() <= k, format!("trial {trial}: bad witness"))?;
        }
        sat += usize::from(a.is_sat());
    }
    Ok(format!("1000 instances ({sat} SAT), status and optimum agree"))
}

/// Definition-level property checks on explicit bit vectors.
mod naive {
    pub type T = Vec<bool>;

    pub fn tuples(arity: usize, mask: u32) -> Vec<T> {
        (0..1u32 << arity)
            .filter(|c| mask >> c & 1 == 1)
            .map(|c| (0..arity).map(|i| c >> i & 1 == 1).collect())
            .collect()
    }

    fn and(a: &T, b: &T) -> T {
        a.iter().zip(b).map(|(x, y)| *x && *y).collect()
    }

    fn or(a: &T, b: &T) -> T {
        a.iter().zip(b).map(|(x, y)| *x || *y).collect()
    }

    fn leq(a: &T, b: &T) -> bool {
        a.iter().zip(b).all(|(x, y)| !*x || *y)
    }

    pub fn horn(r: &[T]) -> bool {
        r.iter().all(|a| r.iter().all(|b| r.contains(&and(a, b))))
    }

    pub fn dual_horn(r: &[T]) -> bool {
        r.iter().all(|a| r.iter().all(|b| r.contains(&or(a, b))))
    }

    pub fn ihsb_minus(r: &[T]) -> bool {
        r.iter()
            .all(|a| r.iter().all(|b| r.iter().all(|c| r.contains(&and(a, &or(b, c))))))
    }

    pub fn mergeable(r: &[T]) -> bool {
        for a in r {
            for b in r {
                for c in r {
                    for d in r {
                        let applies = leq(&and(a, d), b) && leq(b, a) && leq(&and(b, c), d) && leq(d, c);
                        if applies && !r.contains(&and(a, &or(b, c))) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The conjunction of every assignment, equality and disequality atom
    /// that holds on all of `r` defines exactly `r`.
    pub fn width2_affine(r: &[T], arity: usize) -> bool {
        type Atom = Box<dyn Fn(&T) -> bool>;
        let mut atoms: Vec<Atom> = Vec::new();
        for i in 0..arity {
            for v in [false, true] {
                atoms.push(Box::new(move |t: &T| t[i] == v));
            }
            for j in 0..arity {
                atoms.push(Box::new(move |t: &T| t[i] == t[j]));
                atoms.push(Box::new(move |t: &T| t[i] != t[j]));
            }
        }
        let holding: Vec<&Atom> = atoms.iter().filter(|f| r.iter().all(f)).collect();
        tuples(arity, u32::MAX >> (32 - (1u32 << arity)))
            .iter()
            .all(|t| holding.iter().all(|f| f(t)) == r.contains(t))
    }
}

fn c10_closure_audit() -> Check {
    let (mut relations, mut lemma_cases) = (0, 0);
    for arity in 1..=3usize {
        let full = 1u64 << (1 << arity);
        for mask in 1..full {
            let codes: Vec<u32> = (0..1u32 << arity).filter(|c| mask >> c & 1 == 1).collect();
            let r = Relation::from_codes("R", arity, codes).unwrap();
            let t = naive::tuples(arity, mask as u32);
            let zero = vec![false; arity];
            let one = vec![true; arity];
            let expected = [
                (Property::ZeroValid, t.contains(&zero)),
                (Property::OneValid, t.contains(&one)),
                (Property::Horn, naive::horn(&t)),
                (Property::DualHorn, naive::dual_horn(&t)),
                (Property::IhsbMinus, naive::ihsb_minus(&t)),
                (Property::Width2Affine, naive::width2_affine(&t, arity)),
            ];
            let record = PropertyRecord::compute(&r);
            for (prop, want) in expected {
                ensure(
                    check_property(&r, prop) == want && record.get(prop) == want,
                    format!("arity {arity} mask {mask:#x}: {prop:?} should be {want}"),
                )?;
            }
            let merge = naive::mergeable(&t);
            ensure(
                is_mergeable(&r).0 == merge && record.mergeable == merge,
                format!("arity {arity} mask {mask:#x}: mergeable should be {merge}"),
            )?;
            if let Some(q) = &record.witness {
                ensure(q.verify(&r), format!("arity {arity} mask {mask:#x}: witness does not replay"))?;
            }
            if merge && t.contains(&zero) {
                let imp = implement_zero_valid_ihsb(&r)
                    .map_err(|e| format!("arity {arity} mask {mask:#x}: {e}"))?;
                ensure(imp.implements(&r), format!("arity {arity} mask {mask:#x}: clauses differ"))?;
                lemma_cases += 1;
            }
            relations += 1;
        }
    }
    Ok(format!(
        "{relations} relations of arity 1..3 agree with the naive oracles; {lemma_cases} zero-valid mergeable relations implemented"
    ))
}
