use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use minones_core::builtin;
use minones_core::classify::classify_language;
use minones_core::formula::{parse_hypergraph, parse_instance, parse_language, write_instance, ConstraintLanguage, Instance};
use minones_core::gadgets::{
    build_selection_formula, derive_selection_relation, force_constants, reduce_exact_hitting_set, GadgetError,
};
use minones_core::kernel::{kernelize, KernelError};
use minones_core::relation::{
    core_relation, implement_sunflower_restriction, nonzero_core, sunflower_restriction, zero_closed_positions,
    PropertyRecord, Relation, WitnessQuad,
};
use minones_core::solve::{solve_branch, solve_brute, SolveError, SolveResult};
use serde_json::{json, Value};

use crate::{Cli, Command, Failure, Method};

type Out = Result<String, Failure>;

pub fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Classify { language } => classify(cli.json, &load_language(language.as_deref())?),
        Command::Kernelize {
            language,
            instance,
            k,
            output,
        } => {
            let lang = load_language(language.as_deref())?;
            let inst = load_instance(instance, &lang)?;
            kernel(cli.json, inst, *k, output.as_deref())
        }
        Command::Solve {
            language,
            instance,
            k,
            method,
        } => {
            let lang = load_language(language.as_deref())?;
            let inst = load_instance(instance, &lang)?;
            solve(cli.json, inst, *k, *method)
        }
        Command::Relation { language, name, core } => {
            relation(cli.json, &load_language(language.as_deref())?, name.as_deref(), core.as_deref())
        }
        Command::Gadget { language, k, n, output } => {
            gadget(cli.json, &load_language(language.as_deref())?, *k, *n, output.as_deref())
        }
        Command::ReduceEhs {
            language,
            hypergraph,
            output,
        } => reduce_ehs(cli.json, &load_language(language.as_deref())?, hypergraph, output.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::precondition(format!("{}: {e}", path.display())))
}

fn load_language(path: Option<&Path>) -> Result<ConstraintLanguage, Failure> {
    match path {
        None => Ok(builtin::language()),
        Some(p) => parse_language(&read(p)?).map_err(|e| Failure::parse(format!("{}: {e}", p.display()))),
    }
}

fn load_instance(path: &Path, lang: &ConstraintLanguage) -> Result<Instance, Failure> {
    parse_instance(&read(path)?, lang).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn gadget_failure(e: GadgetError) -> Failure {
    match e {
        GadgetError::LemmaContractViolated(_) => Failure::internal(e.to_string()),
        _ => Failure::precondition(e.to_string()),
    }
}

fn quad_line(q: &WitnessQuad) -> String {
    format!(
        "alpha={} beta={} gamma={} delta={} produced={}",
        q.alpha, q.beta, q.gamma, q.delta, q.produced
    )
}

fn flags(p: &PropertyRecord) -> String {
    let b = |x: bool| u8::from(x);
    format!(
        "zero_valid={} one_valid={} horn={} dual_horn={} ihsb_minus={} width2_affine={} mergeable={}",
        b(p.zero_valid),
        b(p.one_valid),
        b(p.horn),
        b(p.dual_horn),
        b(p.ihsb_minus),
        b(p.width2_affine),
        b(p.mergeable)
    )
}

fn classify(json: bool, lang: &ConstraintLanguage) -> Out {
    let c = classify_language(lang);
    if !c.replay(lang) {
        return Err(Failure::internal("classification evidence does not replay"));
    }
    if json {
        return Ok(to_json(&serde_json::to_value(&c).expect("serializable")));
    }
    let mut out = format!("verdict: {}\nptime_reason: {}\n", c.verdict, c.ptime_reason);
    for r in &c.relations {
        writeln!(out, "relation {}/{}: {}", r.name, r.arity, flags(&r.properties)).unwrap();
    }
    if let Some(w) = &c.witness {
        writeln!(out, "witness {}: {}", w.relation, quad_line(&w.quad)).unwrap();
    }
    Ok(out)
}

fn kernel(json: bool, inst: Instance, k: Option<usize>, output: Option<&Path>) -> Out {
    let k = k.unwrap_or(inst.k);
    let kern = kernelize(&inst.formula, k).map_err(|e| match e {
        KernelError::NotMergeableLanguage(_) => Failure::precondition(e.to_string()),
        _ => Failure::internal(e.to_string()),
    })?;
    let text = write_instance(&kern.formula, kern.k);
    if let Some(p) = output {
        write(p, &text)?;
    }
    let r = &kern.report;
    if json {
        let mut v = json!({ "report": r });
        if output.is_none() {
            v["instance"] = Value::String(text);
        }
        return Ok(to_json(&v));
    }
    let mut summary = String::new();
    writeln!(summary, "outcome: {:?}", r.outcome).unwrap();
    writeln!(summary, "k: {}  d: {}", r.k, r.d).unwrap();
    writeln!(summary, "input: {} variables, {} constraints", r.input_vars, r.input_constraints).unwrap();
    writeln!(summary, "reduction iterations: {}  measures: {:?}", r.iterations, r.measures).unwrap();
    writeln!(
        summary,
        "eliminated: zero_closed={} high_degree={} unreachable={}",
        r.zero_closed_eliminated, r.high_degree_eliminated, r.unreachable_eliminated
    )
    .unwrap();
    writeln!(
        summary,
        "kernel: {} variables, {} constraints (bound {})",
        r.final_vars, r.final_constraints, r.bound
    )
    .unwrap();
    if output.is_some() {
        return Ok(summary);
    }
    // the summary becomes comments so standard output is still a valid instance
    let mut out: String = summary.lines().map(|l| format!("# {l}\n")).collect();
    out.push_str(&text);
    Ok(out)
}

fn solve(json: bool, inst: Instance, k: Option<usize>, method: Method) -> Out {
    let k = k.unwrap_or(inst.k);
    let f = &inst.formula;
    let res: SolveResult = match method {
        Method::Brute => solve_brute(f, k).map_err(|e: SolveError| Failure::precondition(e.to_string()))?,
        Method::Branch => solve_branch(f, k),
    };
    if let Some(w) = &res.witness {
        if !f.evaluate(w).unwrap_or(false) || w.weight() > k {
            return Err(Failure::internal("solver witness does not check"));
        }
    }
    let witness: Option<Vec<u32>> = res.witness.as_ref().map(|w| w.true_vars());
    if json {
        return Ok(to_json(&json!({
            "status": res.status.to_string(),
            "k": k,
            "optimum": res.optimum,
            "witness": witness,
        })));
    }
    let mut out = format!("{}\n", res.status);
    if let (Some(opt), Some(w)) = (res.optimum, witness) {
        writeln!(out, "optimum: {opt}").unwrap();
        let vars: Vec<String> = w.iter().map(u32::to_string).collect();
        writeln!(out, "true: {}", vars.join(" ")).unwrap();
    }
    Ok(out)
}

fn relation_value(r: &Relation, core: Option<&[usize]>) -> Result<Value, Failure> {
    let props = PropertyRecord::compute(r);
    let nzc = nonzero_core(r);
    let mut v = json!({
        "name": r.name(),
        "arity": r.arity(),
        "tuples": r.sorted_bitstrings(),
        "properties": props,
        "zero_closed_positions": zero_closed_positions(r),
        "nonzero_core": {
            "positions": nzc.positions,
            "tuples": nzc.relation.as_ref().map(Relation::sorted_bitstrings),
        },
    });
    if let Some(c) = core {
        let bad = |e: minones_core::relation::RelationError| Failure::precondition(format!("{}: {e}", r.name()));
        let restricted = sunflower_restriction(r, c).map_err(bad)?;
        let core_rel = core_relation(r, c).map_err(bad)?;
        // only defined for mergeable relations
        let implemented = props
            .mergeable
            .then(|| implement_sunflower_restriction(r, c).is_ok());
        v["sunflower"] = json!({
            "core": c,
            "restriction": restricted.sorted_bitstrings(),
            "equals_relation": restricted.same_tuples(r),
            "core_relation": core_rel.sorted_bitstrings(),
            "implemented_by_closure_and_implications": implemented,
        });
    }
    Ok(v)
}

fn relation(json: bool, lang: &ConstraintLanguage, name: Option<&str>, core: Option<&[usize]>) -> Out {
    let selected: Vec<&Relation> = match name {
        Some(n) => vec![lang
            .index_of(n)
            .map(|i| lang.get(i))
            .ok_or_else(|| Failure::precondition(format!("unknown relation `{n}`")))?],
        None => lang.relations().collect(),
    };
    let values = selected
        .iter()
        .map(|r| relation_value(r, core))
        .collect::<Result<Vec<_>, _>>()?;
    if json {
        return Ok(to_json(&Value::Array(values)));
    }
    let mut out = String::new();
    for (r, v) in selected.iter().zip(&values) {
        let props = PropertyRecord::compute(r);
        writeln!(out, "relation {}/{}", r.name(), r.arity()).unwrap();
        writeln!(out, "  tuples: {}", r.sorted_bitstrings().join(" ")).unwrap();
        writeln!(out, "  {}", flags(&props)).unwrap();
        if let Some(q) = &props.witness {
            writeln!(out, "  witness: {}", quad_line(q)).unwrap();
        }
        writeln!(out, "  zero_closed_positions: {:?}", zero_closed_positions(r)).unwrap();
        let nzc = &v["nonzero_core"];
        writeln!(out, "  nonzero_core: positions {} tuples {}", nzc["positions"], nzc["tuples"]).unwrap();
        if let Some(s) = v.get("sunflower") {
            writeln!(
                out,
                "  sunflower core {}: restriction {} equals_relation={} core_relation {}",
                s["core"], s["restriction"], s["equals_relation"], s["core_relation"]
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn gadget(json: bool, lang: &ConstraintLanguage, k: usize, n: Option<usize>, output: Option<&Path>) -> Out {
    let g = force_constants(lang, k).map_err(gadget_failure)?;
    let t = derive_selection_relation(lang).map_err(gadget_failure)?;
    let sel = match n {
        Some(0) => return Err(Failure::precondition("selection formula needs n ≥ 1")),
        Some(n) => Some(build_selection_formula(&t, n, k).map_err(gadget_failure)?),
        None => None,
    };
    if let (Some(p), Some(s)) = (output, &sel) {
        // budget for selecting exactly one variable
        write(p, &write_instance(&s.formula, s.w + 1 + s.constant_overhead))?;
    }
    if json {
        let mut v = json!({
            "constants": g,
            "one": g.one.describe(lang),
            "zero": g.zero.describe(lang),
            "eq": g.eq.describe(lang),
            "selection": t,
            "neq": t.neq.as_ref().map(|r| r.describe(lang)),
        });
        if let Some(s) = &sel {
            v["selection_formula"] = json!({
                "n": s.y.len(),
                "w": s.w,
                "vars": s.formula.num_vars(),
                "constraints": s.formula.constraints().len(),
                "constant_overhead": s.constant_overhead,
                "verified_at_k": s.k,
            });
        }
        return Ok(to_json(&v));
    }
    let mut out = String::new();
    for (label, recipe, frag) in [
        ("x = 1", &g.one, g.fragments.iter().find(|f| f.kind == minones_core::gadgets::GadgetKind::One)),
        ("x = 0", &g.zero, g.fragments.iter().find(|f| f.kind == minones_core::gadgets::GadgetKind::Zero)),
        ("x = y", &g.eq, g.fragments.iter().find(|f| f.kind == minones_core::gadgets::GadgetKind::Eq)),
    ] {
        let frag = frag.expect("all fragments built");
        writeln!(
            out,
            "{label}: {}  [{:?}, overhead {}]",
            recipe.describe(lang),
            frag.guarantee,
            frag.weight_overhead
        )
        .unwrap();
    }
    writeln!(out, "selection: {:?} from {} (case {})", t.kind, t.source, t.case).unwrap();
    writeln!(out, "  recipe: {}", t.recipe_text).unwrap();
    writeln!(out, "  tuples: {}", t.tuples.join(" ")).unwrap();
    if let Some(neq) = &t.neq {
        writeln!(out, "  x != y: {}", neq.describe(lang)).unwrap();
    }
    if let Some(s) = &sel {
        writeln!(
            out,
            "selection formula n={}: w={} vars={} constraints={} constant_overhead={}",
            s.y.len(),
            s.w,
            s.formula.num_vars(),
            s.formula.constraints().len(),
            s.constant_overhead
        )
        .unwrap();
    }
    Ok(out)
}

fn reduce_ehs(json: bool, lang: &ConstraintLanguage, path: &Path, output: Option<&Path>) -> Out {
    let h = parse_hypergraph(&read(path)?).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let red = reduce_exact_hitting_set(&h, lang).map_err(gadget_failure)?;
    let text = write_instance(&red.formula, red.k);
    if let Some(p) = output {
        write(p, &text)?;
    }
    if json {
        let mut v = json!({ "reduction": red, "vars": red.formula.num_vars(), "constraints": red.formula.constraints().len() });
        if output.is_none() {
            v["instance"] = Value::String(text);
        }
        return Ok(to_json(&v));
    }
    let mut summary = String::new();
    writeln!(summary, "vertices: {}  edges: {}", h.n, h.edges.len()).unwrap();
    writeln!(
        summary,
        "selection: {:?}  edge weights: {:?}  constant overhead: {}",
        red.kind, red.edge_weights, red.constant_overhead
    )
    .unwrap();
    writeln!(
        summary,
        "k: {}  variables: {}  constraints: {}",
        red.k,
        red.formula.num_vars(),
        red.formula.constraints().len()
    )
    .unwrap();
    if output.is_some() {
        return Ok(summary);
    }
    let mut out: String = summary.lines().map(|l| format!("# {l}\n")).collect();
    out.push_str(&text);
    Ok(out)
}
