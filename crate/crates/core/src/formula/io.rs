//! Line-oriented text formats: languages (`.rel`), instances (`.mo1`) and
//! hypergraphs (`.ehs`). `#` starts a comment; blank lines are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use super::{ConstraintLanguage, Formula, ModelError, Term};
use crate::relation::{BoolTuple, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the error is not tied to a line.
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, split into tokens.
fn token_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| err(line, format!("expected {what}, found `{tok}`")))
}

pub fn parse_language(text: &str) -> Result<ConstraintLanguage, ParseError> {
    let mut relations: Vec<Relation> = Vec::new();
    let mut open: Option<(usize, String, usize, Vec<BoolTuple>)> = None;
    for (ln, toks) in token_lines(text) {
        match open.take() {
            None => match toks.as_slice() {
                ["relation", name, arity] => {
                    let arity: usize = number(ln, arity, "arity")?;
                    open = Some((ln, name.to_string(), arity, Vec::new()));
                }
                _ => return Err(err(ln, "expected `relation <NAME> <arity>`")),
            },
            Some((start, name, arity, mut rows)) => match toks.as_slice() {
                ["end"] => {
                    let r = Relation::new(name, arity, rows).map_err(|e| err(start, e.to_string()))?;
                    if relations.iter().any(|x| x.name() == r.name()) {
                        return Err(err(start, format!("duplicate relation name `{}`", r.name())));
                    }
                    relations.push(r);
                }
                [row] => {
                    let t: BoolTuple = row.parse().map_err(|_| err(ln, format!("invalid tuple `{row}`")))?;
                    if t.len() != arity {
                        return Err(err(ln, format!("tuple `{row}` does not have arity {arity}")));
                    }
                    rows.push(t);
                    open = Some((start, name, arity, rows));
                }
                _ => return Err(err(ln, "expected a bitstring or `end`")),
            },
        }
    }
    if let Some((start, name, ..)) = open {
        return Err(err(start, format!("relation `{name}` is missing `end`")));
    }
    ConstraintLanguage::new(relations).map_err(|e| err(0, e.to_string()))
}

/// Writes every relation, tuples in lexicographic bitstring order.
pub fn write_language(lang: &ConstraintLanguage) -> String {
    let mut out = String::new();
    for r in lang.relations() {
        writeln!(out, "relation {} {}", r.name(), r.arity()).unwrap();
        for row in r.sorted_bitstrings() {
            out.push_str(&row);
            out.push('\n');
        }
        out.push_str("end\n");
    }
    out
}

/// A parsed `.mo1` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub formula: Formula,
    pub k: usize,
}

pub fn parse_instance(text: &str, lang: &ConstraintLanguage) -> Result<Instance, ParseError> {
    let mut lines = token_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| err(0, "empty instance file"))?;
    let (n, k) = match header.as_slice() {
        ["minones", n, k] => (number::<u32>(ln, n, "variable count")?, number::<usize>(ln, k, "k")?),
        _ => return Err(err(ln, "expected header `minones <nvars> <k>`")),
    };
    let mut f = Formula::new(lang.clone(), n);
    for (ln, toks) in lines {
        let (name, args) = match toks.as_slice() {
            ["constraint", name, args @ ..] => (*name, args),
            _ => return Err(err(ln, "expected `constraint <NAME> <v1> ...`")),
        };
        let vars = args
            .iter()
            .map(|t| number::<u32>(ln, t, "variable index"))
            .collect::<Result<Vec<_>, _>>()?;
        f.add(name, &vars).map_err(|e: ModelError| err(ln, e.to_string()))?;
    }
    Ok(Instance { formula: f, k })
}

/// Writes constraints in formula order; the placeholder is written as `0`.
pub fn write_instance(f: &Formula, k: usize) -> String {
    let mut out = format!("minones {} {}\n", f.num_vars(), k);
    for c in f.constraints() {
        out.push_str("constraint ");
        out.push_str(f.relation_of(c).name());
        for t in &c.args {
            match t {
                Term::Var(v) => write!(out, " {v}").unwrap(),
                Term::Zero => out.push_str(" 0"),
            }
        }
        out.push('\n');
    }
    out
}

/// A hypergraph on vertices `1..=n`; edges are sorted vertex sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    pub n: u32,
    pub edges: Vec<Vec<u32>>,
}

impl Hypergraph {
    /// Sorts and deduplicates each edge; vertices must lie in `1..=n`.
    pub fn new(n: u32, edges: Vec<Vec<u32>>) -> Result<Self, String> {
        let mut out = Vec::with_capacity(edges.len());
        for mut e in edges {
            if let Some(&v) = e.iter().find(|&&v| v == 0 || v > n) {
                return Err(format!("vertex {v} outside 1..={n}"));
            }
            e.sort_unstable();
            e.dedup();
            out.push(e);
        }
        Ok(Self { n, edges: out })
    }
}

/// Edges are the `m` lines following the header. An empty edge cannot be
/// written as a blank line, so a line holding only `-` stands for it.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, ParseError> {
    let mut lines = token_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| err(0, "empty hypergraph file"))?;
    let (n, m) = match header.as_slice() {
        ["ehs", n, m] => (number::<u32>(ln, n, "vertex count")?, number::<usize>(ln, m, "edge count")?),
        _ => return Err(err(ln, "expected header `ehs <n> <m>`")),
    };
    let mut edges = Vec::with_capacity(m);
    let mut last = ln;
    for (ln, toks) in lines {
        last = ln;
        if edges.len() == m {
            return Err(err(ln, format!("more than {m} edges")));
        }
        let edge = if toks == ["-"] {
            Vec::new()
        } else {
            toks.iter()
                .map(|t| number::<u32>(ln, t, "vertex index"))
                .collect::<Result<Vec<_>, _>>()?
        };
        if let Some(&v) = edge.iter().find(|&&v| v == 0 || v > n) {
            return Err(err(ln, format!("vertex {v} outside 1..={n}")));
        }
        edges.push(edge);
    }
    if edges.len() != m {
        return Err(err(last, format!("expected {m} edges, found {}", edges.len())));
    }
    Hypergraph::new(n, edges).map_err(|e| err(0, e))
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("ehs {} {}\n", h.n, h.edges.len());
    for e in &h.edges {
        if e.is_empty() {
            out.push('-');
        } else {
            let parts: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            out.push_str(&parts.join(" "));
        }
        out.push('\n');
    }
    out
}
