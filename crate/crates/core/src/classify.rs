//! The dichotomy verdict for a constraint language.

use std::fmt;

use serde::Serialize;

use crate::formula::ConstraintLanguage;
use crate::relation::{is_mergeable, PropertyRecord, WitnessQuad};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Ptime,
    PolyKernel,
    NoPolyKernel,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Ptime => "PTIME",
            Verdict::PolyKernel => "POLY_KERNEL",
            Verdict::NoPolyKernel => "NO_POLY_KERNEL",
        })
    }
}

/// Why a language is polynomial-time solvable, if it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PtimeReason {
    ZeroValid,
    Horn,
    Width2Affine,
    None,
}

impl fmt::Display for PtimeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PtimeReason::ZeroValid => "zero_valid",
            PtimeReason::Horn => "horn",
            PtimeReason::Width2Affine => "width2_affine",
            PtimeReason::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub name: String,
    pub arity: usize,
    pub properties: PropertyRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedWitness {
    pub relation: String,
    pub quad: WitnessQuad,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub ptime_reason: PtimeReason,
    pub relations: Vec<RelationReport>,
    /// First non-mergeable relation in language order, with its witness.
    pub witness: Option<NamedWitness>,
}

impl Classification {
    pub fn all_mergeable(&self) -> bool {
        self.relations.iter().all(|r| r.properties.mergeable)
    }

    /// Re-derives the verdict from the relations of `lang` using only the
    /// reported evidence: the PTIME reason is re-checked on every relation,
    /// and a witness must replay against the named relation.
    pub fn replay(&self, lang: &ConstraintLanguage) -> bool {
        let records: Vec<PropertyRecord> = lang.relations().map(PropertyRecord::compute).collect();
        let reason_holds = match self.ptime_reason {
            PtimeReason::ZeroValid => records.iter().all(|p| p.zero_valid),
            PtimeReason::Horn => records.iter().all(|p| p.horn),
            PtimeReason::Width2Affine => records.iter().all(|p| p.width2_affine),
            PtimeReason::None => ptime_reason(&records) == PtimeReason::None,
        };
        let witness_holds = match &self.witness {
            Some(w) => lang
                .index_of(&w.relation)
                .is_some_and(|i| w.quad.verify(lang.get(i))),
            None => lang.relations().all(|r| is_mergeable(r).0),
        };
        let expected = match (self.ptime_reason, &self.witness) {
            (PtimeReason::None, Some(_)) => Verdict::NoPolyKernel,
            (PtimeReason::None, None) => Verdict::PolyKernel,
            _ => Verdict::Ptime,
        };
        reason_holds && witness_holds && expected == self.verdict
    }
}

fn ptime_reason(records: &[PropertyRecord]) -> PtimeReason {
    if records.iter().all(|p| p.zero_valid) {
        PtimeReason::ZeroValid
    } else if records.iter().all(|p| p.horn) {
        PtimeReason::Horn
    } else if records.iter().all(|p| p.width2_affine) {
        PtimeReason::Width2Affine
    } else {
        PtimeReason::None
    }
}

pub fn classify_language(lang: &ConstraintLanguage) -> Classification {
    let relations: Vec<RelationReport> = lang
        .relations()
        .map(|r| RelationReport {
            name: r.name().to_string(),
            arity: r.arity(),
            properties: PropertyRecord::compute(r),
        })
        .collect();
    let records: Vec<PropertyRecord> = relations.iter().map(|r| r.properties.clone()).collect();
    let ptime_reason = ptime_reason(&records);
    let witness = relations.iter().find_map(|r| {
        r.properties.witness.clone().map(|quad| NamedWitness {
            relation: r.name.clone(),
            quad,
        })
    });
    let verdict = if ptime_reason != PtimeReason::None {
        Verdict::Ptime
    } else if witness.is_none() {
        Verdict::PolyKernel
    } else {
        Verdict::NoPolyKernel
    };
    Classification {
        verdict,
        ptime_reason,
        relations,
        witness,
    }
}
