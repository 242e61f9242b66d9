//! Machine-readable report documents. Every command emits the same
//! top-level key set; inapplicable fields are null. The field shape per
//! command is fixed, which the acceptance suite checks.

use serde::Serialize;
use tubular::homext::{DimInfo, HomExtReport};
use tubular::sequences::{ExactSequence, MultiplicityMap, SeqTerm, SequenceCheck};
use tubular::Geometry;

#[derive(Serialize)]
pub struct Document {
    pub command: String,
    pub geometry: Option<GeometryDoc>,
    pub inputs: Vec<String>,
    pub verdicts: Option<VerdictsDoc>,
    pub citations: Vec<String>,
    pub sequence: Option<SequenceDoc>,
    pub multiplicities: Option<MultDoc>,
    pub result: Option<serde_json::Value>,
    pub error: Option<String>,
}

impl Document {
    pub fn new(command: &str) -> Document {
        Document {
            command: command.to_string(),
            geometry: None,
            inputs: Vec::new(),
            verdicts: None,
            citations: Vec::new(),
            sequence: None,
            multiplicities: None,
            result: None,
            error: None,
        }
    }

    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

#[derive(Serialize)]
pub struct GeometryDoc {
    pub weights: Vec<u32>,
    pub p: u32,
    pub ordinary: Vec<String>,
}

impl GeometryDoc {
    pub fn from(geo: &Geometry) -> GeometryDoc {
        GeometryDoc {
            weights: geo.weights().to_vec(),
            p: geo.p(),
            ordinary: geo.ordinary_labels().to_vec(),
        }
    }
}

#[derive(Serialize)]
pub struct DimDoc {
    pub kind: String,
    pub value: Option<u64>,
    pub endolength: Option<u64>,
}

impl DimDoc {
    pub fn from(d: &DimInfo, endolength: Option<u64>) -> DimDoc {
        let (kind, value) = match d {
            DimInfo::Zero => ("zero", Some(0)),
            DimInfo::Nonzero => ("nonzero", None),
            DimInfo::Exact(n) => ("exact", Some(*n)),
            DimInfo::Infinite => ("infinite", None),
            DimInfo::Unknown => ("unknown", None),
        };
        DimDoc {
            kind: kind.to_string(),
            value,
            endolength,
        }
    }
}

#[derive(Serialize)]
pub struct VerdictsDoc {
    pub hom: DimDoc,
    pub ext1: DimDoc,
}

impl VerdictsDoc {
    pub fn from(rep: &HomExtReport) -> VerdictsDoc {
        VerdictsDoc {
            hom: DimDoc::from(&rep.hom, rep.hom_endolength),
            ext1: DimDoc::from(&rep.ext1, rep.ext1_endolength),
        }
    }
}

#[derive(Serialize)]
pub struct ExceptionalMultDoc {
    pub arm: usize,
    pub socle: usize,
    pub mult: u64,
}

#[derive(Serialize)]
pub struct MultDoc {
    pub exceptional: Vec<ExceptionalMultDoc>,
    pub ordinary_default: u64,
    pub ordinary_overrides: std::collections::BTreeMap<String, u64>,
}

impl MultDoc {
    pub fn from(m: &MultiplicityMap) -> MultDoc {
        MultDoc {
            exceptional: m
                .exceptional
                .iter()
                .map(|(&(arm, socle), &mult)| ExceptionalMultDoc { arm, socle, mult })
                .collect(),
            ordinary_default: m.ordinary_default,
            ordinary_overrides: m.ordinary_overrides.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct TermDoc {
    pub form: String,
    pub object: Option<String>,
    pub slope: Option<String>,
    pub multiplicities: Option<MultDoc>,
}

impl TermDoc {
    pub fn from(t: &SeqTerm) -> TermDoc {
        match t {
            SeqTerm::Formal(f) => TermDoc {
                form: "formal".into(),
                object: Some(f.to_string()),
                slope: None,
                multiplicities: None,
            },
            SeqTerm::SymbolicSum(d) => TermDoc {
                form: "symbolic-sum".into(),
                object: Some(d.to_string()),
                slope: None,
                multiplicities: None,
            },
            SeqTerm::PrueferFamily { slope, mult } => TermDoc {
                form: "pruefer-family".into(),
                object: None,
                slope: Some(slope.to_string()),
                multiplicities: Some(MultDoc::from(mult)),
            },
            SeqTerm::PrueferFamilySymbolic { slope } => TermDoc {
                form: "pruefer-family-symbolic".into(),
                object: None,
                slope: Some(slope.to_string()),
                multiplicities: None,
            },
        }
    }
}

#[derive(Serialize)]
pub struct CheckDoc {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckDoc {
    pub fn from(c: &SequenceCheck) -> CheckDoc {
        CheckDoc {
            name: c.name.clone(),
            passed: c.passed,
            detail: c.detail.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct SequenceDoc {
    pub kind: String,
    pub slope: String,
    pub sub: TermDoc,
    pub mid: TermDoc,
    pub quot: TermDoc,
    pub checks: Vec<CheckDoc>,
    pub note: Option<String>,
}

impl SequenceDoc {
    pub fn from(s: &ExactSequence) -> SequenceDoc {
        SequenceDoc {
            kind: s.kind.to_string(),
            slope: s.slope.to_string(),
            sub: TermDoc::from(&s.sub),
            mid: TermDoc::from(&s.mid),
            quot: TermDoc::from(&s.quot),
            checks: s.checks.iter().map(CheckDoc::from).collect(),
            note: s.note.clone(),
        }
    }
}

pub fn error_document(err: &impl std::fmt::Display) -> String {
    let mut doc = Document::new("error");
    doc.error = Some(err.to_string());
    doc.render()
}
