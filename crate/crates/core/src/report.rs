//! Full invariant reports for a tree or a nondegenerate polynomial, in
//! human-readable and JSON form. Every number is exact.

use std::fmt::Write as _;

use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

use crate::equitree::{annotate, tree_to_json, annotate_triples, AnnotatedTree, Bamboo, FaceTriple};
use crate::error::Result;
use crate::frontend::{build_graph_nondegenerate, newton_faces, parse_poly, to_face_specs};
use crate::monodromy::{
    acampo_from_graph, characteristic_poly, check_poles, monodromy_zeta, CharPoly, CharPolyJson, ConjectureReport,
    CycloEntry, CycloProduct, EigenvalueCertificate, EigenvalueWitness,
};
use crate::oracle::{build_graph, chain_determinant_check, definitional_zeta, ResolutionGraph, Strategy};
use crate::zeta::{candidate_poles, poles, zeta_general, zeta_nondegenerate, RationalFunction, RationalFunctionJson};

/// `p/q` in lowest terms with the sign on `p`, also for integers.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputEcho {
    Tree { tree: Value },
    Polynomial { canonical: String, faces: Vec<FaceTriple> },
}

#[derive(Clone, Debug, Serialize)]
pub struct PoleEntry {
    pub value: String,
    pub order: u32,
    /// Candidate sources with this value.
    pub provenance: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub pole: String,
    #[serde(flatten)]
    pub certificate: EigenvalueCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureEntry {
    pub verdict: &'static str,
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub verdict: &'static str,
    pub zeta: bool,
    pub monodromy_zeta: bool,
    pub chain_determinant: bool,
    pub graph_structure: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub messages: Vec<String>,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.verdict == "equal"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub input: InputEcho,
    pub zeta: RationalFunctionJson,
    pub poles: Vec<PoleEntry>,
    pub monodromy_zeta: Vec<CycloEntry>,
    pub delta: CharPolyJson,
    pub milnor_number: String,
    pub conjecture: ConjectureEntry,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_check: Option<OracleCheck>,
    #[serde(skip)]
    text: TextParts,
}

#[derive(Clone, Debug, Default)]
struct TextParts {
    input: String,
    zeta: String,
    monodromy_zeta: String,
    delta: String,
}

fn pole_entries(tree: &AnnotatedTree, z: &RationalFunction) -> Vec<PoleEntry> {
    let candidates = candidate_poles(tree);
    poles(z)
        .into_iter()
        .map(|p| PoleEntry {
            value: format_rational(&p.value),
            order: p.order,
            provenance: candidates.iter().filter(|c| c.value == p.value).map(|c| c.provenance.describe()).collect(),
        })
        .collect()
}

fn conjecture_entry(report: &ConjectureReport) -> ConjectureEntry {
    ConjectureEntry {
        verdict: if report.holds() { "holds" } else { "fails" },
        certificates: report
            .verdicts
            .iter()
            .map(|v| Certificate { pole: format_rational(&v.pole.value), certificate: v.certificate.clone() })
            .collect(),
    }
}

fn graph_checks(
    closed_zeta: &RationalFunction,
    closed_mon: &CycloProduct,
    graph: &ResolutionGraph,
    extra: &[(&str, bool)],
) -> OracleCheck {
    let mut messages = Vec::new();
    let zeta = definitional_zeta(graph) == *closed_zeta;
    if !zeta {
        messages.push(format!("definitional zeta {} differs from closed form", definitional_zeta(graph)));
    }
    let monodromy = acampo_from_graph(graph) == *closed_mon;
    if !monodromy {
        messages.push(format!("A'Campo product {} differs from closed form", acampo_from_graph(graph)));
    }
    let chain = match chain_determinant_check(graph) {
        Ok(()) => true,
        Err(e) => {
            messages.push(e.to_string());
            false
        }
    };
    let structure = match graph.check_structure().and_then(|_| graph.euler_characteristic_check()) {
        Ok(()) => true,
        Err(e) => {
            messages.push(e.to_string());
            false
        }
    };
    for (what, ok) in extra {
        if !ok {
            messages.push(format!("{what} differs"));
        }
    }
    let all = zeta && monodromy && chain && structure && extra.iter().all(|(_, ok)| *ok);
    OracleCheck {
        verdict: if all { "equal" } else { "mismatch" },
        zeta,
        monodromy_zeta: monodromy,
        chain_determinant: chain,
        graph_structure: structure,
        messages,
    }
}

fn assemble(
    input: InputEcho,
    input_text: String,
    tree: &AnnotatedTree,
    z: RationalFunction,
    mon: CycloProduct,
    delta: CharPoly,
    oracle_check: Option<OracleCheck>,
) -> Report {
    let conj = check_poles(&poles(&z), &delta);
    Report {
        input,
        zeta: z.to_json(),
        poles: pole_entries(tree, &z),
        monodromy_zeta: mon.to_json(),
        delta: delta.to_json(),
        milnor_number: delta.mu.to_string(),
        conjecture: conjecture_entry(&conj),
        oracle_check,
        text: TextParts {
            input: input_text,
            zeta: z.to_string(),
            monodromy_zeta: mon.to_string(),
            delta: delta.render(),
        },
    }
}

pub fn report_tree(tree: &Bamboo, oracle: bool) -> Result<Report> {
    let annotated = annotate(tree)?;
    let z = zeta_general(&annotated);
    let mon = monodromy_zeta(&annotated)?;
    let delta = characteristic_poly(&mon)?;
    let check = if oracle {
        let graph = build_graph(&annotated, Strategy::Minimal)?;
        Some(graph_checks(&z, &mon, &graph, &[]))
    } else {
        None
    };
    let json = tree_to_json(tree);
    let text = format!("tree {json}");
    Ok(assemble(InputEcho::Tree { tree: json }, text, &annotated, z, mon, delta, check))
}

/// Nondegenerate pipeline: zeta from the face triples, monodromy from the
/// resolution graph.
pub fn report_poly(expr: &str, oracle: bool) -> Result<Report> {
    let poly = parse_poly(expr)?;
    let faces = to_face_specs(&newton_faces(&poly)?)?;
    let annotated = annotate_triples(&faces)?;
    let z = zeta_nondegenerate(&faces)?;
    let graph = build_graph_nondegenerate(&faces)?;
    let mon = acampo_from_graph(&graph);
    let delta = characteristic_poly(&mon)?;
    let check = oracle.then(|| {
        let general = zeta_general(&annotated) == z;
        let tree_mon = monodromy_zeta(&annotated).unwrap_or_default();
        graph_checks(&z, &tree_mon, &graph, &[("tree-form zeta", general)])
    });
    let canonical = poly.to_string();
    let triples: Vec<String> = faces.iter().map(|t| format!("({},{},{})", t.a, t.b, t.r)).collect();
    let text = format!("polynomial {canonical}, faces {}", triples.join(" "));
    Ok(assemble(InputEcho::Polynomial { canonical, faces }, text, &annotated, z, mon, delta, check))
}

fn describe_witness(w: &EigenvalueWitness) -> String {
    match w {
        EigenvalueWitness::H0 => "eigenvalue 1 on H^0".into(),
        EigenvalueWitness::H1 { order, multiplicity, .. } => {
            format!("primitive {order}-th roots of unity, multiplicity {multiplicity} in Delta")
        }
        EigenvalueWitness::Absent { order, multiplicity } => {
            format!("primitive {order}-th roots of unity have multiplicity {multiplicity}: not an eigenvalue")
        }
    }
}

impl Report {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn oracle_failed(&self) -> bool {
        self.oracle_check.as_ref().is_some_and(|c| !c.passed())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input: {}", self.text.input);
        let _ = writeln!(out, "Z_top(s) = {}", self.text.zeta);
        let _ = writeln!(out, "poles:");
        for p in &self.poles {
            let from = if p.provenance.is_empty() { "no candidate".to_string() } else { p.provenance.join(", ") };
            let _ = writeln!(out, "  {}  order {}  from {}", p.value, p.order, from);
        }
        let _ = writeln!(out, "Z_mon(t) = {}", self.text.monodromy_zeta);
        let _ = writeln!(out, "Delta(t) = {}", self.text.delta);
        let _ = writeln!(out, "Milnor number: {}", self.milnor_number);
        let _ = writeln!(out, "monodromy conjecture: {}", self.conjecture.verdict);
        for c in &self.conjecture.certificates {
            let _ = writeln!(out, "  {}: {}", c.pole, describe_witness(&c.certificate.witness));
        }
        if let Some(check) = &self.oracle_check {
            let _ = writeln!(out, "oracle: {}", check.verdict);
            for m in &check.messages {
                let _ = writeln!(out, "  {m}");
            }
        }
        out
    }
}
