//! State-set JSON documents and report rendering.
//!
//! The document format is stable and byte-deterministic: terms are emitted
//! in lexicographic index order and amplitudes use the canonical exact
//! scalar grammar, so generate/parse/serialize round-trips are identical.

use serde::{Deserialize, Serialize};

use crate::certify::{verdict_str, Evidence, Report, ReportOutcome};
use crate::error::{Error, Result};
use crate::numeric::C64;
use crate::state::{PartySpec, PureState, StateSet};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateSetDoc {
    pub dims: Vec<usize>,
    pub name: String,
    pub states: Vec<StateDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateDoc {
    pub label: String,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermDoc {
    pub index: Vec<usize>,
    pub amp: String,
}

pub fn to_document(set: &StateSet) -> StateSetDoc {
    StateSetDoc {
        dims: set.spec().dims().to_vec(),
        name: set.name().to_string(),
        states: set
            .states()
            .iter()
            .enumerate()
            .map(|(i, s)| StateDoc {
                label: set.label(i).to_string(),
                terms: s
                    .terms()
                    .map(|(idx, amp)| TermDoc {
                        index: idx.clone(),
                        amp: amp.to_string(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn from_document(doc: &StateSetDoc) -> Result<StateSet> {
    let spec = PartySpec::new(doc.dims.clone())?;
    let mut states = Vec::with_capacity(doc.states.len());
    let mut labels = Vec::with_capacity(doc.states.len());
    for (si, sd) in doc.states.iter().enumerate() {
        let mut terms = Vec::with_capacity(sd.terms.len());
        for t in &sd.terms {
            let amp = t
                .amp
                .parse()
                .map_err(|e| Error::Parse(format!("state {si} ({}): {e}", sd.label)))?;
            terms.push((t.index.clone(), amp));
        }
        states.push(PureState::new(spec.clone(), terms)?);
        labels.push(sd.label.clone());
    }
    Ok(StateSet::new(doc.name.clone(), states)?.with_labels(labels))
}

/// Canonical pretty JSON with a trailing newline.
pub fn write_json(set: &StateSet) -> String {
    let mut s = serde_json::to_string_pretty(&to_document(set)).expect("serializable document");
    s.push('\n');
    s
}

pub fn read_json(text: &str) -> Result<StateSet> {
    let doc: StateSetDoc = serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!(
            "invalid state-set document at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    from_document(&doc)
}

// ---------------------------------------------------------------------------
// rendering

pub fn fmt_c64(c: C64) -> String {
    let re = c.0;
    let im = c.1;
    if im == 0.0 {
        format!("{re:.6}")
    } else if im < 0.0 {
        format!("{re:.6}-{:.6}i", -im)
    } else {
        format!("{re:.6}+{im:.6}i")
    }
}

pub fn render_report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("serializable report");
    s.push('\n');
    s
}

pub fn render_report_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("set: {}\n", report.set));
    for entry in &report.checks {
        match &entry.outcome {
            ReportOutcome::Failed { error } => {
                out.push_str(&format!("check {}: error ({})\n", entry.property, error));
            }
            ReportOutcome::Done {
                verdict,
                evidence,
                scope,
            } => {
                let scope_part = scope
                    .as_ref()
                    .map(|s| format!(" [{s}]"))
                    .unwrap_or_default();
                out.push_str(&format!(
                    "check {}{}: {} ({} ms)\n",
                    entry.property,
                    scope_part,
                    verdict_str(*verdict),
                    entry.ms
                ));
                render_evidence(&mut out, evidence, 1);
            }
        }
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn render_evidence(out: &mut String, evidence: &Evidence, depth: usize) {
    match evidence {
        Evidence::Orthogonality { offending_pair, .. } => {
            indent(out, depth);
            match offending_pair {
                None => out.push_str("all pairwise inner products vanish exactly\n"),
                Some((i, j)) => {
                    out.push_str(&format!("states {i} and {j} are not orthogonal\n"))
                }
            }
        }
        Evidence::Ranks { groups, witness } => {
            for g in groups {
                indent(out, depth);
                out.push_str(&format!(
                    "group {}: rank {} of bound {}{}\n",
                    g.group,
                    g.rank,
                    g.bound,
                    if g.saturated { " (saturated)" } else { "" }
                ));
            }
            if let Some(w) = witness {
                render_witness(out, w, depth);
            }
        }
        Evidence::ProductFree(proof) => {
            indent(out, depth);
            out.push_str(&format!("{}\n", proof_line(proof)));
        }
        Evidence::GesParts { parts } => {
            for c in parts {
                indent(out, depth);
                out.push_str(&format!(
                    "{}: {}\n",
                    c.scope.as_deref().unwrap_or("?"),
                    verdict_str(c.verdict)
                ));
            }
        }
        Evidence::Qces {
            index,
            licensed_pin,
            generator,
            roots,
            solutions,
            gram,
            note,
            ..
        } => {
            indent(out, depth);
            out.push_str(&format!("product index {index}"));
            if let Some(pin) = licensed_pin {
                out.push_str(&format!(" (pinned state {pin})"));
            }
            out.push('\n');
            if let Some(g) = generator {
                indent(out, depth);
                out.push_str(&format!("generator: {g}\n"));
            }
            if !roots.is_empty() {
                indent(out, depth);
                out.push_str("roots:\n");
                for (k, r) in roots.iter().enumerate() {
                    indent(out, depth + 1);
                    out.push_str(&format!("{}  {}\n", k + 1, fmt_c64(*r)));
                }
            }
            if !solutions.is_empty() {
                indent(out, depth);
                out.push_str("coordinates:\n");
                for (k, s) in solutions.iter().enumerate() {
                    indent(out, depth + 1);
                    let coords: Vec<String> =
                        s.coordinates.iter().map(|c| fmt_c64(*c)).collect();
                    out.push_str(&format!("{}  {}\n", k + 1, coords.join("  ")));
                }
            }
            if let Some(g) = gram {
                indent(out, depth);
                out.push_str(&format!(
                    "gram off-diagonal entries all nonzero: {} (min magnitude {:.6})\n",
                    g.all_offdiagonal_nonzero, g.min_offdiagonal_magnitude
                ));
            }
            if let Some(n) = note {
                indent(out, depth);
                out.push_str(&format!("note: {n}\n"));
            }
        }
        Evidence::Ubb {
            complement_dim,
            ges,
            note,
            ..
        } => {
            indent(out, depth);
            out.push_str(&format!("complement dimension {complement_dim}\n"));
            if let Some(g) = ges {
                indent(out, depth);
                out.push_str(&format!("complement ges: {}\n", verdict_str(g.verdict)));
                render_evidence(out, &g.evidence, depth + 1);
            }
            if let Some(n) = note {
                indent(out, depth);
                out.push_str(&format!("note: {n}\n"));
            }
        }
        Evidence::Split { removals } => {
            for r in removals {
                indent(out, depth);
                out.push_str(&format!(
                    "remove {}: span product-free {}, complement basis trivial {}\n",
                    r.removed,
                    !r.span_basis.is_empty(),
                    r.complement_contains_one
                ));
            }
        }
        Evidence::Stability {
            forced_zero,
            membership_ok,
            generator_matches,
            ..
        } => {
            indent(out, depth);
            let names: Vec<String> = forced_zero.iter().map(|v| format!("x{v}")).collect();
            out.push_str(&format!(
                "complement coordinates forced to zero: {} (membership {}, generator reproduced {})\n",
                names.join(", "),
                membership_ok,
                generator_matches
            ));
        }
        Evidence::Distill { bound_met, checks } => {
            indent(out, depth);
            let min_margin = checks
                .iter()
                .map(|c| c.rank as i64 - c.bound as i64)
                .min()
                .unwrap_or(0);
            out.push_str(&format!(
                "{} bimarginal checks, bound met: {bound_met}, minimum margin {min_margin}\n",
                checks.len()
            ));
        }
        Evidence::Opm(w) => render_witness(out, w, depth),
        Evidence::Note { text } => {
            indent(out, depth);
            out.push_str(&format!("note: {text}\n"));
        }
    }
}

fn render_witness(out: &mut String, w: &crate::certify::OpmWitness, depth: usize) {
    indent(out, depth);
    out.push_str(&format!(
        "witness on {}: mu {:.6}, nu {:.6}, eigenvalues {}\n",
        w.group,
        w.mu,
        w.nu,
        w.eigenvalues
            .iter()
            .map(|e| format!("{e:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    for (name, m) in [("M0", &w.m0), ("M1", &w.m1)] {
        indent(out, depth);
        out.push_str(&format!("{name}:\n"));
        for row in m.iter() {
            indent(out, depth + 1);
            let cells: Vec<String> = row.iter().map(|c| fmt_c64(*c)).collect();
            out.push_str(&format!("[{}]\n", cells.join(", ")));
        }
    }
    indent(out, depth);
    out.push_str(&format!(
        "outcome 0 eliminates {:?}, outcome 1 eliminates {:?}\n",
        w.eliminated_outcome0, w.eliminated_outcome1
    ));
}

fn proof_line(proof: &crate::certify::ProductFreeProof) -> String {
    use crate::certify::ProductFreeProof as P;
    match proof {
        P::SingleEntangled { rank } => format!("single state entangled (reshape rank {rank})"),
        P::SingleProduct => "single state is a product".to_string(),
        P::TrivialVariety { basis } => format!(
            "homogeneous basis has pure-power leading terms ({} generators)",
            basis.len()
        ),
        P::PinnedInconsistent { pin, subset, .. } => format!(
            "pinned system at state {pin} is inconsistent; subset: {}",
            proof_line(subset)
        ),
        P::ProductFound { witness, via } => match witness {
            Some(w) => format!(
                "product state found via {via}: [{}]",
                w.iter().map(|c| fmt_c64(*c)).collect::<Vec<_>>().join(", ")
            ),
            None => format!("product state exists ({via})"),
        },
    }
}

/// Table view of a product-index analysis, matching the report layout of the
/// root and coordinate listings.
pub fn render_tables_text(set: &StateSet, analysis: &crate::certify::QcesAnalysis) -> String {
    let mut out = String::new();
    out.push_str(&format!("set: {}\n", set.name()));
    out.push_str(&format!("product index: {}\n", analysis.index));
    if analysis.index == 0 {
        out.push_str("no product states: no table\n");
        return out;
    }
    if let Some(elim) = &analysis.elimination {
        out.push_str(&format!("generator: {}\n", elim.generator));
        if let Some(back) = &elim.back_subst {
            for (v, h) in back {
                out.push_str(&format!("x{v} = {h}\n"));
            }
        }
    }
    if !analysis.roots.is_empty() {
        out.push_str("roots:\n");
        for (k, r) in analysis.roots.iter().enumerate() {
            out.push_str(&format!("  {}  {}\n", k + 1, fmt_c64(*r)));
        }
    }
    if !analysis.solutions.is_empty() {
        out.push_str("solutions:\n");
        for (k, s) in analysis.solutions.iter().enumerate() {
            let coords: Vec<String> = s.coordinates.iter().map(|c| fmt_c64(*c)).collect();
            out.push_str(&format!("  {}  {}\n", k + 1, coords.join("  ")));
        }
    }
    if let Some(g) = &analysis.gram {
        out.push_str(&format!(
            "gram off-diagonal entries all nonzero: {} (min magnitude {:.6})\n",
            g.all_offdiagonal_nonzero, g.min_offdiagonal_magnitude
        ));
        out.push_str("gram matrix:\n");
        for row in &g.matrix {
            let cells: Vec<String> = row.iter().map(|c| fmt_c64(*c)).collect();
            out.push_str(&format!("  [{}]\n", cells.join(", ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family;

    #[test]
    fn round_trip_is_byte_identical() {
        let u = family::ubb();
        let text = write_json(&u);
        let parsed = read_json(&text).unwrap();
        assert_eq!(write_json(&parsed), text);
        for i in 0..u.len() {
            assert_eq!(parsed.state(i), u.state(i));
            assert_eq!(parsed.label(i), u.label(i));
        }
    }

    #[test]
    fn parse_error_carries_position() {
        let err = read_json("{ not json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn amplitude_grammar_is_validated() {
        let text = r#"{ "dims": [2,2,2], "name": "bad", "states": [
            { "label": "s", "terms": [ { "index": [0,0,0], "amp": "1 + i" } ] }
        ] }"#;
        assert!(read_json(text).is_err());
    }

    #[test]
    fn index_bounds_are_validated() {
        let text = r#"{ "dims": [2,2,2], "name": "bad", "states": [
            { "label": "s", "terms": [ { "index": [0,0,2], "amp": "1" } ] }
        ] }"#;
        assert!(read_json(text).is_err());
    }
}
