use std::fmt::Write;

use serde_json::{json, Value};

use super::{Outcome, VerdictKind};
use crate::semlogic::DerivationLattice;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering of a lattice, or of the part of it listed in `only`.
///
/// Each derivation becomes a small box labelled with its rule id, with arrows
/// from the premises into the box and from the box to the conclusion.
pub fn to_dot(lattice: &DerivationLattice, only: Option<&[usize]>) -> String {
    let keep = |n: usize| only.is_none_or(|ids| ids.contains(&n));
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [fontname=\"Helvetica\"];\n");
    for (i, n) in lattice.nodes().iter().enumerate() {
        if !keep(i) {
            continue;
        }
        let shape = if n.axiom { "box" } else { "ellipse" };
        let color = if n.term.is_falsum() { ", color=red" } else { "" };
        let _ = writeln!(out, "  n{i} [label={}, shape={shape}{color}];", quote(&n.term.to_string()));
    }
    for (e, d) in lattice.edges().iter().enumerate() {
        if !keep(d.conclusion) || !d.premises.iter().all(|&p| keep(p)) {
            continue;
        }
        let _ = writeln!(out, "  d{e} [label={}, shape=plaintext, fontsize=10];", quote(d.rule.as_str()));
        for p in &d.premises {
            let _ = writeln!(out, "  n{p} -> d{e} [arrowhead=none];");
        }
        let _ = writeln!(out, "  d{e} -> n{};", d.conclusion);
    }
    out.push_str("}\n");
    out
}

/// JSON summary of a run: verdict, working memory and derivations. Object
/// keys come out sorted.
pub fn to_json(outcome: &Outcome) -> Value {
    let kind = match outcome.verdict.kind {
        VerdictKind::Saturated => "saturated",
        VerdictKind::Contradiction => "contradiction",
        VerdictKind::BudgetExhausted => "budget_exhausted",
    };
    let witness = outcome.verdict.witness.as_ref().map(|(a, b)| json!([a.to_string(), b.to_string()]));
    let wm: Vec<Value> = outcome
        .wm
        .entries()
        .iter()
        .enumerate()
        .map(|(i, e)| json!({"id": i, "term": e.term.to_string(), "count": e.count}))
        .collect();
    let derivations: Vec<Value> = outcome
        .lattice
        .edges()
        .iter()
        .map(|d| json!({"rule": d.rule.as_str(), "premises": d.premises, "conclusion": d.conclusion}))
        .collect();
    json!({
        "verdict": {"kind": kind, "passes_used": outcome.verdict.passes_used, "witness": witness},
        "working_memory": wm,
        "derivations": derivations,
    })
}
