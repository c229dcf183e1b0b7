//! Checks cage fences against a compliance requirement and reports which
//! rule of which requirement each violation traces back to.
//!
//! ```text
//! cargo run --example zoo_compliance
//! ```

use karb::dsl::parse_program;
use karb::inference::{explain, saturate, EngineConfig};
use karb::semlogic::Term;

fn main() {
    let program = parse_program(include_str!("programs/zoo.karb")).into_result().expect("bundled program parses");
    let outcome = saturate(&program, &EngineConfig::default()).expect("saturates");
    println!("verdict: {:?} after {} passes", outcome.verdict.kind, outcome.verdict.passes_used);

    let violations: Vec<&Term> = outcome
        .wm
        .terms()
        .filter(|t| matches!(t, Term::App { head, args } if head.as_str() == "violation" && args.len() == 1))
        .collect();
    if violations.is_empty() {
        println!("no violations");
    }
    for v in violations {
        println!("\n{v}");
        let why = explain(&outcome.lattice, v).expect("derived terms are in the lattice");
        for d in &why.edges {
            let req = program.model.requirement_of(&d.rule);
            let link = req.map(|r| format!(" (requirement {}: {})", r.id, r.text)).unwrap_or_default();
            println!("  by {}{link}: {}", d.rule, outcome.wm.entries()[d.conclusion].term);
        }
    }
}
