//! Saturates the e-banking scenario and prints the proof of `false`.
//!
//! ```text
//! cargo run --example example2_contradiction
//! ```

use karb::dsl::parse_program;
use karb::inference::{explain, saturate, EngineConfig};
use karb::semlogic::Term;

fn main() {
    let src = include_str!("programs/example2.karb");
    let program = match parse_program(src).into_result() {
        Ok(p) => p,
        Err(diags) => {
            for d in diags {
                eprintln!("{}", d.render("example2.karb"));
            }
            std::process::exit(1);
        }
    };
    let outcome = saturate(&program, &EngineConfig::default()).expect("grounds within budget");
    let v = &outcome.verdict;
    println!("verdict: {:?} after {} passes", v.kind, v.passes_used);
    if let Some((t, not_t)) = &v.witness {
        println!("witness: {t}  /  {not_t}");
    }

    let proof = explain(&outcome.lattice, &Term::falsum()).expect("false was derived");
    println!("\nproof ({} nodes):", proof.nodes.len());
    for d in &proof.edges {
        let premises: Vec<String> =
            d.premises.iter().map(|&p| outcome.wm.entries()[p].term.to_string()).collect();
        println!("  [{}] {}  ==>  {}", d.rule, premises.join(" , "), outcome.wm.entries()[d.conclusion].term);
    }
    println!("\naxioms used:");
    for leaf in proof.leaves() {
        println!("  {}", outcome.wm.entries()[leaf].term);
    }
}
