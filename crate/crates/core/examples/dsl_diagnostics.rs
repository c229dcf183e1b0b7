//! Parses a program with mistakes in it: every bad statement is reported
//! with its position and the rest still load. The surviving program is then
//! printed back in canonical form.
//!
//! ```text
//! cargo run --example dsl_diagnostics
//! ```

use karb::dsl::{parse_program, print_program};

const SOURCE: &str = "domain Users = {alice, bob}.
forall U in Users . registered(U).
rule notify : registered(U) => => mailed(U).
rule audit : mailed(U) => O(logged(U)).
exists X in Nowhere . lost(X).
rule welcome : registered(U) => mailed(U).
";

fn main() {
    let parsed = parse_program(SOURCE);
    for d in &parsed.diagnostics {
        println!("{}", d.render("inline.karb"));
    }
    println!("\n{} fact(s), {} rule(s) kept:\n", parsed.program.facts.len(), parsed.program.rules.len());
    print!("{}", print_program(&parsed.program));
}
