//! Weighted rules fire only once enough distinct premise tuples match, and
//! stamp their conclusion with a multiplicity.
//!
//! ```text
//! cargo run --example weighted_rules
//! ```

use karb::dsl::parse_program;
use karb::inference::{saturate, EngineConfig};

const SOURCE: &str = "
praise(u1, chat).
praise(u2, chat).
praise(u3, chat).
praise(u1, mail).
complaint(u4, mail).

rule chat_popular : 3 * praise(U, chat) => 2 * popular(chat).
rule mail_popular : 3 * praise(U, mail) => 2 * popular(mail).
rule mail_watch : 1 * complaint(U, mail) => 1 * watch(mail).
";

fn main() {
    let program = parse_program(SOURCE).into_result().expect("program parses");
    for (label, config) in [("classical", EngineConfig::default()), ("weighted", EngineConfig::weighted())] {
        let outcome = saturate(&program, &config).expect("saturates");
        println!("{label}: {:?} after {} passes", outcome.verdict.kind, outcome.verdict.passes_used);
        for e in outcome.wm.entries() {
            println!("  {} x{}", e.term, e.count);
        }
    }
}
