//! Text format for rule programs (`.karb` files).
//!
//! ```text
//! statement := domain | fact | rule | model-statement ; each ends with "."
//! domain    := "domain" NAME "=" "{" [NAME ("," NAME)*] "}"
//! fact      := [INT "*"] quantterm
//! rule      := ["rule" NAME ["for" NAME] ":"] [NUM "*"] conj "=>" [NUM "*"] conj
//! conj      := quantterm ("and" quantterm)*
//! quantterm := ("exists"|"forall") VAR "in" NAME "." quantterm | term
//! term      := "not" term | "O" "(" term ")" | "P" "(" term ")"
//!            | VAR | NAME ["(" term ("," term)* ")"] | METAVAR "(" term ")"
//! model-statement := "concern" NAME
//!            | "requirement" NAME "of" NAME STRING
//!            | "concept" STRING "as" NAME
//! ```
//!
//! Variables are ALL-CAPS identifiers, metavariables are `$` followed by an
//! identifier, and `#` starts a comment that runs to the end of the line.
//! Implications that appear inside terms are written `implies(a, b)`.

mod diagnostic;
mod lexer;
mod parser;
mod printer;

pub use diagnostic::{ParseDiagnostic, Severity};
pub use parser::parse_program;
pub use printer::print_program;

use std::collections::BTreeSet;

use crate::semlogic::{ComplianceModel, FiniteDomain, Literal, Rule, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct Fact {
    pub literal: Literal,
    pub multiplicity: u64,
}

/// A parsed rule program: the symbols to start from and the rules on them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub domains: Vec<FiniteDomain>,
    pub facts: Vec<Fact>,
    pub rules: Vec<Rule>,
    pub model: ComplianceModel,
}

impl Program {
    /// Head symbols that are applied to exactly one argument anywhere in the
    /// program. Predicate metavariables range over this set.
    pub fn unary_heads(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for f in &self.facts {
            f.literal.body.collect_unary_heads(&mut out);
        }
        for r in &self.rules {
            for l in r.lhs.iter().chain(&r.rhs) {
                l.body.collect_unary_heads(&mut out);
            }
        }
        out
    }

    pub fn constants(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for f in &self.facts {
            f.literal.body.collect_constants(&mut out);
        }
        for r in &self.rules {
            for l in r.lhs.iter().chain(&r.rhs) {
                l.body.collect_constants(&mut out);
            }
        }
        out
    }
}

/// Result of parsing: the statements that parsed cleanly plus every
/// diagnostic, sorted by position.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub program: Program,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl Parsed {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn into_result(self) -> Result<Program, Vec<ParseDiagnostic>> {
        if self.has_errors() {
            Err(self.diagnostics)
        } else {
            Ok(self.program)
        }
    }
}
