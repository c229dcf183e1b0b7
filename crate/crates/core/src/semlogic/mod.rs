//! Terms, patterns, rules, working memory and the derivation lattice.
//!
//! Everything here is a plain value. The modal wrappers `O`, `P` and `not`
//! are uninterpreted constructors: their meaning is supplied by rules.

mod domain;
mod lattice;
mod memory;
mod model;
mod pattern;
mod rule;
mod term;

pub use domain::{DomainError, Domains, FiniteDomain};
pub use lattice::{Derivation, DerivationLattice, LatticeError, Node};
pub use memory::{Entry, Inserted, MemoryError, Mode, WorkingMemory};
pub use model::{ComplianceModel, Concept, Concern, ModelError, Requirement, RuleLink};
pub use pattern::{Bindings, Literal, Pattern, QuantKind, Quantifier, SubstError};
pub use rule::{Rule, RuleError, RuleId};
pub use term::{make_term, Symbol, Term, TermError, Wrapper};
