//! Forward-chaining saturation.
//!
//! [`saturate`] grounds a parsed program, runs the [`Engine`] until nothing
//! new is derived, a contradiction appears or a budget runs out, and returns
//! the working memory, the derivation lattice and a [`Verdict`].

mod engine;
mod explain;
mod export;
mod ground;
mod matcher;

use serde::Serialize;
use thiserror::Error;

use crate::dsl::Program;
use crate::semlogic::{DerivationLattice, DomainError, Domains, MemoryError, Mode, RuleId, SubstError, Term, WorkingMemory};

pub use engine::Engine;
pub use explain::{explain, replay, Explanation, NotFound, ReplayError};
pub use export::{to_dot, to_json};
pub use ground::{ground, Condition, GroundProgram, GroundRule};
pub use matcher::RuleMatch;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub mode: Mode,
    pub max_passes: usize,
    pub max_terms: usize,
    /// Stop at the first pass that produces a contradiction.
    pub contradiction_halts: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { mode: Mode::Classical, max_passes: 100, max_terms: 100_000, contradiction_halts: true }
    }
}

impl EngineConfig {
    pub fn weighted() -> Self {
        EngineConfig { mode: Mode::Weighted, ..Self::default() }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("term budget of {limit} exceeded")]
    Budget { limit: usize },
    #[error("rule {rule}: weighted mode needs a non-negative integral multiplicity, got {beta}")]
    NonIntegralBeta { rule: RuleId, beta: f64 },
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Subst(SubstError),
    #[error(transparent)]
    Memory(#[from] MemoryError),
}

impl From<SubstError> for EngineError {
    fn from(e: SubstError) -> Self {
        match e {
            SubstError::Domain(d) => EngineError::Domain(d),
            other => EngineError::Subst(other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Saturated,
    Contradiction,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// A term and its negation (or `false` twice), present iff the kind is
    /// `Contradiction`.
    pub witness: Option<(Term, Term)>,
    pub passes_used: usize,
}

/// Result of a full saturation run.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub wm: WorkingMemory,
    pub lattice: DerivationLattice,
    pub verdict: Verdict,
    pub domains: Domains,
    pub rules: Vec<GroundRule>,
}

/// Grounds `program` and runs it to a verdict. Running out of passes or
/// terms yields a `BudgetExhausted` verdict rather than an error.
pub fn saturate(program: &Program, config: &EngineConfig) -> Result<Outcome, EngineError> {
    if config.max_passes == 0 || config.max_terms == 0 {
        return Err(EngineError::Config("max_passes and max_terms must be positive"));
    }
    let budget_out = |passes| Verdict { kind: VerdictKind::BudgetExhausted, witness: None, passes_used: passes };
    let grounded = match ground(program, config) {
        Err(EngineError::Budget { .. }) => {
            return Ok(Outcome {
                wm: WorkingMemory::new(config.mode),
                lattice: DerivationLattice::new(),
                verdict: budget_out(0),
                domains: Domains::new(),
                rules: Vec::new(),
            })
        }
        other => other?,
    };
    let rules = grounded.rules.clone();
    let domains = grounded.domains.clone();
    let mut engine = match Engine::new(grounded, *config) {
        Err(EngineError::Budget { .. }) => {
            return Ok(Outcome {
                wm: WorkingMemory::new(config.mode),
                lattice: DerivationLattice::new(),
                verdict: budget_out(0),
                domains,
                rules,
            })
        }
        other => other?,
    };
    let verdict = engine.run()?;
    Ok(Outcome {
        wm: engine.working_memory().clone(),
        lattice: engine.lattice().clone(),
        verdict,
        domains: engine.domains().clone(),
        rules: engine.rules().to_vec(),
    })
}
