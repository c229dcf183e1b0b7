use std::collections::BTreeSet;

use thiserror::Error;

use super::rule::{Rule, RuleId};
use super::term::Symbol;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Concern {
    pub name: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Requirement {
    pub id: Symbol,
    pub concern: Symbol,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleLink {
    pub rule: RuleId,
    pub requirement: Symbol,
}

/// A compliance concept and the symbol that stands for it in rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Concept {
    pub name: String,
    pub symbol: Symbol,
}

/// Concern → requirement → rule chain, with concepts mapped to symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComplianceModel {
    pub concerns: Vec<Concern>,
    pub requirements: Vec<Requirement>,
    pub rules: Vec<RuleLink>,
    pub concepts: Vec<Concept>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("concern `{0}` declared twice")]
    DuplicateConcern(Symbol),
    #[error("requirement `{0}` declared twice")]
    DuplicateRequirement(Symbol),
    #[error("requirement `{requirement}` refers to unknown concern `{concern}`")]
    UnknownConcern { requirement: Symbol, concern: Symbol },
    #[error("rule `{rule}` refers to unknown requirement `{requirement}`")]
    UnknownRequirement { rule: RuleId, requirement: Symbol },
    #[error("rule `{0}` is linked to more than one requirement")]
    RuleLinkedTwice(RuleId),
    #[error("linked rule `{0}` does not exist")]
    UnknownRule(RuleId),
    #[error("concept \"{0}\" is mapped to more than one symbol")]
    DuplicateConcept(String),
}

impl ComplianceModel {
    pub fn is_empty(&self) -> bool {
        self.concerns.is_empty() && self.requirements.is_empty() && self.rules.is_empty() && self.concepts.is_empty()
    }

    pub fn requirement_of(&self, rule: &RuleId) -> Option<&Requirement> {
        let link = self.rules.iter().find(|l| &l.rule == rule)?;
        self.requirements.iter().find(|r| r.id == link.requirement)
    }

    pub fn symbol_for(&self, concept: &str) -> Option<&Symbol> {
        self.concepts.iter().find(|c| c.name == concept).map(|c| &c.symbol)
    }

    pub fn validate(&self, rules: &[Rule]) -> Vec<ModelError> {
        let mut errors = Vec::new();
        let mut concerns = BTreeSet::new();
        for c in &self.concerns {
            if !concerns.insert(&c.name) {
                errors.push(ModelError::DuplicateConcern(c.name.clone()));
            }
        }
        let mut reqs = BTreeSet::new();
        for r in &self.requirements {
            if !reqs.insert(&r.id) {
                errors.push(ModelError::DuplicateRequirement(r.id.clone()));
            }
            if !concerns.contains(&r.concern) {
                errors.push(ModelError::UnknownConcern { requirement: r.id.clone(), concern: r.concern.clone() });
            }
        }
        let mut linked = BTreeSet::new();
        for l in &self.rules {
            if !reqs.contains(&l.requirement) {
                errors.push(ModelError::UnknownRequirement { rule: l.rule.clone(), requirement: l.requirement.clone() });
            }
            if !linked.insert(&l.rule) {
                errors.push(ModelError::RuleLinkedTwice(l.rule.clone()));
            }
            if !rules.iter().any(|r| r.id == l.rule) {
                errors.push(ModelError::UnknownRule(l.rule.clone()));
            }
        }
        let mut names = BTreeSet::new();
        for c in &self.concepts {
            if !names.insert(&c.name) {
                errors.push(ModelError::DuplicateConcept(c.name.clone()));
            }
        }
        errors
    }
}
