use std::collections::BTreeSet;

use thiserror::Error;

use super::ground::GroundRule;
use super::matcher::{Matcher, TermIndex};
use crate::semlogic::{Derivation, DerivationLattice, Domains, Mode, Term, WorkingMemory};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("`{0}` is not in the derivation lattice")]
pub struct NotFound(pub Term);

/// The ancestor-closed part of a lattice that justifies one goal term.
///
/// Each derived node contributes the edge that created it, so the result is
/// a tree-shaped proof whose leaves are axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    pub goal: usize,
    /// Node ids in ascending (hence topological) order.
    pub nodes: Vec<usize>,
    pub edges: Vec<Derivation>,
}

impl Explanation {
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().copied().filter(|n| self.edges.iter().all(|e| e.conclusion != *n))
    }
}

pub fn explain(lattice: &DerivationLattice, goal: &Term) -> Result<Explanation, NotFound> {
    let id = lattice.find(goal).ok_or_else(|| NotFound(goal.clone()))?;
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    let mut stack = vec![id];
    while let Some(n) = stack.pop() {
        if !seen.insert(n) {
            continue;
        }
        if let Some(d) = lattice.incoming(n).next() {
            stack.extend(d.premises.iter().copied());
            edges.push(d.clone());
        }
    }
    edges.sort_by_key(|d| d.conclusion);
    Ok(Explanation { goal: id, nodes: seen.into_iter().collect(), edges })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("rule {0} does not match its recorded premises")]
    NoMatch(String),
    #[error("rule {rule} does not conclude `{conclusion}` from its recorded premises")]
    WrongConclusion { rule: String, conclusion: Term },
}

/// Re-runs `rule` on exactly `premises` and checks that `conclusion` is one
/// of its instances. `domains` must be the post-run domains so that skolem
/// constants introduced along the way are known.
pub fn replay(rule: &GroundRule, premises: &[Term], conclusion: &Term, domains: &Domains) -> Result<(), ReplayError> {
    let mut wm = WorkingMemory::new(Mode::Classical);
    let mut positions = Vec::with_capacity(premises.len());
    for t in premises {
        let ins = wm.insert(t.clone(), 1).expect("count 1 is valid in classical mode");
        positions.push(ins.index);
    }
    let index = TermIndex::build(&wm);
    let matcher = Matcher { wm: &wm, index: &index, domains };
    let matches: Vec<_> = matcher.rule_matches(rule).into_iter().filter(|m| m.premises == positions).collect();
    if matches.is_empty() {
        return Err(ReplayError::NoMatch(rule.id.to_string()));
    }
    let concluded = matches.iter().any(|m| {
        rule.rhs.iter().any(|lit| {
            let pattern = lit.quantifiers.iter().fold(lit.body.clone(), |p, q| p.bound_to(&q.var, &q.domain));
            pattern.matches(conclusion, &m.bindings, domains).is_some()
        })
    });
    if concluded {
        Ok(())
    } else {
        Err(ReplayError::WrongConclusion { rule: rule.id.to_string(), conclusion: conclusion.clone() })
    }
}
