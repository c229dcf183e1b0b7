use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::pattern::{Literal, QuantKind};
use super::term::Symbol;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RuleId(pub Symbol);

impl RuleId {
    pub fn new(s: &str) -> Self {
        RuleId(Symbol::new(s))
    }

    pub fn as_str(&self) -> &str {
        self.0.as_str()
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A weighted generative rule `alpha * lhs => beta * rhs`.
///
/// `alpha` is the number of distinct left-hand instances required before the
/// rule fires in weighted mode; `beta` is the multiplicity each conclusion is
/// produced with. Both are 1 for an unweighted rule.
#[derive(Clone, PartialEq, Debug)]
pub struct Rule {
    pub id: RuleId,
    pub alpha: f64,
    pub lhs: Vec<Literal>,
    pub beta: f64,
    pub rhs: Vec<Literal>,
}

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("rule `{0}` has an empty left-hand side")]
    EmptyLhs(RuleId),
    #[error("rule `{id}` has non-positive alpha {alpha}")]
    BadAlpha { id: RuleId, alpha: f64 },
    #[error("rule `{id}` has negative beta {beta}")]
    BadBeta { id: RuleId, beta: f64 },
    #[error("rule `{id}`: variable `{var}` on the right-hand side is not bound by the left-hand side")]
    UnboundRhsVar { id: RuleId, var: Symbol },
    #[error("rule `{id}`: metavariable `${var}` on the right-hand side is not bound by the left-hand side")]
    UnboundRhsMeta { id: RuleId, var: Symbol },
}

impl Rule {
    pub fn new(id: &str, lhs: Vec<Literal>, rhs: Vec<Literal>) -> Self {
        Rule { id: RuleId::new(id), alpha: 1.0, lhs, beta: 1.0, rhs }
    }

    pub fn weighted(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    /// Variables the left-hand side makes available to the right-hand side.
    /// Universally quantified variables stay local to their literal.
    pub fn lhs_bound_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for lit in &self.lhs {
            let mut vars = BTreeSet::new();
            lit.body.collect_vars(&mut vars);
            let universals: BTreeSet<_> =
                lit.quantifiers.iter().filter(|q| q.kind == QuantKind::Forall).map(|q| q.var.clone()).collect();
            out.extend(vars.into_iter().filter(|v| !universals.contains(v)));
        }
        out
    }

    pub fn lhs_metas(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for lit in &self.lhs {
            lit.body.collect_metas(&mut out);
        }
        out
    }

    pub fn validate(&self) -> Vec<RuleError> {
        let mut errors = Vec::new();
        if self.lhs.is_empty() {
            errors.push(RuleError::EmptyLhs(self.id.clone()));
        }
        if !(self.alpha > 0.0) {
            errors.push(RuleError::BadAlpha { id: self.id.clone(), alpha: self.alpha });
        }
        if !(self.beta >= 0.0) {
            errors.push(RuleError::BadBeta { id: self.id.clone(), beta: self.beta });
        }
        let bound = self.lhs_bound_vars();
        let metas = self.lhs_metas();
        for lit in &self.rhs {
            for var in lit.free_vars() {
                if !bound.contains(&var) {
                    errors.push(RuleError::UnboundRhsVar { id: self.id.clone(), var });
                }
            }
            let mut rhs_metas = BTreeSet::new();
            lit.body.collect_metas(&mut rhs_metas);
            for var in rhs_metas.difference(&metas) {
                errors.push(RuleError::UnboundRhsMeta { id: self.id.clone(), var: var.clone() });
            }
        }
        errors
    }
}

fn write_conj(f: &mut fmt::Formatter<'_>, lits: &[Literal]) -> fmt::Result {
    for (i, l) in lits.iter().enumerate() {
        if i > 0 {
            f.write_str(" and ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alpha != 1.0 {
            write!(f, "{} * ", self.alpha)?;
        }
        write_conj(f, &self.lhs)?;
        f.write_str(" => ")?;
        if self.beta != 1.0 {
            write!(f, "{} * ", self.beta)?;
        }
        write_conj(f, &self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semlogic::Pattern;

    #[test]
    fn rhs_variables_must_be_bound() {
        let r = Rule::new(
            "r",
            vec![Pattern::app("p", vec![Pattern::var("X")]).into()],
            vec![Pattern::app("q", vec![Pattern::var("X"), Pattern::var("Y")]).into()],
        );
        assert_eq!(r.validate(), vec![RuleError::UnboundRhsVar { id: RuleId::new("r"), var: "Y".into() }]);
    }

    #[test]
    fn rhs_existential_binds() {
        let r = Rule::new(
            "r",
            vec![Pattern::atom("p").into()],
            vec![Literal::exists("Y", "D", Pattern::app("q", vec![Pattern::var("Y")]).into())],
        );
        assert!(r.validate().is_empty());
    }

    #[test]
    fn universal_on_lhs_is_local() {
        let r = Rule::new(
            "r",
            vec![Literal::forall("X", "D", Pattern::app("p", vec![Pattern::var("X")]).into())],
            vec![Pattern::app("q", vec![Pattern::var("X")]).into()],
        );
        assert_eq!(r.validate().len(), 1);
    }

    #[test]
    fn weights_validated() {
        let r = Rule::new("w", vec![Pattern::atom("a").into()], vec![Pattern::atom("b").into()]).weighted(0.0, -1.0);
        let errs = r.validate();
        assert!(matches!(errs[0], RuleError::BadAlpha { .. }));
        assert!(matches!(errs[1], RuleError::BadBeta { .. }));
        let empty = Rule::new("e", vec![], vec![]);
        assert_eq!(empty.validate(), vec![RuleError::EmptyLhs(RuleId::new("e"))]);
    }

    #[test]
    fn display_weighted() {
        let r = Rule::new(
            "w",
            vec![Pattern::app("edge", vec![Pattern::var("X"), Pattern::var("Y")]).into()],
            vec![Pattern::app("path", vec![Pattern::var("X"), Pattern::var("Y")]).into()],
        )
        .weighted(2.0, 3.0);
        assert_eq!(r.to_string(), "2 * edge(X, Y) => 3 * path(X, Y)");
    }
}
