use std::collections::BTreeSet;
use std::fmt;

use super::{EngineConfig, EngineError};
use crate::dsl::Program;
use crate::semlogic::{
    Bindings, Domains, Literal, Mode, Pattern, QuantKind, Quantifier, RuleId, Symbol, Term,
};

/// A left-hand-side condition after quantifier lowering.
///
/// Existentials have become domain-bounded variables. A universal stays a
/// `ForAll` node and is checked against the domain's members at match time;
/// its variable and any variables quantified beneath it are local.
#[derive(Clone, Debug, PartialEq)]
pub enum Condition {
    Match(Pattern),
    ForAll { var: Symbol, domain: Symbol, locals: Vec<Symbol>, body: Box<Condition> },
}

impl Condition {
    pub fn lower(lit: &Literal) -> Condition {
        lower(&lit.quantifiers, lit.body.clone())
    }

    /// Pattern used to pick an evaluation order; wildcards go last.
    pub(crate) fn selectivity(&self) -> u8 {
        match self {
            Condition::Match(p) if p.is_wildcard() => 2,
            Condition::Match(_) => 0,
            Condition::ForAll { .. } => 1,
        }
    }
}

fn lower(quants: &[Quantifier], body: Pattern) -> Condition {
    match quants.split_first() {
        None => Condition::Match(body),
        Some((q, rest)) if q.kind == QuantKind::Exists => lower(rest, body.bound_to(&q.var, &q.domain)),
        Some((q, rest)) => {
            let mut locals = vec![q.var.clone()];
            locals.extend(rest.iter().map(|r| r.var.clone()));
            Condition::ForAll {
                var: q.var.clone(),
                domain: q.domain.clone(),
                locals,
                body: Box::new(lower(rest, body)),
            }
        }
    }
}

/// A rule with its metavariables instantiated and its conditions lowered.
#[derive(Clone, Debug)]
pub struct GroundRule {
    pub id: RuleId,
    /// Id of the source rule this schema was expanded from.
    pub origin: RuleId,
    pub alpha: f64,
    pub beta: f64,
    pub conditions: Vec<Condition>,
    pub rhs: Vec<Literal>,
}

impl fmt::Display for GroundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} conditions => {} conclusions)", self.id, self.conditions.len(), self.rhs.len())
    }
}

/// Everything the engine needs to start: ground rules, domains (with any
/// skolem constants added) and the initial facts.
#[derive(Clone, Debug)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    pub domains: Domains,
    pub facts: Vec<(Term, u64)>,
}

/// Expands quantified facts, skolemizes existential facts in source order,
/// and instantiates predicate metavariables over the program's unary heads.
pub fn ground(program: &Program, config: &EngineConfig) -> Result<GroundProgram, EngineError> {
    let mut domains = Domains::new();
    for d in &program.domains {
        domains.declare(d.clone())?;
    }
    domains.reserve(program.constants());

    let mut facts = Vec::new();
    for f in &program.facts {
        for t in f.literal.instantiate(&Bindings::new(), &mut domains)? {
            facts.push((t, f.multiplicity));
            if facts.len() > config.max_terms {
                return Err(EngineError::Budget { limit: config.max_terms });
            }
        }
    }

    let heads: Vec<Symbol> = program.unary_heads().into_iter().collect();
    let mut rules = Vec::new();
    for rule in &program.rules {
        for lit in rule.lhs.iter().chain(&rule.rhs) {
            for q in &lit.quantifiers {
                domains.require(&q.domain)?;
            }
        }
        if config.mode == Mode::Weighted && (rule.beta.fract() != 0.0 || rule.beta < 0.0) {
            return Err(EngineError::NonIntegralBeta { rule: rule.id.clone(), beta: rule.beta });
        }
        let mut metas = BTreeSet::new();
        for lit in rule.lhs.iter().chain(&rule.rhs) {
            lit.body.collect_metas(&mut metas);
        }
        let metas: Vec<Symbol> = metas.into_iter().collect();
        for assignment in assignments(metas.len(), heads.len()) {
            let subst = |lit: &Literal| {
                let body = metas.iter().zip(&assignment).fold(lit.body.clone(), |b, (m, &h)| b.with_meta(m, &heads[h]));
                Literal { quantifiers: lit.quantifiers.clone(), body }
            };
            let id = if metas.is_empty() {
                rule.id.clone()
            } else {
                let parts: Vec<String> =
                    metas.iter().zip(&assignment).map(|(m, &h)| format!("${m}={}", heads[h])).collect();
                RuleId::new(&format!("{}[{}]", rule.id, parts.join(",")))
            };
            rules.push(GroundRule {
                id,
                origin: rule.id.clone(),
                alpha: rule.alpha,
                beta: rule.beta,
                conditions: rule.lhs.iter().map(|l| Condition::lower(&subst(l))).collect(),
                rhs: rule.rhs.iter().map(subst).collect(),
            });
            if rules.len() > config.max_terms {
                return Err(EngineError::Budget { limit: config.max_terms });
            }
        }
    }
    Ok(GroundProgram { rules, domains, facts })
}

/// All `slots`-length tuples over `0..choices`, in lexicographic order.
fn assignments(slots: usize, choices: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..slots {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..choices).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}
