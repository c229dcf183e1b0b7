use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::domain::{DomainError, Domains};
use super::term::{write_args, Symbol, Term, Wrapper};

/// Variable and metavariable assignments produced by matching.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bindings {
    terms: BTreeMap<Symbol, Term>,
    heads: BTreeMap<Symbol, Symbol>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(&self, var: &str) -> Option<&Term> {
        self.terms.get(&Symbol::new(var))
    }

    pub fn head(&self, meta: &str) -> Option<&Symbol> {
        self.heads.get(&Symbol::new(meta))
    }

    pub fn bind_term(&mut self, var: Symbol, t: Term) -> bool {
        match self.terms.get(&var) {
            Some(existing) => *existing == t,
            None => {
                self.terms.insert(var, t);
                true
            }
        }
    }

    pub fn bind_head(&mut self, meta: Symbol, head: Symbol) -> bool {
        match self.heads.get(&meta) {
            Some(existing) => *existing == head,
            None => {
                self.heads.insert(meta, head);
                true
            }
        }
    }

    pub fn is_bound(&self, var: &Symbol) -> bool {
        self.terms.contains_key(var)
    }

    pub fn unbind(&mut self, var: &Symbol) {
        self.terms.remove(var);
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.heads.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len() + self.heads.len()
    }
}

/// The shape of a term with holes.
///
/// `Var` matches any term. `Bounded` matches only constants that are members
/// of the named domain. `Meta` matches any unary application and binds its
/// head symbol.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Pattern {
    Var(Symbol),
    Bounded { var: Symbol, domain: Symbol },
    App { head: Symbol, args: Vec<Pattern> },
    Meta { var: Symbol, arg: Box<Pattern> },
    Wrap { op: Wrapper, inner: Box<Pattern> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubstError {
    #[error("variable `{0}` is unbound")]
    Unbound(Symbol),
    #[error("metavariable `${0}` is unbound")]
    UnboundMeta(Symbol),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

impl Pattern {
    pub fn var(name: &str) -> Pattern {
        Pattern::Var(Symbol::new(name))
    }

    pub fn app(head: &str, args: Vec<Pattern>) -> Pattern {
        Pattern::App { head: Symbol::new(head), args }
    }

    pub fn atom(name: &str) -> Pattern {
        Pattern::app(name, Vec::new())
    }

    pub fn meta(var: &str, arg: Pattern) -> Pattern {
        Pattern::Meta { var: Symbol::new(var), arg: Box::new(arg) }
    }

    pub fn wrap(op: Wrapper, inner: Pattern) -> Pattern {
        Pattern::Wrap { op, inner: Box::new(inner) }
    }

    pub fn not(inner: Pattern) -> Pattern {
        Pattern::wrap(Wrapper::Not, inner)
    }

    /// Lifts a ground term into the equivalent variable-free pattern.
    pub fn from_term(t: &Term) -> Pattern {
        match t {
            Term::App { head, args } => {
                Pattern::App { head: head.clone(), args: args.iter().map(Pattern::from_term).collect() }
            }
            Term::Wrap { op, inner } => Pattern::Wrap { op: *op, inner: Box::new(Pattern::from_term(inner)) },
        }
    }

    /// Extends `bindings` so that this pattern equals `term`, or returns `None`.
    pub fn matches(&self, term: &Term, bindings: &Bindings, domains: &Domains) -> Option<Bindings> {
        let mut b = bindings.clone();
        self.match_into(term, &mut b, domains).then_some(b)
    }

    /// In-place variant of [`Pattern::matches`]. On failure `bindings` may be
    /// partially extended; callers work on a scratch copy.
    pub fn match_into(&self, term: &Term, bindings: &mut Bindings, domains: &Domains) -> bool {
        match (self, term) {
            (Pattern::Var(v), t) => bindings.bind_term(v.clone(), t.clone()),
            (Pattern::Bounded { var, domain }, t) => match t.as_constant() {
                Some(c) if domains.is_member(domain, c) => bindings.bind_term(var.clone(), t.clone()),
                _ => false,
            },
            (Pattern::App { head: ph, args: pa }, Term::App { head: th, args: ta }) => {
                ph == th
                    && pa.len() == ta.len()
                    && pa.iter().zip(ta).all(|(p, t)| p.match_into(t, bindings, domains))
            }
            (Pattern::Meta { var, arg }, Term::App { head, args }) => {
                args.len() == 1
                    && bindings.bind_head(var.clone(), head.clone())
                    && arg.match_into(&args[0], bindings, domains)
            }
            (Pattern::Wrap { op: po, inner: pi }, Term::Wrap { op: to, inner: ti }) => {
                po == to && pi.match_into(ti, bindings, domains)
            }
            _ => false,
        }
    }

    pub fn substitute(&self, bindings: &Bindings) -> Result<Term, SubstError> {
        Ok(match self {
            Pattern::Var(v) | Pattern::Bounded { var: v, .. } => {
                bindings.terms.get(v).cloned().ok_or_else(|| SubstError::Unbound(v.clone()))?
            }
            Pattern::App { head, args } => Term::App {
                head: head.clone(),
                args: args.iter().map(|a| a.substitute(bindings)).collect::<Result<_, _>>()?,
            },
            Pattern::Meta { var, arg } => {
                let head = bindings.heads.get(var).cloned().ok_or_else(|| SubstError::UnboundMeta(var.clone()))?;
                Term::App { head, args: vec![arg.substitute(bindings)?] }
            }
            Pattern::Wrap { op, inner } => Term::Wrap { op: *op, inner: Box::new(inner.substitute(bindings)?) },
        })
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Pattern::Var(v) | Pattern::Bounded { var: v, .. } => {
                out.insert(v.clone());
            }
            Pattern::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            Pattern::Meta { arg, .. } => arg.collect_vars(out),
            Pattern::Wrap { inner, .. } => inner.collect_vars(out),
        }
    }

    pub fn collect_metas(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Pattern::Var(_) | Pattern::Bounded { .. } => {}
            Pattern::App { args, .. } => args.iter().for_each(|a| a.collect_metas(out)),
            Pattern::Meta { var, arg } => {
                out.insert(var.clone());
                arg.collect_metas(out);
            }
            Pattern::Wrap { inner, .. } => inner.collect_metas(out),
        }
    }

    pub fn collect_unary_heads(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Pattern::Var(_) | Pattern::Bounded { .. } => {}
            Pattern::App { head, args } => {
                if args.len() == 1 {
                    out.insert(head.clone());
                }
                args.iter().for_each(|a| a.collect_unary_heads(out));
            }
            Pattern::Meta { arg, .. } => arg.collect_unary_heads(out),
            Pattern::Wrap { inner, .. } => inner.collect_unary_heads(out),
        }
    }

    pub fn collect_constants(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Pattern::Var(_) | Pattern::Bounded { .. } => {}
            Pattern::App { head, args } => {
                if args.is_empty() {
                    out.insert(head.clone());
                }
                args.iter().for_each(|a| a.collect_constants(out));
            }
            Pattern::Meta { arg, .. } => arg.collect_constants(out),
            Pattern::Wrap { inner, .. } => inner.collect_constants(out),
        }
    }

    /// Restricts every occurrence of `var` to members of `domain`.
    pub fn bound_to(&self, var: &Symbol, domain: &Symbol) -> Pattern {
        self.map_leaves(&|p| match p {
            Pattern::Var(v) if v == var => Some(Pattern::Bounded { var: v.clone(), domain: domain.clone() }),
            _ => None,
        })
    }

    /// Replaces the metavariable `meta` by a concrete head symbol.
    pub fn with_meta(&self, meta: &Symbol, head: &Symbol) -> Pattern {
        match self {
            Pattern::Meta { var, arg } if var == meta => {
                Pattern::App { head: head.clone(), args: vec![arg.with_meta(meta, head)] }
            }
            Pattern::Meta { var, arg } => Pattern::Meta { var: var.clone(), arg: Box::new(arg.with_meta(meta, head)) },
            Pattern::App { head: h, args } => {
                Pattern::App { head: h.clone(), args: args.iter().map(|a| a.with_meta(meta, head)).collect() }
            }
            Pattern::Wrap { op, inner } => Pattern::Wrap { op: *op, inner: Box::new(inner.with_meta(meta, head)) },
            leaf => leaf.clone(),
        }
    }

    fn map_leaves(&self, f: &dyn Fn(&Pattern) -> Option<Pattern>) -> Pattern {
        if let Some(p) = f(self) {
            return p;
        }
        match self {
            Pattern::App { head, args } => {
                Pattern::App { head: head.clone(), args: args.iter().map(|a| a.map_leaves(f)).collect() }
            }
            Pattern::Meta { var, arg } => Pattern::Meta { var: var.clone(), arg: Box::new(arg.map_leaves(f)) },
            Pattern::Wrap { op, inner } => Pattern::Wrap { op: *op, inner: Box::new(inner.map_leaves(f)) },
            leaf => leaf.clone(),
        }
    }

    /// True for a bare variable, which matches everything.
    pub fn is_wildcard(&self) -> bool {
        matches!(self, Pattern::Var(_))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Var(v) | Pattern::Bounded { var: v, .. } => write!(f, "{v}"),
            Pattern::App { head, args } => {
                write!(f, "{head}")?;
                if !args.is_empty() {
                    write_args(f, args)?;
                }
                Ok(())
            }
            Pattern::Meta { var, arg } => write!(f, "${var}({arg})"),
            Pattern::Wrap { op: Wrapper::Not, inner } => write!(f, "not {inner}"),
            Pattern::Wrap { op, inner } => write!(f, "{}({inner})", op.keyword()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum QuantKind {
    Exists,
    Forall,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Quantifier {
    pub kind: QuantKind,
    pub var: Symbol,
    pub domain: Symbol,
}

/// A pattern under a (possibly empty) prefix of finite-domain quantifiers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Literal {
    pub quantifiers: Vec<Quantifier>,
    pub body: Pattern,
}

impl From<Pattern> for Literal {
    fn from(body: Pattern) -> Self {
        Literal { quantifiers: Vec::new(), body }
    }
}

impl Literal {
    pub fn new(quantifiers: Vec<Quantifier>, body: Pattern) -> Self {
        Literal { quantifiers, body }
    }

    pub fn exists(var: &str, domain: &str, inner: Literal) -> Literal {
        Self::quantified(QuantKind::Exists, var, domain, inner)
    }

    pub fn forall(var: &str, domain: &str, inner: Literal) -> Literal {
        Self::quantified(QuantKind::Forall, var, domain, inner)
    }

    fn quantified(kind: QuantKind, var: &str, domain: &str, inner: Literal) -> Literal {
        let mut quantifiers = vec![Quantifier { kind, var: var.into(), domain: domain.into() }];
        quantifiers.extend(inner.quantifiers);
        Literal { quantifiers, body: inner.body }
    }

    /// Variables occurring in the body that no quantifier of this literal binds.
    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut vars = BTreeSet::new();
        self.body.collect_vars(&mut vars);
        for q in &self.quantifiers {
            vars.remove(&q.var);
        }
        vars
    }

    /// Grounds the literal as a conclusion or fact.
    ///
    /// Universals expand over the current members of their domain.
    /// Existentials reuse an existing binding of their variable when there is
    /// one; otherwise a fresh skolem constant is created and appended to the
    /// domain.
    pub fn instantiate(&self, bindings: &Bindings, domains: &mut Domains) -> Result<Vec<Term>, SubstError> {
        let mut out = Vec::new();
        let mut scratch = bindings.clone();
        self.instantiate_from(0, &mut scratch, domains, &mut out)?;
        Ok(out)
    }

    fn instantiate_from(
        &self,
        depth: usize,
        bindings: &mut Bindings,
        domains: &mut Domains,
        out: &mut Vec<Term>,
    ) -> Result<(), SubstError> {
        let Some(q) = self.quantifiers.get(depth) else {
            out.push(self.body.substitute(bindings)?);
            return Ok(());
        };
        match q.kind {
            QuantKind::Forall => {
                let members = domains.require(&q.domain)?.members().to_vec();
                let shadowed = bindings.terms.remove(&q.var);
                for m in members {
                    bindings.terms.insert(q.var.clone(), Term::App { head: m, args: Vec::new() });
                    self.instantiate_from(depth + 1, bindings, domains, out)?;
                }
                bindings.terms.remove(&q.var);
                if let Some(prev) = shadowed {
                    bindings.terms.insert(q.var.clone(), prev);
                }
                Ok(())
            }
            QuantKind::Exists if bindings.is_bound(&q.var) => {
                domains.require(&q.domain)?;
                self.instantiate_from(depth + 1, bindings, domains, out)
            }
            QuantKind::Exists => {
                let sk = domains.fresh_skolem(&q.domain)?;
                bindings.terms.insert(q.var.clone(), Term::App { head: sk, args: Vec::new() });
                let r = self.instantiate_from(depth + 1, bindings, domains, out);
                bindings.terms.remove(&q.var);
                r
            }
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.quantifiers {
            let kw = match q.kind {
                QuantKind::Exists => "exists",
                QuantKind::Forall => "forall",
            };
            write!(f, "{kw} {} in {} . ", q.var, q.domain)?;
        }
        write!(f, "{}", self.body)
    }
}
