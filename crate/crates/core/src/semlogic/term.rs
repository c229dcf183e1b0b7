use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An interned-by-value symbol name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(Arc::from(s))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Unary constructors with no built-in logic. `O` is obligation, `P` is
/// permission, `Not` is negation. Their behaviour comes from rules only.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Wrapper {
    Not,
    Obligation,
    Permission,
}

impl Wrapper {
    pub fn keyword(self) -> &'static str {
        match self {
            Wrapper::Not => "not",
            Wrapper::Obligation => "O",
            Wrapper::Permission => "P",
        }
    }
}

/// A ground symbolic construction.
///
/// Terms are compared structurally and never normalized: `not not x` and `x`
/// are different terms, as are `P(P(x))` and `P(x)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    App { head: Symbol, args: Vec<Term> },
    Wrap { op: Wrapper, inner: Box<Term> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("term head must not be empty")]
    EmptyHead,
}

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::App { head: Symbol::new(name), args: Vec::new() }
    }

    pub fn app(head: &str, args: Vec<Term>) -> Term {
        Term::App { head: Symbol::new(head), args }
    }

    pub fn wrap(op: Wrapper, inner: Term) -> Term {
        Term::Wrap { op, inner: Box::new(inner) }
    }

    pub fn not(inner: Term) -> Term {
        Term::wrap(Wrapper::Not, inner)
    }

    pub fn obligation(inner: Term) -> Term {
        Term::wrap(Wrapper::Obligation, inner)
    }

    pub fn permission(inner: Term) -> Term {
        Term::wrap(Wrapper::Permission, inner)
    }

    /// The `false` atom, whose presence in working memory is a contradiction.
    pub fn falsum() -> Term {
        Term::atom("false")
    }

    pub fn is_falsum(&self) -> bool {
        matches!(self, Term::App { head, args } if args.is_empty() && head.as_str() == "false")
    }

    /// Returns the operand if this is `not t`.
    pub fn negated(&self) -> Option<&Term> {
        match self {
            Term::Wrap { op: Wrapper::Not, inner } => Some(inner),
            _ => None,
        }
    }

    /// A bare constant (head with no arguments and no wrappers).
    pub fn as_constant(&self) -> Option<&Symbol> {
        match self {
            Term::App { head, args } if args.is_empty() => Some(head),
            _ => None,
        }
    }

    /// True if `needle` occurs anywhere as a head symbol inside this term.
    pub fn mentions(&self, needle: &str) -> bool {
        match self {
            Term::App { head, args } => head.as_str() == needle || args.iter().any(|a| a.mentions(needle)),
            Term::Wrap { inner, .. } => inner.mentions(needle),
        }
    }

    /// Head symbols applied to exactly one argument, collected recursively.
    pub fn collect_unary_heads(&self, out: &mut std::collections::BTreeSet<Symbol>) {
        match self {
            Term::App { head, args } => {
                if args.len() == 1 {
                    out.insert(head.clone());
                }
                for a in args {
                    a.collect_unary_heads(out);
                }
            }
            Term::Wrap { inner, .. } => inner.collect_unary_heads(out),
        }
    }

    pub fn collect_constants(&self, out: &mut std::collections::BTreeSet<Symbol>) {
        match self {
            Term::App { head, args } => {
                if args.is_empty() {
                    out.insert(head.clone());
                }
                for a in args {
                    a.collect_constants(out);
                }
            }
            Term::Wrap { inner, .. } => inner.collect_constants(out),
        }
    }
}

/// Builds `head(args...)` and applies `wrappers` in list order, each one
/// wrapping the result so far: `[P, Not]` yields `not P(head(..))`.
pub fn make_term(head: &str, args: Vec<Term>, wrappers: &[Wrapper]) -> Result<Term, TermError> {
    if head.is_empty() {
        return Err(TermError::EmptyHead);
    }
    let base = Term::App { head: Symbol::new(head), args };
    Ok(wrappers.iter().fold(base, |t, &w| Term::wrap(w, t)))
}

pub(crate) fn write_args<T: fmt::Display>(f: &mut fmt::Formatter<'_>, args: &[T]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::App { head, args } => {
                write!(f, "{head}")?;
                if !args.is_empty() {
                    write_args(f, args)?;
                }
                Ok(())
            }
            Term::Wrap { op: Wrapper::Not, inner } => write!(f, "not {inner}"),
            Term::Wrap { op, inner } => write!(f, "{}({inner})", op.keyword()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};

    fn hash_of(t: &Term) -> u64 {
        let mut h = DefaultHasher::new();
        t.hash(&mut h);
        h.finish()
    }

    #[test]
    fn obligation_wrapper() {
        let t = make_term("Confidential", vec![Term::atom("m1")], &[Wrapper::Obligation]).unwrap();
        assert_eq!(t, Term::obligation(Term::app("Confidential", vec![Term::atom("m1")])));
        assert_eq!(t.to_string(), "O(Confidential(m1))");
    }

    #[test]
    fn bare_atom() {
        let t = make_term("x", vec![], &[]).unwrap();
        assert_eq!(t, Term::atom("x"));
        assert_eq!(t.to_string(), "x");
    }

    #[test]
    fn wrappers_apply_in_list_order() {
        let t = make_term(
            "Access",
            vec![Term::atom("a1"), Term::atom("m1")],
            &[Wrapper::Permission, Wrapper::Not],
        )
        .unwrap();
        assert_eq!(t.to_string(), "not P(Access(a1, m1))");
        assert!(t.negated().is_some());
    }

    #[test]
    fn empty_head_rejected() {
        assert_eq!(make_term("", vec![], &[]), Err(TermError::EmptyHead));
    }

    #[test]
    fn no_implicit_normalization() {
        let x = Term::atom("x");
        assert_ne!(Term::not(Term::not(x.clone())), x);
        assert_ne!(Term::permission(Term::permission(x.clone())), Term::permission(x));
    }

    #[test]
    fn equal_terms_hash_equally() {
        let a = make_term("p", vec![Term::atom("a")], &[Wrapper::Obligation]).unwrap();
        let b = make_term("p", vec![Term::atom("a")], &[Wrapper::Obligation]).unwrap();
        assert_eq!(a, b);
        assert_eq!(hash_of(&a), hash_of(&b));
    }
}
