use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::term::Symbol;

/// A named, finite, ordered set of constants that quantifiers range over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDomain {
    pub name: Symbol,
    members: Vec<Symbol>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("domain `{domain}` lists `{member}` more than once")]
    DuplicateMember { domain: Symbol, member: Symbol },
    #[error("domain `{0}` is not declared")]
    Undeclared(Symbol),
    #[error("domain `{0}` is declared twice")]
    Redeclared(Symbol),
}

impl FiniteDomain {
    pub fn new(name: impl Into<Symbol>, members: Vec<Symbol>) -> Result<Self, DomainError> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for m in &members {
            if !seen.insert(m) {
                return Err(DomainError::DuplicateMember { domain: name, member: m.clone() });
            }
        }
        Ok(FiniteDomain { name, members })
    }

    pub fn members(&self) -> &[Symbol] {
        &self.members
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.members.contains(s)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn push(&mut self, s: Symbol) {
        if !self.contains(&s) {
            self.members.push(s);
        }
    }
}

/// All declared domains of a program plus the skolem counter.
///
/// Skolem constants are named `sk_1`, `sk_2`, ... in creation order,
/// skipping any name already used as a constant.
#[derive(Clone, Debug, Default)]
pub struct Domains {
    by_name: BTreeMap<Symbol, FiniteDomain>,
    used: BTreeSet<Symbol>,
    next_skolem: usize,
}

impl Domains {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, domain: FiniteDomain) -> Result<(), DomainError> {
        if self.by_name.contains_key(&domain.name) {
            return Err(DomainError::Redeclared(domain.name));
        }
        self.used.extend(domain.members.iter().cloned());
        self.by_name.insert(domain.name.clone(), domain);
        Ok(())
    }

    pub fn get(&self, name: &Symbol) -> Option<&FiniteDomain> {
        self.by_name.get(name)
    }

    pub fn require(&self, name: &Symbol) -> Result<&FiniteDomain, DomainError> {
        self.get(name).ok_or_else(|| DomainError::Undeclared(name.clone()))
    }

    pub fn is_member(&self, domain: &Symbol, s: &Symbol) -> bool {
        self.get(domain).is_some_and(|d| d.contains(s))
    }

    /// Marks constants as taken so skolem names never collide with them.
    pub fn reserve<I: IntoIterator<Item = Symbol>>(&mut self, names: I) {
        self.used.extend(names);
    }

    /// Creates a fresh skolem constant and appends it to `domain`.
    pub fn fresh_skolem(&mut self, domain: &Symbol) -> Result<Symbol, DomainError> {
        if !self.by_name.contains_key(domain) {
            return Err(DomainError::Undeclared(domain.clone()));
        }
        let name = loop {
            self.next_skolem += 1;
            let candidate = Symbol::from(format!("sk_{}", self.next_skolem));
            if !self.used.contains(&candidate) {
                break candidate;
            }
        };
        self.used.insert(name.clone());
        self.by_name.get_mut(domain).expect("checked above").push(name.clone());
        Ok(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FiniteDomain> {
        self.by_name.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_member_rejected() {
        let err = FiniteDomain::new("D", vec!["a".into(), "a".into()]).unwrap_err();
        assert!(matches!(err, DomainError::DuplicateMember { .. }));
    }

    #[test]
    fn skolems_are_sequential_and_appended() {
        let mut ds = Domains::new();
        ds.declare(FiniteDomain::new("SMS", vec![]).unwrap()).unwrap();
        ds.declare(FiniteDomain::new("Malwares", vec![]).unwrap()).unwrap();
        let a = ds.fresh_skolem(&"SMS".into()).unwrap();
        let b = ds.fresh_skolem(&"Malwares".into()).unwrap();
        assert_eq!(a.as_str(), "sk_1");
        assert_eq!(b.as_str(), "sk_2");
        assert!(ds.is_member(&"SMS".into(), &a));
        assert!(!ds.is_member(&"SMS".into(), &b));
    }

    #[test]
    fn skolem_skips_reserved_names() {
        let mut ds = Domains::new();
        ds.declare(FiniteDomain::new("D", vec!["sk_1".into()]).unwrap()).unwrap();
        assert_eq!(ds.fresh_skolem(&"D".into()).unwrap().as_str(), "sk_2");
    }

    #[test]
    fn undeclared_domain() {
        let mut ds = Domains::new();
        assert_eq!(ds.fresh_skolem(&"X".into()), Err(DomainError::Undeclared("X".into())));
    }
}
