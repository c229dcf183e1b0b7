use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::term::Term;

/// Classical mode keeps set semantics; weighted mode keeps multiplicities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Classical,
    Weighted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub term: Term,
    pub count: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MemoryError {
    #[error("multiplicity must be at least 1")]
    ZeroCount,
    #[error("multiplicity {0} is not allowed in classical mode")]
    ModeViolation(u64),
}

/// Outcome of a single insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inserted {
    pub index: usize,
    pub is_new: bool,
    /// Whether the stored multiplicity changed.
    pub changed: bool,
}

/// The multiset of derived terms. Each distinct term gets a stable insertion
/// index the first time it is seen.
#[derive(Clone, Debug, Default)]
pub struct WorkingMemory {
    mode: Mode,
    entries: Vec<Entry>,
    index: HashMap<Term, usize>,
}

impl WorkingMemory {
    pub fn new(mode: Mode) -> Self {
        WorkingMemory { mode, entries: Vec::new(), index: HashMap::new() }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn insert(&mut self, term: Term, count: u64) -> Result<Inserted, MemoryError> {
        if count == 0 {
            return Err(MemoryError::ZeroCount);
        }
        if self.mode == Mode::Classical && count > 1 {
            return Err(MemoryError::ModeViolation(count));
        }
        if let Some(&i) = self.index.get(&term) {
            let changed = self.mode == Mode::Weighted;
            if changed {
                self.entries[i].count += count;
            }
            return Ok(Inserted { index: i, is_new: false, changed });
        }
        let i = self.entries.len();
        self.index.insert(term.clone(), i);
        self.entries.push(Entry { term, count });
        Ok(Inserted { index: i, is_new: true, changed: true })
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains_key(t)
    }

    pub fn index_of(&self, t: &Term) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn count(&self, t: &Term) -> u64 {
        self.index.get(t).map_or(0, |&i| self.entries[i].count)
    }

    pub fn get(&self, index: usize) -> Option<&Entry> {
        self.entries.get(index)
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.entries.iter().map(|e| &e.term)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_set(&self) -> std::collections::BTreeSet<Term> {
        self.terms().cloned().collect()
    }
}
