use std::collections::HashSet;

use super::ground::{GroundProgram, GroundRule};
use super::matcher::{Matcher, RuleMatch, TermIndex};
use super::{EngineConfig, EngineError, Verdict, VerdictKind};
use crate::semlogic::{DerivationLattice, Domains, Mode, Term, WorkingMemory};

/// A pending rule application, computed on the pass-start snapshot.
#[derive(Clone, Debug)]
struct Firing {
    rule: usize,
    m: RuleMatch,
}

/// Forward-chaining engine over one ground program.
///
/// Each pass matches every rule against the working memory as it stood at
/// the start of the pass, then applies all new firings. A given
/// (rule, premise tuple) fires at most once per run.
pub struct Engine {
    config: EngineConfig,
    rules: Vec<GroundRule>,
    domains: Domains,
    wm: WorkingMemory,
    index: TermIndex,
    lattice: DerivationLattice,
    fired: HashSet<(usize, Vec<usize>)>,
    passes: usize,
}

impl Engine {
    pub fn new(program: GroundProgram, config: EngineConfig) -> Result<Self, EngineError> {
        let mut engine = Engine {
            config,
            rules: program.rules,
            domains: program.domains,
            wm: WorkingMemory::new(config.mode),
            index: TermIndex::default(),
            lattice: DerivationLattice::new(),
            fired: HashSet::new(),
            passes: 0,
        };
        for (t, count) in program.facts {
            let ins = engine.wm.insert(t.clone(), count)?;
            if ins.is_new {
                engine.index.add(ins.index, &t);
                engine.lattice.add_axiom(t);
            }
        }
        if engine.wm.len() > config.max_terms {
            return Err(EngineError::Budget { limit: config.max_terms });
        }
        Ok(engine)
    }

    pub fn working_memory(&self) -> &WorkingMemory {
        &self.wm
    }

    pub fn lattice(&self) -> &DerivationLattice {
        &self.lattice
    }

    pub fn domains(&self) -> &Domains {
        &self.domains
    }

    pub fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    fn matcher(&self) -> Matcher<'_> {
        Matcher { wm: &self.wm, index: &self.index, domains: &self.domains }
    }

    /// All matches of rule `i` against the current working memory.
    pub fn matches(&self, rule: usize) -> Vec<RuleMatch> {
        self.matcher().rule_matches(&self.rules[rule])
    }

    /// Whether rule `i` is enabled: in classical mode any match suffices, in
    /// weighted mode the number of distinct premise tuples must reach alpha.
    pub fn threshold_met(&self, rule: usize, matches: usize) -> bool {
        match self.config.mode {
            Mode::Classical => matches > 0,
            Mode::Weighted => matches > 0 && matches as f64 >= self.rules[rule].alpha,
        }
    }

    fn pending(&self) -> Vec<Firing> {
        let mut out = Vec::new();
        for (ri, _) in self.rules.iter().enumerate() {
            let ms = self.matches(ri);
            if !self.threshold_met(ri, ms.len()) {
                continue;
            }
            for m in ms {
                if !self.fired.contains(&(ri, m.premises.clone())) {
                    out.push(Firing { rule: ri, m });
                }
            }
        }
        out
    }

    fn production_count(&self, rule: usize) -> u64 {
        match self.config.mode {
            Mode::Classical => 1,
            Mode::Weighted => self.rules[rule].beta as u64,
        }
    }

    /// Runs one pass and returns the newly derived terms with the
    /// multiplicity added to each.
    pub fn step(&mut self) -> Result<Vec<(Term, u64)>, EngineError> {
        let firings = self.pending();
        let mut derived = Vec::new();
        for f in firings {
            self.fired.insert((f.rule, f.m.premises.clone()));
            let count = self.production_count(f.rule);
            if count == 0 {
                continue;
            }
            let rule = &self.rules[f.rule];
            let rule_id = rule.id.clone();
            let mut conclusions = Vec::new();
            for lit in &rule.rhs {
                conclusions.extend(lit.instantiate(&f.m.bindings, &mut self.domains)?);
            }
            for t in conclusions {
                if self.wm.len() >= self.config.max_terms && !self.wm.contains(&t) {
                    return Err(EngineError::Budget { limit: self.config.max_terms });
                }
                let ins = self.wm.insert(t.clone(), count)?;
                if ins.is_new {
                    self.index.add(ins.index, &t);
                    self.lattice.add_derived(t.clone());
                }
                // a rederivation from later premises would close a cycle; skip its edge
                let _ = self.lattice.add_edge(f.m.premises.clone(), rule_id.clone(), ins.index);
                if ins.changed {
                    derived.push((t, count));
                }
            }
        }
        Ok(derived)
    }

    /// Whether another pass would change the working memory, without
    /// running it.
    fn would_change(&self) -> bool {
        let pending = self.pending();
        match self.config.mode {
            Mode::Weighted => pending.iter().any(|f| self.production_count(f.rule) > 0),
            Mode::Classical => {
                let mut scratch = self.domains.clone();
                pending.iter().any(|f| {
                    self.rules[f.rule].rhs.iter().any(|lit| match lit.instantiate(&f.m.bindings, &mut scratch) {
                        Ok(ts) => ts.iter().any(|t| !self.wm.contains(t)),
                        Err(_) => true,
                    })
                })
            }
        }
    }

    /// The first contradiction in insertion order: the atom `false`, or a
    /// term `not t` whose operand `t` is also present.
    pub fn contradiction(&self) -> Option<(Term, Term)> {
        for (i, e) in self.wm.entries().iter().enumerate() {
            if e.term.is_falsum() {
                let premises = self.lattice.incoming(i).next().map(|d| d.premises.clone()).unwrap_or_default();
                return Some(match (premises.first(), premises.last()) {
                    (Some(&a), Some(&b)) if premises.len() >= 2 => {
                        (self.wm.entries()[a].term.clone(), self.wm.entries()[b].term.clone())
                    }
                    _ => (e.term.clone(), e.term.clone()),
                });
            }
            if let Some(inner) = e.term.negated() {
                if self.wm.contains(inner) {
                    return Some((inner.clone(), e.term.clone()));
                }
            }
        }
        None
    }

    /// Runs passes until saturation, a contradiction (when configured to
    /// halt), or a budget limit.
    pub fn run(&mut self) -> Result<Verdict, EngineError> {
        let halts = self.config.contradiction_halts;
        let mut first_contradiction = self.contradiction();
        if halts && first_contradiction.is_some() {
            return Ok(self.verdict(VerdictKind::Contradiction, first_contradiction));
        }
        let end = loop {
            if self.passes >= self.config.max_passes {
                break if self.would_change() { VerdictKind::BudgetExhausted } else { VerdictKind::Saturated };
            }
            match self.step() {
                Err(EngineError::Budget { .. }) => break VerdictKind::BudgetExhausted,
                Err(e) => return Err(e),
                Ok(derived) if derived.is_empty() => break VerdictKind::Saturated,
                Ok(_) => self.passes += 1,
            }
            if first_contradiction.is_none() {
                first_contradiction = self.contradiction();
                if halts && first_contradiction.is_some() {
                    return Ok(self.verdict(VerdictKind::Contradiction, first_contradiction));
                }
            }
        };
        Ok(match first_contradiction {
            Some(w) => self.verdict(VerdictKind::Contradiction, Some(w)),
            None => self.verdict(end, None),
        })
    }

    fn verdict(&self, kind: VerdictKind, witness: Option<(Term, Term)>) -> Verdict {
        Verdict { kind, witness, passes_used: self.passes }
    }
}
