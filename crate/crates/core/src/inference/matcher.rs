use std::collections::HashMap;

use super::ground::{Condition, GroundRule};
use crate::semlogic::{Bindings, Domains, Pattern, Symbol, Term, WorkingMemory, Wrapper};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Head(Symbol, usize),
    Wrap(Wrapper),
}

fn term_key(t: &Term) -> Key {
    match t {
        Term::App { head, args } => Key::Head(head.clone(), args.len()),
        Term::Wrap { op, .. } => Key::Wrap(*op),
    }
}

/// Working-memory positions grouped by outermost constructor.
#[derive(Clone, Debug, Default)]
pub(crate) struct TermIndex {
    by_key: HashMap<Key, Vec<usize>>,
}

impl TermIndex {
    pub fn add(&mut self, index: usize, t: &Term) {
        self.by_key.entry(term_key(t)).or_default().push(index);
    }

    pub fn build(wm: &WorkingMemory) -> Self {
        let mut ix = TermIndex::default();
        for (i, t) in wm.terms().enumerate() {
            ix.add(i, t);
        }
        ix
    }
}

/// One way of satisfying a rule's conditions: the bindings, and the
/// working-memory positions of the matched terms in condition order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleMatch {
    pub bindings: Bindings,
    pub premises: Vec<usize>,
}

pub(crate) struct Matcher<'a> {
    pub wm: &'a WorkingMemory,
    pub index: &'a TermIndex,
    pub domains: &'a Domains,
}

impl Matcher<'_> {
    fn candidates(&self, p: &Pattern, b: &Bindings) -> Vec<usize> {
        match p {
            Pattern::Var(v) => match b.term(v.as_str()) {
                Some(t) => self.wm.index_of(t).into_iter().collect(),
                None => (0..self.wm.len()).collect(),
            },
            Pattern::App { head, args } => {
                self.index.by_key.get(&Key::Head(head.clone(), args.len())).cloned().unwrap_or_default()
            }
            Pattern::Wrap { op, .. } => self.index.by_key.get(&Key::Wrap(*op)).cloned().unwrap_or_default(),
            Pattern::Bounded { .. } | Pattern::Meta { .. } => (0..self.wm.len()).collect(),
        }
    }

    /// Alternatives for one condition under `b`: extended bindings plus the
    /// matched positions.
    fn condition(&self, c: &Condition, b: &Bindings) -> Vec<(Bindings, Vec<usize>)> {
        match c {
            Condition::Match(p) => self
                .candidates(p, b)
                .into_iter()
                .filter_map(|i| {
                    let t = &self.wm.get(i)?.term;
                    p.matches(t, b, self.domains).map(|nb| (nb, vec![i]))
                })
                .collect(),
            Condition::ForAll { var, domain, locals, body } => {
                let members = self.domains.get(domain).map(|d| d.members().to_vec()).unwrap_or_default();
                let mut out = Vec::new();
                self.forall(&members, var, locals, body, b.clone(), Vec::new(), &mut out);
                out
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn forall(
        &self,
        members: &[Symbol],
        var: &Symbol,
        locals: &[Symbol],
        body: &Condition,
        b: Bindings,
        acc: Vec<usize>,
        out: &mut Vec<(Bindings, Vec<usize>)>,
    ) {
        let Some((m, rest)) = members.split_first() else {
            out.push((b, acc));
            return;
        };
        let mut inner = b.clone();
        for l in locals {
            inner.unbind(l);
        }
        inner.bind_term(var.clone(), Term::App { head: m.clone(), args: Vec::new() });
        for (nb, premises) in self.condition(body, &inner) {
            let mut outer = nb;
            for l in locals {
                outer.unbind(l);
            }
            // locals shadowed an outer binding: restore it
            for l in locals {
                if let Some(t) = b.term(l.as_str()) {
                    outer.bind_term(l.clone(), t.clone());
                }
            }
            let mut next = acc.clone();
            next.extend(premises);
            self.forall(rest, var, locals, body, outer, next, out);
        }
    }

    /// Every distinct match of the rule, deduplicated by premise tuple, in
    /// deterministic order.
    pub fn rule_matches(&self, rule: &GroundRule) -> Vec<RuleMatch> {
        let mut order: Vec<usize> = (0..rule.conditions.len()).collect();
        order.sort_by_key(|&i| rule.conditions[i].selectivity());
        let mut slots: Vec<Vec<usize>> = vec![Vec::new(); rule.conditions.len()];
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        self.solve(rule, &order, 0, Bindings::new(), &mut slots, &mut out, &mut seen);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        rule: &GroundRule,
        order: &[usize],
        k: usize,
        b: Bindings,
        slots: &mut Vec<Vec<usize>>,
        out: &mut Vec<RuleMatch>,
        seen: &mut std::collections::HashSet<Vec<usize>>,
    ) {
        if k == order.len() {
            let premises: Vec<usize> = slots.iter().flatten().copied().collect();
            if seen.insert(premises.clone()) {
                out.push(RuleMatch { bindings: b, premises });
            }
            return;
        }
        let ci = order[k];
        for (nb, premises) in self.condition(&rule.conditions[ci], &b) {
            slots[ci] = premises;
            self.solve(rule, order, k + 1, nb, slots, out, seen);
        }
        slots[ci].clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_program;
    use crate::inference::{ground, EngineConfig};
    use crate::semlogic::Mode;

    fn setup(src: &str, facts: &[Term]) -> (Vec<GroundRule>, Domains, WorkingMemory) {
        let g = ground(&parse_program(src).into_result().unwrap(), &EngineConfig::default()).unwrap();
        let mut wm = WorkingMemory::new(Mode::Classical);
        for (t, _) in &g.facts {
            wm.insert(t.clone(), 1).unwrap();
        }
        for t in facts {
            wm.insert(t.clone(), 1).unwrap();
        }
        (g.rules, g.domains, wm)
    }

    #[test]
    fn join_shares_variables() {
        let (rules, domains, wm) = setup("p(a). p(b). implies(p(a), q(a)).\nX and implies(X, Y) => Y.", &[]);
        let index = TermIndex::build(&wm);
        let m = Matcher { wm: &wm, index: &index, domains: &domains };
        let ms = m.rule_matches(&rules[0]);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].premises, vec![0, 2]);
        assert_eq!(ms[0].bindings.term("Y").unwrap().to_string(), "q(a)");
    }

    #[test]
    fn forall_condition_requires_every_member() {
        let src = "domain D = {a, b}.\nq(a).\nforall X in D . q(X) => all_q.";
        let (rules, domains, wm) = setup(src, &[]);
        let index = TermIndex::build(&wm);
        let m = Matcher { wm: &wm, index: &index, domains: &domains };
        assert!(m.rule_matches(&rules[0]).is_empty());

        let (rules, domains, wm) = setup(src, &[Term::app("q", vec![Term::atom("b")])]);
        let index = TermIndex::build(&wm);
        let m = Matcher { wm: &wm, index: &index, domains: &domains };
        let ms = m.rule_matches(&rules[0]);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].premises, vec![0, 1]);
        assert!(ms[0].bindings.term("X").is_none());
    }

    #[test]
    fn existential_condition_ranges_over_domain() {
        let src = "domain D = {a}.\nq(a). q(b).\nexists X in D . q(X) => hit(X).";
        let (rules, domains, wm) = setup(src, &[]);
        let index = TermIndex::build(&wm);
        let m = Matcher { wm: &wm, index: &index, domains: &domains };
        let ms = m.rule_matches(&rules[0]);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].bindings.term("X"), Some(&Term::atom("a")));
    }
}
