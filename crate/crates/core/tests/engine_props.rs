use std::collections::BTreeSet;

use karb::dsl::{parse_program, Program};
use karb::inference::{explain, ground, replay, saturate, Engine, EngineConfig, NotFound, Outcome, VerdictKind};
use karb::semlogic::{Mode, Term};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BUNDLED: [(&str, &str); 3] = [
    ("example2.karb", include_str!("../examples/programs/example2.karb")),
    ("zoo.karb", include_str!("../examples/programs/zoo.karb")),
    ("quality.karb", include_str!("../examples/programs/quality.karb")),
];

fn program(src: &str) -> Program {
    parse_program(src).into_result().unwrap_or_else(|d| panic!("{d:?}"))
}

fn replay_all(o: &Outcome) -> Result<usize, String> {
    for d in o.lattice.edges() {
        let rule = o.rules.iter().find(|r| r.id == d.rule).ok_or(format!("no rule {}", d.rule))?;
        let premises: Vec<Term> = d.premises.iter().map(|&p| o.wm.entries()[p].term.clone()).collect();
        let conclusion = &o.wm.entries()[d.conclusion].term;
        replay(rule, &premises, conclusion, &o.domains).map_err(|e| e.to_string())?;
    }
    Ok(o.lattice.edges().len())
}

fn shuffled(p: &Program, seed: u64) -> Program {
    let mut q = p.clone();
    q.rules.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    q
}

fn random_program() -> impl Strategy<Value = String> {
    let stmt = prop_oneof![
        (0..4u8, 0..4u8).prop_map(|(a, b)| format!("e(c{a}, c{b}).")),
        (0..4u8).prop_map(|a| format!("v(c{a}).")),
        (0..4u8).prop_map(|a| format!("O(ok(c{a})).")),
        Just("e(X, Y) => path(X, Y).".to_string()),
        Just("path(X, Y) and e(Y, Z) => path(X, Z).".to_string()),
        Just("v(X) and path(X, Y) => v(Y).".to_string()),
        Just("O(X) => not P(not X).".to_string()),
        Just("forall X in D . v(X) => all_seen.".to_string()),
        Just("exists X in D . v(X) => some_seen.".to_string()),
        Just("path(X, X) => not ok(X).".to_string()),
        Just("not ok(X) => P(not ok(X)).".to_string()),
        Just("X and not P(X) => false.".to_string()),
    ];
    prop::collection::vec(stmt, 1..14).prop_map(|s| format!("domain D = {{c0, c1}}.\n{}\n", s.join("\n")))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn saturation_ignores_rule_order(src in random_program(), seed in any::<u64>()) {
        let p = program(&src);
        let cfg = EngineConfig { max_passes: 30, ..EngineConfig::default() };
        let base = saturate(&p, &cfg).unwrap();
        let other = saturate(&shuffled(&p, seed), &cfg).unwrap();
        prop_assert_eq!(base.wm.to_set(), other.wm.to_set());
        prop_assert_eq!(base.verdict.kind, other.verdict.kind);
        prop_assert_eq!(base.verdict.passes_used, other.verdict.passes_used);
    }

    #[test]
    fn passes_only_add_terms(src in random_program()) {
        let p = program(&src);
        let cfg = EngineConfig::default();
        let mut e = Engine::new(ground(&p, &cfg).unwrap(), cfg).unwrap();
        let mut before = e.working_memory().to_set();
        for _ in 0..10 {
            let derived = e.step().unwrap();
            let after = e.working_memory().to_set();
            prop_assert!(before.is_subset(&after));
            prop_assert!(e.lattice().check().is_ok());
            prop_assert!(e.lattice().topological_order().is_some());
            if derived.is_empty() {
                break;
            }
            before = after;
        }
    }

    #[test]
    fn every_edge_replays(src in random_program()) {
        let o = saturate(&program(&src), &EngineConfig { contradiction_halts: false, ..EngineConfig::default() }).unwrap();
        prop_assert!(replay_all(&o).is_ok(), "{:?}", replay_all(&o));
    }

    #[test]
    fn passes_never_exceed_budget(src in random_program(), max_passes in 1usize..5) {
        let o = saturate(&program(&src), &EngineConfig { max_passes, ..EngineConfig::default() }).unwrap();
        prop_assert!(o.verdict.passes_used <= max_passes);
        prop_assert_eq!(o.verdict.witness.is_some(), o.verdict.kind == VerdictKind::Contradiction);
    }

    #[test]
    fn weighted_threshold_matches_brute_force(
        facts in prop::collection::vec((any::<bool>(), 0..8u8, 0..8u8), 50),
        alpha in 1u32..12,
    ) {
        let mut ps = BTreeSet::new();
        let mut qs = BTreeSet::new();
        let mut src = String::new();
        for (is_p, a, b) in &facts {
            if *is_p {
                ps.insert(*a);
                src.push_str(&format!("p(c{a}).\n"));
            } else {
                qs.insert((*a, *b));
                src.push_str(&format!("q(c{a}, c{b}).\n"));
            }
        }
        src.push_str(&format!("{alpha} * p(X) and q(X, Y) => 2 * hit.\n"));
        let tuples = qs.iter().filter(|(a, _)| ps.contains(a)).count();

        let p = program(&src);
        let cfg = EngineConfig::weighted();
        let e = Engine::new(ground(&p, &cfg).unwrap(), cfg).unwrap();
        prop_assert_eq!(e.matches(0).len(), tuples);
        let o = saturate(&p, &cfg).unwrap();
        let hit = Term::atom("hit");
        prop_assert_eq!(o.wm.contains(&hit), tuples >= alpha as usize);
        if tuples >= alpha as usize {
            prop_assert_eq!(o.wm.count(&hit), 2 * tuples as u64);
        }
    }
}

#[test]
fn bundled_programs_are_order_independent() {
    for (name, src) in BUNDLED {
        let p = program(src);
        let cfg = EngineConfig::default();
        let base = saturate(&p, &cfg).unwrap();
        for seed in 0..10 {
            let o = saturate(&shuffled(&p, seed), &cfg).unwrap();
            assert_eq!(o.wm.to_set(), base.wm.to_set(), "{name} seed {seed}");
        }
    }
}

#[test]
fn bundled_programs_replay() {
    for (name, src) in BUNDLED {
        let o = saturate(&program(src), &EngineConfig::default()).unwrap();
        let n = replay_all(&o).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(name == "quality.karb" || n > 0, "{name} derived nothing");
    }
}

#[test]
fn chain_explanations() {
    let o = saturate(&program("a.\na => b.\nb => c."), &EngineConfig::default()).unwrap();
    let e = explain(&o.lattice, &Term::atom("c")).unwrap();
    assert_eq!((e.nodes.len(), e.edges.len()), (3, 2));
    let e = explain(&o.lattice, &Term::atom("a")).unwrap();
    assert_eq!((e.nodes.len(), e.edges.len()), (1, 0));
    assert_eq!(explain(&o.lattice, &Term::atom("z")), Err(NotFound(Term::atom("z"))));
}

#[test]
fn weighted_multiplicity_from_beta() {
    let o = saturate(&program("a.\na => 3 * b."), &EngineConfig { mode: Mode::Weighted, ..EngineConfig::default() }).unwrap();
    assert_eq!(o.wm.count(&Term::atom("b")), 3);
}
