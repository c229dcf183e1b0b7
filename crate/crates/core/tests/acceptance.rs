//! One line per acceptance criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the report.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use karb::bench::{compare, BenchConfig, MethodKind};
use karb::dsl::{parse_program, Program};
use karb::fit::{exhaustive, objective, random_baseline, state_space_search, Design, ScoringModel, SpaceConfig};
use karb::inference::{explain, ground, replay, saturate, Engine, EngineConfig, Outcome, VerdictKind};
use karb::quma::{
    correlation_points, generate_synthetic, histogram, read_records, running_average, segments, Measure, SynthConfig,
    UserOpinionRecord,
};
use karb::semlogic::Term;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

const EXAMPLE2: &str = include_str!("../examples/programs/example2.karb");
const BUNDLED: [&str; 3] = [
    EXAMPLE2,
    include_str!("../examples/programs/zoo.karb"),
    include_str!("../examples/programs/quality.karb"),
];
const SURVEY: &str = include_str!("../examples/data/survey.csv");
const SPACE: &str = include_str!("../examples/data/space.cfg");
const RULES: &str = include_str!("../examples/programs/quality.karb");
const EXPERTS: &str = include_str!("../examples/data/experts.cfg");

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn program(src: &str) -> Program {
    parse_program(src).into_result().expect("bundled program parses")
}

fn survey() -> Vec<UserOpinionRecord> {
    read_records(SURVEY.as_bytes()).unwrap().records
}

fn example_contradiction() -> Check {
    let p = program(EXAMPLE2);
    let started = Instant::now();
    let o = saturate(&p, &EngineConfig::default()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(o.verdict.kind == VerdictKind::Contradiction, format!("verdict {:?}", o.verdict.kind))?;
    ensure(o.verdict.passes_used <= 10, format!("{} passes", o.verdict.passes_used))?;
    let (a, b) = o.verdict.witness.clone().ok_or("no witness")?;

    let facts: BTreeSet<Term> = ground(&p, &EngineConfig::default()).unwrap().facts.into_iter().map(|f| f.0).collect();
    let mut nodes = BTreeSet::new();
    let mut leaves = BTreeSet::new();
    for t in [&a, &b] {
        let e = explain(&o.lattice, t).map_err(|e| e.to_string())?;
        nodes.extend(e.nodes.iter().copied());
        leaves.extend(e.leaves());
    }
    for &l in &leaves {
        let n = &o.lattice.nodes()[l];
        ensure(n.axiom && facts.contains(&n.term), format!("leaf {} is not an axiom", n.term))?;
    }
    let leaf_terms: BTreeSet<String> = leaves.iter().map(|&l| o.lattice.nodes()[l].term.to_string()).collect();
    ensure(leaf_terms.contains("O(Confidential(sk_1))"), "skolemized obligation missing from leaves")?;
    ensure(
        nodes.iter().any(|&n| o.lattice.nodes()[n].term.to_string().starts_with("P(Breach(")),
        "no Breach node on the proof path",
    )?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;

    let cli = Command::new(env!("CARGO_BIN_EXE_karb"))
        .arg("check")
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/programs/example2.karb"))
        .output()
        .unwrap();
    ensure(cli.status.success() && cli.stdout.starts_with(b"CONTRADICTION\n"), "CLI check did not report it")?;
    Ok(format!(
        "{} passes, {} proof nodes, {} axiom leaves, {:.1} ms",
        o.verdict.passes_used,
        nodes.len(),
        leaves.len(),
        elapsed.as_secs_f64() * 1e3
    ))
}

fn brute_error(rs: &[UserOpinionRecord], w: &[f64], b: f64) -> f64 {
    let mut total = 0.0;
    for r in rs {
        let raw = b + w[0] * f64::from(r.error_freeness) - w[1] * f64::from(r.ui_complexity)
            + w[2] * f64::from(r.rationality)
            + w[3] * f64::from(r.usability);
        total += (raw.max(1.0).min(5.0) - f64::from(r.absolute_quality)).abs();
    }
    100.0 * total / rs.len() as f64 / 4.0
}

fn objective_oracle() -> Check {
    let cfg = SynthConfig { latent: vec![3.5], records: 100, communities: 4, ..SynthConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let rs = generate_synthetic(&cfg, seed).unwrap();
        ensure(rs.len() == 100, "expected 100 records")?;
        let refs: Vec<&UserOpinionRecord> = rs.iter().collect();
        let w: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = rng.gen_range(-2.0..5.0);
        let got = objective(&refs, &ScoringModel::new(Measure::CONTEXT.to_vec(), w.clone(), b)).unwrap();
        worst = worst.max((got - brute_error(&rs, &w, b)).abs());
    }
    ensure(worst <= 1e-12, format!("max deviation {worst:e}"))?;
    Ok(format!("50 random models, max deviation {worst:.1e}"))
}

fn method_ordering() -> Check {
    let records = survey();
    let per_app: BTreeMap<&str, usize> = records.iter().fold(BTreeMap::new(), |mut m, r| {
        *m.entry(r.app_id.as_str()).or_default() += 1;
        m
    });
    ensure(per_app.len() == 5 && per_app.values().all(|&n| n == 1000), format!("{per_app:?}"))?;
    let config = BenchConfig::from_sources(RULES, SPACE, Some(EXPERTS), 42).map_err(|e| e.to_string())?;
    let report = compare(&records, &MethodKind::ALL, &config).map_err(|e| e.to_string())?;
    let (dd, hc, sa) = (MethodKind::DataDrivenKarb, MethodKind::KarbHillClimb, MethodKind::SimpleAverage);
    for app in &report.apps {
        let e = |m| report.error(m, app).ok_or(format!("{app}: missing cell"));
        let (d, h, s) = (e(dd)?, e(hc)?, e(sa)?);
        ensure(d < h && h < s, format!("{app}: {d:.2} / {h:.2} / {s:.2}"))?;
    }
    let avg = |m| report.average(m).ok_or("missing average");
    let (d, h, s) = (avg(dd)?, avg(hc)?, avg(sa)?);
    ensure(d < h && h < s, format!("average {d:.2} / {h:.2} / {s:.2}"))?;

    let mut curve = Vec::new();
    report.write_curve_csv(&mut curve).unwrap();
    let text = String::from_utf8(curve).unwrap();
    let mut by_rank: Vec<(usize, f64)> = text
        .lines()
        .filter(|l| l.contains(",average,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    by_rank.sort_by_key(|p| p.0);
    let ranks = |m: MethodKind| by_rank.iter().find(|p| p.0 == m.rank()).map(|p| p.1);
    let points = [ranks(sa), ranks(hc), ranks(dd)];
    ensure(points.iter().all(Option::is_some), "curve lacks average rows")?;
    ensure(points.windows(2).all(|w| w[0] > w[1]), format!("curve {points:?}"))?;
    Ok(format!("average SA {s:.2} > HC {h:.2} > DD {d:.2}"))
}

fn fitting_quality() -> Check {
    let records: Vec<UserOpinionRecord> = survey().into_iter().filter(|r| r.app_id == "M1").collect();
    ensure(records.len() == 1000, "expected 1000 records")?;
    let refs: Vec<&UserOpinionRecord> = records.iter().collect();
    let cfg = SpaceConfig::parse(SPACE, &Measure::CONTEXT).map_err(|e| e.to_string())?;
    ensure(cfg.space.size() == 3125, format!("grid of {}", cfg.space.size()))?;
    let d = Design::new(&refs, &Measure::CONTEXT, &cfg.polarity).unwrap();

    let started = Instant::now();
    let ex = exhaustive(|p| d.error(p), &cfg.space, 1_000_000).unwrap();
    let ex_time = started.elapsed();
    ensure(ex_time < Duration::from_secs(10), format!("exhaustive took {ex_time:?}"))?;

    let (mut close, mut beats_mean, mut beats_best) = (0, 0, 0);
    for seed in 0..20 {
        let ss = state_space_search(|p| d.error(p), &cfg.space, 600, None, seed).unwrap();
        ensure(ss.evaluations <= 600, "budget exceeded")?;
        if ss.best_error <= ex.best_error * 1.05 {
            close += 1;
        }
        let rnd = random_baseline(|p| d.error(p), &cfg.space, 200, 1000 + seed).unwrap();
        let mean = rnd.trace.iter().map(|t| t.1).sum::<f64>() / rnd.trace.len() as f64;
        if ss.best_error < mean {
            beats_mean += 1;
        }
        if ss.best_error <= rnd.best_error {
            beats_best += 1;
        }
    }
    ensure(close >= 19, format!("{close}/20 seeds within 5% of the grid minimum"))?;
    ensure(beats_mean >= 19, format!("{beats_mean}/20 seeds beat the random mean"))?;
    Ok(format!(
        "within 5%: {close}/20, beats random mean: {beats_mean}/20 (best-of-200: {beats_best}/20), exhaustive {:.0} ms",
        ex_time.as_secs_f64() * 1e3
    ))
}

fn window_means(xs: &[f64], w: usize) -> Vec<f64> {
    let mut prefix = vec![0.0];
    for x in xs {
        prefix.push(prefix.last().unwrap() + x);
    }
    (0..=xs.len() - w).map(|i| (prefix[i + w] - prefix[i]) / w as f64).collect()
}

fn series(rs: &[UserOpinionRecord], m: Measure) -> Vec<((String, String), Vec<f64>)> {
    let mut out: Vec<((String, String), Vec<(u64, f64)>)> = Vec::new();
    for r in rs {
        let key = (r.app_id.clone(), r.community_id.clone());
        let v = (r.seq, f64::from(r.score(m).unwrap()));
        match out.iter_mut().find(|e| e.0 == key) {
            Some(e) => e.1.push(v),
            None => out.push((key, vec![v])),
        }
    }
    out.into_iter()
        .map(|(k, mut v)| {
            v.sort_by_key(|p| p.0);
            (k, v.into_iter().map(|p| p.1).collect())
        })
        .collect()
}

fn analytics_oracles() -> Check {
    let cfg = SynthConfig { latent: vec![3.2, 2.8], records: 1000, communities: 30, ..SynthConfig::default() };
    let rs = generate_synthetic(&cfg, 5).unwrap();
    let mut checked = 0usize;

    for m in Measure::ALL {
        let segs = segments(&rs, &[m], 20).map_err(|e| e.to_string())?;
        let want: Vec<f64> =
            series(&rs, m).into_iter().filter(|s| s.1.len() >= 20).flat_map(|s| window_means(&s.1, 20)).collect();
        ensure(segs.len() == want.len(), format!("{m}: {} vs {} windows", segs.len(), want.len()))?;
        for (s, w) in segs.iter().zip(&want) {
            ensure((s.means[0] - w).abs() <= 1e-12, format!("{m}: window mean off"))?;
        }
        checked += segs.len();
        for app in ["M1", "M2"] {
            let mut tally = [0u64; 5];
            for r in rs.iter().filter(|r| r.app_id == app) {
                tally[usize::from(r.score(m).unwrap()) - 1] += 1;
            }
            ensure(histogram(&rs, app, m).map_err(|e| e.to_string())? == tally, format!("{app} {m} histogram"))?;
        }
    }

    let pts = correlation_points(&rs, Measure::ErrorFreeness, Measure::AbsoluteQuality, 20).unwrap();
    let xs = series(&rs, Measure::ErrorFreeness);
    let ys = series(&rs, Measure::AbsoluteQuality);
    let want: Vec<(f64, f64)> = xs
        .iter()
        .zip(&ys)
        .filter(|(x, _)| x.1.len() >= 20)
        .flat_map(|(x, y)| window_means(&x.1, 20).into_iter().zip(window_means(&y.1, 20)))
        .collect();
    ensure(pts.len() == want.len(), "correlation point count")?;
    for (p, (x, y)) in pts.iter().zip(&want) {
        ensure((p.x - x).abs() <= 1e-12 && (p.y - y).abs() <= 1e-12, "correlation point off")?;
    }

    let constant = running_average(&[3.0; 40], 20).unwrap();
    ensure(constant.len() == 21 && constant.iter().all(|&v| v == 3.0), "constant series")?;

    let mut two = Vec::new();
    for (comm, v) in [("c001", 1u8), ("c002", 5u8)] {
        for seq in 1..=25 {
            two.push(UserOpinionRecord::uniform("M1", comm, seq, v));
        }
    }
    two.swap(3, 30);
    let segs = segments(&two, &[Measure::AbsoluteQuality], 20).unwrap();
    ensure(segs.len() == 12, format!("{} windows over two communities", segs.len()))?;
    for s in &segs {
        let want = if s.community_id == "c001" { 1.0 } else { 5.0 };
        ensure(s.means[0] == want, "communities mixed inside a window")?;
    }
    Ok(format!("{checked} window means, {} correlation points, edge cases ok", pts.len()))
}

fn replay_all(o: &Outcome) -> Result<usize, String> {
    for d in o.lattice.edges() {
        let rule = o.rules.iter().find(|r| r.id == d.rule).ok_or("unknown rule")?;
        let premises: Vec<Term> = d.premises.iter().map(|&p| o.wm.entries()[p].term.clone()).collect();
        replay(rule, &premises, &o.wm.entries()[d.conclusion].term, &o.domains).map_err(|e| e.to_string())?;
    }
    Ok(o.lattice.edges().len())
}

fn engine_properties() -> Check {
    let mut replayed = 0;
    for src in BUNDLED {
        let p = program(src);
        let cfg = EngineConfig::default();
        let base = saturate(&p, &cfg).unwrap();
        for seed in 0..10 {
            let mut q = p.clone();
            q.rules.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            ensure(saturate(&q, &cfg).unwrap().wm.to_set() == base.wm.to_set(), "shuffle changed the final set")?;
        }
        replayed += replay_all(&base)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..100 {
        let mut ps = BTreeSet::new();
        let mut qs = BTreeSet::new();
        let mut src = String::new();
        for _ in 0..50 {
            let (a, b) = (rng.gen_range(0..8), rng.gen_range(0..8));
            if rng.gen_bool(0.4) {
                ps.insert(a);
                src.push_str(&format!("p(c{a}).\n"));
            } else {
                qs.insert((a, b));
                src.push_str(&format!("q(c{a}, c{b}).\n"));
            }
        }
        let alpha = rng.gen_range(1..16);
        src.push_str(&format!("{alpha} * p(X) and q(X, Y) => hit.\n"));
        let tuples = qs.iter().filter(|(a, _)| ps.contains(a)).count();
        let cfg = EngineConfig::weighted();
        let p = program(&src);
        let e = Engine::new(ground(&p, &cfg).unwrap(), cfg).unwrap();
        ensure(e.matches(0).len() == tuples, format!("trial {trial}: match count"))?;
        let fired = saturate(&p, &cfg).unwrap().wm.contains(&Term::atom("hit"));
        ensure(fired == (tuples >= alpha), format!("trial {trial}: {tuples} tuples, alpha {alpha}, fired {fired}"))?;
    }
    Ok(format!("3 programs x 10 shuffles, {replayed} derivations replayed, 100 weighted trials"))
}

fn digest(path: &Path) -> String {
    hex::encode(Sha256::digest(std::fs::read(path).unwrap()))
}

fn cli_determinism() -> Check {
    let ex = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let prog = ex.join("programs/example2.karb");
    let experts = ex.join("data/experts.cfg");
    let commands: Vec<(Vec<String>, Vec<&str>)> = vec![
        (vec!["synth".into(), "--seed".into(), "9".into(), "--records".into(), "2000".into(), "--out".into(), "s.csv".into()], vec!["s.csv"]),
        (
            vec![
                "check".into(),
                prog.display().to_string(),
                "--emit-dot".into(),
                "g.dot".into(),
                "--emit-json".into(),
                "g.json".into(),
            ],
            vec!["g.dot", "g.json"],
        ),
        (vec!["analyze".into(), "s.csv".into(), "--out".into(), "w.csv".into()], vec!["w.csv"]),
        (vec!["analyze".into(), "s.csv".into(), "--histogram".into(), "--out".into(), "h.csv".into()], vec!["h.csv"]),
        (
            vec!["fit".into(), "s.csv".into(), "--app".into(), "M3".into(), "--emit-trace".into(), "t.csv".into()],
            vec!["t.csv"],
        ),
        (
            vec!["bench".into(), "s.csv".into(), "--experts".into(), experts.display().to_string(), "--out".into(), "b.csv".into()],
            vec!["b.csv", "b.curve.csv", "b.meta.json"],
        ),
    ];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let mut hashes = Vec::new();
        for (args, files) in &commands {
            let o = Command::new(env!("CARGO_BIN_EXE_karb")).args(args).current_dir(dir.path()).output().unwrap();
            ensure(o.status.success(), format!("{} failed: {}", args[0], String::from_utf8_lossy(&o.stderr)))?;
            hashes.push(hex::encode(Sha256::digest(&o.stdout)));
            hashes.extend(files.iter().map(|f| digest(&dir.path().join(f))));
        }
        runs.push(hashes);
    }
    ensure(runs[0] == runs[1], "outputs differ between runs")?;
    Ok(format!("{} commands, {} artifacts hash-identical", commands.len(), runs[0].len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Check); 7] = [
        ("example contradiction", example_contradiction),
        ("objective oracle", objective_oracle),
        ("method ordering", method_ordering),
        ("fitting quality", fitting_quality),
        ("analytics oracles", analytics_oracles),
        ("engine properties", engine_properties),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                println!("FAIL {} {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
