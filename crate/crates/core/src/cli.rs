//! The `karb` command line.
//!
//! Exit status is 0 on success, 1 when the input is rejected (bad program,
//! unreadable data, failed fit) and 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{compare, parse_methods, BenchConfig};
use crate::dsl::parse_program;
use crate::fit::{
    exhaustive, hill_climb, random_baseline, state_space_search, write_trace, Design, FitResult, HillClimbConfig,
    DEFAULT_EXHAUSTIVE_CAP,
};
use crate::inference::{explain, saturate, to_dot, to_json, EngineConfig, VerdictKind};
use crate::quma::{
    correlation_points, generate_synthetic, histogram, load_records, partition, segments, write_records, Measure,
    SynthConfig, UserOpinionRecord,
};
use crate::semlogic::{Mode, Term};

/// Scoring rules used when `--rules` is not given.
pub const DEFAULT_RULES: &str = include_str!("../examples/programs/quality.karb");
/// Parameter space used when `--space` is not given.
pub const DEFAULT_SPACE: &str = include_str!("../examples/data/space.cfg");

#[derive(Parser, Debug)]
#[command(name = "karb", version, about = "Rule-based compliance checking and quality benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Classical,
    Weighted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FitMethod {
    HillClimb,
    StateSpace,
    Exhaustive,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and saturate a .karb program.
    Check {
        file: PathBuf,
        /// Write the derivation lattice as Graphviz DOT.
        #[arg(long, value_name = "PATH")]
        emit_dot: Option<PathBuf>,
        /// Restrict the DOT output to the proof of the contradiction.
        #[arg(long)]
        proof_only: bool,
        /// Write verdict, working memory and derivations as JSON.
        #[arg(long, value_name = "PATH")]
        emit_json: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        max_passes: usize,
        #[arg(long, default_value_t = 100_000)]
        max_terms: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Classical)]
        mode: ModeArg,
        /// Keep saturating after a contradiction appears.
        #[arg(long)]
        no_halt: bool,
    },
    /// Summarize survey records: window series, histograms, correlations.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        window: usize,
        #[arg(long, default_value = "absolute_quality")]
        measure_x: String,
        /// Pair `measure-x` with this measure per window.
        #[arg(long)]
        measure_y: Option<String>,
        /// Count score levels of `measure-x` per app.
        #[arg(long)]
        histogram: bool,
        /// Restrict histograms to one app, or mark it in correlation output.
        #[arg(long)]
        app: Option<String>,
        /// With `--app`, leave the app's own points out of the whole-space set.
        #[arg(long)]
        exclusive: bool,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Fit the weighted quality estimator to survey records.
    Fit {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FitMethod::StateSpace)]
        method: FitMethod,
        #[arg(long, default_value_t = 600)]
        budget: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        space: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        rules: Option<PathBuf>,
        /// Fit one app only.
        #[arg(long)]
        app: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        /// Write `state_index,error` for every evaluation.
        #[arg(long, value_name = "PATH")]
        emit_trace: Option<PathBuf>,
    },
    /// Run the four-method benchmark.
    Bench {
        file: PathBuf,
        #[arg(long, default_value = "all")]
        methods: String,
        #[arg(long, value_name = "FILE")]
        experts: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Report CSV; `.curve.csv` and `.meta.json` siblings are written too.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        space: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        rules: Option<PathBuf>,
        /// Simple average predicts each app's mean rather than each record's.
        #[arg(long)]
        per_app_average: bool,
        /// Evaluate on this trailing fraction of each app's records only.
        #[arg(long)]
        holdout: Option<f64>,
    },
    /// Generate a synthetic survey.
    Synth {
        #[arg(long, default_value_t = 5000)]
        records: usize,
        #[arg(long, default_value_t = 250)]
        communities: usize,
        #[arg(long, default_value_t = 5)]
        apps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV; standard output when absent.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// A failure that maps to exit status 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Check { file, emit_dot, proof_only, emit_json, max_passes, max_terms, mode, no_halt } => {
            let mode = match mode {
                ModeArg::Classical => Mode::Classical,
                ModeArg::Weighted => Mode::Weighted,
            };
            let config = EngineConfig { mode, max_passes, max_terms, contradiction_halts: !no_halt };
            check(&file, &config, emit_dot.as_deref(), proof_only, emit_json.as_deref(), out, err)
        }
        Command::Analyze { file, window, measure_x, measure_y, histogram, app, exclusive, out: path } => {
            analyze(&file, window, &measure_x, measure_y.as_deref(), histogram, app.as_deref(), exclusive, path.as_deref(), out, err)
        }
        Command::Fit { file, method, budget, seed, space, rules, app, step, restarts, emit_trace } => {
            let hill = HillClimbConfig { step, restarts, seed, ..HillClimbConfig::default() };
            fit(&file, method, budget, seed, space.as_deref(), rules.as_deref(), app.as_deref(), hill, emit_trace.as_deref(), out, err)
        }
        Command::Bench { file, methods, experts, seed, out: path, space, rules, per_app_average, holdout } => bench(
            &file,
            &methods,
            experts.as_deref(),
            seed,
            path.as_deref(),
            space.as_deref(),
            rules.as_deref(),
            per_app_average,
            holdout,
            out,
            err,
        ),
        Command::Synth { records, communities, apps, seed, out: path } => {
            synth(records, communities, apps, seed, path.as_deref(), out)
        }
    };
    match result {
        Ok(()) => 0,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn check(
    file: &Path,
    config: &EngineConfig,
    emit_dot: Option<&Path>,
    proof_only: bool,
    emit_json: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let src = read(file)?;
    let parsed = parse_program(&src);
    let name = file.display().to_string();
    for d in &parsed.diagnostics {
        writeln!(err, "{}", d.render(&name))?;
    }
    let program = parsed.into_result().map_err(|d| Failure(format!("{} error(s) in {name}", d.len())))?;
    let outcome = saturate(&program, config)?;
    let v = &outcome.verdict;
    match v.kind {
        VerdictKind::Contradiction => {
            writeln!(out, "CONTRADICTION")?;
            if let Some((a, b)) = &v.witness {
                writeln!(out, "witness: {a} | {b}")?;
            }
        }
        VerdictKind::Saturated => writeln!(out, "SATURATED")?,
        VerdictKind::BudgetExhausted => writeln!(out, "BUDGET EXHAUSTED")?,
    }
    writeln!(out, "passes: {}", v.passes_used)?;
    writeln!(out, "terms: {}", outcome.wm.len())?;
    if let Some(path) = emit_dot {
        let only = if proof_only { proof_nodes(&outcome) } else { None };
        write_file(path, to_dot(&outcome.lattice, only.as_deref()).as_bytes())?;
    }
    if let Some(path) = emit_json {
        let mut text = serde_json::to_string_pretty(&to_json(&outcome))?;
        text.push('\n');
        write_file(path, text.as_bytes())?;
    }
    Ok(())
}

/// Nodes of the proof of the contradiction: of `false` if derived, else of
/// the negated half of the witness together with its partner.
fn proof_nodes(outcome: &crate::inference::Outcome) -> Option<Vec<usize>> {
    let (a, b) = outcome.verdict.witness.as_ref()?;
    let falsum = Term::falsum();
    let goals: Vec<&Term> = if outcome.lattice.find(&falsum).is_some() { vec![a, b, &falsum] } else { vec![a, b] };
    let mut nodes: Vec<usize> = Vec::new();
    for g in goals {
        if let Ok(e) = explain(&outcome.lattice, g) {
            nodes.extend(e.nodes);
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    Some(nodes)
}

fn load(file: &Path, err: &mut dyn Write) -> Result<Vec<UserOpinionRecord>, Failure> {
    let loaded = load_records(file)?;
    for d in &loaded.diagnostics {
        writeln!(err, "{}:{d}", file.display())?;
    }
    if loaded.records.is_empty() {
        return Err(Failure(format!("{}: no valid records", file.display())));
    }
    Ok(loaded.records)
}

fn measure(name: &str) -> Result<Measure, Failure> {
    Ok(name.parse::<Measure>()?)
}

#[allow(clippy::too_many_arguments)]
fn analyze(
    file: &Path,
    window: usize,
    measure_x: &str,
    measure_y: Option<&str>,
    want_histogram: bool,
    app: Option<&str>,
    exclusive: bool,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let records = load(file, err)?;
    let mx = measure(measure_x)?;
    let mut apps: Vec<String> = records.iter().map(|r| r.app_id.clone()).collect();
    apps.sort_by_key(|a| (crate::quma::app_number(a), a.clone()));
    apps.dedup();
    let mut csv = csv::Writer::from_writer(Vec::new());

    if let Some(my) = measure_y {
        let my = measure(my)?;
        let points = correlation_points(&records, mx, my, window)?;
        csv.write_record(["app_id", "community_id", "window_start", mx.name(), my.name(), "in_focus", "in_space"])?;
        let focus_app = app.unwrap_or("");
        let (focus, space) = partition(&points, focus_app, !exclusive);
        for p in &points {
            let in_focus = focus.iter().any(|q| std::ptr::eq(*q, p));
            let in_space = space.iter().any(|q| std::ptr::eq(*q, p));
            csv.write_record([
                p.app_id.clone(),
                p.community_id.clone(),
                p.window_start.to_string(),
                format!("{:.6}", p.x),
                format!("{:.6}", p.y),
                u8::from(in_focus).to_string(),
                u8::from(in_space).to_string(),
            ])?;
        }
        writeln!(out, "{} window points of {mx} vs {my} (window {window})", points.len())?;
        if app.is_some() {
            writeln!(out, "{focus_app}: {} points, data space: {} points", focus.len(), space.len())?;
        }
    } else if want_histogram {
        csv.write_record(["app_id", "level_1", "level_2", "level_3", "level_4", "level_5"])?;
        writeln!(out, "{mx} levels 1..5")?;
        for a in apps.iter().filter(|a| app.is_none_or(|x| x == a.as_str())) {
            let h = histogram(&records, a, mx)?;
            let cells: Vec<String> = h.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{a:>5}: {}", cells.join(" "))?;
            let mut row = vec![a.clone()];
            row.extend(cells);
            csv.write_record(&row)?;
        }
    } else {
        let segs = segments(&records, &[mx], window)?;
        csv.write_record(["app_id", "community_id", "window_start", mx.name()])?;
        for s in &segs {
            csv.write_record([s.app_id.clone(), s.community_id.clone(), s.window_start.to_string(), format!("{:.6}", s.means[0])])?;
        }
        writeln!(out, "{} records, {} apps, {} window positions (window {window})", records.len(), apps.len(), segs.len())?;
        for a in &apps {
            let rs: Vec<&UserOpinionRecord> = records.iter().filter(|r| &r.app_id == a).collect();
            let mean = rs.iter().filter_map(|r| r.score(mx)).map(f64::from).sum::<f64>() / rs.len() as f64;
            writeln!(out, "{a:>5}: {} records, mean {mx} {mean:.3}", rs.len())?;
        }
    }
    if let Some(p) = path {
        let bytes = csv.into_inner().map_err(|e| Failure(e.to_string()))?;
        write_file(p, &bytes)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn fit(
    file: &Path,
    method: FitMethod,
    budget: usize,
    seed: u64,
    space: Option<&Path>,
    rules: Option<&Path>,
    app: Option<&str>,
    hill: HillClimbConfig,
    emit_trace: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let records = load(file, err)?;
    let rules_src = rules.map(read).transpose()?;
    let space_src = space.map(read).transpose()?;
    let config = BenchConfig::from_sources(
        rules_src.as_deref().unwrap_or(DEFAULT_RULES),
        space_src.as_deref().unwrap_or(DEFAULT_SPACE),
        None,
        seed,
    )?;
    let selected: Vec<&UserOpinionRecord> = records.iter().filter(|r| app.is_none_or(|a| r.app_id == a)).collect();
    if selected.is_empty() {
        return Err(Failure(format!("no records for app {}", app.unwrap_or("?"))));
    }
    let features: Vec<Measure> = config.features.iter().map(|(m, _)| *m).collect();
    let design = Design::new(&selected, &features, &config.polarity)?;
    let objective = |p: &[f64]| design.error(p);
    let result: FitResult = match method {
        FitMethod::HillClimb => hill_climb(objective, &config.space, &config.rule_start(), &hill)?,
        FitMethod::StateSpace => state_space_search(objective, &config.space, budget, None, seed)?,
        FitMethod::Exhaustive => exhaustive(objective, &config.space, DEFAULT_EXHAUSTIVE_CAP)?,
        FitMethod::Random => random_baseline(objective, &config.space, budget, seed)?,
    };
    writeln!(out, "records: {}", selected.len())?;
    for (m, w) in features.iter().zip(&result.best) {
        writeln!(out, "weight {m}: {w:.4}")?;
    }
    writeln!(out, "bias: {:.4}", result.best[features.len()])?;
    writeln!(out, "error: {:.4}%", result.best_error)?;
    writeln!(out, "evaluations: {}", result.evaluations)?;
    if let Some(p) = emit_trace {
        let mut buf = Vec::new();
        write_trace(&mut buf, &result)?;
        write_file(p, &buf)?;
    }
    Ok(())
}

/// `report.csv` → `report.curve.csv`, `report.meta.json`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[allow(clippy::too_many_arguments)]
fn bench(
    file: &Path,
    methods: &str,
    experts: Option<&Path>,
    seed: u64,
    path: Option<&Path>,
    space: Option<&Path>,
    rules: Option<&Path>,
    per_app_average: bool,
    holdout: Option<f64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let records = load(file, err)?;
    let methods = parse_methods(methods)?;
    let rules_src = rules.map(read).transpose()?;
    let space_src = space.map(read).transpose()?;
    let experts_src = experts.map(read).transpose()?;
    let mut config = BenchConfig::from_sources(
        rules_src.as_deref().unwrap_or(DEFAULT_RULES),
        space_src.as_deref().unwrap_or(DEFAULT_SPACE),
        experts_src.as_deref(),
        seed,
    )?;
    config.per_app_average = per_app_average;
    config.holdout = holdout;
    let report = compare(&records, &methods, &config)?;

    write!(out, "{:<18}", "method")?;
    for a in &report.apps {
        write!(out, " {a:>8}")?;
    }
    writeln!(out, " {:>8}", "average")?;
    for &m in &report.methods {
        write!(out, "{:<18}", m.name())?;
        for a in &report.apps {
            match report.error(m, a) {
                Some(e) => write!(out, " {e:>8.2}")?,
                None => write!(out, " {:>8}", "failed")?,
            }
        }
        match report.average(m) {
            Some(e) => writeln!(out, " {e:>8.2}")?,
            None => writeln!(out, " {:>8}", "-")?,
        }
    }
    for c in &report.cells {
        if let Err(e) = &c.outcome {
            writeln!(err, "{} on {}: {e}", c.method, c.app_id)?;
        }
    }
    if let Some(p) = path {
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        write_file(p, &buf)?;
        let mut buf = Vec::new();
        report.write_curve_csv(&mut buf)?;
        write_file(&sibling(p, "curve.csv"), &buf)?;
        let mut meta = serde_json::to_string_pretty(&report.sidecar())?;
        meta.push('\n');
        write_file(&sibling(p, "meta.json"), meta.as_bytes())?;
    }
    Ok(())
}

fn synth(records: usize, communities: usize, apps: usize, seed: u64, path: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let base = SynthConfig::default();
    let latent = (0..apps).map(|i| base.latent[i % base.latent.len()]).collect();
    let config = SynthConfig { latent, records, communities, ..base };
    let data = generate_synthetic(&config, seed)?;
    let mut buf = Vec::new();
    write_records(&mut buf, &data)?;
    match path {
        Some(p) => write_file(p, &buf),
        None => Ok(out.write_all(&buf)?),
    }
}
