//! Fits the weights of the quality rules to one app's survey records with
//! each search strategy, against the exhaustive grid minimum.
//!
//! ```text
//! cargo run --release --example fit_weights
//! ```

use karb::dsl::parse_program;
use karb::fit::{
    exhaustive, features_from_rules, hill_climb, random_baseline, state_space_search, Design, HillClimbConfig,
    SpaceConfig, DEFAULT_EXHAUSTIVE_CAP,
};
use karb::quma::{read_records, Measure, UserOpinionRecord};

fn main() {
    let records = read_records(include_str!("data/survey.csv").as_bytes()).expect("bundled survey loads").records;
    let app: Vec<&UserOpinionRecord> = records.iter().filter(|r| r.app_id == "M2").collect();

    let rules = parse_program(include_str!("programs/quality.karb")).into_result().expect("rules parse");
    let features = features_from_rules(&rules).expect("scoring rules");
    let measures: Vec<Measure> = features.iter().map(|f| f.0).collect();
    let cfg = SpaceConfig::parse(include_str!("data/space.cfg"), &measures).expect("space parses");
    let design = Design::new(&app, &measures, &cfg.polarity).expect("records carry every feature");
    let error = |p: &[f64]| design.error(p);

    let names: Vec<&str> = measures.iter().map(|m| m.name()).chain(["bias"]).collect();
    println!("{} records of M2, {} grid states over {}", app.len(), cfg.space.size(), names.join(", "));

    let show = |label: &str, best: &[f64], err: f64, evals: usize| {
        let p: Vec<String> = best.iter().map(|v| format!("{v:+.2}")).collect();
        println!("{label:>12}: error {err:6.2}%  after {evals:>5} evaluations  [{}]", p.join(" "));
    };

    let ex = exhaustive(error, &cfg.space, DEFAULT_EXHAUSTIVE_CAP).expect("grid fits the cap");
    show("exhaustive", &ex.best, ex.best_error, ex.evaluations);
    let ss = state_space_search(error, &cfg.space, 600, None, 42).expect("budget covers the coordinates");
    show("state space", &ss.best, ss.best_error, ss.evaluations);
    let rnd = random_baseline(error, &cfg.space, 200, 42).expect("non-empty space");
    show("random", &rnd.best, rnd.best_error, rnd.evaluations);

    let mut start: Vec<f64> = features.iter().map(|f| f.1).collect();
    start.push(features.iter().zip(&cfg.polarity).filter(|(_, &p)| p < 0.0).map(|(f, _)| 6.0 * f.1).sum());
    show("rule start", &start, design.error(&start), 1);
    let hc = hill_climb(error, &cfg.space, &start, &HillClimbConfig::default()).expect("valid step");
    show("hill climb", &hc.best, hc.best_error, hc.evaluations);
    let ols = design.least_squares().expect("design has full rank");
    show("least sq.", &ols, design.error(&ols), 1);
}
