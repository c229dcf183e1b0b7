//! Error percentage of every estimation method on every app of the bundled
//! survey, with the per-method average.
//!
//! ```text
//! cargo run --release --example benchmark_table
//! ```

use karb::bench::{compare, BenchConfig, MethodKind};
use karb::quma::read_records;

fn main() {
    let records = read_records(include_str!("data/survey.csv").as_bytes()).expect("bundled survey loads").records;
    let config = BenchConfig::from_sources(
        include_str!("programs/quality.karb"),
        include_str!("data/space.cfg"),
        Some(include_str!("data/experts.cfg")),
        42,
    )
    .expect("bundled configuration is valid");
    let report = compare(&records, &MethodKind::ALL, &config).expect("methods run");

    print!("{:<18}", "method");
    for app in &report.apps {
        print!("{app:>8}");
    }
    println!("{:>9}", "average");
    for m in &report.methods {
        print!("{:<18}", m.name());
        for app in &report.apps {
            match report.error(*m, app) {
                Some(e) => print!("{e:>8.2}"),
                None => print!("{:>8}", "-"),
            }
        }
        println!("{:>9.2}", report.average(*m).unwrap_or(f64::NAN));
    }
    println!("\ndataset {}", report.metadata["dataset_sha256"].as_str().unwrap_or("?"));
}
