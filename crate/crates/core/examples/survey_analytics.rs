//! Windowed views of the bundled survey: per-app histograms, the running
//! quality average of one community, and how one app's windows sit inside
//! the whole data space.
//!
//! ```text
//! cargo run --example survey_analytics
//! ```

use karb::quma::{communities, correlation_points, histogram, partition, read_records, running_average, Measure};

fn main() {
    let loaded = read_records(include_str!("data/survey.csv").as_bytes()).expect("bundled survey loads");
    let records = loaded.records;
    println!("{} records", records.len());

    println!("\nabsolute quality, levels 1..5");
    for app in ["M1", "M2", "M3", "M4", "M5"] {
        let h = histogram(&records, app, Measure::AbsoluteQuality).expect("known app");
        println!("  {app}: {h:?}");
    }

    let community = &communities(&records)[0];
    let series: Vec<f64> = community.records.iter().map(|r| f64::from(r.absolute_quality)).collect();
    let means = running_average(&series, 5).expect("community has at least 5 records");
    let shown: Vec<String> = means.iter().map(|m| format!("{m:.1}")).collect();
    println!("\n{} / {}: window-5 quality {}", community.app_id, community.community_id, shown.join(" "));

    let points = correlation_points(&records, Measure::Usability, Measure::AbsoluteQuality, 20).expect("window fits");
    let (focus, space) = partition(&points, "M1", false);
    let mean = |ps: &[&karb::quma::CorrelationPoint]| {
        let n = ps.len() as f64;
        (ps.iter().map(|p| p.x).sum::<f64>() / n, ps.iter().map(|p| p.y).sum::<f64>() / n)
    };
    let (fx, fy) = mean(&focus);
    let (sx, sy) = mean(&space);
    println!("\nusability vs quality, window 20");
    println!("  M1: {} points centred at ({fx:.2}, {fy:.2})", focus.len());
    println!("  other apps: {} points centred at ({sx:.2}, {sy:.2})", space.len());
}
