use std::collections::HashMap;

use super::record::{app_number, Measure, UserOpinionRecord};
use super::QumaError;

/// Means of `series` over every window of `window` consecutive values.
pub fn running_average(series: &[f64], window: usize) -> Result<Vec<f64>, QumaError> {
    if window == 0 || series.len() < window {
        return Err(QumaError::Window { len: series.len(), window });
    }
    Ok(series.windows(window).map(|w| w.iter().sum::<f64>() / window as f64).collect())
}

/// The records of one micro-community, in arrival order.
#[derive(Clone, Debug)]
pub struct Community<'a> {
    pub app_id: &'a str,
    pub community_id: &'a str,
    pub records: Vec<&'a UserOpinionRecord>,
}

/// Groups records by (app, community) in order of first appearance, each
/// group sorted by `seq`.
pub fn communities(records: &[UserOpinionRecord]) -> Vec<Community<'_>> {
    let mut slot: HashMap<(&str, &str), usize> = HashMap::new();
    let mut out: Vec<Community<'_>> = Vec::new();
    for r in records {
        let key = (r.app_id.as_str(), r.community_id.as_str());
        let i = *slot.entry(key).or_insert_with(|| {
            out.push(Community { app_id: key.0, community_id: key.1, records: Vec::new() });
            out.len() - 1
        });
        out[i].records.push(r);
    }
    for c in &mut out {
        c.records.sort_by_key(|r| r.seq);
    }
    out
}

/// One window position inside one community.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentPoint {
    pub app_id: String,
    pub community_id: String,
    /// Offset of the window's first record within its community.
    pub window_start: usize,
    /// Mean of each requested measure over the window, in request order.
    pub means: Vec<f64>,
}

fn series(c: &Community<'_>, m: Measure) -> Result<Vec<f64>, QumaError> {
    c.records
        .iter()
        .map(|r| {
            r.score(m).map(f64::from).ok_or_else(|| QumaError::MissingScore {
                measure: m,
                app_id: r.app_id.clone(),
                seq: r.seq,
            })
        })
        .collect()
}

/// Sliding-window means per community. Windows never cross a community
/// boundary; communities shorter than the window contribute nothing.
pub fn segments(records: &[UserOpinionRecord], measures: &[Measure], window: usize) -> Result<Vec<SegmentPoint>, QumaError> {
    if window == 0 {
        return Err(QumaError::Window { len: 0, window });
    }
    let mut out = Vec::new();
    for c in communities(records) {
        if c.records.len() < window {
            continue;
        }
        let per_measure: Vec<Vec<f64>> =
            measures.iter().map(|&m| running_average(&series(&c, m)?, window)).collect::<Result<_, _>>()?;
        for start in 0..=c.records.len() - window {
            out.push(SegmentPoint {
                app_id: c.app_id.to_string(),
                community_id: c.community_id.to_string(),
                window_start: start,
                means: per_measure.iter().map(|s| s[start]).collect(),
            });
        }
    }
    Ok(out)
}

/// Counts of levels 1..=5 of `measure` among `app_id`'s records.
pub fn histogram(records: &[UserOpinionRecord], app_id: &str, measure: Measure) -> Result<[u64; 5], QumaError> {
    if app_number(app_id).is_none() {
        return Err(QumaError::UnknownApp(app_id.to_string()));
    }
    let mut counts = [0u64; 5];
    for r in records.iter().filter(|r| r.app_id == app_id) {
        if let Some(v) = r.score(measure) {
            counts[usize::from(v) - 1] += 1;
        }
    }
    Ok(counts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationPoint {
    pub app_id: String,
    pub community_id: String,
    pub window_start: usize,
    pub x: f64,
    pub y: f64,
}

/// Paired window means of two measures, one point per window position.
pub fn correlation_points(
    records: &[UserOpinionRecord],
    x: Measure,
    y: Measure,
    window: usize,
) -> Result<Vec<CorrelationPoint>, QumaError> {
    Ok(segments(records, &[x, y], window)?
        .into_iter()
        .map(|s| CorrelationPoint {
            app_id: s.app_id,
            community_id: s.community_id,
            window_start: s.window_start,
            x: s.means[0],
            y: s.means[1],
        })
        .collect())
}

/// Splits points into those of `app_id` and the whole data space. With
/// `inclusive` the space keeps the app's own points as well.
pub fn partition<'a>(
    points: &'a [CorrelationPoint],
    app_id: &str,
    inclusive: bool,
) -> (Vec<&'a CorrelationPoint>, Vec<&'a CorrelationPoint>) {
    let focus = points.iter().filter(|p| p.app_id == app_id).collect();
    let space = points.iter().filter(|p| inclusive || p.app_id != app_id).collect();
    (focus, space)
}
