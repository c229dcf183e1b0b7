use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::quma::{app_number, write_records, UserOpinionRecord};

use super::method::{run_method, BenchConfig, MethodKind, MethodRun};
use super::BenchError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub method: MethodKind,
    pub app_id: String,
    /// The run, or the reason it failed.
    pub outcome: Result<MethodRun, String>,
}

impl Cell {
    pub fn error_percentage(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|r| r.error_percentage)
    }
}

/// Method × app error matrix with per-method averages.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkReport {
    pub apps: Vec<String>,
    pub methods: Vec<MethodKind>,
    /// Method-major, apps in order within each method.
    pub cells: Vec<Cell>,
    pub metadata: Value,
}

impl BenchmarkReport {
    pub fn cell(&self, method: MethodKind, app_id: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.method == method && c.app_id == app_id)
    }

    pub fn error(&self, method: MethodKind, app_id: &str) -> Option<f64> {
        self.cell(method, app_id)?.error_percentage()
    }

    /// Mean of the method's successful cells; `None` if every cell failed.
    pub fn average(&self, method: MethodKind) -> Option<f64> {
        let errs: Vec<f64> = self.cells.iter().filter(|c| c.method == method).filter_map(Cell::error_percentage).collect();
        (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64)
    }

    /// Writes `method,app_id,error_percentage` rows, then one `average` row
    /// per method. Failed cells have an empty error.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["method", "app_id", "error_percentage"])?;
        let fmt = |e: Option<f64>| e.map(|v| format!("{v:.6}")).unwrap_or_default();
        for c in &self.cells {
            w.write_record([c.method.name(), &c.app_id, &fmt(c.error_percentage())])?;
        }
        for &m in &self.methods {
            w.write_record([m.name(), "average", &fmt(self.average(m))])?;
        }
        w.flush().map_err(|e| BenchError::Io("<report>".into(), e))
    }

    /// Error-reduction curves: for each app, then for the average, the
    /// error of each method by its report rank.
    pub fn write_curve_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["method_rank", "app_id", "error_percentage"])?;
        let fmt = |e: Option<f64>| e.map(|v| format!("{v:.6}")).unwrap_or_default();
        for app in &self.apps {
            for &m in &self.methods {
                w.write_record([m.rank().to_string(), app.clone(), fmt(self.error(m, app))])?;
            }
        }
        for &m in &self.methods {
            w.write_record([m.rank().to_string(), "average".into(), fmt(self.average(m))])?;
        }
        w.flush().map_err(|e| BenchError::Io("<curve>".into(), e))
    }

    /// Run metadata plus raw MAE and fitted parameters per cell.
    pub fn sidecar(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .iter()
            .map(|c| match &c.outcome {
                Ok(r) => json!({
                    "method": c.method.name(),
                    "app_id": c.app_id,
                    "error_percentage": r.error_percentage,
                    "mae": r.mae,
                    "params": r.params,
                    "evaluations": r.evaluations,
                }),
                Err(e) => json!({"method": c.method.name(), "app_id": c.app_id, "failure": e}),
            })
            .collect();
        json!({"metadata": self.metadata, "cells": cells})
    }
}

/// SHA-256 of the records' canonical CSV form.
pub fn dataset_checksum(records: &[UserOpinionRecord]) -> String {
    let mut buf = Vec::new();
    write_records(&mut buf, records).expect("writing to memory does not fail");
    hex::encode(Sha256::digest(&buf))
}

/// Runs every method on every app. A failing cell is recorded and the rest
/// still run.
pub fn compare(records: &[UserOpinionRecord], methods: &[MethodKind], config: &BenchConfig) -> Result<BenchmarkReport, BenchError> {
    let mut apps: Vec<String> = records.iter().map(|r| r.app_id.clone()).collect();
    apps.sort_by_key(|a| (app_number(a).unwrap_or(u32::MAX), a.clone()));
    apps.dedup();
    if apps.is_empty() {
        return Err(BenchError::Config("no records to benchmark".into()));
    }
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();
    if methods.is_empty() {
        return Err(BenchError::Config("no methods selected".into()));
    }
    let by_app: Vec<Vec<&UserOpinionRecord>> =
        apps.iter().map(|a| records.iter().filter(|r| &r.app_id == a).collect()).collect();

    let mut cells = Vec::new();
    for &m in &methods {
        for (i, app) in apps.iter().enumerate() {
            let outcome = run_method(m, app, i, &by_app[i], config).map_err(|e| e.to_string());
            cells.push(Cell { method: m, app_id: app.clone(), outcome });
        }
    }
    let metadata = json!({
        "dataset_sha256": dataset_checksum(records),
        "records": records.len(),
        "seed": config.seed,
        "app_seed_rule": "seed + app position",
        "error_normalization": "100 * mae / 4",
        "features": config.features.iter().map(|(m, a)| json!({"measure": m.name(), "start_weight": a})).collect::<Vec<_>>(),
        "polarity": config.polarity,
        "hill_climb": {
            "step": config.hill.step,
            "max_iters": config.hill.max_iters,
            "restarts": config.hill.restarts,
            "bounds": config.space.coords.iter().map(|c| json!({"name": c.name, "lo": c.lo, "hi": c.hi})).collect::<Vec<_>>(),
        },
        "data_driven": config.data_driven,
        "experts": config.experts,
        "per_app_average": config.per_app_average,
        "holdout": config.holdout,
    });
    Ok(BenchmarkReport { apps, methods, cells, metadata })
}
