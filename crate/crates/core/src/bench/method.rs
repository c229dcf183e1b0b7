use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::fit::{
    hill_climb, state_space_search, Design, FitError, HillClimbConfig, ParameterSpace, ScoringModel, SCALE_MAX, SCALE_MIN,
};
use crate::kv;
use crate::quma::{Measure, UserOpinionRecord};

use super::BenchError;

/// The benchmarked estimators, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    SimpleAverage,
    ExpertScore,
    KarbHillClimb,
    DataDrivenKarb,
}

impl MethodKind {
    pub const ALL: [MethodKind; 4] =
        [MethodKind::SimpleAverage, MethodKind::ExpertScore, MethodKind::KarbHillClimb, MethodKind::DataDrivenKarb];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::SimpleAverage => "simple_average",
            MethodKind::ExpertScore => "expert_score",
            MethodKind::KarbHillClimb => "karb_hill_climb",
            MethodKind::DataDrivenKarb => "data_driven_karb",
        }
    }

    /// 1-based position in report order.
    pub fn rank(self) -> usize {
        MethodKind::ALL.iter().position(|&m| m == self).unwrap_or(0) + 1
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MethodKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown method `{s}`")))
    }
}

/// Parses `all` or a comma-separated list, returned in report order.
pub fn parse_methods(s: &str) -> Result<Vec<MethodKind>, BenchError> {
    if s.trim() == "all" {
        return Ok(MethodKind::ALL.to_vec());
    }
    let mut out: Vec<MethodKind> = s.split(',').map(|p| p.trim().parse()).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(BenchError::Config("no methods selected".into()));
    }
    Ok(out)
}

/// Fixed per-app quality scores supplied by human experts.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExpertScores(pub BTreeMap<String, f64>);

impl ExpertScores {
    /// Reads `app_id = score` lines.
    pub fn parse(text: &str) -> Result<ExpertScores, BenchError> {
        let mut out = BTreeMap::new();
        for e in kv::parse(text).map_err(FitError::from)? {
            let v = e.number().map_err(FitError::from)?;
            if !(SCALE_MIN..=SCALE_MAX).contains(&v) {
                return Err(BenchError::Config(format!("line {}: expert score {v} is outside 1..5", e.line)));
            }
            out.insert(e.key, v);
        }
        Ok(ExpertScores(out))
    }

    pub fn get(&self, app_id: &str) -> Option<f64> {
        self.0.get(app_id).copied()
    }
}

/// Search settings for the data-driven method: a grid of `levels` values per
/// coordinate, centred on the least-squares fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DataDrivenConfig {
    pub levels: usize,
    pub weight_spacing: f64,
    pub bias_spacing: f64,
    pub budget: usize,
}

impl Default for DataDrivenConfig {
    fn default() -> Self {
        DataDrivenConfig { levels: 5, weight_spacing: 0.05, bias_spacing: 0.1, budget: 600 }
    }
}

/// Everything the four methods need besides the records.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    /// Scored features with their starting weights, from the scoring rules.
    pub features: Vec<(Measure, f64)>,
    pub polarity: Vec<f64>,
    /// Bounds for hill climbing (levels are unused there).
    pub space: ParameterSpace,
    pub hill: HillClimbConfig,
    pub data_driven: DataDrivenConfig,
    pub experts: ExpertScores,
    pub seed: u64,
    /// Predict each app's mean context score instead of each record's own.
    pub per_app_average: bool,
    /// Fraction of each app's records held out for evaluation (the tail in
    /// file order). `None` fits and evaluates on the same records.
    pub holdout: Option<f64>,
}

/// One method's result on one app.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodRun {
    pub predictions: Vec<f64>,
    pub error_percentage: f64,
    pub mae: f64,
    /// Fitted weights then bias, for the fitted methods.
    pub params: Option<Vec<f64>>,
    pub evaluations: usize,
}

fn split<'a>(records: &[&'a UserOpinionRecord], holdout: Option<f64>) -> Result<(Vec<&'a UserOpinionRecord>, Vec<&'a UserOpinionRecord>), BenchError> {
    match holdout {
        None => Ok((records.to_vec(), records.to_vec())),
        Some(f) if f > 0.0 && f < 1.0 => {
            let test = ((records.len() as f64) * f).ceil() as usize;
            let cut = records.len() - test.min(records.len());
            if cut == 0 || cut == records.len() {
                return Err(BenchError::Config(format!("holdout {f} leaves an empty split of {} records", records.len())));
            }
            Ok((records[..cut].to_vec(), records[cut..].to_vec()))
        }
        Some(f) => Err(BenchError::Config(format!("holdout fraction {f} must lie strictly between 0 and 1"))),
    }
}

fn context_mean(r: &UserOpinionRecord, features: &[Measure], polarity: &[f64]) -> Result<f64, FitError> {
    let mut total = 0.0;
    for (&m, &pol) in features.iter().zip(polarity) {
        let v = f64::from(
            r.score(m).ok_or_else(|| FitError::MissingFeature { measure: m, app_id: r.app_id.clone(), seq: r.seq })?,
        );
        total += if pol < 0.0 { SCALE_MIN + SCALE_MAX - v } else { v };
    }
    Ok(total / features.len() as f64)
}

/// Runs `method` on one app's records. `app_index` offsets the seed so that
/// apps draw independent random streams.
pub fn run_method(
    method: MethodKind,
    app_id: &str,
    app_index: usize,
    records: &[&UserOpinionRecord],
    config: &BenchConfig,
) -> Result<MethodRun, BenchError> {
    if records.is_empty() {
        return Err(FitError::Empty.into());
    }
    let (train, test) = split(records, config.holdout)?;
    let features: Vec<Measure> = config.features.iter().map(|(m, _)| *m).collect();
    let seed = config.seed.wrapping_add(app_index as u64);
    let base = ScoringModel { features: features.clone(), weights: Vec::new(), polarity: config.polarity.clone(), bias: 0.0 };

    let (predictions, params, evaluations) = match method {
        MethodKind::SimpleAverage => {
            let per_record: Vec<f64> =
                test.iter().map(|r| context_mean(r, &features, &config.polarity)).collect::<Result<_, _>>()?;
            let preds = if config.per_app_average {
                let train_means: Vec<f64> =
                    train.iter().map(|r| context_mean(r, &features, &config.polarity)).collect::<Result<_, _>>()?;
                let mean = train_means.iter().sum::<f64>() / train_means.len() as f64;
                vec![mean; test.len()]
            } else {
                per_record
            };
            (preds, None, 0)
        }
        MethodKind::ExpertScore => {
            let s = config.experts.get(app_id).ok_or_else(|| BenchError::MissingExpertScore(app_id.to_string()))?;
            (vec![s; test.len()], None, 0)
        }
        MethodKind::KarbHillClimb => {
            let design = Design::new(&train, &features, &config.polarity)?;
            let init = config.rule_start();
            let hc = HillClimbConfig { seed, ..config.hill };
            let r = hill_climb(|p: &[f64]| design.error(p), &config.space, &init, &hc)?;
            let model = base.with_params(&r.best);
            (test.iter().map(|t| model.predict(t)).collect::<Result<_, _>>()?, Some(r.best), r.evaluations)
        }
        MethodKind::DataDrivenKarb => {
            let design = Design::new(&train, &features, &config.polarity)?;
            let centre = design.least_squares()?;
            let dd = &config.data_driven;
            let names: Vec<String> = features.iter().map(|m| m.name().to_string()).chain(["bias".into()]).collect();
            let spacing: Vec<f64> =
                features.iter().map(|_| dd.weight_spacing).chain([dd.bias_spacing]).collect();
            let space = ParameterSpace::centred(&names, &centre, &spacing, dd.levels)?;
            let start = space.nearest(&centre);
            let r = state_space_search(|p: &[f64]| design.error(p), &space, dd.budget, Some(start), seed)?;
            let model = base.with_params(&r.best);
            (test.iter().map(|t| model.predict(t)).collect::<Result<_, _>>()?, Some(r.best), r.evaluations)
        }
    };
    let mae = predictions.iter().zip(&test).map(|(p, r)| (p - f64::from(r.absolute_quality)).abs()).sum::<f64>()
        / test.len() as f64;
    Ok(MethodRun { predictions, error_percentage: crate::fit::error_percentage(mae), mae, params, evaluations })
}

impl BenchConfig {
    /// The rule weights with negative-polarity measures reverse-scored, as
    /// weights then bias. With equal weights summing to one this predicts
    /// exactly the simple average.
    pub fn rule_start(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.features.iter().map(|(_, a)| *a).collect();
        let reversal: f64 = self
            .features
            .iter()
            .zip(&self.polarity)
            .filter(|(_, &pol)| pol < 0.0)
            .map(|((_, a), _)| a * (SCALE_MIN + SCALE_MAX))
            .sum();
        p.push(reversal);
        p
    }

    /// Assembles a configuration from the scoring-rule program, the space
    /// file and the experts file.
    pub fn from_sources(rules: &str, space: &str, experts: Option<&str>, seed: u64) -> Result<BenchConfig, BenchError> {
        let program = crate::dsl::parse_program(rules).into_result().map_err(|diags| {
            BenchError::Config(diags.iter().map(|d| d.render("<rules>")).collect::<Vec<_>>().join("\n"))
        })?;
        let features = crate::fit::features_from_rules(&program)?;
        let measures: Vec<Measure> = features.iter().map(|(m, _)| *m).collect();
        let space = crate::fit::SpaceConfig::parse(space, &measures)?;
        Ok(BenchConfig {
            features,
            polarity: space.polarity,
            space: space.space,
            hill: HillClimbConfig::default(),
            data_driven: DataDrivenConfig::default(),
            experts: experts.map(ExpertScores::parse).transpose()?.unwrap_or_default(),
            seed,
            per_app_average: false,
            holdout: None,
        })
    }
}
