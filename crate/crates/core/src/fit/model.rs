use std::collections::BTreeMap;

use crate::dsl::Program;
use crate::quma::{Measure, UserOpinionRecord};
use crate::semlogic::Pattern;

use super::FitError;

pub const SCALE_MIN: f64 = 1.0;
pub const SCALE_MAX: f64 = 5.0;

/// Default scale direction of a context measure: perceived UI complexity
/// counts against quality, everything else for it.
pub fn default_polarity(m: Measure) -> f64 {
    if m == Measure::UiComplexity {
        -1.0
    } else {
        1.0
    }
}

/// Linear quality estimate over rule-linked context measures, clamped to
/// the Likert range.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoringModel {
    pub features: Vec<Measure>,
    pub weights: Vec<f64>,
    pub polarity: Vec<f64>,
    pub bias: f64,
}

impl ScoringModel {
    pub fn new(features: Vec<Measure>, weights: Vec<f64>, bias: f64) -> Self {
        let polarity = features.iter().map(|&m| default_polarity(m)).collect();
        ScoringModel { features, weights, polarity, bias }
    }

    /// Weights followed by the bias, the coordinate layout every search
    /// works in.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.push(self.bias);
        p
    }

    pub fn with_params(&self, params: &[f64]) -> ScoringModel {
        let k = self.features.len();
        ScoringModel { weights: params[..k].to_vec(), bias: params[k], ..self.clone() }
    }

    pub fn predict(&self, r: &UserOpinionRecord) -> Result<f64, FitError> {
        let mut s = self.bias;
        for ((&m, w), pol) in self.features.iter().zip(&self.weights).zip(&self.polarity) {
            let v = r.score(m).ok_or_else(|| FitError::MissingFeature { measure: m, app_id: r.app_id.clone(), seq: r.seq })?;
            s += w * pol * f64::from(v);
        }
        Ok(s.clamp(SCALE_MIN, SCALE_MAX))
    }
}

/// Mean absolute error expressed as a percentage of the scale span.
pub fn error_percentage(mae: f64) -> f64 {
    100.0 * mae / (SCALE_MAX - SCALE_MIN)
}

/// Error percentage of `predict` against each record's stated quality.
pub fn objective_with<F>(records: &[&UserOpinionRecord], mut predict: F) -> Result<f64, FitError>
where
    F: FnMut(&UserOpinionRecord) -> Result<f64, FitError>,
{
    if records.is_empty() {
        return Err(FitError::Empty);
    }
    let mut total = 0.0;
    for r in records {
        total += (predict(r)? - f64::from(r.absolute_quality)).abs();
    }
    Ok(error_percentage(total / records.len() as f64))
}

pub fn objective(records: &[&UserOpinionRecord], model: &ScoringModel) -> Result<f64, FitError> {
    objective_with(records, |r| model.predict(r))
}

/// Records flattened into a dense matrix so that a search can score many
/// parameter vectors cheaply.
#[derive(Clone, Debug)]
pub struct Design {
    pub features: Vec<Measure>,
    pub polarity: Vec<f64>,
    /// Row-major, one row of polarity-signed scores per record.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Design {
    pub fn new(records: &[&UserOpinionRecord], features: &[Measure], polarity: &[f64]) -> Result<Design, FitError> {
        if records.is_empty() {
            return Err(FitError::Empty);
        }
        let mut x = Vec::with_capacity(records.len() * features.len());
        for r in records {
            for (&m, pol) in features.iter().zip(polarity) {
                let v = r.score(m).ok_or_else(|| FitError::MissingFeature { measure: m, app_id: r.app_id.clone(), seq: r.seq })?;
                x.push(pol * f64::from(v));
            }
        }
        Ok(Design {
            features: features.to_vec(),
            polarity: polarity.to_vec(),
            x,
            y: records.iter().map(|r| f64::from(r.absolute_quality)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.y.len()
    }

    pub fn mae(&self, params: &[f64]) -> f64 {
        let k = self.features.len();
        let bias = params[k];
        let total: f64 = self
            .x
            .chunks_exact(k.max(1))
            .take(self.rows())
            .zip(&self.y)
            .map(|(row, y)| {
                let s = if k == 0 { bias } else { bias + row.iter().zip(params).map(|(v, w)| v * w).sum::<f64>() };
                (s.clamp(SCALE_MIN, SCALE_MAX) - y).abs()
            })
            .sum();
        total / self.rows() as f64
    }

    pub fn error(&self, params: &[f64]) -> f64 {
        error_percentage(self.mae(params))
    }

    /// Ordinary least-squares weights and bias (unclamped), in parameter
    /// layout.
    pub fn least_squares(&self) -> Result<Vec<f64>, FitError> {
        let k = self.features.len();
        let n = self.rows();
        let a = nalgebra::DMatrix::from_fn(n, k + 1, |i, j| if j < k { self.x[i * k + j] } else { 1.0 });
        let b = nalgebra::DVector::from_column_slice(&self.y);
        let svd = a.svd(true, true);
        let sol = svd.solve(&b, 1e-12).map_err(|e| FitError::Config(format!("least squares failed: {e}")))?;
        Ok(sol.iter().copied().collect())
    }
}

/// Context measures linked to the quality estimate by a scoring rule, with
/// each rule's alpha as the measure's starting weight.
///
/// A scoring rule has a single left-hand literal whose head names a context
/// measure and a right-hand side of `quality(..)`.
pub fn features_from_rules(program: &Program) -> Result<Vec<(Measure, f64)>, FitError> {
    let mut out: BTreeMap<usize, (Measure, f64)> = BTreeMap::new();
    for (i, rule) in program.rules.iter().enumerate() {
        let concludes_quality =
            rule.rhs.iter().any(|l| matches!(&l.body, Pattern::App { head, .. } if head.as_str() == "quality"));
        if !concludes_quality {
            continue;
        }
        let [lit] = rule.lhs.as_slice() else {
            return Err(FitError::Rules(format!("scoring rule {} must have exactly one premise", rule.id)));
        };
        let name = match &lit.body {
            Pattern::App { head, args } if args.len() == 1 => head.as_str(),
            other => return Err(FitError::Rules(format!("rule {}: `{other}` is not a measure premise", rule.id))),
        };
        let m: Measure = name.parse().map_err(|_| FitError::Rules(format!("rule {}: `{name}` is not a measure", rule.id)))?;
        if !Measure::CONTEXT.contains(&m) && !matches!(m, Measure::RelativeQuality | Measure::Accordance) {
            return Err(FitError::Rules(format!("rule {}: `{name}` cannot feed the quality estimate", rule.id)));
        }
        if out.values().any(|(seen, _)| *seen == m) {
            return Err(FitError::Rules(format!("rule {}: `{name}` is linked twice", rule.id)));
        }
        out.insert(i, (m, rule.alpha));
    }
    if out.is_empty() {
        return Err(FitError::Rules("no rule concludes `quality(..)`".into()));
    }
    Ok(out.into_values().collect())
}
