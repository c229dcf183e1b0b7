use crate::kv;
use crate::quma::Measure;

use super::model::default_polarity;
use super::FitError;

/// One searchable parameter: a sorted set of grid levels for discrete
/// search and a closed interval for continuous search.
#[derive(Clone, Debug, PartialEq)]
pub struct Coordinate {
    pub name: String,
    pub levels: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl Coordinate {
    pub fn new(name: impl Into<String>, mut levels: Vec<f64>, bounds: Option<(f64, f64)>) -> Result<Self, FitError> {
        let name = name.into();
        if levels.is_empty() {
            return Err(FitError::Config(format!("{name}: no levels")));
        }
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let (lo, hi) = bounds.unwrap_or((levels[0], levels[levels.len() - 1]));
        if !(lo <= levels[0] && levels[levels.len() - 1] <= hi) {
            return Err(FitError::Config(format!("{name}: bounds [{lo}, {hi}] do not contain every level")));
        }
        Ok(Coordinate { name, levels, lo, hi })
    }
}

/// The grid searched over. State indices are row-major over the coordinates
/// with the last coordinate varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSpace {
    pub coords: Vec<Coordinate>,
}

impl ParameterSpace {
    pub fn new(coords: Vec<Coordinate>) -> Self {
        ParameterSpace { coords }
    }

    pub fn dims(&self) -> usize {
        self.coords.len()
    }

    /// Number of grid states, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        self.coords.iter().fold(1u64, |acc, c| acc.saturating_mul(c.levels.len() as u64))
    }

    pub fn levels_of(&self, mut index: u64) -> Vec<usize> {
        let mut out = vec![0; self.dims()];
        for (slot, c) in out.iter_mut().zip(&self.coords).rev() {
            let n = c.levels.len() as u64;
            *slot = (index % n) as usize;
            index /= n;
        }
        out
    }

    pub fn index_of(&self, levels: &[usize]) -> u64 {
        levels.iter().zip(&self.coords).fold(0u64, |acc, (&l, c)| acc * c.levels.len() as u64 + l as u64)
    }

    pub fn point(&self, index: u64) -> Vec<f64> {
        self.levels_of(index).iter().zip(&self.coords).map(|(&l, c)| c.levels[l]).collect()
    }

    /// Grid state closest to `point`, coordinate by coordinate.
    pub fn nearest(&self, point: &[f64]) -> u64 {
        let levels: Vec<usize> = point
            .iter()
            .zip(&self.coords)
            .map(|(v, c)| {
                (0..c.levels.len()).min_by(|&a, &b| (c.levels[a] - v).abs().total_cmp(&(c.levels[b] - v).abs())).unwrap_or(0)
            })
            .collect();
        self.index_of(&levels)
    }

    /// A grid of `n` evenly spaced levels per coordinate centred on
    /// `centre`, `spacing[i]` apart.
    pub fn centred(names: &[String], centre: &[f64], spacing: &[f64], n: usize) -> Result<Self, FitError> {
        if n == 0 {
            return Err(FitError::Config("need at least one level per coordinate".into()));
        }
        let mid = (n - 1) as f64 / 2.0;
        let coords = names
            .iter()
            .zip(centre)
            .zip(spacing)
            .map(|((name, &c), &s)| Coordinate::new(name.clone(), (0..n).map(|k| c + (k as f64 - mid) * s).collect(), None))
            .collect::<Result<_, _>>()?;
        Ok(ParameterSpace { coords })
    }
}

/// A parameter space read from a key/value file, together with feature
/// polarities.
///
/// ```text
/// weight.error_freeness.levels = 0, 0.15, 0.3, 0.45, 0.6
/// weight.error_freeness.bounds = -1, 1
/// polarity.ui_complexity = -1
/// bias.levels = 0, 0.5, 1, 1.5, 2
/// bias.bounds = -2, 4
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceConfig {
    pub space: ParameterSpace,
    pub polarity: Vec<f64>,
}

impl SpaceConfig {
    /// Builds the space for `features` (then bias). Every feature needs
    /// levels; keys for features outside the list are rejected.
    pub fn parse(text: &str, features: &[Measure]) -> Result<SpaceConfig, FitError> {
        let entries = kv::parse(text)?;
        let mut levels: Vec<Option<Vec<f64>>> = vec![None; features.len() + 1];
        let mut bounds: Vec<Option<(f64, f64)>> = vec![None; features.len() + 1];
        let mut polarity: Vec<f64> = features.iter().map(|&m| default_polarity(m)).collect();
        for e in &entries {
            let parts: Vec<&str> = e.key.split('.').collect();
            let (slot, field) = match parts.as_slice() {
                ["bias", field] => (features.len(), *field),
                ["weight", f, field] => {
                    (feature_slot(features, f).map_err(|m| e.error(m))?, *field)
                }
                ["polarity", f] => {
                    let slot = feature_slot(features, f).map_err(|m| e.error(m))?;
                    let v = e.number()?;
                    if v != 1.0 && v != -1.0 {
                        return Err(e.error("polarity must be 1 or -1".into()).into());
                    }
                    polarity[slot] = v;
                    continue;
                }
                _ => return Err(e.error("unknown key".into()).into()),
            };
            match field {
                "levels" => levels[slot] = Some(e.numbers()?),
                "bounds" => match e.numbers()?.as_slice() {
                    [lo, hi] if lo <= hi => bounds[slot] = Some((*lo, *hi)),
                    _ => return Err(e.error("bounds must be `lo, hi` with lo <= hi".into()).into()),
                },
                _ => return Err(e.error("expected `levels` or `bounds`".into()).into()),
            }
        }
        let names: Vec<String> = features.iter().map(|m| m.name().to_string()).chain(["bias".to_string()]).collect();
        let coords = names
            .iter()
            .zip(levels)
            .zip(bounds)
            .map(|((name, lv), b)| {
                let lv = lv.ok_or_else(|| FitError::Config(format!("{name}: no levels given")))?;
                Coordinate::new(name.clone(), lv, b)
            })
            .collect::<Result<_, _>>()?;
        Ok(SpaceConfig { space: ParameterSpace::new(coords), polarity })
    }
}

fn feature_slot(features: &[Measure], name: &str) -> Result<usize, String> {
    features
        .iter()
        .position(|m| m.name() == name)
        .ok_or_else(|| format!("`{name}` is not one of the scored features"))
}
