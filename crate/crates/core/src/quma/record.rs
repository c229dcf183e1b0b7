use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::QumaError;

/// A scored questionnaire item. The first five are always present; the last
/// two are optional columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    AbsoluteQuality,
    ErrorFreeness,
    UiComplexity,
    Rationality,
    Usability,
    RelativeQuality,
    Accordance,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::AbsoluteQuality,
        Measure::ErrorFreeness,
        Measure::UiComplexity,
        Measure::Rationality,
        Measure::Usability,
        Measure::RelativeQuality,
        Measure::Accordance,
    ];

    /// The four context measures a quality estimate is built from.
    pub const CONTEXT: [Measure; 4] =
        [Measure::ErrorFreeness, Measure::UiComplexity, Measure::Rationality, Measure::Usability];

    pub fn name(self) -> &'static str {
        match self {
            Measure::AbsoluteQuality => "absolute_quality",
            Measure::ErrorFreeness => "error_freeness",
            Measure::UiComplexity => "ui_complexity",
            Measure::Rationality => "rationality",
            Measure::Usability => "usability",
            Measure::RelativeQuality => "relative_quality",
            Measure::Accordance => "accordance",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = QumaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Measure::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| QumaError::UnknownMeasure(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
    Other,
    #[default]
    Unknown,
}

impl Gender {
    pub fn parse(s: &str) -> Option<Gender> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f" | "female" => Some(Gender::Female),
            "m" | "male" => Some(Gender::Male),
            "other" => Some(Gender::Other),
            "" | "unknown" | "?" => Some(Gender::Unknown),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
            Gender::Other => "other",
            Gender::Unknown => "unknown",
        }
    }
}

/// One filled-in questionnaire. Scores are on a 1..=5 Likert scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserOpinionRecord {
    pub app_id: String,
    pub absolute_quality: u8,
    pub error_freeness: u8,
    pub ui_complexity: u8,
    pub rationality: u8,
    pub usability: u8,
    pub gender: Gender,
    pub age: Option<u16>,
    pub community_id: String,
    pub seq: u64,
    pub relative_quality: Option<u8>,
    pub accordance: Option<u8>,
}

impl UserOpinionRecord {
    /// The record's score for `m`, or `None` for an absent optional column.
    pub fn score(&self, m: Measure) -> Option<u8> {
        match m {
            Measure::AbsoluteQuality => Some(self.absolute_quality),
            Measure::ErrorFreeness => Some(self.error_freeness),
            Measure::UiComplexity => Some(self.ui_complexity),
            Measure::Rationality => Some(self.rationality),
            Measure::Usability => Some(self.usability),
            Measure::RelativeQuality => self.relative_quality,
            Measure::Accordance => self.accordance,
        }
    }

    pub fn set_score(&mut self, m: Measure, v: u8) {
        match m {
            Measure::AbsoluteQuality => self.absolute_quality = v,
            Measure::ErrorFreeness => self.error_freeness = v,
            Measure::UiComplexity => self.ui_complexity = v,
            Measure::Rationality => self.rationality = v,
            Measure::Usability => self.usability = v,
            Measure::RelativeQuality => self.relative_quality = Some(v),
            Measure::Accordance => self.accordance = Some(v),
        }
    }

    /// A record with every score set to `v`; handy in tests and examples.
    pub fn uniform(app_id: &str, community_id: &str, seq: u64, v: u8) -> Self {
        UserOpinionRecord {
            app_id: app_id.to_string(),
            absolute_quality: v,
            error_freeness: v,
            ui_complexity: v,
            rationality: v,
            usability: v,
            gender: Gender::Unknown,
            age: None,
            community_id: community_id.to_string(),
            seq,
            relative_quality: None,
            accordance: None,
        }
    }
}

pub fn is_likert(v: u8) -> bool {
    (1..=5).contains(&v)
}

/// Parses an anonymized app code `M<k>` with k ≥ 1.
pub fn app_number(app_id: &str) -> Option<u32> {
    let n: u32 = app_id.strip_prefix('M')?.parse().ok()?;
    (n >= 1 && !app_id[1..].starts_with('0')).then_some(n)
}
