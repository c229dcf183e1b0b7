use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::record::{Gender, Measure, UserOpinionRecord};
use super::QumaError;

/// Shape of a synthetic survey.
///
/// Each respondent has a latent quality perception drawn around their app's
/// latent quality plus a community offset. Context scores are noisy readings
/// of that perception (mirrored for negative-polarity measures). The stated
/// quality is the perception shifted by how far each context score strays
/// from it, times that measure's weight, plus its own noise.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    /// Latent quality per app, in app-code order (M1, M2, ...).
    pub latent: Vec<f64>,
    /// Total records; split evenly across apps, rounding up.
    pub records: usize,
    /// Total micro-communities; split evenly across apps, rounding up.
    pub communities: usize,
    pub community_sd: f64,
    pub person_sd: f64,
    pub context_sd: f64,
    pub quality_sd: f64,
    /// Influence of each context measure on stated quality.
    pub weights: Vec<(Measure, f64)>,
    /// Systematic shift of a measure's ratings away from the perception,
    /// e.g. respondents who rate rationality harshly.
    pub offsets: Vec<(Measure, f64)>,
    /// Measures whose scale runs opposite to quality.
    pub negative: Vec<Measure>,
    /// Also fill the optional relative-quality and accordance columns.
    pub optional_columns: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            latent: vec![3.9, 3.3, 2.7, 3.6, 2.4],
            records: 5000,
            communities: 250,
            community_sd: 0.3,
            person_sd: 0.6,
            context_sd: 1.2,
            quality_sd: 0.6,
            weights: vec![
                (Measure::ErrorFreeness, 0.5),
                (Measure::UiComplexity, 0.05),
                (Measure::Rationality, 0.05),
                (Measure::Usability, 0.35),
            ],
            offsets: vec![(Measure::UiComplexity, 1.0), (Measure::Rationality, -1.5), (Measure::Usability, -1.0)],
            negative: vec![Measure::UiComplexity],
            optional_columns: true,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), QumaError> {
        let bad = |msg: String| Err(QumaError::Config(msg));
        if self.latent.is_empty() {
            return bad("at least one app is required".into());
        }
        if let Some(l) = self.latent.iter().find(|l| !(1.0..=5.0).contains(*l)) {
            return bad(format!("latent quality {l} is outside 1..5"));
        }
        if self.records == 0 || self.communities == 0 {
            return bad("record and community counts must be positive".into());
        }
        if self.communities > self.records {
            return bad(format!("{} communities cannot share {} records", self.communities, self.records));
        }
        for (name, sd) in [
            ("community_sd", self.community_sd),
            ("person_sd", self.person_sd),
            ("context_sd", self.context_sd),
            ("quality_sd", self.quality_sd),
        ] {
            if !(sd >= 0.0 && sd.is_finite()) {
                return bad(format!("{name} must be a non-negative number, got {sd}"));
            }
        }
        if let Some((m, _)) = self.weights.iter().chain(&self.offsets).find(|(m, _)| !Measure::CONTEXT.contains(m)) {
            return bad(format!("{m} is not a context measure"));
        }
        Ok(())
    }

    fn polarity(&self, m: Measure) -> f64 {
        if self.negative.contains(&m) {
            -1.0
        } else {
            1.0
        }
    }

    fn weight(&self, m: Measure) -> f64 {
        self.weights.iter().find(|(w, _)| *w == m).map_or(0.0, |(_, w)| *w)
    }

    fn offset(&self, m: Measure) -> f64 {
        self.offsets.iter().find(|(o, _)| *o == m).map_or(0.0, |(_, o)| *o)
    }
}

fn likert(x: f64) -> u8 {
    x.round().clamp(1.0, 5.0) as u8
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("validated standard deviation")
}

/// Draws a dataset. Output is grouped by app, then community, then seq, and
/// is a pure function of `config` and `seed`.
pub fn generate_synthetic(config: &SynthConfig, seed: u64) -> Result<Vec<UserOpinionRecord>, QumaError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let apps = config.latent.len();
    let per_app = config.records.div_ceil(apps);
    let groups = config.communities.div_ceil(apps);
    let group_size = per_app.div_ceil(groups);
    let (community, person) = (normal(config.community_sd), normal(config.person_sd));
    let (context, quality) = (normal(config.context_sd), normal(config.quality_sd));

    let mut out = Vec::with_capacity(per_app * apps);
    let mut community_no = 0;
    for (a, &latent) in config.latent.iter().enumerate() {
        let app_id = format!("M{}", a + 1);
        let mut left = per_app;
        for _ in 0..groups {
            community_no += 1;
            let community_id = format!("c{community_no:03}");
            let offset = community.sample(&mut rng);
            let size = group_size.min(left).max(1);
            left = left.saturating_sub(size);
            for seq in 1..=size as u64 {
                let perceived = latent + offset + person.sample(&mut rng);
                let mut rec = UserOpinionRecord::uniform(&app_id, &community_id, seq, 3);
                let mut shift = 0.0;
                for m in Measure::CONTEXT {
                    let pol = config.polarity(m);
                    let centre = (if pol > 0.0 { perceived } else { 6.0 - perceived }) + config.offset(m);
                    let s = likert(centre + context.sample(&mut rng));
                    rec.set_score(m, s);
                    shift += config.weight(m) * pol * (f64::from(s) - centre);
                }
                let stated = perceived + shift + quality.sample(&mut rng);
                rec.absolute_quality = likert(stated);
                if config.optional_columns {
                    rec.relative_quality = Some(likert(stated + quality.sample(&mut rng)));
                    rec.accordance = Some(likert(perceived + context.sample(&mut rng)));
                }
                rec.gender = match rng.gen_range(0..20) {
                    0..=8 => Gender::Female,
                    9..=17 => Gender::Male,
                    18 => Gender::Other,
                    _ => Gender::Unknown,
                };
                rec.age = (rng.gen_range(0..10) != 0).then(|| rng.gen_range(16..=70));
                out.push(rec);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_neutral_survey_is_all_threes() {
        let cfg = SynthConfig {
            latent: vec![3.0],
            records: 40,
            communities: 2,
            community_sd: 0.0,
            person_sd: 0.0,
            context_sd: 0.0,
            quality_sd: 0.0,
            weights: vec![],
            offsets: vec![],
            ..SynthConfig::default()
        };
        let recs = generate_synthetic(&cfg, 9).unwrap();
        assert_eq!(recs.len(), 40);
        for r in &recs {
            for m in Measure::ALL {
                assert_eq!(r.score(m), Some(3), "{m}");
            }
        }

        let shifted = SynthConfig { offsets: SynthConfig::default().offsets, ..cfg };
        for r in generate_synthetic(&shifted, 9).unwrap() {
            assert_eq!(r.error_freeness, 3);
            assert!(r.ui_complexity > 3 && r.rationality < 3 && r.usability < 3);
            assert_eq!(r.absolute_quality, 3);
        }
    }

    #[test]
    fn seed_replay() {
        let cfg = SynthConfig { records: 300, communities: 15, ..SynthConfig::default() };
        assert_eq!(generate_synthetic(&cfg, 1).unwrap(), generate_synthetic(&cfg, 1).unwrap());
        assert_ne!(generate_synthetic(&cfg, 1).unwrap(), generate_synthetic(&cfg, 2).unwrap());
    }

    #[test]
    fn survey_sized_like_the_field_study() {
        let cfg = SynthConfig { latent: vec![3.0; 10], records: 7000, communities: 350, ..SynthConfig::default() };
        let recs = generate_synthetic(&cfg, 5).unwrap();
        assert_eq!(recs.len(), 7000);
        let comms = super::super::communities(&recs);
        assert_eq!(comms.len(), 350);
        assert!(comms.iter().all(|c| c.records.len() == 20));
    }

    #[test]
    fn bad_ranges_rejected() {
        let cfg = SynthConfig { latent: vec![6.0], ..SynthConfig::default() };
        assert!(matches!(generate_synthetic(&cfg, 0), Err(QumaError::Config(_))));
        let cfg = SynthConfig { quality_sd: -1.0, ..SynthConfig::default() };
        assert!(generate_synthetic(&cfg, 0).is_err());
    }
}
