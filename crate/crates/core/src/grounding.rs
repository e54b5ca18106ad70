//! Offline grounding of salient words in the smm states recorded while they were spoken.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motivation::{classify, MotivationClass, MotivationConfig};
use crate::prosody::{extract_salient, Utterance};
use crate::smm::{smm_projection, BehaviorId, Feature, FeatureTuple, MatchFeature, MatchFeatureSpec, ObjectId, SmmVector, TICK_HZ};

/// Where an exemplar came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Source {
    pub participant: String,
    pub session: u8,
    pub utterance: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundedWord {
    pub word: String,
    pub features: FeatureTuple,
    pub raw_motivation: f64,
    pub source: Source,
    pub weight: u32,
}

/// Per-participant exemplar store; append-only.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbodiedLexicon {
    pub participant: String,
    pub entries: Vec<GroundedWord>,
}

/// Inclusive tick range covered by `[t_start, t_end]`.
pub fn tick_window(t_start: f64, t_end: f64) -> (u64, u64) {
    let lo = (t_start * TICK_HZ - 1e-9).ceil().max(0.0) as u64;
    let hi = (t_end * TICK_HZ + 1e-9).floor().max(0.0) as u64;
    (lo, hi)
}

/// Slice of a tick-sorted body log inside the utterance window.
pub fn window(body_log: &[SmmVector], t_start: f64, t_end: f64) -> &[SmmVector] {
    let (lo, hi) = tick_window(t_start, t_end);
    let a = body_log.partition_point(|v| v.tick < lo);
    let b = body_log.partition_point(|v| v.tick <= hi);
    &body_log[a..b.max(a)]
}

/// Attaches the utterance's salient word to every distinct smm projection
/// observed during the utterance, collapsing repeats into a weight.
pub fn ground_utterance(
    u: &Utterance,
    body_log: &[SmmVector],
    spec: &MatchFeatureSpec,
    mcfg: &MotivationConfig,
    participant: &str,
    session: u8,
) -> Result<Vec<GroundedWord>> {
    let ticks = window(body_log, u.t_start, u.t_end);
    if ticks.is_empty() {
        return Err(Error::UncoveredUtterance(u.id.clone()));
    }
    let word = extract_salient(u).text.clone();
    let mut out: Vec<GroundedWord> = vec![];
    for v in ticks {
        let p = smm_projection(v, spec, mcfg);
        match out.iter_mut().find(|g| g.features == p) {
            Some(g) => g.weight += 1,
            None => out.push(GroundedWord {
                word: word.clone(),
                features: p,
                raw_motivation: v.motivation,
                source: Source {
                    participant: participant.to_string(),
                    session,
                    utterance: u.id.clone(),
                },
                weight: 1,
            }),
        }
    }
    Ok(out)
}

impl EmbodiedLexicon {
    pub fn new(participant: impl Into<String>) -> EmbodiedLexicon {
        EmbodiedLexicon {
            participant: participant.into(),
            entries: vec![],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn merge_session(&mut self, new: Vec<GroundedWord>) -> Result<()> {
        if let Some(g) = new.iter().find(|g| g.source.participant != self.participant) {
            return Err(Error::ParticipantMismatch {
                expected: self.participant.clone(),
                found: g.source.participant.clone(),
            });
        }
        self.entries.extend(new);
        Ok(())
    }

    /// Weight-weighted share of a word's exemplars grounded in negative motivation.
    pub fn negative_association_fraction(&self, word: &str, mcfg: &MotivationConfig) -> Result<f64> {
        let mut total = 0u64;
        let mut neg = 0u64;
        for g in self.entries.iter().filter(|g| g.word == word) {
            total += u64::from(g.weight);
            let class = g
                .features
                .motivation_class()
                .unwrap_or_else(|| classify(g.raw_motivation.clamp(-1.0, 1.0), mcfg));
            if class == MotivationClass::Negative {
                neg += u64::from(g.weight);
            }
        }
        if total == 0 {
            return Err(Error::UnknownWord(word.to_string()));
        }
        Ok(neg as f64 / total as f64)
    }

    pub fn words(&self) -> std::collections::BTreeSet<&str> {
        self.entries.iter().map(|g| g.word.as_str()).collect()
    }
}

/// One line of a lexicon file. Dimensions outside the match spec are null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconRecord {
    pub word: String,
    pub behavior: Option<BehaviorId>,
    pub object: Option<ObjectId>,
    pub face: Option<bool>,
    pub moti_class: Option<MotivationClass>,
    pub moti: f64,
    pub resist: Option<bool>,
    pub weight: u32,
    pub participant: String,
    pub session: u8,
    pub utterance: String,
}

impl LexiconRecord {
    pub fn from_grounded(g: &GroundedWord) -> LexiconRecord {
        let mut r = LexiconRecord {
            word: g.word.clone(),
            behavior: None,
            object: None,
            face: None,
            moti_class: None,
            moti: g.raw_motivation,
            resist: None,
            weight: g.weight,
            participant: g.source.participant.clone(),
            session: g.source.session,
            utterance: g.source.utterance.clone(),
        };
        for f in &g.features.0 {
            match *f {
                Feature::Behavior(b) => r.behavior = Some(b),
                Feature::Object(o) => r.object = o,
                Feature::FaceDetected(x) => r.face = Some(x),
                Feature::MotivationClass(c) => r.moti_class = Some(c),
                Feature::Resistance(x) => r.resist = Some(x),
            }
        }
        r
    }

    pub fn to_grounded(&self, spec: &MatchFeatureSpec) -> Result<GroundedWord> {
        let missing = |name: &str| Error::Config(format!("lexicon record for {:?} lacks {name}", self.word));
        let features = spec
            .features()
            .iter()
            .map(|f| {
                Ok(match f {
                    MatchFeature::Behavior => Feature::Behavior(self.behavior.ok_or_else(|| missing("behavior"))?),
                    MatchFeature::Object => Feature::Object(self.object),
                    MatchFeature::FaceDetected => Feature::FaceDetected(self.face.ok_or_else(|| missing("face"))?),
                    MatchFeature::MotivationClass => {
                        Feature::MotivationClass(self.moti_class.ok_or_else(|| missing("moti_class"))?)
                    }
                    MatchFeature::Resistance => Feature::Resistance(self.resist.ok_or_else(|| missing("resist"))?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if self.weight == 0 {
            return Err(Error::Config(format!("lexicon record for {:?} has weight 0", self.word)));
        }
        Ok(GroundedWord {
            word: self.word.clone(),
            features: FeatureTuple(features),
            raw_motivation: self.moti,
            source: Source {
                participant: self.participant.clone(),
                session: self.session,
                utterance: self.utterance.clone(),
            },
            weight: self.weight,
        })
    }
}
