//! Speech production: per-tick retrieval, score thresholding and the
//! differential lexicon.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::behavior::is_trigger_behavior;
use crate::learner::Retriever;
use crate::prosody::{Speaker, Utterance, Word};
use crate::smm::{tick_to_secs, FeatureTuple, SmmVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LanguagingConfig {
    /// Score a word must reach before it is spoken.
    pub threshold: u32,
    /// Duration of a rendered robot utterance, seconds.
    pub utterance_duration: f64,
}

impl Default for LanguagingConfig {
    fn default() -> Self {
        LanguagingConfig {
            threshold: 15,
            utterance_duration: 0.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeechEvent {
    pub tick: u64,
    pub word: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LanguagingState {
    pub scores: BTreeMap<String, u32>,
    pub suppressed: Option<String>,
    pub last_projection: Option<FeatureTuple>,
}

impl LanguagingState {
    /// One tick of the speech loop. `projection` is the match projection of `query`.
    pub fn tick(
        &mut self,
        query: &SmmVector,
        projection: &FeatureTuple,
        retriever: &mut Retriever,
        cfg: &LanguagingConfig,
    ) -> Option<SpeechEvent> {
        if self.last_projection.as_ref() != Some(projection) {
            if self.last_projection.is_some() {
                self.suppressed = None;
            }
            self.last_projection = Some(projection.clone());
        }
        if !is_trigger_behavior(query.behavior) {
            return None;
        }
        let (best, _) = retriever.best_match(projection, self.suppressed.as_deref())?;
        for (w, s) in self.scores.iter_mut() {
            if *w != best {
                *s = s.saturating_sub(1);
            }
        }
        let score = self.scores.entry(best.clone()).or_insert(0);
        *score += 1;
        if *score < cfg.threshold {
            return None;
        }
        self.scores.clear();
        self.suppressed = Some(best.clone());
        Some(SpeechEvent {
            tick: query.tick,
            word: best,
        })
    }
}

/// Robot speech rendered as one-word utterances with nominal prosody.
pub fn robot_utterance_log(events: &[SpeechEvent], cfg: &LanguagingConfig) -> Vec<Utterance> {
    events
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let t = tick_to_secs(e.tick);
            Utterance {
                id: format!("r{:04}", i + 1),
                t_start: t,
                t_end: t + cfg.utterance_duration,
                speaker: Speaker::Robot,
                neg_type: None,
                words: vec![Word::new(e.word.clone(), 200.0, 0.6, cfg.utterance_duration)],
            }
        })
        .collect()
}
