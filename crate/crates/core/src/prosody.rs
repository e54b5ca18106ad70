//! Utterances, segmentation and prosodic salience.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::teacher::NegationType;

/// A word with its prosodic peaks: maximum f0 (Hz), maximum energy and duration (s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Word {
    pub text: String,
    pub f0: f64,
    pub energy: f64,
    pub dur: f64,
}

impl Word {
    pub fn new(text: impl Into<String>, f0: f64, energy: f64, dur: f64) -> Word {
        Word {
            text: text.into(),
            f0,
            energy,
            dur,
        }
    }

    pub fn is_valid(&self) -> bool {
        !self.text.is_empty()
            && [self.f0, self.energy, self.dur]
                .iter()
                .all(|x| x.is_finite() && *x > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    Teacher,
    Robot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub t_start: f64,
    pub t_end: f64,
    pub speaker: Speaker,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neg_type: Option<NegationType>,
    pub words: Vec<Word>,
}

impl Utterance {
    pub fn validate(&self) -> Result<()> {
        if self.words.is_empty() {
            return Err(Error::Config(format!("utterance {} has no words", self.id)));
        }
        if let Some(w) = self.words.iter().find(|w| !w.is_valid()) {
            return Err(Error::Config(format!(
                "utterance {}: word {:?} has non-positive features",
                self.id, w.text
            )));
        }
        if !(self.t_start < self.t_end) {
            return Err(Error::InvalidInterval(self.t_start, self.t_end));
        }
        let total: f64 = self.words.iter().map(|w| w.dur).sum();
        if total > self.t_end - self.t_start + 1e-6 {
            return Err(Error::Config(format!(
                "utterance {}: word durations {total:.3}s exceed window",
                self.id
            )));
        }
        Ok(())
    }

    pub fn salient_word(&self) -> &Word {
        extract_salient(self)
    }
}

/// Splits a timed word stream into utterances at pauses longer than the
/// threshold. Without a threshold, mean + 1 standard deviation of the stream's
/// pauses is used.
pub fn segment(stream: &[(Word, f64)], pause_threshold: Option<f64>) -> Result<Vec<Utterance>> {
    if stream.is_empty() {
        return Ok(vec![]);
    }
    if let Some(i) = stream.windows(2).position(|w| w[1].1 <= w[0].1) {
        return Err(Error::Config(format!("word onsets not increasing at index {}", i + 1)));
    }
    let pauses: Vec<f64> = stream
        .windows(2)
        .map(|w| (w[1].1 - (w[0].1 + w[0].0.dur)).max(0.0))
        .collect();
    let threshold = pause_threshold.unwrap_or_else(|| {
        if pauses.is_empty() {
            f64::INFINITY
        } else {
            let n = pauses.len() as f64;
            let mean = pauses.iter().sum::<f64>() / n;
            let var = pauses.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / n;
            mean + var.sqrt()
        }
    });

    let mut out = vec![];
    let mut current: Vec<&(Word, f64)> = vec![&stream[0]];
    let flush = |cur: &mut Vec<&(Word, f64)>, out: &mut Vec<Utterance>| {
        let first = cur[0].1;
        let last = cur[cur.len() - 1];
        out.push(Utterance {
            id: format!("u{:04}", out.len() + 1),
            t_start: first,
            t_end: last.1 + last.0.dur,
            speaker: Speaker::Teacher,
            neg_type: None,
            words: cur.iter().map(|(w, _)| w.clone()).collect(),
        });
        cur.clear();
    };
    for (i, p) in pauses.iter().enumerate() {
        if *p > threshold {
            flush(&mut current, &mut out);
        }
        current.push(&stream[i + 1]);
    }
    flush(&mut current, &mut out);
    Ok(out)
}

/// Per-word (f0, energy, duration), each divided by its maximum over the utterance.
pub fn normalize(u: &Utterance) -> Vec<[f64; 3]> {
    normalize_words(&u.words)
}

pub fn normalize_words(words: &[Word]) -> Vec<[f64; 3]> {
    let max = |f: fn(&Word) -> f64| words.iter().map(f).fold(f64::MIN_POSITIVE, f64::max);
    let (mf, me, md) = (max(|w| w.f0), max(|w| w.energy), max(|w| w.dur));
    words
        .iter()
        .map(|w| [w.f0 / mf, w.energy / me, w.dur / md])
        .collect()
}

/// Index of the most salient word; the earliest wins ties.
///
/// # Panics
/// If `words` is empty.
pub fn salient_index(words: &[Word]) -> usize {
    assert!(!words.is_empty(), "salience of an empty utterance");
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, [a, b, c]) in normalize_words(words).into_iter().enumerate() {
        let s = a * b * c;
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

pub fn extract_salient(u: &Utterance) -> &Word {
    &u.words[salient_index(&u.words)]
}
