use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::prosody::{extract_salient, Speaker, Utterance};
use crate::teacher::HumanNegType;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub word: String,
    pub count: usize,
    pub percent: f64,
    /// Dense rank; equal counts share a rank.
    pub rank: usize,
    pub negation: bool,
}

/// Word frequencies over teacher utterances, optionally only each utterance's
/// salient word. Sorted by count, then word.
pub fn corpus<'a>(utterances: impl IntoIterator<Item = &'a Utterance>, salient_only: bool, negation: &BTreeSet<String>) -> Vec<CorpusEntry> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for u in utterances.into_iter().filter(|u| u.speaker == Speaker::Teacher) {
        if salient_only {
            *counts.entry(extract_salient(u).text.as_str()).or_default() += 1;
        } else {
            for w in &u.words {
                *counts.entry(w.text.as_str()).or_default() += 1;
            }
        }
    }
    let total: usize = counts.values().sum();
    let mut rows: Vec<(&str, usize)> = counts.into_iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let mut rank = 0;
    let mut last = None;
    rows.into_iter()
        .map(|(w, c)| {
            if last != Some(c) {
                rank += 1;
                last = Some(c);
            }
            CorpusEntry {
                word: w.to_string(),
                count: c,
                percent: 100.0 * c as f64 / total as f64,
                rank,
                negation: negation.contains(w),
            }
        })
        .collect()
}

/// Utterance-level measures of teacher speech.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceMetrics {
    pub duration: f64,
    pub u: usize,
    pub w: usize,
    pub dw: usize,
    pub mlu: f64,
    pub w_per_min: f64,
    pub u_per_min: f64,
    pub nu: usize,
    pub nw: usize,
    pub dnw: usize,
    pub nmlu: f64,
    pub nw_per_min: f64,
    pub nu_per_min: f64,
}

pub fn utterance_metrics<'a>(utterances: impl IntoIterator<Item = &'a Utterance>, duration: f64, negation: &BTreeSet<String>) -> UtteranceMetrics {
    let (mut u, mut w, mut nu, mut nw) = (0, 0, 0, 0);
    let mut distinct: BTreeSet<&str> = BTreeSet::new();
    let mut distinct_neg: BTreeSet<&str> = BTreeSet::new();
    for utt in utterances.into_iter().filter(|u| u.speaker == Speaker::Teacher) {
        u += 1;
        w += utt.words.len();
        distinct.extend(utt.words.iter().map(|x| x.text.as_str()));
        if utt.words.iter().any(|x| negation.contains(&x.text)) {
            nu += 1;
            nw += utt.words.len();
            distinct_neg.extend(utt.words.iter().map(|x| x.text.as_str()));
        }
    }
    let per_min = |n: usize| if duration > 0.0 { n as f64 * 60.0 / duration } else { 0.0 };
    let ratio = |a: usize, b: usize| if b > 0 { a as f64 / b as f64 } else { 0.0 };
    UtteranceMetrics {
        duration,
        u,
        w,
        dw: distinct.len(),
        mlu: ratio(w, u),
        w_per_min: per_min(w),
        u_per_min: per_min(u),
        nu,
        nw,
        dnw: distinct_neg.len(),
        nmlu: ratio(nw, nu),
        nw_per_min: per_min(nw),
        nu_per_min: per_min(nu),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SalienceSelector {
    /// Utterances containing the word; hit when it is the salient word.
    Word(String),
    /// Utterances of the type; hit when a negation word is salient.
    Type(HumanNegType),
}

/// Percentage of selected utterances whose salient word matches the selector,
/// or `None` when nothing is selected.
pub fn salience_rate<'a>(
    utterances: impl IntoIterator<Item = &'a Utterance>,
    selector: &SalienceSelector,
    negation: &BTreeSet<String>,
) -> Option<f64> {
    let mut n = 0usize;
    let mut hits = 0usize;
    for u in utterances {
        let salient = &extract_salient(u).text;
        match selector {
            SalienceSelector::Word(w) if u.words.iter().any(|x| &x.text == w) => {
                n += 1;
                hits += usize::from(salient == w);
            }
            SalienceSelector::Type(t) if u.neg_type.and_then(|x| x.human()) == Some(*t) => {
                n += 1;
                hits += usize::from(negation.contains(salient));
            }
            _ => {}
        }
    }
    (n > 0).then(|| 100.0 * hits as f64 / n as f64)
}
