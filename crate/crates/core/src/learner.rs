//! Memory-based retrieval: weighted-overlap k-nearest-neighbour over the lexicon.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grounding::EmbodiedLexicon;
use crate::smm::FeatureTuple;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnerConfig {
    pub k: usize,
    /// Per-dimension weights; empty means all 1.
    pub weights: Vec<f64>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig { k: 1, weights: vec![] }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be >= 1".into()));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Config("feature weights must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Weighted overlap distance: the summed weight of mismatching dimensions.
pub fn distance(a: &FeatureTuple, b: &FeatureTuple, weights: &[f64]) -> Result<f64> {
    if a.len() != b.len() || (!weights.is_empty() && weights.len() != a.len()) {
        return Err(Error::ArityMismatch {
            left: a.len(),
            right: if a.len() != b.len() { b.len() } else { weights.len() },
        });
    }
    Ok(unchecked_distance(a, b, weights))
}

fn unchecked_distance(a: &FeatureTuple, b: &FeatureTuple, weights: &[f64]) -> f64 {
    a.0.iter()
        .zip(&b.0)
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(i, _)| weights.get(i).copied().unwrap_or(1.0))
        .sum()
}

/// k-NN vote over `(word, features, weight)` exemplars. An exemplar of weight
/// w counts as w neighbours; every exemplar tied with the k-th nearest joins
/// the neighbourhood.
pub fn best_match_in<'a, I>(query: &FeatureTuple, entries: I, excluded: &[&str], cfg: &LearnerConfig) -> Option<(String, f64)>
where
    I: IntoIterator<Item = (&'a str, &'a FeatureTuple, u64)>,
{
    let mut scored: Vec<(f64, &str, u64)> = entries
        .into_iter()
        .filter(|(w, _, _)| !excluded.contains(w))
        .filter(|(_, f, _)| f.len() == query.len())
        .map(|(w, f, n)| (unchecked_distance(query, f, &cfg.weights), w, n))
        .collect();
    if scored.is_empty() {
        return None;
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let d_min = scored[0].0;
    let mut cum = 0u64;
    let mut d_k = scored[scored.len() - 1].0;
    for (d, _, n) in &scored {
        cum += n;
        if cum >= cfg.k as u64 {
            d_k = *d;
            break;
        }
    }
    // word -> (votes, weight at d_min, own min distance)
    let mut tally: BTreeMap<&str, (u64, u64, f64)> = BTreeMap::new();
    for (d, w, n) in scored.iter().take_while(|s| s.0 <= d_k) {
        let e = tally.entry(w).or_insert((0, 0, *d));
        e.0 += n;
        if *d == d_min {
            e.1 += n;
        }
    }
    tally
        .into_iter()
        .max_by(|a, b| (a.1 .0, a.1 .1).cmp(&(b.1 .0, b.1 .1)).then_with(|| b.0.cmp(a.0)))
        .map(|(w, (_, _, d))| (w.to_string(), d))
}

pub fn best_match(query: &FeatureTuple, lex: &EmbodiedLexicon, excluded: &[&str], cfg: &LearnerConfig) -> Option<(String, f64)> {
    best_match_in(
        query,
        lex.entries.iter().map(|g| (g.word.as_str(), &g.features, u64::from(g.weight))),
        excluded,
        cfg,
    )
}

/// Session-scoped retrieval over a fixed lexicon. Exemplars sharing word and
/// features are pooled, and answers are memoized per (query, excluded word).
#[derive(Debug, Clone)]
pub struct Retriever {
    pooled: Vec<(String, FeatureTuple, u64)>,
    cfg: LearnerConfig,
    cache: HashMap<(FeatureTuple, Option<String>), Option<(String, f64)>>,
}

impl Retriever {
    pub fn new(lex: &EmbodiedLexicon, cfg: LearnerConfig) -> Retriever {
        let mut pool: BTreeMap<(FeatureTuple, &str), u64> = BTreeMap::new();
        for g in &lex.entries {
            *pool.entry((g.features.clone(), g.word.as_str())).or_default() += u64::from(g.weight);
        }
        Retriever {
            pooled: pool.into_iter().map(|((f, w), n)| (w.to_string(), f, n)).collect(),
            cfg,
            cache: HashMap::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pooled.is_empty()
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.pooled.iter().any(|(w, _, _)| w == word)
    }

    pub fn best_match(&mut self, query: &FeatureTuple, excluded: Option<&str>) -> Option<(String, f64)> {
        let key = (query.clone(), excluded.map(str::to_string));
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        let ex: Vec<&str> = excluded.into_iter().collect();
        let r = best_match_in(
            query,
            self.pooled.iter().map(|(w, f, n)| (w.as_str(), f, *n)),
            &ex,
            &self.cfg,
        );
        self.cache.insert(key, r.clone());
        r
    }
}
