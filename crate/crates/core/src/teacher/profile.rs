use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::relation::TemporalRelation;
use crate::error::{Error, Result};

use super::negation::{is_negation_word, HumanNegType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(alias = "rejection")]
    Rejection,
    #[serde(alias = "prohibition")]
    Prohibition,
}

/// How a prohibitive utterance is aligned with pushing, as relation probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<TemporalRelation, f64>", into = "BTreeMap<TemporalRelation, f64>")]
pub struct ProhibitionResponseDist {
    probs: BTreeMap<TemporalRelation, f64>,
}

/// Observed relation counts of prohibitive utterances (312 in total).
pub const OBSERVED_RELATION_COUNTS: [(TemporalRelation, u32); 9] = [
    (TemporalRelation::NoPush, 143),
    (TemporalRelation::BeforePush, 36),
    (TemporalRelation::OverlapBefore, 26),
    (TemporalRelation::OverlapBeforeAndAfter, 8),
    (TemporalRelation::AfterPush, 14),
    (TemporalRelation::OverlapAfter, 10),
    (TemporalRelation::BetweenPushes, 15),
    (TemporalRelation::DuringSeveralPushes, 4),
    (TemporalRelation::DuringPush, 56),
];

impl ProhibitionResponseDist {
    pub fn new(probs: BTreeMap<TemporalRelation, f64>) -> Result<Self> {
        if probs.values().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Config("relation probabilities must be >= 0".into()));
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("relation probabilities sum to {total}, expected 1")));
        }
        Ok(ProhibitionResponseDist { probs })
    }

    /// A distribution concentrated on one relation.
    pub fn only(r: TemporalRelation) -> Self {
        ProhibitionResponseDist {
            probs: [(r, 1.0)].into_iter().collect(),
        }
    }

    pub fn probs(&self) -> &BTreeMap<TemporalRelation, f64> {
        &self.probs
    }
}

impl Default for ProhibitionResponseDist {
    fn default() -> Self {
        let total: u32 = OBSERVED_RELATION_COUNTS.iter().map(|c| c.1).sum();
        ProhibitionResponseDist {
            probs: OBSERVED_RELATION_COUNTS
                .iter()
                .map(|&(r, n)| (r, f64::from(n) / f64::from(total)))
                .collect(),
        }
    }
}

impl TryFrom<BTreeMap<TemporalRelation, f64>> for ProhibitionResponseDist {
    type Error = Error;
    fn try_from(m: BTreeMap<TemporalRelation, f64>) -> Result<Self> {
        ProhibitionResponseDist::new(m)
    }
}

impl From<ProhibitionResponseDist> for BTreeMap<TemporalRelation, f64> {
    fn from(d: ProhibitionResponseDist) -> Self {
        d.probs
    }
}

/// Behavioral parameters of a scripted teacher. Every key has a default, so a
/// profile file only needs the keys it overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeacherProfile {
    pub name: String,
    pub scenario: Scenario,
    /// Mean utterances per minute.
    pub utterance_rate: f64,
    /// Relative per-session spread of the rate.
    pub rate_jitter: f64,
    /// Range of presentation durations, seconds.
    pub presentation_secs: [f64; 2],
    /// Range of pauses between presentations, seconds.
    pub pause_secs: [f64; 2],
    /// Chance that an utterance addressed to a frowning robot is negative.
    pub p_negative_on_frown: f64,
    pub frown_mix: BTreeMap<HumanNegType, f64>,
    /// Chance of a negative utterance when the robot is not frowning.
    pub p_negative_baseline: f64,
    pub baseline_mix: BTreeMap<HumanNegType, f64>,
    /// Probability that the negation word is the salient word, per type.
    pub salience: BTreeMap<HumanNegType, f64>,
    /// Negation-word distribution, per type.
    pub words: BTreeMap<HumanNegType, BTreeMap<String, f64>>,
    /// Chance that an object label is the salient word of a filler utterance.
    pub p_filler_label_salient: f64,
    pub prohibition_response: ProhibitionResponseDist,
    /// Share of prohibitive episodes voiced as disallowance.
    pub disallowance_share: f64,
    /// Range of push durations, seconds.
    pub push_secs: [f64; 2],
    /// Quiet period after a prohibitive episode, seconds.
    pub episode_cooldown: f64,
}

fn dist(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.iter().map(|(w, n)| (w.to_string(), n / total)).collect()
}

pub fn default_salience() -> BTreeMap<HumanNegType, f64> {
    use HumanNegType::*;
    [
        (Prohibition, 0.605),
        (NMQ, 0.418),
        (NII, 0.382),
        (TFD, 0.317),
        (NTQ, 0.493),
        (Disallowance, 0.415),
        (NegAgreement, 0.581),
        (TFN, 0.24),
        (MotDepAssertion, 0.261),
        (NegPerspAssertion, 0.174),
        (Rejection, 0.75),
        (NegQuestion, 0.75),
        (NegatingSelfProhibition, 0.286),
        (NegImperative, 0.4),
        (ApostrNegation, 0.333),
        (NegPerspQuestion, 0.333),
        (NegPromise, 0.25),
        (MotDepExclamation, 0.0),
        (TFQ, 0.5),
        (Unknown, 0.5),
    ]
    .into_iter()
    .collect()
}

pub fn default_words() -> BTreeMap<HumanNegType, BTreeMap<String, f64>> {
    use HumanNegType::*;
    let generic = dist(&[("no", 2.0), ("not", 1.0), ("don't", 1.0)]);
    let mut m: BTreeMap<HumanNegType, BTreeMap<String, f64>> =
        HumanNegType::ALL.into_iter().map(|t| (t, generic.clone())).collect();
    m.insert(
        Prohibition,
        dist(&[("no", 129.0), ("can't", 68.0), ("not", 40.0), ("mustn't", 4.0), ("don't", 2.0), ("cannot", 1.0)]),
    );
    m.insert(
        Disallowance,
        dist(&[("no", 39.0), ("not", 27.0), ("can't", 16.0), ("don't", 2.0), ("cannot", 1.0), ("neither", 1.0)]),
    );
    m.insert(
        NII,
        dist(&[("no", 174.0), ("not", 59.0), ("don't", 201.0), ("didn't", 7.0), ("doesn't", 1.0), ("won't", 2.0)]),
    );
    m.insert(
        NMQ,
        dist(&[("no", 191.0), ("not", 47.0), ("don't", 164.0), ("isn't", 9.0), ("didn't", 1.0), ("won't", 1.0)]),
    );
    m.insert(
        TFD,
        dist(&[("no", 212.0), ("not", 93.0), ("don't", 1.0), ("isn't", 4.0), ("haven't", 1.0), ("wasn't", 1.0)]),
    );
    m.insert(
        TFN,
        dist(&[
            ("no", 14.0),
            ("not", 30.0),
            ("don't", 2.0),
            ("can't", 1.0),
            ("haven't", 7.0),
            ("didn't", 5.0),
            ("doesn't", 5.0),
            ("hasn't", 1.0),
            ("mustn't", 1.0),
        ]),
    );
    m.insert(
        NTQ,
        dist(&[
            ("no", 1.0),
            ("don't", 58.0),
            ("isn't", 18.0),
            ("can't", 3.0),
            ("haven't", 1.0),
            ("didn't", 12.0),
            ("doesn't", 3.0),
            ("hasn't", 2.0),
            ("weren't", 1.0),
        ]),
    );
    m.insert(NegAgreement, dist(&[("no", 3.0), ("not", 1.0)]));
    m.insert(Rejection, dist(&[("no", 3.0), ("don't", 1.0)]));
    m
}

impl Default for TeacherProfile {
    fn default() -> Self {
        use HumanNegType::*;
        TeacherProfile {
            name: "prohibition".into(),
            scenario: Scenario::Prohibition,
            utterance_rate: 27.0,
            rate_jitter: 0.2,
            presentation_secs: [6.0, 12.0],
            pause_secs: [1.0, 3.0],
            p_negative_on_frown: 0.6,
            frown_mix: [(NII, 0.45), (NMQ, 0.35), (TFD, 0.1), (NegAgreement, 0.05), (NegImperative, 0.05)]
                .into_iter()
                .collect(),
            p_negative_baseline: 0.05,
            baseline_mix: [(TFD, 0.35), (TFN, 0.2), (NTQ, 0.2), (MotDepAssertion, 0.15), (NegPerspAssertion, 0.1)]
                .into_iter()
                .collect(),
            salience: default_salience(),
            words: default_words(),
            p_filler_label_salient: 0.7,
            prohibition_response: ProhibitionResponseDist::default(),
            disallowance_share: 65.0 / 265.0,
            push_secs: [0.5, 2.0],
            episode_cooldown: 4.5,
        }
    }
}

impl TeacherProfile {
    pub fn prohibition() -> TeacherProfile {
        TeacherProfile::default()
    }

    pub fn rejection() -> TeacherProfile {
        TeacherProfile {
            name: "rejection".into(),
            scenario: Scenario::Rejection,
            ..TeacherProfile::default()
        }
    }

    pub fn for_scenario(s: Scenario) -> TeacherProfile {
        match s {
            Scenario::Rejection => TeacherProfile::rejection(),
            Scenario::Prohibition => TeacherProfile::prohibition(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("profile {:?}: {m}", self.name)));
        let prob = |x: f64| (0.0..=1.0).contains(&x);
        if !(self.utterance_rate > 0.0 && self.utterance_rate.is_finite()) {
            return bad(format!("utterance_rate must be > 0, got {}", self.utterance_rate));
        }
        if !(0.0..1.0).contains(&self.rate_jitter) {
            return bad("rate_jitter must lie in [0, 1)".into());
        }
        for (name, [a, b]) in [
            ("presentation_secs", self.presentation_secs),
            ("pause_secs", self.pause_secs),
            ("push_secs", self.push_secs),
        ] {
            if !(a > 0.0 && a <= b && b.is_finite()) {
                return bad(format!("{name} must be a positive range, got [{a}, {b}]"));
            }
        }
        for (name, p) in [
            ("p_negative_on_frown", self.p_negative_on_frown),
            ("p_negative_baseline", self.p_negative_baseline),
            ("p_filler_label_salient", self.p_filler_label_salient),
            ("disallowance_share", self.disallowance_share),
        ] {
            if !prob(p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        for (name, mix) in [("frown_mix", &self.frown_mix), ("baseline_mix", &self.baseline_mix)] {
            check_dist(mix.values().copied(), name).or_else(bad)?;
            if mix.contains_key(&HumanNegType::Unknown) {
                return bad(format!("{name} cannot contain Unknown"));
            }
        }
        for (t, p) in &self.salience {
            if !prob(*p) {
                return bad(format!("salience of {t:?} must lie in [0, 1]"));
            }
        }
        for (t, d) in &self.words {
            check_dist(d.values().copied(), &format!("words.{t:?}")).or_else(bad)?;
            if let Some(w) = d.keys().find(|w| !is_negation_word(w)) {
                return bad(format!("words.{t:?}: {w:?} is not a negation word"));
            }
        }
        if self.episode_cooldown <= 4.0 {
            return bad("episode_cooldown must exceed the 4 s relation window".into());
        }
        Ok(())
    }
}

fn check_dist(values: impl Iterator<Item = f64>, name: &str) -> std::result::Result<(), String> {
    let mut total = 0.0;
    let mut n = 0;
    for v in values {
        if !(v.is_finite() && v >= 0.0) {
            return Err(format!("{name}: negative or non-finite weight"));
        }
        total += v;
        n += 1;
    }
    if n == 0 || (total - 1.0).abs() > 1e-6 {
        return Err(format!("{name}: weights sum to {total}, expected 1"));
    }
    Ok(())
}
