use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Negation types coded in teacher speech.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HumanNegType {
    /// Negative intent interpretation.
    NII,
    /// Negative motivational question.
    NMQ,
    /// Truth-functional denial.
    TFD,
    /// Truth-functional negation.
    TFN,
    Prohibition,
    Disallowance,
    NegAgreement,
    /// Negative tag question.
    NTQ,
    MotDepAssertion,
    NegPerspAssertion,
    NegatingSelfProhibition,
    ApostrNegation,
    NegImperative,
    Rejection,
    NegQuestion,
    NegPromise,
    NegPerspQuestion,
    MotDepExclamation,
    /// Truth-functional question.
    TFQ,
    Unknown,
}

impl HumanNegType {
    pub const ALL: [HumanNegType; 20] = [
        HumanNegType::NII,
        HumanNegType::NMQ,
        HumanNegType::TFD,
        HumanNegType::TFN,
        HumanNegType::Prohibition,
        HumanNegType::Disallowance,
        HumanNegType::NegAgreement,
        HumanNegType::NTQ,
        HumanNegType::MotDepAssertion,
        HumanNegType::NegPerspAssertion,
        HumanNegType::NegatingSelfProhibition,
        HumanNegType::ApostrNegation,
        HumanNegType::NegImperative,
        HumanNegType::Rejection,
        HumanNegType::NegQuestion,
        HumanNegType::NegPromise,
        HumanNegType::NegPerspQuestion,
        HumanNegType::MotDepExclamation,
        HumanNegType::TFQ,
        HumanNegType::Unknown,
    ];

    /// Key used for this type in the fixture tables.
    pub fn fixture_key(self) -> &'static str {
        match self {
            HumanNegType::NII => "neg_intent_interpretation",
            HumanNegType::NMQ => "neg_motivational_question",
            HumanNegType::TFD => "truth_functional_denial",
            HumanNegType::TFN => "truth_functional_negation",
            HumanNegType::Prohibition => "prohibition",
            HumanNegType::Disallowance => "disallowance",
            HumanNegType::NegAgreement => "neg_agreement",
            HumanNegType::NTQ => "neg_tag_question",
            HumanNegType::MotDepAssertion => "mot_dep_assertion",
            HumanNegType::NegPerspAssertion => "neg_persp_assertion",
            HumanNegType::NegatingSelfProhibition => "negating_self_prohibition",
            HumanNegType::ApostrNegation => "apostrophic_negation",
            HumanNegType::NegImperative => "neg_imperative",
            HumanNegType::Rejection => "rejection",
            HumanNegType::NegQuestion => "neg_question",
            HumanNegType::NegPromise => "neg_promise",
            HumanNegType::NegPerspQuestion => "neg_persp_question",
            HumanNegType::MotDepExclamation => "mot_dep_exclamation",
            HumanNegType::TFQ => "truth_functional_question",
            HumanNegType::Unknown => "unknown",
        }
    }

    pub fn from_fixture_key(key: &str) -> Option<HumanNegType> {
        HumanNegType::ALL.into_iter().find(|t| t.fixture_key() == key)
    }

    /// Prohibition and disallowance together.
    pub fn is_prohibition_plus(self) -> bool {
        matches!(self, HumanNegType::Prohibition | HumanNegType::Disallowance)
    }
}

/// Negation types coded in robot speech.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RobotNegType {
    /// Truth-functional denial.
    TD,
    /// Motivation-dependent denial.
    MD,
    /// Negative agreement.
    A,
    /// Rejection.
    R,
    /// Negative imperative.
    I,
    /// Motivation-dependent exclamation.
    E,
    /// Self-prohibition.
    SP,
    /// Perspective-dependent denial.
    PD,
}

/// A negation-type annotation. Human and robot codes never share a name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NegationType {
    Human(HumanNegType),
    Robot(RobotNegType),
}

impl NegationType {
    pub fn human(self) -> Option<HumanNegType> {
        match self {
            NegationType::Human(h) => Some(h),
            NegationType::Robot(_) => None,
        }
    }
}

impl From<HumanNegType> for NegationType {
    fn from(h: HumanNegType) -> Self {
        NegationType::Human(h)
    }
}

impl fmt::Display for NegationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegationType::Human(h) => write!(f, "{h:?}"),
            NegationType::Robot(r) => write!(f, "{r:?}"),
        }
    }
}

pub const NEGATION_WORDS: [&str; 21] = [
    "no", "not", "nono", "never", "neither", "cannot", "don't", "can't", "isn't", "didn't", "doesn't", "won't",
    "mustn't", "hasn't", "weren't", "haven't", "wasn't", "shouldn't", "wouldn't", "couldn't", "aren't",
];

pub fn negation_lexicon() -> BTreeSet<String> {
    NEGATION_WORDS.iter().map(|w| w.to_string()).collect()
}

pub fn is_negation_word(w: &str) -> bool {
    NEGATION_WORDS.contains(&w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicon_membership() {
        let l = negation_lexicon();
        assert!(l.contains("no"));
        assert!(!l.contains("yes"));
        assert!(l.contains("mustn't"));
        assert_eq!(l.len(), 21);
    }

    #[test]
    fn namespaces_are_disjoint() {
        let human: BTreeSet<String> = HumanNegType::ALL.iter().map(|t| format!("{t:?}")).collect();
        for r in [
            RobotNegType::TD,
            RobotNegType::MD,
            RobotNegType::A,
            RobotNegType::R,
            RobotNegType::I,
            RobotNegType::E,
            RobotNegType::SP,
            RobotNegType::PD,
        ] {
            assert!(!human.contains(&format!("{r:?}")));
            let s = serde_json::to_string(&NegationType::Robot(r)).unwrap();
            assert_eq!(serde_json::from_str::<NegationType>(&s).unwrap(), NegationType::Robot(r));
        }
        for h in HumanNegType::ALL {
            let s = serde_json::to_string(&NegationType::Human(h)).unwrap();
            assert_eq!(serde_json::from_str::<NegationType>(&s).unwrap(), NegationType::Human(h));
            assert_eq!(HumanNegType::from_fixture_key(h.fixture_key()), Some(h));
        }
        assert_eq!(serde_json::to_string(&NegationType::Human(HumanNegType::Prohibition)).unwrap(), "\"Prohibition\"");
    }
}
