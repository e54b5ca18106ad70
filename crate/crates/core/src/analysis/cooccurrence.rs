use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::grounding::window;
use crate::motivation::{classify, MotivationClass, MotivationConfig};
use crate::prosody::Utterance;
use crate::smm::SmmVector;
use crate::teacher::HumanNegType;

/// Number of utterances during which each motivation class occurred.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub negative: usize,
    pub neutral: usize,
    pub positive: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.negative + self.neutral + self.positive
    }

    /// Share of negative occurrences, if any occurrence was counted.
    pub fn negative_share(&self) -> Option<f64> {
        let t = self.total();
        (t > 0).then(|| self.negative as f64 / t as f64)
    }
}

/// For each utterance of a listed type, counts every motivation class present
/// in its window once.
pub fn motivation_cooccurrence(
    transcript: &[Utterance],
    body_memory: &[SmmVector],
    types: &BTreeSet<HumanNegType>,
    mcfg: &MotivationConfig,
) -> BTreeMap<HumanNegType, ClassCounts> {
    let mut out: BTreeMap<HumanNegType, ClassCounts> = types.iter().map(|t| (*t, ClassCounts::default())).collect();
    for u in transcript {
        let Some(t) = u.neg_type.and_then(|n| n.human()).filter(|t| types.contains(t)) else {
            continue;
        };
        let classes: BTreeSet<MotivationClass> = window(body_memory, u.t_start, u.t_end)
            .iter()
            .map(|v| classify(v.motivation.clamp(-1.0, 1.0), mcfg))
            .collect();
        let c = out.entry(t).or_default();
        for class in classes {
            match class {
                MotivationClass::Negative => c.negative += 1,
                MotivationClass::Neutral => c.neutral += 1,
                MotivationClass::Positive => c.positive += 1,
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prosody::{Speaker, Word};
    use crate::smm::BehaviorId;

    fn body(m: impl Fn(u64) -> f64) -> Vec<SmmVector> {
        (0..120)
            .map(|t| {
                let mut v = SmmVector::new(t, BehaviorId::Rejecting);
                v.motivation = m(t);
                v
            })
            .collect()
    }

    fn nii(t0: f64, t1: f64) -> Utterance {
        Utterance {
            id: "u".into(),
            t_start: t0,
            t_end: t1,
            speaker: Speaker::Teacher,
            neg_type: Some(HumanNegType::NII.into()),
            words: vec![Word::new("no", 1.0, 1.0, 0.1)],
        }
    }

    #[test]
    fn examples() {
        let types: BTreeSet<_> = [HumanNegType::NII].into_iter().collect();
        let m = MotivationConfig::default();
        let r = motivation_cooccurrence(&[nii(1.0, 2.0)], &body(|_| -1.0), &types, &m);
        assert_eq!(r[&HumanNegType::NII], ClassCounts { negative: 1, neutral: 0, positive: 0 });
        let b = body(|t| if t < 45 { 0.8 } else { -0.8 });
        let r = motivation_cooccurrence(&[nii(1.0, 2.0)], &b, &types, &m);
        assert_eq!(r[&HumanNegType::NII], ClassCounts { negative: 1, neutral: 0, positive: 1 });
        let none = motivation_cooccurrence(&[], &b, &types, &m);
        assert_eq!(none[&HumanNegType::NII].total(), 0);
    }
}
