use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::languaging::SpeechEvent;
use crate::motivation::{classify, MotivationClass, MotivationConfig};
use crate::smm::SmmVector;

/// Percentage of negation-word emissions made while motivation was Negative.
pub fn proxy_felicity(
    speech: &[SpeechEvent],
    body_memory: &[SmmVector],
    negation: &BTreeSet<String>,
    mcfg: &MotivationConfig,
) -> Result<f64> {
    let (n, hits) = felicity_counts(speech, body_memory, negation, mcfg);
    if n == 0 {
        return Err(Error::NoNegativeProductions);
    }
    Ok(100.0 * hits as f64 / n as f64)
}

/// (negation emissions, emissions under Negative motivation). Emissions whose
/// tick is missing from body memory are not counted.
pub fn felicity_counts(
    speech: &[SpeechEvent],
    body_memory: &[SmmVector],
    negation: &BTreeSet<String>,
    mcfg: &MotivationConfig,
) -> (usize, usize) {
    let mut n = 0;
    let mut hits = 0;
    for s in speech.iter().filter(|s| negation.contains(&s.word)) {
        let Ok(i) = body_memory.binary_search_by_key(&s.tick, |v| v.tick) else {
            continue;
        };
        n += 1;
        if classify(body_memory[i].motivation, mcfg) == MotivationClass::Negative {
            hits += 1;
        }
    }
    (n, hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smm::BehaviorId;
    use crate::teacher::negation_lexicon;

    fn body(m: f64) -> Vec<SmmVector> {
        (0..60)
            .map(|t| {
                let mut v = SmmVector::new(t, BehaviorId::Reaching);
                v.motivation = m;
                v
            })
            .collect()
    }

    fn say(tick: u64, w: &str) -> SpeechEvent {
        SpeechEvent { tick, word: w.into() }
    }

    #[test]
    fn examples() {
        let neg = negation_lexicon();
        let m = MotivationConfig::default();
        let speech = vec![say(10, "no"), say(20, "no"), say(30, "ball")];
        assert_eq!(proxy_felicity(&speech, &body(-1.0), &neg, &m).unwrap(), 100.0);
        assert_eq!(proxy_felicity(&speech, &body(0.0), &neg, &m).unwrap(), 0.0);
        let err = proxy_felicity(&[say(5, "ball")], &body(-1.0), &neg, &m).unwrap_err();
        assert!(matches!(err, Error::NoNegativeProductions));
        assert_eq!(err.to_string(), "no negative productions");
    }
}
