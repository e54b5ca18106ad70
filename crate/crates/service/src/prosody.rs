use negacq_core::Word;

use crate::protocol::WordInput;

pub const BASE_F0: f64 = 180.0;
pub const BASE_ENERGY: f64 = 0.6;
pub const EMPHASIS: f64 = 1.5;

/// Nominal spoken duration of a typed word, growing with its length.
pub fn base_duration(text: &str) -> f64 {
    0.1 + 0.05 * text.chars().count() as f64
}

/// Completes typed words with prosodic features. Supplied features are kept
/// as they are; the emphasized word gets every missing feature above the
/// maximum of the other words, which makes it the salient word.
pub fn synthesize_prosody(words: &[WordInput], emphasized_index: Option<usize>) -> Result<Vec<Word>, String> {
    if words.is_empty() {
        return Err("utterance has no words".into());
    }
    if let Some(i) = emphasized_index.filter(|&i| i >= words.len()) {
        return Err(format!("emphasized_index {i} out of range for {} words", words.len()));
    }
    if let Some(w) = words.iter().find(|w| w.text.trim().is_empty() || w.text.contains(char::is_whitespace)) {
        return Err(format!("word {:?} must be a single non-empty token", w.text));
    }
    let mut out: Vec<Word> = words
        .iter()
        .map(|w| Word::new(w.text.clone(), w.f0.unwrap_or(BASE_F0), w.energy.unwrap_or(BASE_ENERGY), w.dur.unwrap_or_else(|| base_duration(&w.text))))
        .collect();
    if let Some(i) = emphasized_index {
        let others = |f: fn(&Word) -> f64| {
            out.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, w)| f(w))
                .fold(0.0, f64::max)
        };
        let (mf, me, md) = (others(|w| w.f0), others(|w| w.energy), others(|w| w.dur));
        let src = &words[i];
        let w = &mut out[i];
        if src.f0.is_none() {
            w.f0 = w.f0.max(EMPHASIS * mf);
        }
        if src.energy.is_none() {
            w.energy = w.energy.max(EMPHASIS * me);
        }
        if src.dur.is_none() {
            w.dur = w.dur.max(EMPHASIS * md);
        }
    }
    if let Some(w) = out.iter().find(|w| !w.is_valid()) {
        return Err(format!("word {:?} has non-positive prosodic features", w.text));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use negacq_core::prosody::salient_index;
    use proptest::prelude::*;

    fn typed(s: &str) -> Vec<WordInput> {
        s.split(' ').map(WordInput::text).collect()
    }

    #[test]
    fn emphasis_selects_word() {
        let w = synthesize_prosody(&typed("no you can't"), Some(1)).unwrap();
        assert_eq!(salient_index(&w), 1);
        let w = synthesize_prosody(&typed("no you can't"), Some(0)).unwrap();
        assert_eq!(salient_index(&w), 0);
    }

    #[test]
    fn longest_word_wins_without_emphasis() {
        let w = synthesize_prosody(&typed("look a triangle here"), None).unwrap();
        assert_eq!(w[2].text, "triangle");
        assert_eq!(salient_index(&w), 2);
        assert!(w.iter().all(|x| x.f0 == BASE_F0 && x.energy == BASE_ENERGY));
    }

    #[test]
    fn explicit_features_pass_through() {
        let mut input = typed("no way");
        input[1] = WordInput {
            text: "way".into(),
            f0: Some(210.0),
            energy: Some(0.3),
            dur: Some(0.25),
        };
        let w = synthesize_prosody(&input, Some(1)).unwrap();
        assert_eq!(w[1], Word::new("way", 210.0, 0.3, 0.25));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(synthesize_prosody(&[], None).is_err());
        assert!(synthesize_prosody(&typed("no"), Some(1)).is_err());
        assert!(synthesize_prosody(&[WordInput::text("")], None).is_err());
        let bad = WordInput {
            text: "no".into(),
            f0: Some(-1.0),
            energy: None,
            dur: None,
        };
        assert!(synthesize_prosody(&[bad], None).is_err());
    }

    proptest! {
        #[test]
        fn emphasis_always_wins(texts in prop::collection::vec("[a-z']{1,12}", 1..8), pick in 0usize..8) {
            let i = pick % texts.len();
            let input: Vec<WordInput> = texts.iter().map(|t| WordInput::text(t.clone())).collect();
            let w = synthesize_prosody(&input, Some(i)).unwrap();
            prop_assert_eq!(salient_index(&w), i);
        }
    }
}
