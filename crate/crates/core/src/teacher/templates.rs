use std::collections::BTreeMap;

use rand::Rng;

use crate::prosody::{Speaker, Utterance, Word};
use crate::smm::ObjectId;

use super::negation::{is_negation_word, HumanNegType};
use super::profile::TeacherProfile;

/// Gap between consecutive words of a rendered utterance, seconds.
pub const WORD_GAP: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Interjection,
    Particle,
    AuxYou,
    AuxIt,
}

fn shape(word: &str) -> Shape {
    match word {
        "no" | "nono" => Shape::Interjection,
        "not" | "never" | "neither" => Shape::Particle,
        "isn't" | "doesn't" | "hasn't" | "wasn't" => Shape::AuxIt,
        _ => Shape::AuxYou,
    }
}

fn bank(t: HumanNegType, s: Shape) -> &'static [&'static str] {
    use HumanNegType::*;
    use Shape::*;
    match (t, s) {
        (Prohibition, Interjection) => &[
            "{neg} leave the {obj}",
            "{neg} hands off",
            "{neg} stop that",
            "{neg} leave it alone",
            "{neg} that is mine",
        ],
        (Prohibition, Particle) => &["{neg} the {obj}", "{neg} this one for you", "{neg} for you"],
        (Prohibition, AuxYou) => &["you {neg} touch that", "you {neg} have the {obj}", "you {neg} take it"],
        (Disallowance, Interjection) => &["{neg} that is forbidden", "{neg} that one is mine"],
        (Disallowance, Particle) => &["{neg} allowed", "{neg} this {obj}"],
        (Disallowance, AuxYou) => &["you {neg} have that one", "you {neg} get the {obj}"],
        (NII, Interjection) => &["oh {neg} you hate the {obj}", "{neg} you dislike it"],
        (NII, Particle) => &["{neg} happy with the {obj}", "you are {neg} keen on it"],
        (NII, AuxYou) => &["you {neg} like the {obj}", "oh you {neg} want it", "you {neg} like that one"],
        (NII, AuxIt) => &["the {obj} {neg} make you happy"],
        (NMQ, Interjection) => &["{neg} you want the {obj}", "{neg} fancy it"],
        (NMQ, Particle) => &["{neg} the {obj} then", "you want it or {neg}"],
        (NMQ, AuxYou) => &["you {neg} want it", "you {neg} like the {obj}", "why you {neg} like it"],
        (NMQ, AuxIt) => &["it {neg} nice"],
        (TFD, Interjection) => &["{neg} it is a {obj}", "{neg} that is the {obj}", "{neg} wrong"],
        (TFD, Particle) => &["{neg} a {obj}", "that is {neg} the {obj}"],
        (TFD, AuxIt) => &["that {neg} a {obj}"],
        (TFN, Particle) => &["this is {neg} a {obj}", "{neg} a {obj}"],
        (TFN, AuxIt) => &["it {neg} a {obj}", "the {obj} {neg} here"],
        (NTQ, Interjection) => &["nice {neg}"],
        (NTQ, AuxYou) => &["you like it {neg} you", "you want it {neg} you"],
        (NTQ, AuxIt) => &["it is nice {neg} it", "that is a {obj} {neg} it"],
        (NegAgreement, Interjection) => &["{neg} you are right", "{neg} okay"],
        (NegAgreement, Particle) => &["{neg} that one"],
        (NegImperative, Interjection) => &["{neg} sad face"],
        (NegImperative, AuxYou) => &["you {neg} cry", "please you {neg} worry"],
        (_, Interjection) => &["{neg} {obj}", "oh {neg}", "{neg} that one", "{neg} look"],
        (_, Particle) => &["{neg} the {obj}", "{neg} that one", "{neg} now"],
        (_, AuxYou) => &["you {neg} do that", "you {neg} like it"],
        (_, AuxIt) => &["it {neg} work", "that {neg} right"],
    }
}

const FILLER_WITH_OBJECT: [&str; 8] = [
    "look this is a {obj}",
    "the {obj}",
    "do you like the {obj}",
    "this is the {obj}",
    "a {obj}",
    "you like the {obj}",
    "yes the {obj}",
    "what about the {obj}",
];

const FILLER_WITHOUT_OBJECT: [&str; 6] = ["hello", "look at me", "what shall we do", "hi there", "good", "well done"];

/// Draws a key with probability proportional to its weight.
pub fn sample_weighted<'a, K: Ord, R: Rng + ?Sized>(m: &'a BTreeMap<K, f64>, rng: &mut R) -> Option<&'a K> {
    let total: f64 = m.values().sum();
    if m.is_empty() || total <= 0.0 {
        return None;
    }
    let mut x = rng.gen::<f64>() * total;
    let mut last = None;
    for (k, w) in m {
        if *w <= 0.0 {
            continue;
        }
        last = Some(k);
        if x < *w {
            return Some(k);
        }
        x -= w;
    }
    last
}

fn fill(template: &str, neg: &str, obj: Option<ObjectId>) -> Vec<String> {
    template
        .split_whitespace()
        .map(|t| match t {
            "{neg}" => neg.to_string(),
            "{obj}" => obj.map_or("thing", ObjectId::label).to_string(),
            other => other.to_string(),
        })
        .collect()
}

/// Synthetic prosody with `target` strictly dominating every feature.
pub fn assign_prosody<R: Rng + ?Sized>(tokens: &[String], target: usize, rng: &mut R) -> Vec<Word> {
    let mut words: Vec<Word> = tokens
        .iter()
        .map(|t| {
            let chars = t.chars().count() as f64;
            Word::new(
                t.clone(),
                rng.gen_range(150.0..210.0),
                rng.gen_range(0.4..0.7),
                (0.1 + 0.055 * chars) * rng.gen_range(0.9..1.1),
            )
        })
        .collect();
    if words.len() > 1 {
        let others = words.iter().enumerate().filter(|(i, _)| *i != target);
        let (mut f, mut e, mut d) = (0.0f64, 0.0f64, 0.0f64);
        for (_, w) in others {
            f = f.max(w.f0);
            e = e.max(w.energy);
            d = d.max(w.dur);
        }
        let w = &mut words[target];
        w.f0 = w.f0.max(f * rng.gen_range(1.1..1.3));
        w.energy = w.energy.max(e * rng.gen_range(1.1..1.3));
        w.dur = w.dur.max(d * rng.gen_range(1.05..1.2));
    }
    words
}

fn build(tokens: Vec<String>, target: usize, neg_type: Option<HumanNegType>, rng: &mut (impl Rng + ?Sized)) -> Utterance {
    let words = assign_prosody(&tokens, target, rng);
    let total: f64 = words.iter().map(|w| w.dur).sum::<f64>() + WORD_GAP * (words.len() - 1) as f64;
    Utterance {
        id: String::new(),
        t_start: 0.0,
        t_end: total,
        speaker: Speaker::Teacher,
        neg_type: neg_type.map(Into::into),
        words,
    }
}

/// Renders a negative utterance of the given type, timed from 0.
pub fn render_utterance<R: Rng + ?Sized>(
    t: HumanNegType,
    obj: Option<ObjectId>,
    profile: &TeacherProfile,
    rng: &mut R,
) -> Utterance {
    let neg = profile
        .words
        .get(&t)
        .and_then(|d| sample_weighted(d, rng))
        .cloned()
        .unwrap_or_else(|| "no".to_string());
    let templates = bank(t, shape(&neg));
    let template = templates[rng.gen_range(0..templates.len())];
    let tokens = fill(template, &neg, obj);
    let neg_at = tokens.iter().position(|w| *w == neg).expect("template has a negation slot");
    let salient = rng.gen_bool(profile.salience.get(&t).copied().unwrap_or(0.5).clamp(0.0, 1.0));
    let target = if salient {
        neg_at
    } else {
        let pool: Vec<usize> = (0..tokens.len()).filter(|&i| !is_negation_word(&tokens[i])).collect();
        pool[rng.gen_range(0..pool.len())]
    };
    build(tokens, target, Some(t), rng)
}

/// Renders a non-negative utterance, usually naming the presented object.
pub fn render_filler<R: Rng + ?Sized>(obj: Option<ObjectId>, profile: &TeacherProfile, rng: &mut R) -> Utterance {
    let template = match obj {
        Some(_) => FILLER_WITH_OBJECT[rng.gen_range(0..FILLER_WITH_OBJECT.len())],
        None => FILLER_WITHOUT_OBJECT[rng.gen_range(0..FILLER_WITHOUT_OBJECT.len())],
    };
    let tokens = fill(template, "", obj);
    let label_at = obj.and_then(|o| tokens.iter().position(|w| w == o.label()));
    let target = match label_at {
        Some(i) if rng.gen_bool(profile.p_filler_label_salient) => i,
        _ => rng.gen_range(0..tokens.len()),
    };
    build(tokens, target, None, rng)
}
