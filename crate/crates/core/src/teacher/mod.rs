//! Scripted teachers: the stochastic policy that presents objects, talks and
//! restrains the robot, plus the negation taxonomy and template bank it uses.

mod negation;
mod profile;
mod templates;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::relation::TemporalRelation;
use crate::behavior::{FacialExpression, GazeTarget};
use crate::languaging::SpeechEvent;
use crate::prosody::Utterance;
use crate::smm::{secs_to_ticks, tick_to_secs, BehaviorId, ObjectId};

pub use negation::{is_negation_word, negation_lexicon, HumanNegType, NegationType, RobotNegType, NEGATION_WORDS};
pub use profile::{default_salience, default_words, ProhibitionResponseDist, Scenario, TeacherProfile, OBSERVED_RELATION_COUNTS};
pub use templates::{assign_prosody, render_filler, render_utterance, sample_weighted, WORD_GAP};

/// What the teacher can see of the robot at the start of a tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub tick: u64,
    pub behavior: BehaviorId,
    pub face: FacialExpression,
    pub gaze: GazeTarget,
    pub presented: Option<ObjectId>,
    pub last_speech: Option<SpeechEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TeacherAction {
    Present(ObjectId),
    Withdraw,
    PushStart,
    PushEnd,
    /// An utterance starting at the current tick.
    Say(Utterance),
}

/// Anything that acts as the teacher during a session.
pub trait Driver {
    fn act(&mut self, obs: &Observation) -> Vec<TeacherAction>;

    fn face_visible(&self) -> bool {
        true
    }
}

/// A planned prohibitive episode, in ticks.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodePlan {
    pub relation: TemporalRelation,
    pub utterance: (u64, u64),
    pub pushes: Vec<(u64, u64)>,
}

impl EpisodePlan {
    pub fn end(&self) -> u64 {
        self.pushes.iter().map(|p| p.1).chain([self.utterance.1]).max().unwrap_or(0)
    }
}

fn secs_range<R: Rng + ?Sized>(rng: &mut R, [a, b]: [f64; 2]) -> u64 {
    let x = if b > a { rng.gen_range(a..=b) } else { a };
    secs_to_ticks(x).max(1)
}

/// Lays out an utterance of `dur` ticks and its pushes so that the pair
/// realizes `relation` exactly. Times start at `now`.
pub fn plan_episode<R: Rng + ?Sized>(
    relation: TemporalRelation,
    now: u64,
    dur: u64,
    push_secs: [f64; 2],
    rng: &mut R,
) -> EpisodePlan {
    use TemporalRelation::*;
    let dur = dur.max(6);
    let lead = now + 3;
    let lag = |rng: &mut R| secs_to_ticks(rng.gen_range(0.3..1.0)).max(1);
    let gap = |rng: &mut R| secs_to_ticks(rng.gen_range(0.3..3.5)).max(1);
    let frac = |rng: &mut R, lo: f64, hi: f64| ((dur as f64 * rng.gen_range(lo..hi)).round() as u64).clamp(1, dur - 1);
    let push_len = |rng: &mut R| secs_range(rng, push_secs);
    let (s, pushes) = match relation {
        NoPush => (lead, vec![]),
        DuringPush => {
            let s = lead + lag(rng);
            let b = lag(rng);
            (s, vec![(lead, s + dur + b)])
        }
        OverlapBeforeAndAfter => {
            let a = frac(rng, 0.15, 0.4).min(dur - 2);
            let b = frac(rng, 0.6, 0.85).max(a + 1);
            (lead, vec![(lead + a, lead + b)])
        }
        OverlapBefore => {
            let a = frac(rng, 0.3, 0.7);
            let b = lag(rng);
            (lead, vec![(lead + a, lead + dur + b)])
        }
        OverlapAfter => {
            let s = lead + lag(rng);
            (s, vec![(lead, s + frac(rng, 0.3, 0.7))])
        }
        BeforePush => {
            let p = lead + dur + gap(rng);
            (lead, vec![(p, p + push_len(rng))])
        }
        AfterPush => {
            let end = lead + push_len(rng);
            (end + gap(rng), vec![(lead, end)])
        }
        BetweenPushes => {
            let end = lead + push_len(rng);
            let s = end + gap(rng);
            let p2 = s + dur + gap(rng);
            (s, vec![(lead, end), (p2, p2 + push_len(rng))])
        }
        DuringSeveralPushes => {
            let s = lead + lag(rng);
            let a = frac(rng, 0.2, 0.4).min(dur - 3);
            let b = frac(rng, 0.6, 0.8).max(a + 2).min(dur - 1);
            let tail = lag(rng);
            (s, vec![(lead, s + a), (s + b, s + dur + tail)])
        }
    };
    EpisodePlan {
        relation,
        utterance: (s, s + dur),
        pushes,
    }
}

/// Session-level facts the scripted teacher knows.
#[derive(Debug, Clone, PartialEq)]
pub struct TeacherContext {
    pub scenario: Scenario,
    pub forbidden: BTreeSet<ObjectId>,
    pub session_label: String,
}

/// The default stochastic teaching policy.
#[derive(Debug, Clone)]
pub struct ScriptedTeacher {
    profile: TeacherProfile,
    ctx: TeacherContext,
    rng: ChaCha8Rng,
    rate: f64,
    scheduled: BTreeMap<u64, Vec<TeacherAction>>,
    order: VecDeque<ObjectId>,
    last_object: Option<ObjectId>,
    presenting: Option<ObjectId>,
    present_until: u64,
    next_present_at: u64,
    next_utterance_at: u64,
    speaking_until: u64,
    episode_until: Option<u64>,
    cooldown_until: u64,
    utterance_count: usize,
    episodes: Vec<EpisodePlan>,
}

impl ScriptedTeacher {
    pub fn new(profile: TeacherProfile, ctx: TeacherContext, seed: u64, stream: u64) -> ScriptedTeacher {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let jitter = profile.rate_jitter;
        let rate = profile.utterance_rate * (1.0 + if jitter > 0.0 { rng.gen_range(-jitter..jitter) } else { 0.0 });
        let first = secs_to_ticks(rng.gen_range(0.5..2.0));
        ScriptedTeacher {
            profile,
            ctx,
            rng,
            rate,
            scheduled: BTreeMap::new(),
            order: VecDeque::new(),
            last_object: None,
            presenting: None,
            present_until: 0,
            next_present_at: first,
            next_utterance_at: secs_to_ticks(0.5),
            speaking_until: 0,
            episode_until: None,
            cooldown_until: 0,
            utterance_count: 0,
            episodes: vec![],
        }
    }

    /// Utterance rate drawn for this session, per minute.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Prohibitive episodes planned so far.
    pub fn episodes(&self) -> &[EpisodePlan] {
        &self.episodes
    }

    fn next_id(&mut self) -> String {
        self.utterance_count += 1;
        format!("{}-u{:04}", self.ctx.session_label, self.utterance_count)
    }

    fn next_object(&mut self) -> ObjectId {
        if self.order.is_empty() {
            let mut all = ObjectId::ALL.to_vec();
            all.shuffle(&mut self.rng);
            if all.first() == self.last_object.as_ref() {
                all.rotate_left(1);
            }
            self.order.extend(all);
        }
        let o = self.order.pop_front().expect("refilled above");
        self.last_object = Some(o);
        o
    }

    fn timed(&mut self, mut u: Utterance, start: u64) -> (Utterance, u64) {
        let len = secs_to_ticks(u.t_end - u.t_start + 0.5 / 30.0).max(1);
        let total = u.t_end - u.t_start;
        u.id = self.next_id();
        u.t_start = tick_to_secs(start);
        u.t_end = tick_to_secs(start + len).max(u.t_start + total);
        (u, start + len)
    }

    fn schedule(&mut self, tick: u64, a: TeacherAction) {
        self.scheduled.entry(tick).or_default().push(a);
    }

    fn start_episode(&mut self, now: u64, obj: ObjectId) {
        let relation = *sample_weighted(self.profile.prohibition_response.probs(), &mut self.rng)
            .unwrap_or(&TemporalRelation::NoPush);
        let kind = if self.rng.gen_bool(self.profile.disallowance_share) {
            HumanNegType::Disallowance
        } else {
            HumanNegType::Prohibition
        };
        let u = render_utterance(kind, Some(obj), &self.profile, &mut self.rng);
        let dur = secs_to_ticks(u.t_end + 0.5 / 30.0).max(6);
        let plan = plan_episode(relation, now, dur, self.profile.push_secs, &mut self.rng);
        let (mut u, _) = self.timed(u, plan.utterance.0);
        u.t_end = tick_to_secs(plan.utterance.1);
        self.schedule(plan.utterance.0, TeacherAction::Say(u));
        for &(a, b) in &plan.pushes {
            self.schedule(a, TeacherAction::PushStart);
            self.schedule(b, TeacherAction::PushEnd);
        }
        let end = plan.end();
        let withdraw = end + secs_range(&mut self.rng, [0.5, 1.5]);
        self.schedule(withdraw, TeacherAction::Withdraw);
        self.episode_until = Some(withdraw);
        self.cooldown_until = end + secs_to_ticks(self.profile.episode_cooldown) + 1;
        self.speaking_until = self.speaking_until.max(plan.utterance.1);
        self.episodes.push(plan);
    }

    fn free_utterance(&mut self, obs: &Observation) -> Utterance {
        let p = &self.profile;
        let negative_mix = if obs.face == FacialExpression::Frown && self.rng.gen_bool(p.p_negative_on_frown) {
            Some(&p.frown_mix)
        } else if self.rng.gen_bool(p.p_negative_baseline) {
            Some(&p.baseline_mix)
        } else {
            None
        };
        match negative_mix.and_then(|m| sample_weighted(m, &mut self.rng)).copied() {
            Some(t) => render_utterance(t, self.presenting, &self.profile, &mut self.rng),
            None => render_filler(self.presenting, &self.profile, &mut self.rng),
        }
    }
}

impl Driver for ScriptedTeacher {
    fn act(&mut self, obs: &Observation) -> Vec<TeacherAction> {
        let now = obs.tick;
        let mut out = self.scheduled.remove(&now).unwrap_or_default();

        if let Some(until) = self.episode_until {
            if now < until {
                return out;
            }
            self.episode_until = None;
            self.presenting = None;
            self.next_present_at = now + secs_range(&mut self.rng, self.profile.pause_secs);
        }

        match self.presenting {
            Some(_) if now >= self.present_until => {
                out.push(TeacherAction::Withdraw);
                self.presenting = None;
                self.next_present_at = now + secs_range(&mut self.rng, self.profile.pause_secs);
            }
            None if now >= self.next_present_at => {
                let o = self.next_object();
                out.push(TeacherAction::Present(o));
                self.presenting = Some(o);
                self.present_until = now + secs_range(&mut self.rng, self.profile.presentation_secs);
            }
            _ => {}
        }

        if let Some(o) = self.presenting {
            let reaching = obs.behavior == BehaviorId::Reaching && obs.presented == Some(o);
            if self.ctx.scenario == Scenario::Prohibition
                && self.ctx.forbidden.contains(&o)
                && reaching
                && now >= self.cooldown_until
                && now >= self.speaking_until
            {
                self.start_episode(now, o);
                out.extend(self.scheduled.remove(&now).unwrap_or_default());
                return out;
            }
        }

        if now >= self.next_utterance_at && now >= self.speaking_until {
            let u = self.free_utterance(obs);
            let (u, end) = self.timed(u, now);
            self.speaking_until = end;
            let interval = secs_to_ticks(self.rng.gen_range(0.6..1.4) * 60.0 / self.rate);
            self.next_utterance_at = (now + interval).max(end + secs_to_ticks(0.25));
            out.push(TeacherAction::Say(u));
        }
        out
    }
}
