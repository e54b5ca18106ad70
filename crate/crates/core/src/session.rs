//! Session orchestration: valence schedules, forbidden objects, the 30 Hz loop
//! and offline grounding between sessions.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::relation::Interval;
use crate::behavior::{self, facial_expression, BehaviorInputs, BehaviorState, FacialExpression, GazeTarget};
use crate::error::{Error, Result};
use crate::grounding::{ground_utterance, EmbodiedLexicon};
use crate::languaging::{LanguagingConfig, LanguagingState, SpeechEvent};
use crate::learner::{LearnerConfig, Retriever};
use crate::motivation::{self, classify, MotivationConfig, MotivationState};
use crate::prosody::{Speaker, Utterance};
use crate::smm::{secs_to_ticks, smm_projection, tick_to_secs, BehaviorId, MatchFeatureSpec, ObjectId, SmmVector, TimeConstants, Valence, TICK_HZ};
use crate::teacher::{Driver, Observation, Scenario, ScriptedTeacher, TeacherAction, TeacherContext, TeacherProfile};

pub const SESSIONS_PER_EXPERIMENT: u8 = 5;

/// Object valences per session, 1-based.
pub fn default_valence_schedule(session_index: u8) -> Result<BTreeMap<ObjectId, Valence>> {
    const TABLE: [[i8; 5]; 5] = [
        // triangle, moon, square, heart, circle
        [1, 0, -1, 1, -1],
        [-1, 1, 0, -1, 1],
        [1, -1, 1, 0, -1],
        [-1, 1, -1, 1, 0],
        [0, -1, 1, -1, 1],
    ];
    if !(1..=5).contains(&session_index) {
        return Err(Error::SessionIndex(session_index));
    }
    let row = TABLE[usize::from(session_index - 1)];
    Ok(ObjectId::ALL
        .into_iter()
        .zip(row)
        .map(|(o, v)| (o, Valence::new(v).expect("table holds valid valences")))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub participant: String,
    pub scenario: Scenario,
    pub session_index: u8,
    pub duration: f64,
    pub valence_map: BTreeMap<ObjectId, Valence>,
    pub forbidden: BTreeSet<ObjectId>,
}

impl SessionConfig {
    /// Config with the default schedule and no forbidden objects.
    pub fn new(participant: impl Into<String>, scenario: Scenario, session_index: u8) -> Result<SessionConfig> {
        Ok(SessionConfig {
            participant: participant.into(),
            scenario,
            session_index,
            duration: 300.0,
            valence_map: default_valence_schedule(session_index)?,
            forbidden: BTreeSet::new(),
        })
    }

    pub fn ticks(&self) -> u64 {
        secs_to_ticks(self.duration)
    }

    pub fn label(&self) -> String {
        format!("s{}", self.session_index)
    }

    /// Checks the schedule and the forbidden-object constraints.
    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.session_index) {
            return Err(Error::SessionIndex(self.session_index));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Config(format!("duration must be > 0, got {}", self.duration)));
        }
        if self.valence_map.len() != ObjectId::ALL.len() {
            return Err(Error::Config("valence map must cover all five objects".into()));
        }
        let needs_forbidden = self.scenario == Scenario::Prohibition && self.session_index <= 3;
        if !needs_forbidden {
            if !self.forbidden.is_empty() {
                return Err(Error::Config(format!(
                    "session {} ({:?}) must not have forbidden objects",
                    self.session_index, self.scenario
                )));
            }
            return Ok(());
        }
        if !(2..=3).contains(&self.forbidden.len()) {
            return Err(Error::Config(format!(
                "prohibition session needs 2-3 forbidden objects, got {}",
                self.forbidden.len()
            )));
        }
        for v in [Valence::LIKED, Valence::DISLIKED] {
            let with_v: Vec<ObjectId> = self
                .valence_map
                .iter()
                .filter(|(_, x)| **x == v)
                .map(|(o, _)| *o)
                .collect();
            let banned = with_v.iter().filter(|o| self.forbidden.contains(o)).count();
            if banned == 0 || banned == with_v.len() {
                return Err(Error::Config(format!(
                    "valence {} needs both an allowed and a forbidden object",
                    v.get()
                )));
            }
        }
        Ok(())
    }
}

/// All forbidden sets satisfying the combination constraint for a valence map.
pub fn forbidden_candidates(valence_map: &BTreeMap<ObjectId, Valence>) -> Vec<BTreeSet<ObjectId>> {
    let of = |v: Valence| -> Vec<ObjectId> {
        valence_map.iter().filter(|(_, x)| **x == v).map(|(o, _)| *o).collect()
    };
    let (liked, disliked, neutral) = (of(Valence::LIKED), of(Valence::DISLIKED), of(Valence::NEUTRAL));
    let mut out = vec![];
    for &l in &liked {
        for &d in &disliked {
            let base: BTreeSet<ObjectId> = [l, d].into_iter().collect();
            out.push(base.clone());
            for &n in &neutral {
                let mut with = base.clone();
                with.insert(n);
                out.push(with);
            }
        }
    }
    out.retain(|s| s.len() <= 3);
    out
}

/// Seeded pick among the valid forbidden sets.
pub fn solve_forbidden(valence_map: &BTreeMap<ObjectId, Valence>, rng: &mut ChaCha8Rng) -> Result<BTreeSet<ObjectId>> {
    forbidden_candidates(valence_map)
        .choose(rng)
        .cloned()
        .ok_or_else(|| Error::Config("no forbidden set satisfies the constraints".into()))
}

/// Robot-side parameters shared by every session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RobotConfig {
    pub time: TimeConstants,
    pub motivation: MotivationConfig,
    pub learner: LearnerConfig,
    pub languaging: LanguagingConfig,
    pub match_spec: MatchFeatureSpec,
}

impl RobotConfig {
    pub fn validate(&self) -> Result<()> {
        self.time.validate()?;
        self.motivation.validate()?;
        self.learner.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorEvent {
    pub tick: u64,
    pub behavior: BehaviorId,
}

/// Everything recorded during one session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub config: SessionConfig,
    pub body_memory: Vec<SmmVector>,
    pub behavior_events: Vec<BehaviorEvent>,
    pub pushes: Vec<Interval>,
    pub transcript: Vec<Utterance>,
    pub speech: Vec<SpeechEvent>,
    pub start_tick: u64,
}

impl SessionLog {
    pub fn teacher_utterances(&self) -> impl Iterator<Item = &Utterance> {
        self.transcript.iter().filter(|u| u.speaker == Speaker::Teacher)
    }
}

/// Robot state visible after a tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TickReport {
    pub tick: u64,
    pub behavior: BehaviorId,
    pub face: FacialExpression,
    pub gaze: GazeTarget,
    pub motivation: f64,
    pub speech: Option<SpeechEvent>,
}

/// Incremental session loop. The live service steps it in real time; the
/// batch path drives it with a scripted teacher.
pub struct SessionRunner {
    cfg: SessionConfig,
    robot: RobotConfig,
    retriever: Retriever,
    behavior: BehaviorState,
    motivation: MotivationState,
    languaging: LanguagingState,
    presented: Option<ObjectId>,
    push_since: Option<u64>,
    tick: u64,
    log: SessionLog,
    last_speech: Option<SpeechEvent>,
}

impl SessionRunner {
    pub fn new(cfg: SessionConfig, lexicon: &EmbodiedLexicon, robot: RobotConfig) -> Result<SessionRunner> {
        cfg.validate()?;
        robot.validate()?;
        let behavior = BehaviorState::started(&robot.time);
        let log = SessionLog {
            config: cfg.clone(),
            body_memory: Vec::with_capacity(cfg.ticks() as usize),
            behavior_events: vec![BehaviorEvent {
                tick: 0,
                behavior: behavior.current,
            }],
            pushes: vec![],
            transcript: vec![],
            speech: vec![],
            start_tick: 0,
        };
        Ok(SessionRunner {
            retriever: Retriever::new(lexicon, robot.learner.clone()),
            cfg,
            robot,
            behavior,
            motivation: MotivationState::default(),
            languaging: LanguagingState::default(),
            presented: None,
            push_since: None,
            tick: 0,
            log,
            last_speech: None,
        })
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.cfg.ticks()
    }

    pub fn presented(&self) -> Option<ObjectId> {
        self.presented
    }

    pub fn push_active(&self) -> bool {
        self.push_since.is_some()
    }

    pub fn observation(&self) -> Observation {
        Observation {
            tick: self.tick,
            behavior: self.behavior.current,
            face: facial_expression(classify(self.motivation.value, &self.robot.motivation)),
            gaze: self.behavior.gaze,
            presented: self.presented,
            last_speech: self.last_speech.clone(),
        }
    }

    fn apply(&mut self, action: TeacherAction) {
        match action {
            TeacherAction::Present(o) => self.presented = Some(o),
            TeacherAction::Withdraw => self.presented = None,
            TeacherAction::PushStart => {
                self.push_since.get_or_insert(self.tick);
            }
            TeacherAction::PushEnd => self.close_push(self.tick),
            TeacherAction::Say(u) => self.log.transcript.push(u),
        }
    }

    fn close_push(&mut self, end: u64) {
        if let Some(start) = self.push_since.take() {
            if end > start {
                self.log.pushes.push(Interval {
                    start: tick_to_secs(start),
                    end: tick_to_secs(end),
                });
            }
        }
    }

    /// Applies the teacher's actions for this tick and advances the robot.
    pub fn step(&mut self, actions: Vec<TeacherAction>, face_visible: bool) -> TickReport {
        for a in actions {
            self.apply(a);
        }
        let rc = &self.robot;
        let presented = self.presented.map(|o| (o, self.cfg.valence_map[&o]));
        let resistance = self.push_since.is_some() && self.behavior.current == BehaviorId::Reaching;
        let inputs = BehaviorInputs {
            presented,
            resistance_active: resistance,
            motivation_class: classify(self.motivation.value, &rc.motivation),
            face_visible,
        };
        let (b, changed) = behavior::step(&self.behavior, &inputs, &rc.time);
        self.behavior = b;
        if let Some(nb) = changed {
            self.log.behavior_events.push(BehaviorEvent {
                tick: self.tick,
                behavior: nb,
            });
        }
        self.motivation = motivation::step(
            self.motivation,
            presented.map(|p| p.1),
            resistance,
            1.0 / TICK_HZ,
            &rc.motivation,
        );
        let v = SmmVector {
            tick: self.tick,
            behavior: self.behavior.current,
            object: self.presented,
            face_detected: self.behavior.gaze == GazeTarget::Face && face_visible,
            motivation: self.motivation.value,
            resistance,
            encoders: None,
        };
        let projection = smm_projection(&v, &rc.match_spec, &rc.motivation);
        let speech = self.languaging.tick(&v, &projection, &mut self.retriever, &rc.languaging);
        if let Some(e) = &speech {
            self.log.speech.push(e.clone());
            self.last_speech = Some(e.clone());
        }
        self.log.body_memory.push(v);
        let report = TickReport {
            tick: self.tick,
            behavior: self.behavior.current,
            face: facial_expression(classify(self.motivation.value, &rc.motivation)),
            gaze: self.behavior.gaze,
            motivation: self.motivation.value,
            speech,
        };
        self.tick += 1;
        report
    }

    /// Closes open pushes and returns the log. Utterances cut off by the end
    /// of the session are dropped.
    pub fn finish(mut self) -> SessionLog {
        self.close_push(self.tick);
        let end = tick_to_secs(self.tick.saturating_sub(1));
        self.log.transcript.retain(|u| u.t_end <= end + 1e-9);
        self.log
    }
}

/// Runs a full session with the given driver.
pub fn run_session(cfg: SessionConfig, lexicon: &EmbodiedLexicon, driver: &mut dyn Driver, robot: &RobotConfig) -> Result<SessionLog> {
    let mut runner = SessionRunner::new(cfg, lexicon, robot.clone())?;
    while !runner.is_finished() {
        let actions = driver.act(&runner.observation());
        runner.step(actions, driver.face_visible());
    }
    Ok(runner.finish())
}

/// Grounds every teacher utterance of a finished session into the lexicon.
pub fn between_sessions(log: &SessionLog, lexicon: &mut EmbodiedLexicon, robot: &RobotConfig) -> Result<()> {
    let mut new = vec![];
    for u in log.teacher_utterances() {
        new.extend(ground_utterance(
            u,
            &log.body_memory,
            &robot.match_spec,
            &robot.motivation,
            &log.config.participant,
            log.config.session_index,
        )?);
    }
    lexicon.merge_session(new)
}

/// Five session logs plus the lexicon after each session's grounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub participant: String,
    pub scenario: Scenario,
    pub seed: u64,
    pub sessions: Vec<SessionLog>,
    pub lexicons: Vec<EmbodiedLexicon>,
}

/// Session configs for an experiment. Prohibition experiments switch to the
/// rejection setup for the last two sessions.
pub fn experiment_configs(scenario: Scenario, participant: &str, sessions: u8, duration: f64, seed: u64) -> Result<Vec<SessionConfig>> {
    if sessions == 0 || sessions > SESSIONS_PER_EXPERIMENT {
        return Err(Error::Config(format!("sessions must be 1..=5, got {sessions}")));
    }
    (1..=sessions)
        .map(|i| {
            let s = if scenario == Scenario::Prohibition && i <= 3 {
                Scenario::Prohibition
            } else {
                Scenario::Rejection
            };
            let mut cfg = SessionConfig::new(participant, s, i)?;
            cfg.duration = duration;
            if s == Scenario::Prohibition {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(100 + u64::from(i));
                cfg.forbidden = solve_forbidden(&cfg.valence_map, &mut rng)?;
            }
            cfg.validate()?;
            Ok(cfg)
        })
        .collect()
}

/// Options for [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    pub sessions: u8,
    pub duration: f64,
    pub robot: RobotConfig,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            sessions: SESSIONS_PER_EXPERIMENT,
            duration: 300.0,
            robot: RobotConfig::default(),
        }
    }
}

pub fn participant_id(profile: &TeacherProfile, seed: u64) -> String {
    format!("{}-{seed}", profile.name)
}

/// Runs a scripted experiment: sessions in order, grounding in between.
pub fn run_experiment(profile: &TeacherProfile, seed: u64, opts: &ExperimentOptions) -> Result<Experiment> {
    profile.validate()?;
    let participant = participant_id(profile, seed);
    let configs = experiment_configs(profile.scenario, &participant, opts.sessions, opts.duration, seed)?;
    let mut lexicon = EmbodiedLexicon::new(participant.clone());
    let mut sessions = vec![];
    let mut lexicons = vec![];
    for cfg in configs {
        let ctx = TeacherContext {
            scenario: cfg.scenario,
            forbidden: cfg.forbidden.clone(),
            session_label: cfg.label(),
        };
        let mut teacher = ScriptedTeacher::new(profile.clone(), ctx, seed, u64::from(cfg.session_index));
        let log = run_session(cfg, &lexicon, &mut teacher, &opts.robot)?;
        between_sessions(&log, &mut lexicon, &opts.robot)?;
        sessions.push(log);
        lexicons.push(lexicon.clone());
    }
    Ok(Experiment {
        participant,
        scenario: profile.scenario,
        seed,
        sessions,
        lexicons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valence_schedule_table() {
        assert_eq!(default_valence_schedule(1).unwrap()[&ObjectId::Triangle], Valence::LIKED);
        assert_eq!(default_valence_schedule(3).unwrap()[&ObjectId::Heart], Valence::NEUTRAL);
        assert!(default_valence_schedule(0).is_err());
        assert!(default_valence_schedule(6).is_err());
        for o in ObjectId::ALL {
            let vs: Vec<i8> = (1..=5).map(|s| default_valence_schedule(s).unwrap()[&o].get()).collect();
            assert_eq!(vs.iter().filter(|v| **v == 1).count(), 2);
            assert_eq!(vs.iter().filter(|v| **v == -1).count(), 2);
            assert_eq!(vs.iter().filter(|v| **v == 0).count(), 1);
        }
    }

    #[test]
    fn forbidden_solver_satisfies_validator() {
        for s in 1..=3 {
            let mut cfg = SessionConfig::new("P", Scenario::Prohibition, s).unwrap();
            let cands = forbidden_candidates(&cfg.valence_map);
            assert_eq!(cands.len(), 8);
            for c in cands {
                cfg.forbidden = c;
                cfg.validate().unwrap();
            }
            cfg.forbidden = BTreeSet::new();
            assert!(cfg.validate().is_err());
        }
        let mut late = SessionConfig::new("P", Scenario::Prohibition, 4).unwrap();
        late.validate().unwrap();
        late.forbidden.insert(ObjectId::Moon);
        assert!(late.validate().is_err());
    }

    #[test]
    fn experiment_layout() {
        let p = experiment_configs(Scenario::Prohibition, "P", 5, 300.0, 1).unwrap();
        assert!(p[..3].iter().all(|c| c.scenario == Scenario::Prohibition && !c.forbidden.is_empty()));
        assert!(p[3..].iter().all(|c| c.scenario == Scenario::Rejection && c.forbidden.is_empty()));
        let r = experiment_configs(Scenario::Rejection, "P", 5, 300.0, 1).unwrap();
        assert!(r.iter().all(|c| c.scenario == Scenario::Rejection));
        assert!(experiment_configs(Scenario::Rejection, "P", 0, 300.0, 1).is_err());
    }

    #[test]
    fn first_session_is_mute_and_sized() {
        let opts = ExperimentOptions {
            sessions: 1,
            ..ExperimentOptions::default()
        };
        let e = run_experiment(&TeacherProfile::rejection(), 3, &opts).unwrap();
        let log = &e.sessions[0];
        assert_eq!(log.body_memory.len(), 9000);
        assert!(log.speech.is_empty());
        assert!(log.pushes.is_empty());
        assert!(!log.transcript.is_empty());
        assert_eq!(log.behavior_events[0], BehaviorEvent { tick: 0, behavior: BehaviorId::LookingAround });
    }

    #[test]
    fn between_sessions_with_no_utterances_keeps_lexicon() {
        let cfg = SessionConfig::new("P", Scenario::Rejection, 1).unwrap();
        let mut lex = EmbodiedLexicon::new("P");
        struct Silent;
        impl Driver for Silent {
            fn act(&mut self, _: &Observation) -> Vec<TeacherAction> {
                vec![]
            }
        }
        let log = run_session(cfg, &lex, &mut Silent, &RobotConfig::default()).unwrap();
        between_sessions(&log, &mut lex, &RobotConfig::default()).unwrap();
        assert!(lex.is_empty());
    }
}
