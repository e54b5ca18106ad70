//! Session state owned by the tick loop: turns client messages into teacher
//! actions, advances the robot and persists logs.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use negacq_core::io::{self, lexicon_file_name, load_lexicon, save_lexicon, save_session, session_dir_name};
use negacq_core::prosody::Speaker;
use negacq_core::session::{between_sessions, solve_forbidden, SessionRunner};
use negacq_core::smm::tick_to_secs;
use negacq_core::teacher::{TeacherAction, WORD_GAP};
use negacq_core::{EmbodiedLexicon, ObjectId, RobotConfig, SessionConfig, Utterance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::prosody::synthesize_prosody;
use crate::protocol::{ClientMessage, ErrorCode, LexiconRow, PushState, RobotState, ServerMessage};

/// Ticks between unconditional state messages (10 Hz at 30 ticks per second).
pub const HEARTBEAT_TICKS: u64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceConfig {
    /// Root directory for session logs and lexicon snapshots.
    pub out_dir: PathBuf,
    /// Lexicon to start from for a participant not seen yet.
    pub lexicon: Option<PathBuf>,
    pub robot: RobotConfig,
    /// Seed for the forbidden-object choice when the client gives none.
    pub seed: u64,
    /// Pacing multiplier; 1 is real time.
    pub speed: f64,
    /// Session length after which the session ends by itself, seconds.
    pub max_duration: f64,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            out_dir: PathBuf::from("live"),
            lexicon: None,
            robot: RobotConfig::default(),
            seed: 0,
            speed: 1.0,
            max_duration: 300.0,
        }
    }
}

struct LiveSession {
    runner: SessionRunner,
    participant: String,
    session_index: u8,
    pending: Vec<TeacherAction>,
    presented: Option<ObjectId>,
    pushing: bool,
    utterances: usize,
    last_state: Option<RobotState>,
    since_state: u64,
}

/// All simulation state of the service.
pub struct Engine {
    cfg: ServiceConfig,
    lexicons: BTreeMap<String, EmbodiedLexicon>,
    session: Option<LiveSession>,
}

fn valid_participant(p: &str) -> bool {
    !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

pub fn lexicon_summary(lex: &EmbodiedLexicon, robot: &RobotConfig) -> Vec<LexiconRow> {
    lex.words()
        .into_iter()
        .map(|w| {
            let entries: Vec<_> = lex.entries.iter().filter(|g| g.word == w).collect();
            LexiconRow {
                word: w.to_string(),
                exemplars: entries.len(),
                weight: entries.iter().map(|g| u64::from(g.weight)).sum(),
                negative_fraction: lex.negative_association_fraction(w, &robot.motivation).unwrap_or(0.0),
            }
        })
        .collect()
}

impl Engine {
    pub fn new(cfg: ServiceConfig) -> negacq_core::Result<Engine> {
        cfg.robot.validate()?;
        if !(cfg.speed > 0.0 && cfg.speed.is_finite()) {
            return Err(negacq_core::Error::Config(format!("speed must be positive, got {}", cfg.speed)));
        }
        if !(cfg.max_duration > 0.0) {
            return Err(negacq_core::Error::Config("max_duration must be positive".into()));
        }
        Ok(Engine {
            cfg,
            lexicons: BTreeMap::new(),
            session: None,
        })
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.cfg
    }

    pub fn in_session(&self) -> bool {
        self.session.is_some()
    }

    pub fn lexicon(&self, participant: &str) -> Option<&EmbodiedLexicon> {
        self.lexicons.get(participant)
    }

    fn participant_dir(&self, participant: &str) -> PathBuf {
        self.cfg.out_dir.join(participant)
    }

    fn initial_lexicon(&self, participant: &str, session_index: u8) -> negacq_core::Result<EmbodiedLexicon> {
        let spec = &self.cfg.robot.match_spec;
        if let Some(p) = &self.cfg.lexicon {
            return load_lexicon(p, participant, spec);
        }
        let previous = self.participant_dir(participant).join(lexicon_file_name(session_index.saturating_sub(1)));
        if session_index > 1 && previous.is_file() {
            return load_lexicon(&previous, participant, spec);
        }
        Ok(EmbodiedLexicon::new(participant))
    }

    fn start(&mut self, scenario: negacq_core::Scenario, session_index: u8, participant: String, forbidden: Option<Vec<ObjectId>>) -> Result<ServerMessage, ServerMessage> {
        let config_err = |e: negacq_core::Error| ServerMessage::error(ErrorCode::Config, e.to_string());
        if !valid_participant(&participant) {
            return Err(ServerMessage::error(ErrorCode::Config, "participant must be letters, digits, '-' or '_'"));
        }
        let mut cfg = SessionConfig::new(participant.clone(), scenario, session_index).map_err(config_err)?;
        cfg.duration = self.cfg.max_duration;
        if scenario == negacq_core::Scenario::Prohibition {
            cfg.forbidden = match forbidden {
                Some(f) => f.into_iter().collect(),
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
                    rng.set_stream(100 + u64::from(session_index));
                    solve_forbidden(&cfg.valence_map, &mut rng).map_err(config_err)?
                }
            };
        } else if forbidden.is_some_and(|f| !f.is_empty()) {
            return Err(ServerMessage::error(ErrorCode::Config, "forbidden objects only apply to prohibition sessions"));
        }
        cfg.validate().map_err(config_err)?;
        if !self.lexicons.contains_key(&participant) {
            let lex = self.initial_lexicon(&participant, session_index).map_err(config_err)?;
            self.lexicons.insert(participant.clone(), lex);
        }
        let lex = &self.lexicons[&participant];
        let runner = SessionRunner::new(cfg.clone(), lex, self.cfg.robot.clone()).map_err(config_err)?;
        let started = ServerMessage::SessionStarted {
            participant: participant.clone(),
            scenario,
            session_index,
            valences: cfg.valence_map.iter().map(|(o, v)| (*o, v.get())).collect(),
            forbidden: cfg.forbidden.iter().copied().collect::<BTreeSet<_>>().into_iter().collect(),
            lexicon: lexicon_summary(lex, &self.cfg.robot),
        };
        self.session = Some(LiveSession {
            runner,
            participant,
            session_index,
            pending: vec![],
            presented: None,
            pushing: false,
            utterances: 0,
            last_state: None,
            since_state: 0,
        });
        Ok(started)
    }

    /// Applies one client message. Replies are returned; most actions take
    /// effect on the next tick and produce no reply.
    pub fn handle(&mut self, msg: ClientMessage) -> Vec<ServerMessage> {
        let invalid = |t: &str| vec![ServerMessage::error(ErrorCode::InvalidAction, t)];
        if let ClientMessage::StartSession {
            scenario,
            session_index,
            participant,
            forbidden,
        } = msg
        {
            if self.session.is_some() {
                return vec![ServerMessage::error(ErrorCode::SessionActive, "a session is already running")];
            }
            return vec![self.start(scenario, session_index, participant, forbidden).unwrap_or_else(|e| e)];
        }
        let Some(s) = self.session.as_mut() else {
            return vec![ServerMessage::error(ErrorCode::NoSession, "no session running; send start_session first")];
        };
        match msg {
            ClientMessage::StartSession { .. } => unreachable!("handled above"),
            ClientMessage::Present { object } => {
                if let Some(current) = s.presented {
                    return invalid(&format!("{current} is still presented; withdraw it first"));
                }
                s.presented = Some(object);
                s.pending.push(TeacherAction::Present(object));
            }
            ClientMessage::Withdraw => {
                if s.presented.take().is_none() {
                    return invalid("nothing is presented");
                }
                s.pending.push(TeacherAction::Withdraw);
            }
            ClientMessage::Push { state } => match (state, s.pushing) {
                (PushState::Start, false) => {
                    s.pushing = true;
                    s.pending.push(TeacherAction::PushStart);
                }
                (PushState::End, true) => {
                    s.pushing = false;
                    s.pending.push(TeacherAction::PushEnd);
                }
                (PushState::Start, true) => return invalid("push already started"),
                (PushState::End, false) => return invalid("no push in progress"),
            },
            ClientMessage::Utterance {
                words,
                neg_type,
                emphasized_index,
            } => {
                let words = match synthesize_prosody(&words, emphasized_index) {
                    Ok(w) => w,
                    Err(e) => return invalid(&e),
                };
                s.utterances += 1;
                let t_start = tick_to_secs(s.runner.tick());
                let span: f64 = words.iter().map(|w| w.dur).sum::<f64>() + WORD_GAP * (words.len() - 1) as f64;
                s.pending.push(TeacherAction::Say(Utterance {
                    id: format!("u{:04}", s.utterances),
                    t_start,
                    t_end: t_start + span,
                    speaker: Speaker::Teacher,
                    neg_type,
                    words,
                }));
            }
            ClientMessage::EndSession => return self.end(),
        }
        vec![]
    }

    /// Advances the running session by one tick.
    pub fn tick(&mut self) -> Vec<ServerMessage> {
        let Some(s) = self.session.as_mut() else {
            return vec![];
        };
        let report = s.runner.step(std::mem::take(&mut s.pending), true);
        let state = RobotState {
            tick: report.tick,
            behavior: report.behavior,
            face: report.face,
            gaze: report.gaze,
            motivation: report.motivation,
        };
        let changed = s.last_state.as_ref().is_none_or(|last| {
            (last.behavior, last.face, last.gaze, last.motivation) != (state.behavior, state.face, state.gaze, state.motivation)
        });
        let mut out = vec![];
        s.since_state += 1;
        if changed || s.since_state >= HEARTBEAT_TICKS {
            s.since_state = 0;
            s.last_state = Some(state.clone());
            out.push(ServerMessage::State(state));
        }
        if let Some(e) = report.speech {
            out.push(ServerMessage::Speech { tick: e.tick, word: e.word });
        }
        if s.runner.is_finished() {
            out.extend(self.end());
        }
        out
    }

    /// Ends the running session: grounds its utterances and writes the logs.
    pub fn end(&mut self) -> Vec<ServerMessage> {
        let Some(s) = self.session.take() else {
            return vec![ServerMessage::error(ErrorCode::NoSession, "no session running")];
        };
        let log = s.runner.finish();
        let robot = &self.cfg.robot;
        let lex = self.lexicons.entry(s.participant.clone()).or_insert_with(|| EmbodiedLexicon::new(&s.participant));
        let mut grown = lex.clone();
        if let Err(e) = between_sessions(&log, &mut grown, robot) {
            return vec![ServerMessage::error(ErrorCode::Io, format!("grounding failed: {e}"))];
        }
        *lex = grown;
        let pdir = self.cfg.out_dir.join(&s.participant);
        let dir = pdir.join(session_dir_name(s.session_index));
        let lex_path = pdir.join(lexicon_file_name(s.session_index));
        let written = save_session(&log, &dir, &robot.languaging).and_then(|_| save_lexicon(lex, &lex_path));
        if let Err(e) = written {
            return vec![ServerMessage::error(ErrorCode::Io, e.to_string())];
        }
        vec![ServerMessage::SessionEnd {
            dir: dir.display().to_string(),
            logs: session_files(&dir),
            lexicon: lex_path.display().to_string(),
            lexicon_summary: lexicon_summary(lex, robot),
        }]
    }
}

fn session_files(dir: &Path) -> Vec<String> {
    [
        io::SESSION_CONFIG,
        io::BODY_MEMORY,
        io::TRANSCRIPT,
        io::ROBOT_TRANSCRIPT,
        io::PUSHES,
        io::SPEECH,
        io::BEHAVIOR_EVENTS,
    ]
    .iter()
    .map(|f| dir.join(f).display().to_string())
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::WordInput;
    use negacq_core::io::load_session;
    use negacq_core::{BehaviorId, FacialExpression, Scenario};

    fn engine(dir: &Path) -> Engine {
        Engine::new(ServiceConfig {
            out_dir: dir.to_path_buf(),
            ..ServiceConfig::default()
        })
        .unwrap()
    }

    fn start(e: &mut Engine, scenario: Scenario, index: u8) -> ServerMessage {
        e.handle(ClientMessage::StartSession {
            scenario,
            session_index: index,
            participant: "P01".into(),
            forbidden: None,
        })
        .remove(0)
    }

    fn code(m: &[ServerMessage]) -> Option<ErrorCode> {
        match m.first() {
            Some(ServerMessage::Error { code, .. }) => Some(*code),
            _ => None,
        }
    }

    #[test]
    fn start_then_end_gives_empty_logs() {
        let dir = tempfile::tempdir().unwrap();
        let mut e = engine(dir.path());
        assert!(matches!(start(&mut e, Scenario::Rejection, 1), ServerMessage::SessionStarted { .. }));
        let end = e.handle(ClientMessage::EndSession);
        let ServerMessage::SessionEnd { dir: d, logs, .. } = &end[0] else {
            panic!("{end:?}");
        };
        assert_eq!(logs.len(), 7);
        let log = load_session(Path::new(d)).unwrap();
        assert!(log.body_memory.is_empty() && log.transcript.is_empty());
        assert!(!e.in_session());
    }

    #[test]
    fn protocol_errors() {
        let dir = tempfile::tempdir().unwrap();
        let mut e = engine(dir.path());
        assert_eq!(code(&e.handle(ClientMessage::Withdraw)), Some(ErrorCode::NoSession));
        start(&mut e, Scenario::Prohibition, 1);
        assert_eq!(code(&e.handle(ClientMessage::Withdraw)), Some(ErrorCode::InvalidAction));
        assert_eq!(code(&e.handle(ClientMessage::Push { state: PushState::End })), Some(ErrorCode::InvalidAction));
        assert!(e.handle(ClientMessage::Present { object: ObjectId::Heart }).is_empty());
        assert_eq!(code(&e.handle(ClientMessage::Present { object: ObjectId::Moon })), Some(ErrorCode::InvalidAction));
        assert_eq!(code(&start_msg(&mut e)), Some(ErrorCode::SessionActive));
        let bad = ClientMessage::Utterance {
            words: vec![],
            neg_type: None,
            emphasized_index: None,
        };
        assert_eq!(code(&e.handle(bad)), Some(ErrorCode::InvalidAction));
        assert!(e.in_session());
    }

    fn start_msg(e: &mut Engine) -> Vec<ServerMessage> {
        e.handle(ClientMessage::StartSession {
            scenario: Scenario::Rejection,
            session_index: 2,
            participant: "P01".into(),
            forbidden: None,
        })
    }

    #[test]
    fn push_during_reach_frowns_immediately() {
        let dir = tempfile::tempdir().unwrap();
        let mut e = engine(dir.path());
        start(&mut e, Scenario::Rejection, 1);
        // triangle is liked in the first session
        e.handle(ClientMessage::Present { object: ObjectId::Triangle });
        let mut reaching = false;
        for _ in 0..300 {
            for m in e.tick() {
                if let ServerMessage::State(s) = m {
                    reaching = s.behavior == BehaviorId::Reaching;
                }
            }
            if reaching {
                break;
            }
        }
        assert!(reaching);
        e.handle(ClientMessage::Push { state: PushState::Start });
        let first = e.tick();
        let ServerMessage::State(s) = &first[0] else {
            panic!("{first:?}");
        };
        assert_eq!(s.face, FacialExpression::Frown);
        assert_eq!(s.motivation, -1.0);
    }

    #[test]
    fn grounded_utterance_reaches_lexicon() {
        let dir = tempfile::tempdir().unwrap();
        let mut e = engine(dir.path());
        start(&mut e, Scenario::Rejection, 1);
        e.handle(ClientMessage::Present { object: ObjectId::Square });
        for _ in 0..30 {
            e.tick();
        }
        let words = ["no", "you", "can't"].map(WordInput::text).to_vec();
        e.handle(ClientMessage::Utterance {
            words,
            neg_type: None,
            emphasized_index: Some(0),
        });
        for _ in 0..60 {
            e.tick();
        }
        let end = e.handle(ClientMessage::EndSession);
        assert!(matches!(end[0], ServerMessage::SessionEnd { .. }), "{end:?}");
        let lex = e.lexicon("P01").unwrap();
        assert_eq!(lex.words().into_iter().collect::<Vec<_>>(), vec!["no"]);
        let snapshot = load_lexicon(&dir.path().join("P01").join(lexicon_file_name(1)), "P01", &Default::default()).unwrap();
        assert_eq!(&snapshot, lex);
    }

    #[test]
    fn heartbeat_keeps_state_flowing() {
        let dir = tempfile::tempdir().unwrap();
        let mut e = engine(dir.path());
        start(&mut e, Scenario::Rejection, 1);
        let mut gaps = vec![];
        let mut last = 0;
        for t in 0..200u64 {
            if e.tick().iter().any(|m| matches!(m, ServerMessage::State(_))) {
                gaps.push(t - last);
                last = t;
            }
        }
        assert!(gaps.iter().all(|g| *g <= HEARTBEAT_TICKS));
    }

    #[test]
    fn ends_by_itself_at_max_duration() {
        let dir = tempfile::tempdir().unwrap();
        let mut e = Engine::new(ServiceConfig {
            out_dir: dir.path().to_path_buf(),
            max_duration: 1.0,
            ..ServiceConfig::default()
        })
        .unwrap();
        start(&mut e, Scenario::Rejection, 1);
        let mut ended = false;
        for _ in 0..30 {
            ended |= e.tick().iter().any(|m| matches!(m, ServerMessage::SessionEnd { .. }));
        }
        assert!(ended && !e.in_session());
    }
}
