//! Line-delimited JSON log formats and session directory layout.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::relation::Interval;
use crate::error::{Error, Result};
use crate::grounding::{EmbodiedLexicon, LexiconRecord};
use crate::languaging::{robot_utterance_log, LanguagingConfig, SpeechEvent};
use crate::prosody::Utterance;
use crate::session::{BehaviorEvent, Experiment, SessionConfig, SessionLog};
use crate::smm::{tick_to_secs, BehaviorId, MatchFeatureSpec, ObjectId, SmmVector};

pub const BODY_MEMORY: &str = "body_memory.jsonl";
pub const TRANSCRIPT: &str = "transcript.jsonl";
pub const ROBOT_TRANSCRIPT: &str = "robot_transcript.jsonl";
pub const PUSHES: &str = "pushes.jsonl";
pub const SPEECH: &str = "speech.jsonl";
pub const BEHAVIOR_EVENTS: &str = "behavior_events.jsonl";
pub const SESSION_CONFIG: &str = "config.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyRecord {
    pub t: f64,
    pub tick: u64,
    pub bid: BehaviorId,
    pub oid: Option<ObjectId>,
    pub face: bool,
    pub moti: f64,
    pub resist: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enc: Option<Vec<f64>>,
}

impl From<&SmmVector> for BodyRecord {
    fn from(v: &SmmVector) -> Self {
        BodyRecord {
            t: tick_to_secs(v.tick),
            tick: v.tick,
            bid: v.behavior,
            oid: v.object,
            face: v.face_detected,
            moti: v.motivation,
            resist: v.resistance,
            enc: v.encoders.clone(),
        }
    }
}

impl From<BodyRecord> for SmmVector {
    fn from(r: BodyRecord) -> Self {
        SmmVector {
            tick: r.tick,
            behavior: r.bid,
            object: r.oid,
            face_detected: r.face,
            motivation: r.moti,
            resistance: r.resist,
            encoders: r.enc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorEventRecord {
    pub t: f64,
    pub tick: u64,
    pub bid: BehaviorId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeechRecord {
    pub t: f64,
    pub tick: u64,
    pub word: String,
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    for item in items {
        serde_json::to_writer(&mut w, &item)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = vec![];
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| Error::Record {
            path: path.display().to_string(),
            line: i + 1,
            source,
        })?);
    }
    Ok(out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&s).map_err(|source| Error::Record {
        path: path.display().to_string(),
        line: source.line(),
        source,
    })
}

/// Writes all files of a session into `dir`, creating it if needed.
pub fn save_session(log: &SessionLog, dir: &Path, lcfg: &LanguagingConfig) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join(SESSION_CONFIG), &log.config)?;
    write_jsonl(&dir.join(BODY_MEMORY), log.body_memory.iter().map(BodyRecord::from))?;
    write_jsonl(&dir.join(TRANSCRIPT), &log.transcript)?;
    write_jsonl(&dir.join(ROBOT_TRANSCRIPT), robot_utterance_log(&log.speech, lcfg))?;
    write_jsonl(&dir.join(PUSHES), &log.pushes)?;
    write_jsonl(
        &dir.join(SPEECH),
        log.speech.iter().map(|s| SpeechRecord {
            t: tick_to_secs(s.tick),
            tick: s.tick,
            word: s.word.clone(),
        }),
    )?;
    write_jsonl(
        &dir.join(BEHAVIOR_EVENTS),
        log.behavior_events.iter().map(|e| BehaviorEventRecord {
            t: tick_to_secs(e.tick),
            tick: e.tick,
            bid: e.behavior,
        }),
    )
}

pub fn load_session(dir: &Path) -> Result<SessionLog> {
    let config: SessionConfig = read_json(&dir.join(SESSION_CONFIG))?;
    let body: Vec<BodyRecord> = read_jsonl(&dir.join(BODY_MEMORY))?;
    let transcript: Vec<Utterance> = read_jsonl(&dir.join(TRANSCRIPT))?;
    let pushes: Vec<Interval> = read_jsonl(&dir.join(PUSHES))?;
    let speech: Vec<SpeechRecord> = read_jsonl(&dir.join(SPEECH))?;
    let events: Vec<BehaviorEventRecord> = read_jsonl(&dir.join(BEHAVIOR_EVENTS))?;
    Ok(SessionLog {
        config,
        body_memory: body.into_iter().map(SmmVector::from).collect(),
        behavior_events: events
            .into_iter()
            .map(|e| BehaviorEvent {
                tick: e.tick,
                behavior: e.bid,
            })
            .collect(),
        pushes,
        transcript,
        speech: speech
            .into_iter()
            .map(|s| SpeechEvent {
                tick: s.tick,
                word: s.word,
            })
            .collect(),
        start_tick: 0,
    })
}

/// Session directories below `root` (those holding a transcript), sorted.
pub fn find_session_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut out = vec![];
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        if d.join(TRANSCRIPT).is_file() && d.join(SESSION_CONFIG).is_file() {
            out.push(d.clone());
        }
        let entries = fs::read_dir(&d).map_err(|e| Error::io(&d, e))?;
        for e in entries {
            let p = e.map_err(|e| Error::io(&d, e))?.path();
            if p.is_dir() {
                stack.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn save_lexicon(lex: &EmbodiedLexicon, path: &Path) -> Result<()> {
    write_jsonl(path, lex.entries.iter().map(LexiconRecord::from_grounded))
}

pub fn load_lexicon(path: &Path, participant: &str, spec: &MatchFeatureSpec) -> Result<EmbodiedLexicon> {
    let records: Vec<LexiconRecord> = read_jsonl(path)?;
    let mut lex = EmbodiedLexicon::new(participant);
    let entries = records.iter().map(|r| r.to_grounded(spec)).collect::<Result<Vec<_>>>()?;
    lex.merge_session(entries)?;
    Ok(lex)
}

pub fn lexicon_file_name(session_index: u8) -> String {
    format!("lexicon_after_session_{session_index}.jsonl")
}

pub fn session_dir_name(session_index: u8) -> String {
    format!("session_{session_index}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub participant: String,
    pub scenario: crate::teacher::Scenario,
    pub seed: u64,
    pub sessions: Vec<String>,
    pub lexicons: Vec<String>,
}

/// Writes an experiment: one directory per session plus lexicon snapshots.
pub fn save_experiment(e: &Experiment, dir: &Path, lcfg: &LanguagingConfig) -> Result<ExperimentManifest> {
    fs::create_dir_all(dir).map_err(|err| Error::io(dir, err))?;
    let mut manifest = ExperimentManifest {
        participant: e.participant.clone(),
        scenario: e.scenario,
        seed: e.seed,
        sessions: vec![],
        lexicons: vec![],
    };
    for (log, lex) in e.sessions.iter().zip(&e.lexicons) {
        let name = session_dir_name(log.config.session_index);
        save_session(log, &dir.join(&name), lcfg)?;
        let lname = lexicon_file_name(log.config.session_index);
        save_lexicon(lex, &dir.join(&lname))?;
        manifest.sessions.push(name);
        manifest.lexicons.push(lname);
    }
    write_json(&dir.join("experiment.json"), &manifest)?;
    Ok(manifest)
}
