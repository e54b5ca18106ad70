//! Wire messages. Every message is one UTF-8 JSON object in one WebSocket text
//! frame, discriminated by its `type` field.

use std::collections::BTreeMap;

use negacq_core::{BehaviorId, FacialExpression, GazeTarget, NegationType, ObjectId, Scenario};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PushState {
    Start,
    End,
}

/// A typed word. Missing prosodic features are synthesized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordInput {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dur: Option<f64>,
}

impl WordInput {
    pub fn text(t: impl Into<String>) -> WordInput {
        WordInput {
            text: t.into(),
            f0: None,
            energy: None,
            dur: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    StartSession {
        scenario: Scenario,
        session_index: u8,
        participant: String,
        /// Objects the teacher will forbid; chosen by the server when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        forbidden: Option<Vec<ObjectId>>,
    },
    Present {
        object: ObjectId,
    },
    Withdraw,
    Push {
        state: PushState,
    },
    Utterance {
        words: Vec<WordInput>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neg_type: Option<NegationType>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        emphasized_index: Option<usize>,
    },
    EndSession,
}

/// Robot state after a tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub tick: u64,
    pub behavior: BehaviorId,
    pub face: FacialExpression,
    pub gaze: GazeTarget,
    pub motivation: f64,
}

/// Lexicon summary row for the client's inspector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconRow {
    pub word: String,
    pub exemplars: usize,
    pub weight: u64,
    pub negative_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    SessionStarted {
        participant: String,
        scenario: Scenario,
        session_index: u8,
        valences: BTreeMap<ObjectId, i8>,
        forbidden: Vec<ObjectId>,
        lexicon: Vec<LexiconRow>,
    },
    State(RobotState),
    Speech {
        tick: u64,
        word: String,
    },
    SessionEnd {
        dir: String,
        logs: Vec<String>,
        lexicon: String,
        lexicon_summary: Vec<LexiconRow>,
    },
    Error {
        code: ErrorCode,
        text: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    /// Not valid JSON or not a known message.
    Malformed,
    /// Action requires a running session.
    NoSession,
    /// `start_session` while a session runs.
    SessionActive,
    /// Action inconsistent with the current state.
    InvalidAction,
    /// Session parameters rejected.
    Config,
    /// Logs could not be written.
    Io,
    /// Another client is connected.
    Busy,
}

impl ServerMessage {
    pub fn error(code: ErrorCode, text: impl Into<String>) -> ServerMessage {
        ServerMessage::Error { code, text: text.into() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }
}

pub fn parse_client(text: &str) -> Result<ClientMessage, ServerMessage> {
    serde_json::from_str(text).map_err(|e| ServerMessage::error(ErrorCode::Malformed, e.to_string()))
}
