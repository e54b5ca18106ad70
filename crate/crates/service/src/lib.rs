//! Live teaching sessions over WebSocket.
//!
//! A single client plays the teacher. The server paces the robot at 30 ticks
//! per second, streams its state and speech back, and on `end_session`
//! grounds the session and writes logs in the batch formats. See
//! `PROTOCOL.md` for the message schemas.

pub mod live;
pub mod prosody;
pub mod protocol;
pub mod server;

pub use live::{Engine, ServiceConfig};
pub use prosody::synthesize_prosody;
pub use protocol::{ClientMessage, ErrorCode, PushState, RobotState, ServerMessage, WordInput};
pub use server::Server;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] negacq_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
