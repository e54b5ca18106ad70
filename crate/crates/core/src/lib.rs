//! Simulated embodied acquisition of negation words.
//!
//! A virtual robot keeps a per-tick sensorimotor-motivational record, grounds
//! the prosodically salient word of each teacher utterance in it, and later
//! speaks by nearest-neighbour retrieval over the grounded exemplars. The
//! `analysis` module measures the resulting logs and the bundled tables.

pub mod analysis;
pub mod behavior;
pub mod error;
pub mod grounding;
pub mod io;
pub mod languaging;
pub mod learner;
pub mod motivation;
pub mod prosody;
pub mod session;
pub mod smm;
pub mod teacher;

pub use behavior::{FacialExpression, GazeTarget};
pub use error::{Error, Result};
pub use grounding::{EmbodiedLexicon, GroundedWord};
pub use languaging::{LanguagingConfig, SpeechEvent};
pub use learner::{LearnerConfig, Retriever};
pub use motivation::{MotivationClass, MotivationConfig};
pub use prosody::{Speaker, Utterance, Word};
pub use session::{run_experiment, Experiment, ExperimentOptions, RobotConfig, SessionConfig, SessionLog};
pub use smm::{BehaviorId, MatchFeatureSpec, ObjectId, SmmVector, TimeConstants, Valence};
pub use teacher::{HumanNegType, NegationType, Scenario, ScriptedTeacher, TeacherProfile};
