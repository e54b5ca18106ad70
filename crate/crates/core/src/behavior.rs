//! Body-behavior state machine with gaze scheduling.

use serde::{Deserialize, Serialize};

use crate::motivation::MotivationClass;
use crate::smm::{secs_to_ticks, tick_to_secs, BehaviorId, ObjectId, TimeConstants, Valence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GazeTarget {
    Face,
    Object(ObjectId),
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FacialExpression {
    Smile,
    Neutral,
    Frown,
}

pub fn facial_expression(c: MotivationClass) -> FacialExpression {
    match c {
        MotivationClass::Positive => FacialExpression::Smile,
        MotivationClass::Neutral => FacialExpression::Neutral,
        MotivationClass::Negative => FacialExpression::Frown,
    }
}

/// Behaviors caused by an object presentation; only these drive speech.
pub fn is_trigger_behavior(b: BehaviorId) -> bool {
    matches!(b, BehaviorId::Reaching | BehaviorId::Rejecting | BehaviorId::Watching)
}

/// Per-tick perception handed to [`step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorInputs {
    pub presented: Option<(ObjectId, Valence)>,
    pub resistance_active: bool,
    pub motivation_class: MotivationClass,
    pub face_visible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorState {
    pub current: BehaviorId,
    pub gaze: GazeTarget,
    /// Ticks left before the next gaze shift.
    pub gaze_ticks_left: u64,
    pub presented: Option<ObjectId>,
    /// Ticks since the last high-level percept.
    pub idle_ticks: u64,
}

impl Default for BehaviorState {
    fn default() -> Self {
        BehaviorState {
            current: BehaviorId::Idle,
            gaze: GazeTarget::Table,
            gaze_ticks_left: 0,
            presented: None,
            idle_ticks: 0,
        }
    }
}

impl BehaviorState {
    /// State at the session start marker.
    pub fn started(tc: &TimeConstants) -> BehaviorState {
        BehaviorState {
            current: BehaviorId::LookingAround,
            gaze: GazeTarget::Face,
            gaze_ticks_left: dwell(BehaviorId::LookingAround, GazeTarget::Face, false, tc),
            presented: None,
            idle_ticks: 0,
        }
    }

    pub fn gaze_seconds_left(&self) -> f64 {
        tick_to_secs(self.gaze_ticks_left)
    }
}

fn dwell(b: BehaviorId, gaze: GazeTarget, grumpy: bool, tc: &TimeConstants) -> u64 {
    let on_face = gaze == GazeTarget::Face;
    let secs = match b {
        BehaviorId::Reaching if grumpy => {
            if on_face {
                tc.grumpy_face_time
            } else {
                tc.grumpy_object_time
            }
        }
        BehaviorId::Reaching => {
            if on_face {
                tc.face_time
            } else {
                tc.object_time
            }
        }
        BehaviorId::Rejecting => {
            if on_face {
                tc.grumpy_face_time
            } else {
                tc.reject_glance_time
            }
        }
        BehaviorId::Watching | BehaviorId::LookingAround | BehaviorId::Idle => {
            if on_face {
                tc.dwell_time_face
            } else {
                tc.dwell_time_object
            }
        }
    };
    secs_to_ticks(secs).max(1)
}

fn first_gaze(b: BehaviorId, obj: Option<ObjectId>) -> GazeTarget {
    match (b, obj) {
        (BehaviorId::LookingAround, _) | (_, None) => GazeTarget::Face,
        (_, Some(o)) => GazeTarget::Object(o),
    }
}

fn next_gaze(b: BehaviorId, gaze: GazeTarget, obj: Option<ObjectId>) -> GazeTarget {
    match gaze {
        GazeTarget::Face => match (b, obj) {
            (BehaviorId::LookingAround, _) | (_, None) => GazeTarget::Table,
            (_, Some(o)) => GazeTarget::Object(o),
        },
        _ => GazeTarget::Face,
    }
}

/// Advances the state machine by one tick. Returns the new state and, when
/// the active behavior changed, the behavior entered.
pub fn step(state: &BehaviorState, inp: &BehaviorInputs, tc: &TimeConstants) -> (BehaviorState, Option<BehaviorId>) {
    if state.current == BehaviorId::Idle {
        return (state.clone(), None);
    }
    let desired = match inp.presented {
        None => BehaviorId::LookingAround,
        Some((_, v)) => match v.get() {
            1 => BehaviorId::Reaching,
            -1 => BehaviorId::Rejecting,
            _ => BehaviorId::Watching,
        },
    };
    let obj = inp.presented.map(|p| p.0);
    let grumpy = inp.resistance_active || inp.motivation_class == MotivationClass::Negative;
    let percept = inp.presented.is_some() || inp.face_visible || inp.resistance_active;
    let idle_ticks = if percept { 0 } else { state.idle_ticks + 1 };
    let idle_limit = secs_to_ticks(tc.max_idle_time).max(1);

    let mut next = BehaviorState {
        current: desired,
        presented: obj,
        idle_ticks,
        ..state.clone()
    };
    if desired != state.current || obj != state.presented {
        next.gaze = first_gaze(desired, obj);
        next.gaze_ticks_left = dwell(desired, next.gaze, grumpy, tc);
    } else if idle_ticks >= idle_limit {
        next.gaze = GazeTarget::Table;
        next.gaze_ticks_left = 1;
    } else if state.gaze == GazeTarget::Table && state.idle_ticks >= idle_limit {
        next.gaze = first_gaze(desired, obj);
        next.gaze_ticks_left = dwell(desired, next.gaze, grumpy, tc);
    } else if state.gaze_ticks_left <= 1 {
        next.gaze = next_gaze(desired, state.gaze, obj);
        next.gaze_ticks_left = dwell(desired, next.gaze, grumpy, tc);
    } else {
        next.gaze_ticks_left = state.gaze_ticks_left - 1;
    }
    let event = (desired != state.current).then_some(desired);
    (next, event)
}
