//! Shared domain types: behaviors, objects, the per-tick smm vector and its
//! projection onto the features used for grounding and matching.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motivation::{classify, MotivationClass, MotivationConfig};

/// Simulation rate in ticks per second.
pub const TICK_HZ: f64 = 30.0;

/// Converts a duration in seconds to whole ticks, rounding to nearest.
pub fn secs_to_ticks(secs: f64) -> u64 {
    (secs * TICK_HZ).round().max(0.0) as u64
}

/// Session-clock time of a tick.
pub fn tick_to_secs(tick: u64) -> f64 {
    tick as f64 / TICK_HZ
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BehaviorId {
    LookingAround,
    Watching,
    Reaching,
    Rejecting,
    Idle,
}

impl BehaviorId {
    pub const ALL: [BehaviorId; 5] = [
        BehaviorId::LookingAround,
        BehaviorId::Watching,
        BehaviorId::Reaching,
        BehaviorId::Rejecting,
        BehaviorId::Idle,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectId {
    Triangle,
    Moon,
    Square,
    Heart,
    Circle,
}

impl ObjectId {
    pub const ALL: [ObjectId; 5] = [
        ObjectId::Triangle,
        ObjectId::Moon,
        ObjectId::Square,
        ObjectId::Heart,
        ObjectId::Circle,
    ];

    /// Lowercase label, as spoken by the teacher.
    pub fn label(self) -> &'static str {
        match self {
            ObjectId::Triangle => "triangle",
            ObjectId::Moon => "moon",
            ObjectId::Square => "square",
            ObjectId::Heart => "heart",
            ObjectId::Circle => "circle",
        }
    }

    pub fn from_label(s: &str) -> Option<ObjectId> {
        ObjectId::ALL.into_iter().find(|o| o.label() == s)
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Liking of an object in a session: -1, 0 or +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub struct Valence(i8);

impl Valence {
    pub const DISLIKED: Valence = Valence(-1);
    pub const NEUTRAL: Valence = Valence(0);
    pub const LIKED: Valence = Valence(1);

    pub fn new(v: i8) -> Result<Valence> {
        match v {
            -1..=1 => Ok(Valence(v)),
            _ => Err(Error::Config(format!("valence {v} not in {{-1, 0, 1}}"))),
        }
    }

    pub fn get(self) -> i8 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl TryFrom<i8> for Valence {
    type Error = Error;
    fn try_from(v: i8) -> Result<Self> {
        Valence::new(v)
    }
}

impl From<Valence> for i8 {
    fn from(v: Valence) -> i8 {
        v.0
    }
}

/// One tick's sensorimotor-motivational snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmmVector {
    pub tick: u64,
    pub behavior: BehaviorId,
    pub object: Option<ObjectId>,
    pub face_detected: bool,
    pub motivation: f64,
    pub resistance: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoders: Option<Vec<f64>>,
}

impl SmmVector {
    pub fn new(tick: u64, behavior: BehaviorId) -> SmmVector {
        SmmVector {
            tick,
            behavior,
            object: None,
            face_detected: false,
            motivation: 0.0,
            resistance: false,
            encoders: None,
        }
    }
}

/// Gaze and dwell timings of the robot, in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeConstants {
    pub face_time: f64,
    pub object_time: f64,
    pub dwell_time_face: f64,
    pub dwell_time_object: f64,
    pub max_idle_time: f64,
    pub grumpy_face_time: f64,
    pub grumpy_object_time: f64,
    /// Length of each glance at a disliked object before turning away.
    pub reject_glance_time: f64,
}

impl Default for TimeConstants {
    fn default() -> Self {
        TimeConstants {
            face_time: 0.8,
            object_time: 3.0,
            dwell_time_face: 1.2,
            dwell_time_object: 2.0,
            max_idle_time: 3.0,
            grumpy_face_time: 1.6,
            grumpy_object_time: 2.0,
            reject_glance_time: 0.5,
        }
    }
}

impl TimeConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("face_time", self.face_time),
            ("object_time", self.object_time),
            ("dwell_time_face", self.dwell_time_face),
            ("dwell_time_object", self.dwell_time_object),
            ("max_idle_time", self.max_idle_time),
            ("grumpy_face_time", self.grumpy_face_time),
            ("grumpy_object_time", self.grumpy_object_time),
            ("reject_glance_time", self.reject_glance_time),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// A dimension of the smm vector that can take part in matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchFeature {
    Behavior,
    Object,
    FaceDetected,
    MotivationClass,
    Resistance,
}

/// Ordered, duplicate-free selection of matching dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<MatchFeature>", into = "Vec<MatchFeature>")]
pub struct MatchFeatureSpec {
    features: Vec<MatchFeature>,
}

impl MatchFeatureSpec {
    pub fn new(features: Vec<MatchFeature>) -> Result<MatchFeatureSpec> {
        if features.is_empty() {
            return Err(Error::Config("match feature spec is empty".into()));
        }
        for (i, f) in features.iter().enumerate() {
            if features[..i].contains(f) {
                return Err(Error::Config(format!("duplicate match feature {f:?}")));
            }
        }
        Ok(MatchFeatureSpec { features })
    }

    pub fn features(&self) -> &[MatchFeature] {
        &self.features
    }

    pub fn position(&self, f: MatchFeature) -> Option<usize> {
        self.features.iter().position(|&g| g == f)
    }
}

impl Default for MatchFeatureSpec {
    fn default() -> Self {
        MatchFeatureSpec {
            features: vec![
                MatchFeature::Behavior,
                MatchFeature::Object,
                MatchFeature::FaceDetected,
                MatchFeature::MotivationClass,
                MatchFeature::Resistance,
            ],
        }
    }
}

impl TryFrom<Vec<MatchFeature>> for MatchFeatureSpec {
    type Error = Error;
    fn try_from(v: Vec<MatchFeature>) -> Result<Self> {
        MatchFeatureSpec::new(v)
    }
}

impl From<MatchFeatureSpec> for Vec<MatchFeature> {
    fn from(s: MatchFeatureSpec) -> Self {
        s.features
    }
}

/// A single projected feature value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    Behavior(BehaviorId),
    Object(Option<ObjectId>),
    FaceDetected(bool),
    MotivationClass(MotivationClass),
    Resistance(bool),
}

/// Ordered tuple of projected features.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureTuple(pub Vec<Feature>);

impl FeatureTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn motivation_class(&self) -> Option<MotivationClass> {
        self.0.iter().find_map(|f| match f {
            Feature::MotivationClass(c) => Some(*c),
            _ => None,
        })
    }
}

pub fn smm_projection(v: &SmmVector, spec: &MatchFeatureSpec, mcfg: &MotivationConfig) -> FeatureTuple {
    FeatureTuple(
        spec.features()
            .iter()
            .map(|f| match f {
                MatchFeature::Behavior => Feature::Behavior(v.behavior),
                MatchFeature::Object => Feature::Object(v.object),
                MatchFeature::FaceDetected => Feature::FaceDetected(v.face_detected),
                MatchFeature::MotivationClass => {
                    Feature::MotivationClass(classify(v.motivation.clamp(-1.0, 1.0), mcfg))
                }
                MatchFeature::Resistance => Feature::Resistance(v.resistance),
            })
            .collect(),
    )
}

/// Whether two snapshots differ on any selected dimension. The tick is ignored.
pub fn smm_changed(a: &SmmVector, b: &SmmVector, spec: &MatchFeatureSpec, mcfg: &MotivationConfig) -> bool {
    smm_projection(a, spec, mcfg) != smm_projection(b, spec, mcfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> SmmVector {
        SmmVector {
            tick: 3,
            behavior: BehaviorId::Reaching,
            object: Some(ObjectId::Heart),
            face_detected: true,
            motivation: 0.9,
            resistance: false,
            encoders: None,
        }
    }

    #[test]
    fn projection_all_five() {
        let p = smm_projection(&v(), &MatchFeatureSpec::default(), &MotivationConfig::default());
        assert_eq!(
            p.0,
            vec![
                Feature::Behavior(BehaviorId::Reaching),
                Feature::Object(Some(ObjectId::Heart)),
                Feature::FaceDetected(true),
                Feature::MotivationClass(MotivationClass::Positive),
                Feature::Resistance(false),
            ]
        );
    }

    #[test]
    fn projection_single_dimension() {
        let spec = MatchFeatureSpec::new(vec![MatchFeature::Behavior]).unwrap();
        let p = smm_projection(&v(), &spec, &MotivationConfig::default());
        assert_eq!(p.0, vec![Feature::Behavior(BehaviorId::Reaching)]);
    }

    #[test]
    fn zero_motivation_is_neutral() {
        let mut x = v();
        x.motivation = 0.0;
        let p = smm_projection(&x, &MatchFeatureSpec::default(), &MotivationConfig::default());
        assert_eq!(p.motivation_class(), Some(MotivationClass::Neutral));
    }

    #[test]
    fn change_predicate() {
        let spec = MatchFeatureSpec::default();
        let m = MotivationConfig::default();
        let a = v();
        let mut b = v();
        b.tick = 99;
        assert!(!smm_changed(&a, &b, &spec, &m));
        b.behavior = BehaviorId::Rejecting;
        assert!(smm_changed(&a, &b, &spec, &m));
        let mut c = v();
        c.motivation = 0.8;
        assert!(!smm_changed(&a, &c, &spec, &m));
    }

    #[test]
    fn spec_validation() {
        assert!(MatchFeatureSpec::new(vec![]).is_err());
        assert!(MatchFeatureSpec::new(vec![MatchFeature::Object, MatchFeature::Object]).is_err());
        let s: MatchFeatureSpec = serde_json::from_str(r#"["behavior","resistance"]"#).unwrap();
        assert_eq!(s.features().len(), 2);
        assert!(serde_json::from_str::<MatchFeatureSpec>("[]").is_err());
    }

    #[test]
    fn ticks_round_trip() {
        assert_eq!(secs_to_ticks(0.8), 24);
        assert_eq!(secs_to_ticks(300.0), 9000);
        assert_eq!(tick_to_secs(300), 10.0);
        assert!(Valence::new(2).is_err());
        assert!(TimeConstants::default().validate().is_ok());
    }
}
