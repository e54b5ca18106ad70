//! Scalar motivation in [-1, 1] with lagged relaxation toward the valence of
//! the presented object and an immediate negative override on resistance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smm::Valence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MotivationClass {
    Negative,
    Neutral,
    Positive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotivationConfig {
    /// Half-width of the neutral band around zero.
    pub neutral_band: f64,
    /// Relaxation time constant in seconds.
    pub lag: f64,
}

impl Default for MotivationConfig {
    fn default() -> Self {
        MotivationConfig {
            neutral_band: 0.1,
            lag: 1.0,
        }
    }
}

impl MotivationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.neutral_band > 0.0 && self.neutral_band < 1.0) {
            return Err(Error::Config(format!(
                "neutral_band must lie in (0, 1), got {}",
                self.neutral_band
            )));
        }
        if !(self.lag > 0.0 && self.lag.is_finite()) {
            return Err(Error::Config(format!("lag must be > 0, got {}", self.lag)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MotivationState {
    pub value: f64,
}

/// Three-way class of a motivation value. The band edges belong to the outer classes.
///
/// # Panics
/// In debug builds, when `value` lies outside [-1, 1].
pub fn classify(value: f64, cfg: &MotivationConfig) -> MotivationClass {
    debug_assert!((-1.0..=1.0).contains(&value), "motivation {value} out of range");
    if value >= cfg.neutral_band {
        MotivationClass::Positive
    } else if value <= -cfg.neutral_band {
        MotivationClass::Negative
    } else {
        MotivationClass::Neutral
    }
}

/// Advances motivation by `dt` seconds.
pub fn step(
    state: MotivationState,
    presented: Option<Valence>,
    resistance_active: bool,
    dt: f64,
    cfg: &MotivationConfig,
) -> MotivationState {
    if resistance_active {
        return MotivationState { value: -1.0 };
    }
    let target = presented.map_or(0.0, Valence::as_f64);
    let v = target + (state.value - target) * (-dt / cfg.lag).exp();
    MotivationState {
        value: v.clamp(-1.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classify_examples() {
        let c = MotivationConfig::default();
        assert_eq!(classify(0.0, &c), MotivationClass::Neutral);
        assert_eq!(classify(1.0, &c), MotivationClass::Positive);
        assert_eq!(classify(-1.0, &c), MotivationClass::Negative);
        assert_eq!(classify(0.1, &c), MotivationClass::Positive);
        assert_eq!(classify(-0.1, &c), MotivationClass::Negative);
        assert_eq!(classify(0.0999, &c), MotivationClass::Neutral);
    }

    #[test]
    fn resistance_sets_minus_one() {
        let c = MotivationConfig::default();
        let s = step(MotivationState { value: 0.9 }, Some(Valence::LIKED), true, 1.0 / 30.0, &c);
        assert_eq!(s.value, -1.0);
    }

    #[test]
    fn decay_closed_form() {
        let c = MotivationConfig::default();
        let s = step(MotivationState { value: 1.0 }, None, false, 1.0, &c);
        assert!((s.value - 0.3679).abs() < 1e-4);
        let z = step(MotivationState { value: 0.0 }, None, false, 7.0, &c);
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(MotivationConfig { neutral_band: 1.0, lag: 1.0 }.validate().is_err());
        assert!(MotivationConfig { neutral_band: 0.1, lag: 0.0 }.validate().is_err());
    }

    fn valence() -> impl Strategy<Value = Option<Valence>> {
        prop_oneof![
            Just(None),
            (-1i8..=1).prop_map(|v| Some(Valence::new(v).unwrap()))
        ]
    }

    proptest! {
        #[test]
        fn step_stays_in_range_and_approaches(v in -1.0f64..=1.0, val in valence(), dt in 1e-3f64..10.0, lag in 0.05f64..5.0) {
            let c = MotivationConfig { neutral_band: 0.1, lag };
            let s = step(MotivationState { value: v }, val, false, dt, &c);
            prop_assert!((-1.0..=1.0).contains(&s.value));
            let t = val.map_or(0.0, Valence::as_f64);
            let before = (v - t).signum();
            let after = (s.value - t).signum();
            prop_assert!(s.value == t || before == after);
            prop_assert!((s.value - t).abs() <= (v - t).abs());
        }

        #[test]
        fn resistance_dominates(v in -1.0f64..=1.0, val in valence(), dt in 1e-3f64..10.0) {
            let c = MotivationConfig::default();
            let s = step(MotivationState { value: v }, val, true, dt, &c);
            prop_assert_eq!(s.value, -1.0);
            prop_assert_eq!(classify(s.value, &c), MotivationClass::Negative);
        }

        #[test]
        fn classify_is_monotone_step(a in -1.0f64..=1.0, b in -1.0f64..=1.0, eps in 0.01f64..0.99) {
            let c = MotivationConfig { neutral_band: eps, lag: 1.0 };
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(classify(lo, &c) <= classify(hi, &c));
        }
    }
}
