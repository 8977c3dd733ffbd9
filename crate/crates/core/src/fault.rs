//! Time-dependent fault profiles for a single control loop.
//!
//! A loop's effectiveness decays exponentially from 1 towards its final value
//! once the fault starts, and an additive offset switches on as a step. The
//! six working conditions fix which of the two is present.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::em_vsd::{LoopMode, LoopOutputFrame};
use crate::math::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FaultError {
    #[error("condition {condition} requires {requirement}, got effectiveness {eta} and offset {offset}")]
    Inconsistent { condition: WorkingCondition, requirement: &'static str, eta: f64, offset: f64 },
    #[error("fault parameter `{name}` {constraint}, got {value}")]
    InvalidParameter { name: &'static str, constraint: &'static str, value: f64 },
}

/// Working condition of one loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WorkingCondition {
    /// Nominal.
    N,
    /// Partial loss of effectiveness, no offset.
    Fa,
    /// Total failure, no offset.
    Fb,
    /// Partial loss with offset.
    Fc,
    /// Total failure with offset.
    Fd,
    /// Pure offset, full effectiveness.
    Fe,
}

impl fmt::Display for WorkingCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl WorkingCondition {
    pub const ALL: [WorkingCondition; 6] = [Self::N, Self::Fa, Self::Fb, Self::Fc, Self::Fd, Self::Fe];

    pub fn has_offset(self) -> bool {
        matches!(self, Self::Fc | Self::Fd | Self::Fe)
    }

    /// Total failures drive the effectiveness to zero.
    pub fn is_failure(self) -> bool {
        matches!(self, Self::Fb | Self::Fd)
    }

    /// Decay rate of the effectiveness transition: 2 /s for partial faults,
    /// 1 /s for failures.
    pub fn default_decay_rate(self) -> f64 {
        match self {
            Self::Fa | Self::Fc => 2.0,
            _ => 1.0,
        }
    }

    /// Effectiveness implied by the condition, if it is fixed.
    pub fn fixed_effectiveness(self) -> Option<f64> {
        match self {
            Self::N | Self::Fe => Some(1.0),
            Self::Fb | Self::Fd => Some(0.0),
            Self::Fa | Self::Fc => None,
        }
    }

    /// Projects arbitrary `(η, offset)` onto the condition: fixed
    /// effectiveness values are imposed and the offset is dropped where the
    /// condition has none.
    pub fn canonical<T: Real>(self, eta: T, offset: T) -> (T, T) {
        let eta = self.fixed_effectiveness().map(T::lit).unwrap_or(eta);
        let offset = if self.has_offset() { offset } else { T::zero() };
        (eta, offset)
    }

    /// Checks `(η, offset)` against the condition's definition.
    pub fn check<T: Real>(self, eta: T, offset: T) -> Result<(), FaultError> {
        let fail = |requirement| FaultError::Inconsistent {
            condition: self,
            requirement,
            eta: eta.as_f64(),
            offset: offset.as_f64(),
        };
        let (zero, one) = (T::zero(), T::one());
        let partial = eta > zero && eta < one;
        let eta_ok = match self {
            Self::N | Self::Fe => eta == one,
            Self::Fb | Self::Fd => eta == zero,
            Self::Fa | Self::Fc => partial,
        };
        if !eta_ok {
            return Err(fail(match self {
                Self::N | Self::Fe => "effectiveness = 1",
                Self::Fb | Self::Fd => "effectiveness = 0",
                Self::Fa | Self::Fc => "effectiveness strictly between 0 and 1",
            }));
        }
        if self.has_offset() && offset == zero {
            return Err(fail("a non-zero offset"));
        }
        if !self.has_offset() && offset != zero {
            return Err(fail("zero offset"));
        }
        Ok(())
    }
}

/// One fault occurrence on a loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultEvent<T> {
    /// Time the effectiveness starts to drop, s.
    pub onset: T,
    /// Exponential decay rate of the transition, 1/s.
    pub decay_rate: T,
    /// Effectiveness reached as t → ∞.
    pub final_effectiveness: T,
    /// Additive bias in loop units.
    pub offset: T,
    /// Time the bias switches on, s.
    pub offset_onset: T,
}

impl<T: Real> FaultEvent<T> {
    pub fn nominal() -> Self {
        Self {
            onset: T::zero(),
            decay_rate: T::one(),
            final_effectiveness: T::one(),
            offset: T::zero(),
            offset_onset: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<(), FaultError> {
        let bad =
            |name, constraint, value: T| Err(FaultError::InvalidParameter { name, constraint, value: value.as_f64() });
        if !(self.onset >= T::zero() && self.onset.is_finite()) {
            return bad("onset", "must be finite and >= 0", self.onset);
        }
        if !(self.decay_rate > T::zero() && self.decay_rate.is_finite()) {
            return bad("decay_rate", "must be finite and > 0", self.decay_rate);
        }
        if !(self.final_effectiveness >= T::zero() && self.final_effectiveness <= T::one()) {
            return bad("effectiveness", "must lie in [0, 1]", self.final_effectiveness);
        }
        if !self.offset.is_finite() {
            return bad("offset", "must be finite", self.offset);
        }
        if !(self.offset_onset >= T::zero() && self.offset_onset.is_finite()) {
            return bad("offset_onset", "must be finite and >= 0", self.offset_onset);
        }
        Ok(())
    }

    /// `1` before onset, then `η + (1 − η)·e^{−t_a (t − t_c)}`.
    pub fn effectiveness_at(&self, t: T) -> T {
        if t < self.onset {
            return T::one();
        }
        let eta = self.final_effectiveness;
        eta + (T::one() - eta) * (-self.decay_rate * (t - self.onset)).exp()
    }

    /// Step bias switching on at `offset_onset`.
    pub fn offset_at(&self, t: T) -> T {
        if t < self.offset_onset {
            T::zero()
        } else {
            self.offset
        }
    }
}

/// A validated working condition together with its fault event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopFaultProfile<T> {
    condition: WorkingCondition,
    event: FaultEvent<T>,
}

impl<T: Real> Default for LoopFaultProfile<T> {
    fn default() -> Self {
        Self::nominal()
    }
}

impl<T: Real> LoopFaultProfile<T> {
    pub fn nominal() -> Self {
        Self { condition: WorkingCondition::N, event: FaultEvent::nominal() }
    }

    pub fn new(condition: WorkingCondition, event: FaultEvent<T>) -> Result<Self, FaultError> {
        event.validate()?;
        condition.check(event.final_effectiveness, event.offset)?;
        Ok(Self { condition, event })
    }

    pub fn condition(&self) -> WorkingCondition {
        self.condition
    }

    pub fn event(&self) -> &FaultEvent<T> {
        &self.event
    }

    pub fn is_nominal(&self) -> bool {
        self.condition == WorkingCondition::N
    }

    pub fn effectiveness_at(&self, t: T) -> T {
        if self.is_nominal() {
            T::one()
        } else {
            self.event.effectiveness_at(t)
        }
    }

    pub fn offset_at(&self, t: T) -> T {
        if self.is_nominal() {
            T::zero()
        } else {
            self.event.offset_at(t)
        }
    }

    pub fn frame_at(&self, mode: LoopMode, t: T) -> LoopOutputFrame<T> {
        LoopOutputFrame::new(mode, self.effectiveness_at(t), self.offset_at(t))
            .expect("validated profile keeps effectiveness in [0, 1]")
    }

    /// `η(t)·command + offset(t)`, the two parts applied independently.
    pub fn output(&self, t: T, command: T) -> T {
        self.effectiveness_at(t) * command + self.offset_at(t)
    }
}

/// Builds a profile for `condition`, rejecting parameters that contradict
/// it (e.g. an offset on an `Fa` loop).
pub fn condition_profile<T: Real>(
    condition: WorkingCondition,
    eta: T,
    offset: T,
    onset: T,
    decay_rate: T,
    offset_onset: T,
) -> Result<LoopFaultProfile<T>, FaultError> {
    LoopFaultProfile::new(condition, FaultEvent { onset, decay_rate, final_effectiveness: eta, offset, offset_onset })
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn any_condition() -> impl Strategy<Value = WorkingCondition> {
        prop::sample::select(WorkingCondition::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(eta in 0.0..=1.0f64, rate in 0.01..10.0f64, onset in 0.0..20.0f64,
                                t1 in 0.0..100.0f64, dt in 0.0..50.0f64) {
            let e = FaultEvent { onset, decay_rate: rate, final_effectiveness: eta, offset: 0.0, offset_onset: 0.0 };
            let (a, b) = (e.effectiveness_at(t1), e.effectiveness_at(t1 + dt));
            prop_assert!(b <= a);
            prop_assert!(a <= 1.0 && a >= eta);
            prop_assert!(b <= 1.0 && b >= eta);
        }

        #[test]
        fn limit_matches_condition(c in any_condition(), eta in 0.01..0.99f64, offset in 0.01..5.0f64) {
            let (eta, offset) = c.canonical(eta, offset);
            let p = condition_profile(c, eta, offset, 1.0, c.default_decay_rate(), 2.0).unwrap();
            let t = 1e4;
            let expected_eta = c.fixed_effectiveness().unwrap_or(eta);
            prop_assert!((p.effectiveness_at(t) - expected_eta).abs() < 1e-12);
            prop_assert_eq!(p.offset_at(t) != 0.0, c.has_offset());
        }
    }
}
