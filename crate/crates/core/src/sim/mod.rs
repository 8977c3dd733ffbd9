//! Fixed-step closed-loop attitude simulation.

mod actuator;
mod dynamics;
mod engine;

pub use actuator::{Actuator, ActuatorEval, DgVscmgSetup, DgcmgSetup, LoopKind, Quantity, SgVscmgSetup};
pub use dynamics::{spacecraft_derivative, SpacecraftParams};
pub use engine::{run_scenario, step_rk4, ControlLaw, LogRecord, Scenario, SimLog, SimState};

use crate::control::ControlError;
use crate::devices::DeviceError;
use crate::math::MathError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: String, reason: String },
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("{actuator} does not support {feature}")]
    Unsupported { actuator: &'static str, feature: &'static str },
    #[error("non-finite state at step {step} (t = {time} s)")]
    NumericalAbort { step: usize, time: f64 },
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Math(#[from] MathError),
}

impl SimError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::InvalidParameter { field: field.into(), reason: reason.into() }
    }

    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Self::NumericalAbort { .. } | Self::Control(ControlError::SingularSteering))
    }
}
