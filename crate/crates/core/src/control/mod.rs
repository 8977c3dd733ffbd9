//! Attitude control law and CMG steering.

mod pd;
mod steering;

pub use pd::{clamp_command, pd_command, PdGains};
pub use steering::{gimbal_rate_command, singularity_measure, sr_inverse, SrInverse, SteeringParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ControlError {
    #[error("invalid controller parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("steering matrix is numerically singular")]
    SingularSteering,
}
