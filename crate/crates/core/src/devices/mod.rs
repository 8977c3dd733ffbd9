//! Momentum exchange devices expressed through the cascade loop model.

mod dgcmg;
mod general;
mod rw;
mod sgcmg;
mod vscmg;

pub use dgcmg::{dgcmg_torque, DgcmgUnit, DoubleGimbalFrame};
pub use general::{general_med_output, GeneralMedSpec, LoopTerm};
pub use rw::{rw_cluster_torque, RwCluster, RwOutput};
pub use sgcmg::{
    default_skew, pyramid_jacobian, pyramid_momentum, sgcmg_general_spec, sgcmg_unit_torque, table1_lookup, GimbalLoop,
    RotorLoop, SgcmgPyramid, Table1Params,
};
pub use vscmg::{dgvscmg_torque, sgvscmg_torque, DgVscmgUnit, SgVscmgUnit, WheelLoop};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeviceError {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
    #[error("{what}: expected {expected} entries, got {got}")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
    #[error("unit index {unit} out of range for {count} units")]
    UnitOutOfRange { unit: usize, count: usize },
    #[error("actuator directions do not span three axes")]
    RankDeficient,
    #[error("empty cascade: {0}")]
    EmptyCascade(&'static str),
    #[error("loop effectiveness {0} outside [0, 1]")]
    EffectivenessOutOfRange(f64),
}
