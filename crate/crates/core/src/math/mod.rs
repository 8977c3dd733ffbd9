//! Quaternion and small-matrix mathematics shared by the models.

mod euler;
mod linalg;
mod quaternion;
mod real;

pub use euler::{EulerAngles, GIMBAL_LOCK_MARGIN};
pub use linalg::{Mat, Mat2, Mat3, Vec3};
pub use quaternion::{quat_error, Quaternion, UNIT_TOLERANCE};
pub use real::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MathError {
    #[error("quaternion norm {norm} is not within tolerance of 1")]
    NonUnitQuaternion { norm: f64 },
}
