use super::{Quaternion, Real};

/// Pitch within this many radians of ±π/2 is reported as gimbal lock.
pub const GIMBAL_LOCK_MARGIN: f64 = 1e-6;

/// 3-2-1 (yaw, pitch, roll) Euler angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles<T> {
    pub roll: T,
    pub pitch: T,
    pub yaw: T,
}

impl<T: Real> EulerAngles<T> {
    pub fn new(roll: T, pitch: T, yaw: T) -> Self {
        Self { roll, pitch, yaw }
    }

    pub fn from_degrees(roll: T, pitch: T, yaw: T) -> Self {
        Self::new(roll.to_radians(), pitch.to_radians(), yaw.to_radians())
    }

    pub fn to_degrees(self) -> [T; 3] {
        [self.roll.to_degrees(), self.pitch.to_degrees(), self.yaw.to_degrees()]
    }

    pub fn near_gimbal_lock(&self) -> bool {
        (self.pitch.abs() - T::FRAC_PI_2()).abs() < T::lit(GIMBAL_LOCK_MARGIN)
    }

    /// `q = q_z(yaw) ⊗ q_y(pitch) ⊗ q_x(roll)`.
    pub fn to_quaternion(&self) -> Quaternion<T> {
        let h = T::half();
        let (sr, cr) = (self.roll * h).sin_cos();
        let (sp, cp) = (self.pitch * h).sin_cos();
        let (sy, cy) = (self.yaw * h).sin_cos();
        Quaternion::new(
            cr * cp * cy + sr * sp * sy,
            sr * cp * cy - cr * sp * sy,
            cr * sp * cy + sr * cp * sy,
            cr * cp * sy - sr * sp * cy,
        )
    }

    /// Inverse of [`to_quaternion`](Self::to_quaternion). Near gimbal lock
    /// roll and yaw are not separable; check
    /// [`near_gimbal_lock`](Self::near_gimbal_lock) on the result.
    pub fn from_quaternion(q: &Quaternion<T>) -> Self {
        let (w, x, y, z) = (q.w, q.v.x, q.v.y, q.v.z);
        let two = T::two();
        let one = T::one();
        let roll = (two * (w * x + y * z)).atan2(one - two * (x * x + y * y));
        let sp = (two * (w * y - z * x)).max(-one).min(one);
        let pitch = sp.asin();
        let yaw = (two * (w * z + x * y)).atan2(one - two * (y * y + z * z));
        Self { roll, pitch, yaw }
    }
}
