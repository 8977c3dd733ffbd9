use std::ops::Mul;

use super::{MathError, Real, Vec3};

/// Tolerance on `|q| - 1` accepted by the kinematic functions.
pub const UNIT_TOLERANCE: f64 = 1e-6;

/// Attitude quaternion, scalar part first: `q = [q0, qv]`.
///
/// Rotates body-frame vectors into the reference frame; composition is the
/// Hamilton product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion<T> {
    pub w: T,
    pub v: Vec3<T>,
}

impl<T: Real> Quaternion<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, v: Vec3::new(x, y, z) }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    /// Rotation of `angle` radians about the unit `axis`.
    pub fn from_axis_angle(axis: Vec3<T>, angle: T) -> Self {
        let h = angle * T::half();
        Self { w: h.cos(), v: axis.normalized() * h.sin() }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.w, self.v.x, self.v.y, self.v.z]
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn norm(&self) -> T {
        (self.w * self.w + self.v.dot(&self.v)).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = T::one() / self.norm();
        Self { w: self.w * n, v: self.v * n }
    }

    pub fn conjugate(&self) -> Self {
        Self { w: self.w, v: -self.v }
    }

    /// Flips the sign so that the scalar part is non-negative. Both signs
    /// describe the same rotation; the positive one is the short way round.
    pub fn positive_scalar(self) -> Self {
        if self.w < T::zero() {
            Self { w: -self.w, v: -self.v }
        } else {
            self
        }
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.v.is_finite()
    }

    /// Rotates a body-frame vector into the reference frame.
    pub fn rotate(&self, r: &Vec3<T>) -> Vec3<T> {
        let t = self.v.cross(r) * T::two();
        *r + t * self.w + self.v.cross(&t)
    }

    pub fn check_unit(&self) -> Result<(), MathError> {
        let n = self.norm().as_f64();
        if (n - 1.0).abs() > UNIT_TOLERANCE || !n.is_finite() {
            return Err(MathError::NonUnitQuaternion { norm: n });
        }
        Ok(())
    }

    /// Kinematic rate `q̇ = ½ [−qvᵀ; q0·I + qv×] ω` for body rate `omega`.
    pub fn derivative(&self, omega: &Vec3<T>) -> Result<Self, MathError> {
        self.check_unit()?;
        Ok(self.derivative_unchecked(omega))
    }

    /// Same as [`derivative`](Self::derivative) without the norm check, for
    /// integrator sub-stages where the intermediate quaternion is not unit.
    pub fn derivative_unchecked(&self, omega: &Vec3<T>) -> Self {
        let h = T::half();
        Self { w: -self.v.dot(omega) * h, v: (*omega * self.w + self.v.cross(omega)) * h }
    }

    /// `a·self + b·other`, componentwise. Used by the integrator.
    pub fn lincomb(&self, a: T, other: &Self, b: T) -> Self {
        Self { w: self.w * a + other.w * b, v: self.v * a + other.v * b }
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self { w: self.w * o.w - self.v.dot(&o.v), v: o.v * self.w + self.v * o.w + self.v.cross(&o.v) }
    }
}

/// Error quaternion `q_e` with `target ⊗ q_e = q`, scalar part made
/// non-negative.
pub fn quat_error<T: Real>(q: &Quaternion<T>, target: &Quaternion<T>) -> Result<Quaternion<T>, MathError> {
    q.check_unit()?;
    target.check_unit()?;
    Ok((target.conjugate() * *q).positive_scalar())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_rate_gives_zero_derivative() {
        let d = Quaternion::<f64>::identity().derivative(&Vec3::zeros()).unwrap();
        assert_eq!(d.to_array(), [0.0; 4]);
    }

    #[test]
    fn yaw_rate_from_identity() {
        let d = Quaternion::<f64>::identity().derivative(&Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(d.to_array(), [0.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn non_unit_quaternion_rejected() {
        let q = Quaternion::new(1.0, 0.1, 0.0, 0.0);
        assert!(matches!(q.derivative(&Vec3::zeros()), Err(MathError::NonUnitQuaternion { .. })));
        assert!(quat_error(&q, &Quaternion::identity()).is_err());
    }

    #[test]
    fn error_of_equal_quaternions_is_identity() {
        let q = Quaternion::from_axis_angle(Vec3::new(1.0, -2.0, 0.5), 1.3);
        let e = quat_error(&q, &q).unwrap();
        assert_abs_diff_eq!(e.w, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.v.max_abs(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn error_against_identity_is_sign_normalized_input() {
        let q = Quaternion::new(-0.5, 0.5, -0.5, 0.5);
        let e = quat_error(&q, &Quaternion::identity()).unwrap();
        assert_eq!(e.to_array(), [0.5, -0.5, 0.5, -0.5]);
    }

    #[test]
    fn half_turn_roll_error() {
        let q = Quaternion::from_axis_angle(Vec3::unit(0), std::f64::consts::PI);
        let e = quat_error(&q, &Quaternion::identity()).unwrap();
        assert_abs_diff_eq!(e.v.x.abs(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.v.y, 0.0);
        assert_abs_diff_eq!(e.v.z, 0.0);
    }

    #[test]
    fn error_composes_back() {
        let q = Quaternion::from_axis_angle(Vec3::new(0.2, 0.9, -0.4), 2.1);
        let t = Quaternion::from_axis_angle(Vec3::new(-1.0, 0.3, 0.3), -0.8);
        let e = quat_error(&q, &t).unwrap();
        let back = (t * e).to_array();
        let q = q.to_array();
        let sign = if back[0] * q[0] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..4 {
            assert_abs_diff_eq!(back[i] * sign, q[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn rotate_matches_sandwich_product() {
        let q = Quaternion::from_axis_angle(Vec3::new(0.3, 0.1, 0.8), 0.9);
        let r = Vec3::new(1.0, -2.0, 0.5);
        let p = Quaternion { w: 0.0, v: r };
        let s = q * p * q.conjugate();
        assert_abs_diff_eq!((s.v - q.rotate(&r)).max_abs(), 0.0, epsilon = 1e-14);
    }
}
