use crate::math::{Quaternion, Real, Vec3};

use super::{DeviceError, GeneralMedSpec, GimbalLoop, RotorLoop};

/// Double-gimbal frame. The outer axis is fixed in the body; the inner axis
/// and spin axis are carried by the outer gimbal.
///
/// At zero angles `outer_axis`, `inner_axis` and `spin_axis` are orthonormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleGimbalFrame<T> {
    pub outer_axis: Vec3<T>,
    pub inner_axis: Vec3<T>,
    pub spin_axis: Vec3<T>,
    pub inner_angle: T,
    pub outer_angle: T,
}

impl<T: Real> DoubleGimbalFrame<T> {
    /// Outer gimbal on body z, inner on body y, spin along body x.
    pub fn body_aligned() -> Self {
        Self {
            outer_axis: Vec3::unit(2),
            inner_axis: Vec3::unit(1),
            spin_axis: Vec3::unit(0),
            inner_angle: T::zero(),
            outer_angle: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        let tol = T::lit(1e-9);
        let axes = [self.outer_axis, self.inner_axis, self.spin_axis];
        if axes.iter().any(|a| (a.norm() - T::one()).abs() > tol) {
            return Err(DeviceError::InvalidParameter { name: "gimbal frame", reason: "axes must be unit vectors" });
        }
        if self.outer_axis.dot(&self.inner_axis).abs() > tol
            || self.outer_axis.dot(&self.spin_axis).abs() > tol
            || self.inner_axis.dot(&self.spin_axis).abs() > tol
        {
            return Err(DeviceError::InvalidParameter { name: "gimbal frame", reason: "axes must be orthogonal" });
        }
        Ok(())
    }

    fn outer_rotation(&self) -> Quaternion<T> {
        Quaternion::from_axis_angle(self.outer_axis, self.outer_angle)
    }

    /// Current inner gimbal axis ĝ_i.
    pub fn inner_gimbal_axis(&self) -> Vec3<T> {
        self.outer_rotation().rotate(&self.inner_axis)
    }

    /// Current unit momentum direction ĥ.
    pub fn momentum_direction(&self) -> Vec3<T> {
        let inner = Quaternion::from_axis_angle(self.inner_axis, self.inner_angle);
        self.outer_rotation().rotate(&inner.rotate(&self.spin_axis))
    }

    /// `t̂_i = ĝ_i × ĥ`, the rate of ĥ per unit inner gimbal rate.
    pub fn inner_torque_direction(&self) -> Vec3<T> {
        self.inner_gimbal_axis().cross(&self.momentum_direction())
    }

    /// `t̂_o = ĝ_o × ĥ`. Not unit length once the inner gimbal has moved.
    pub fn outer_torque_direction(&self) -> Vec3<T> {
        self.outer_axis.cross(&self.momentum_direction())
    }
}

/// One DGCMG: a rotor shared by two gimbal loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgcmgUnit<T> {
    pub frame: DoubleGimbalFrame<T>,
    pub rotor: RotorLoop<T>,
    pub inner: GimbalLoop<T>,
    pub outer: GimbalLoop<T>,
}

impl<T: Real> DgcmgUnit<T> {
    /// Inner and outer gimbal torques. Both carry the rotor factor
    /// `J·sat(η^r ω_c) + h_o`.
    pub fn torque_components(&self) -> (Vec3<T>, Vec3<T>) {
        let h = self.rotor.momentum();
        let ti = self.frame.inner_torque_direction() * -(h * self.inner.rate());
        let to = self.frame.outer_torque_direction() * -(h * self.outer.rate());
        (ti, to)
    }

    /// Two parallel terms, `rotor × inner` and `rotor × outer`, matching
    /// `[t̂_i, t̂_o]`.
    pub fn general_spec(&self) -> Result<GeneralMedSpec<T>, DeviceError> {
        let r = self.rotor.loop_term();
        GeneralMedSpec::new(vec![vec![r, self.inner.loop_term()], vec![r, self.outer.loop_term()]])
    }

    pub fn torque_directions(&self) -> [Vec3<T>; 2] {
        [self.frame.inner_torque_direction(), self.frame.outer_torque_direction()]
    }
}

pub fn dgcmg_torque<T: Real>(unit: &DgcmgUnit<T>) -> Vec3<T> {
    let (ti, to) = unit.torque_components();
    ti + to
}
