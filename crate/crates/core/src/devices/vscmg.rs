use crate::math::{Quaternion, Real, Vec3};

use super::{DeviceError, DoubleGimbalFrame, GeneralMedSpec, GimbalLoop, LoopTerm};

/// Wheel-mode loop of a variable-speed CMG: `η·J·ω̇_c + τ_o` along the spin axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WheelLoop<T> {
    pub effectiveness: T,
    /// Commanded spin acceleration, rad/s².
    pub accel_command: T,
    /// Additive torque offset, N·m.
    pub torque_offset: T,
    pub inertia: T,
}

impl<T: Real> WheelLoop<T> {
    pub fn healthy(inertia: T, accel_command: T) -> Self {
        Self { effectiveness: T::one(), accel_command, torque_offset: T::zero(), inertia }
    }

    pub fn torque(&self) -> T {
        self.effectiveness * self.inertia * self.accel_command + self.torque_offset
    }

    pub fn loop_term(&self) -> LoopTerm<T> {
        LoopTerm::new(self.effectiveness, self.inertia * self.accel_command, self.torque_offset)
    }
}

/// Gyroscopic momentum factor in CMG mode: the measured rotor momentum plus a
/// sensor offset, no multiplicative loss.
fn cmg_momentum_term<T: Real>(inertia: T, speed: T, offset: T) -> LoopTerm<T> {
    LoopTerm::new(T::one(), inertia * speed, offset)
}

/// Single-gimbal variable-speed CMG.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgVscmgUnit<T> {
    pub gimbal_axis: Vec3<T>,
    /// Spin axis at zero gimbal angle, orthogonal to `gimbal_axis`.
    pub spin_axis: Vec3<T>,
    pub gimbal_angle: T,
    /// Current rotor speed, rad/s.
    pub rotor_speed: T,
    /// Rotor momentum offset h_o, N·m·s.
    pub momentum_offset: T,
    pub wheel: WheelLoop<T>,
    pub gimbal: GimbalLoop<T>,
}

impl<T: Real> SgVscmgUnit<T> {
    pub fn validate(&self) -> Result<(), DeviceError> {
        let tol = T::lit(1e-9);
        if (self.gimbal_axis.norm() - T::one()).abs() > tol
            || (self.spin_axis.norm() - T::one()).abs() > tol
            || self.gimbal_axis.dot(&self.spin_axis).abs() > tol
        {
            return Err(DeviceError::InvalidParameter { name: "gimbal frame", reason: "axes must be orthonormal" });
        }
        if !(self.wheel.inertia > T::zero()) {
            return Err(DeviceError::InvalidParameter { name: "rotor inertia", reason: "must be positive" });
        }
        Ok(())
    }

    /// `t̂_r`, the current spin axis.
    pub fn spin_direction(&self) -> Vec3<T> {
        Quaternion::from_axis_angle(self.gimbal_axis, self.gimbal_angle).rotate(&self.spin_axis)
    }

    /// `t̂_g = ĝ × t̂_r`.
    pub fn gimbal_torque_direction(&self) -> Vec3<T> {
        self.gimbal_axis.cross(&self.spin_direction())
    }

    pub fn wheel_torque(&self) -> Vec3<T> {
        self.spin_direction() * -self.wheel.torque()
    }

    pub fn gimbal_torque(&self) -> Vec3<T> {
        let h = cmg_momentum_term(self.wheel.inertia, self.rotor_speed, self.momentum_offset).value();
        self.gimbal_torque_direction() * -(h * self.gimbal.rate())
    }

    pub fn general_spec(&self) -> Result<GeneralMedSpec<T>, DeviceError> {
        GeneralMedSpec::new(vec![
            vec![self.wheel.loop_term()],
            vec![
                cmg_momentum_term(self.wheel.inertia, self.rotor_speed, self.momentum_offset),
                self.gimbal.loop_term(),
            ],
        ])
    }

    pub fn torque_directions(&self) -> [Vec3<T>; 2] {
        [self.spin_direction(), self.gimbal_torque_direction()]
    }
}

pub fn sgvscmg_torque<T: Real>(unit: &SgVscmgUnit<T>) -> Vec3<T> {
    unit.wheel_torque() + unit.gimbal_torque()
}

/// Double-gimbal variable-speed CMG: wheel mode plus inner and outer gimbals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgVscmgUnit<T> {
    pub frame: DoubleGimbalFrame<T>,
    pub rotor_speed: T,
    pub momentum_offset: T,
    pub wheel: WheelLoop<T>,
    pub inner: GimbalLoop<T>,
    pub outer: GimbalLoop<T>,
}

impl<T: Real> DgVscmgUnit<T> {
    /// Wheel, inner gimbal and outer gimbal torques.
    pub fn torque_components(&self) -> [Vec3<T>; 3] {
        let h = cmg_momentum_term(self.wheel.inertia, self.rotor_speed, self.momentum_offset).value();
        [
            self.frame.momentum_direction() * -self.wheel.torque(),
            self.frame.inner_torque_direction() * -(h * self.inner.rate()),
            self.frame.outer_torque_direction() * -(h * self.outer.rate()),
        ]
    }

    pub fn general_spec(&self) -> Result<GeneralMedSpec<T>, DeviceError> {
        let h = cmg_momentum_term(self.wheel.inertia, self.rotor_speed, self.momentum_offset);
        GeneralMedSpec::new(vec![
            vec![self.wheel.loop_term()],
            vec![h, self.inner.loop_term()],
            vec![h, self.outer.loop_term()],
        ])
    }

    pub fn torque_directions(&self) -> [Vec3<T>; 3] {
        [self.frame.momentum_direction(), self.frame.inner_torque_direction(), self.frame.outer_torque_direction()]
    }
}

pub fn dgvscmg_torque<T: Real>(unit: &DgVscmgUnit<T>) -> Vec3<T> {
    let [w, i, o] = unit.torque_components();
    w + i + o
}
