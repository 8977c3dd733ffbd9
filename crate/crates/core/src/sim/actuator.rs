use serde::{Deserialize, Serialize};

use crate::control::{gimbal_rate_command, singularity_measure, SteeringParams};
use crate::devices::{
    dgcmg_torque, dgvscmg_torque, rw_cluster_torque, sgcmg_unit_torque, sgvscmg_torque, DeviceError, DgVscmgUnit,
    DgcmgUnit, DoubleGimbalFrame, GimbalLoop, RotorLoop, RwCluster, SgVscmgUnit, SgcmgPyramid, WheelLoop,
};
use crate::fault::LoopFaultProfile;
use crate::math::{Real, Vec3};

use super::SimError;

/// Which loop of a device a fault profile is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    Wheel,
    Rotor,
    Gimbal,
    GimbalInner,
    GimbalOuter,
}

impl LoopKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Wheel => "wheel",
            Self::Rotor => "rotor",
            Self::Gimbal => "gimbal",
            Self::GimbalInner => "gimbal_inner",
            Self::GimbalOuter => "gimbal_outer",
        }
    }
}

/// Double-gimbal CMG with its loop profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgcmgSetup<T> {
    pub frame: DoubleGimbalFrame<T>,
    pub rotor_inertia: T,
    pub rotor_speed: T,
    pub rotor_speed_limit: T,
    pub gimbal_rate_limit: T,
    pub rotor: LoopFaultProfile<T>,
    pub inner: LoopFaultProfile<T>,
    pub outer: LoopFaultProfile<T>,
}

/// Single-gimbal VSCMG. The rotor loop only carries a momentum offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgVscmgSetup<T> {
    pub gimbal_axis: Vec3<T>,
    pub spin_axis: Vec3<T>,
    pub gimbal_angle: T,
    pub rotor_inertia: T,
    pub rotor_speed: T,
    pub accel_limit: T,
    pub gimbal_rate_limit: T,
    pub wheel: LoopFaultProfile<T>,
    pub rotor: LoopFaultProfile<T>,
    pub gimbal: LoopFaultProfile<T>,
}

/// Double-gimbal VSCMG.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgVscmgSetup<T> {
    pub frame: DoubleGimbalFrame<T>,
    pub rotor_inertia: T,
    pub rotor_speed: T,
    pub accel_limit: T,
    pub gimbal_rate_limit: T,
    pub wheel: LoopFaultProfile<T>,
    pub rotor: LoopFaultProfile<T>,
    pub inner: LoopFaultProfile<T>,
    pub outer: LoopFaultProfile<T>,
}

/// Actuator fitted to the spacecraft.
///
/// Native command vectors: wheel torques (RW), gimbal rates (CMGs),
/// `[spin acceleration, gimbal rate(s)]` (VSCMGs).
#[derive(Debug, Clone, PartialEq)]
pub enum Actuator<T> {
    ReactionWheels(RwCluster<T>),
    Sgcmg { pyramid: SgcmgPyramid<T>, steering: SteeringParams<T> },
    Dgcmg(DgcmgSetup<T>),
    SgVscmg(SgVscmgSetup<T>),
    DgVscmg(DgVscmgSetup<T>),
}

/// Device response at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorEval<T> {
    pub body_torque: Vec3<T>,
    /// Actuator angular momentum H in body axes.
    pub momentum: Vec3<T>,
    pub state_rate: Vec<T>,
    /// Delivered wheel torques or gimbal rates, per unit.
    pub outputs: Vec<T>,
    /// Stored momentum per unit, N·m·s.
    pub unit_momenta: Vec<T>,
}

/// How a state column is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Angle,
    /// Gimbal or body rate.
    AngularRate,
    /// Wheel or rotor spin speed.
    SpinRate,
    Torque,
    AngularAcceleration,
}

fn wheel_loop<T: Real>(p: &LoopFaultProfile<T>, t: T, inertia: T, cmd: T, limit: T, bypass: bool) -> WheelLoop<T> {
    let cmd = cmd.clamp_abs(limit);
    if bypass {
        WheelLoop::healthy(inertia, cmd)
    } else {
        WheelLoop { effectiveness: p.effectiveness_at(t), accel_command: cmd, torque_offset: p.offset_at(t), inertia }
    }
}

fn gimbal_loop<T: Real>(p: &LoopFaultProfile<T>, t: T, cmd: T, limit: T, bypass: bool) -> GimbalLoop<T> {
    let cmd = cmd.clamp_abs(limit);
    if bypass {
        GimbalLoop::healthy(cmd)
    } else {
        GimbalLoop { effectiveness: p.effectiveness_at(t), rate_command: cmd, rate_offset: p.offset_at(t) }
    }
}

fn rotor_loop<T: Real>(p: &LoopFaultProfile<T>, t: T, inertia: T, speed: T, limit: T, bypass: bool) -> RotorLoop<T> {
    let mut r = RotorLoop {
        effectiveness: T::one(),
        speed_command: speed,
        momentum_offset: T::zero(),
        inertia,
        speed_limit: limit,
    };
    if !bypass {
        r.effectiveness = p.effectiveness_at(t);
        r.momentum_offset = p.offset_at(t);
    }
    r
}

fn offset<T: Real>(p: &LoopFaultProfile<T>, t: T, bypass: bool) -> T {
    if bypass {
        T::zero()
    } else {
        p.offset_at(t)
    }
}

impl<T: Real> Actuator<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::ReactionWheels(_) => "rw",
            Self::Sgcmg { .. } => "sgcmg_pyramid",
            Self::Dgcmg(_) => "dgcmg",
            Self::SgVscmg(_) => "sgvscmg",
            Self::DgVscmg(_) => "dgvscmg",
        }
    }

    pub fn supports_closed_loop(&self) -> bool {
        matches!(self, Self::ReactionWheels(_) | Self::Sgcmg { .. })
    }

    pub fn command_len(&self) -> usize {
        match self {
            Self::ReactionWheels(rw) => rw.len(),
            Self::Sgcmg { .. } => 4,
            Self::Dgcmg(_) | Self::SgVscmg(_) => 2,
            Self::DgVscmg(_) => 3,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let positive = |name: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(SimError::from(DeviceError::InvalidParameter { name, reason: "must be positive" }))
            }
        };
        let offset_only = |p: &LoopFaultProfile<T>| {
            if (p.condition().has_offset() || p.is_nominal()) && p.event().final_effectiveness == T::one() {
                return Ok(());
            }
            Err(SimError::invalid("faults", "a variable-speed CMG rotor loop only accepts N or Fe"))
        };
        match self {
            Self::ReactionWheels(_) => Ok(()),
            Self::Sgcmg { pyramid, .. } => Ok(pyramid.validate()?),
            Self::Dgcmg(d) => {
                d.frame.validate()?;
                positive("rotor_inertia", d.rotor_inertia)?;
                positive("rotor_speed", d.rotor_speed)?;
                positive("rotor_speed_limit", d.rotor_speed_limit)?;
                positive("gimbal_rate_limit", d.gimbal_rate_limit)
            }
            Self::SgVscmg(s) => {
                let unit = SgVscmgUnit {
                    gimbal_axis: s.gimbal_axis,
                    spin_axis: s.spin_axis,
                    gimbal_angle: s.gimbal_angle,
                    rotor_speed: s.rotor_speed,
                    momentum_offset: T::zero(),
                    wheel: WheelLoop::healthy(s.rotor_inertia, T::zero()),
                    gimbal: GimbalLoop::healthy(T::zero()),
                };
                unit.validate()?;
                positive("accel_limit", s.accel_limit)?;
                positive("gimbal_rate_limit", s.gimbal_rate_limit)?;
                offset_only(&s.rotor)
            }
            Self::DgVscmg(d) => {
                d.frame.validate()?;
                positive("rotor_inertia", d.rotor_inertia)?;
                positive("accel_limit", d.accel_limit)?;
                positive("gimbal_rate_limit", d.gimbal_rate_limit)?;
                offset_only(&d.rotor)
            }
        }
    }

    /// Integrated actuator state at the start of a run.
    pub fn initial_state(&self) -> Vec<T> {
        match self {
            Self::ReactionWheels(rw) => vec![T::zero(); rw.len()],
            Self::Sgcmg { pyramid, .. } => pyramid.gimbal_angles.to_vec(),
            Self::Dgcmg(d) => vec![d.frame.inner_angle, d.frame.outer_angle],
            Self::SgVscmg(s) => vec![s.gimbal_angle, s.rotor_speed],
            Self::DgVscmg(d) => vec![d.frame.inner_angle, d.frame.outer_angle, d.rotor_speed],
        }
    }

    /// Names and quantities of the integrated state entries.
    pub fn state_columns(&self) -> Vec<(String, Quantity)> {
        match self {
            Self::ReactionWheels(rw) => {
                (1..=rw.len()).map(|i| (format!("wheel{i}_speed"), Quantity::SpinRate)).collect()
            }
            Self::Sgcmg { .. } => (1..=4).map(|i| (format!("gimbal{i}_angle"), Quantity::Angle)).collect(),
            Self::Dgcmg(_) => vec![("inner_angle".into(), Quantity::Angle), ("outer_angle".into(), Quantity::Angle)],
            Self::SgVscmg(_) => {
                vec![("gimbal_angle".into(), Quantity::Angle), ("rotor_speed".into(), Quantity::SpinRate)]
            }
            Self::DgVscmg(_) => vec![
                ("inner_angle".into(), Quantity::Angle),
                ("outer_angle".into(), Quantity::Angle),
                ("rotor_speed".into(), Quantity::SpinRate),
            ],
        }
    }

    /// Names and quantities of the per-unit outputs.
    pub fn output_columns(&self) -> Vec<(String, Quantity)> {
        match self {
            Self::ReactionWheels(rw) => {
                (1..=rw.len()).map(|i| (format!("wheel{i}_torque"), Quantity::Torque)).collect()
            }
            Self::Sgcmg { .. } => (1..=4).map(|i| (format!("gimbal{i}_rate"), Quantity::AngularRate)).collect(),
            Self::Dgcmg(_) => {
                vec![("inner_rate".into(), Quantity::AngularRate), ("outer_rate".into(), Quantity::AngularRate)]
            }
            Self::SgVscmg(_) => vec![
                ("gimbal_rate".into(), Quantity::AngularRate),
                ("rotor_accel".into(), Quantity::AngularAcceleration),
            ],
            Self::DgVscmg(_) => vec![
                ("inner_rate".into(), Quantity::AngularRate),
                ("outer_rate".into(), Quantity::AngularRate),
                ("rotor_accel".into(), Quantity::AngularAcceleration),
            ],
        }
    }

    /// Every fault-capable loop with its label, e.g. `wheel3` or `gimbal_inner`.
    pub fn loops(&self) -> Vec<(String, LoopFaultProfile<T>)> {
        match self {
            Self::ReactionWheels(rw) => {
                rw.profiles().iter().enumerate().map(|(i, p)| (format!("wheel{}", i + 1), *p)).collect()
            }
            Self::Sgcmg { pyramid, .. } => {
                let mut v: Vec<_> =
                    pyramid.rotor_profiles.iter().enumerate().map(|(i, p)| (format!("rotor{}", i + 1), *p)).collect();
                v.extend(pyramid.gimbal_profiles.iter().enumerate().map(|(i, p)| (format!("gimbal{}", i + 1), *p)));
                v
            }
            Self::Dgcmg(d) => {
                vec![("rotor".into(), d.rotor), ("gimbal_inner".into(), d.inner), ("gimbal_outer".into(), d.outer)]
            }
            Self::SgVscmg(s) => vec![("wheel".into(), s.wheel), ("rotor".into(), s.rotor), ("gimbal".into(), s.gimbal)],
            Self::DgVscmg(d) => vec![
                ("wheel".into(), d.wheel),
                ("rotor".into(), d.rotor),
                ("gimbal_inner".into(), d.inner),
                ("gimbal_outer".into(), d.outer),
            ],
        }
    }

    /// Attaches a profile to `kind` on the 0-based `unit`.
    pub fn set_profile(&mut self, kind: LoopKind, unit: usize, profile: LoopFaultProfile<T>) -> Result<(), SimError> {
        let single = |unit: usize| {
            if unit == 0 {
                Ok(())
            } else {
                Err(SimError::from(DeviceError::UnitOutOfRange { unit, count: 1 }))
            }
        };
        let bad = || SimError::invalid("faults.loop", "loop does not exist on this actuator");
        match self {
            Self::ReactionWheels(rw) => match kind {
                LoopKind::Wheel => Ok(rw.set_profile(unit, profile)?),
                _ => Err(bad()),
            },
            Self::Sgcmg { pyramid, .. } => {
                if unit >= 4 {
                    return Err(DeviceError::UnitOutOfRange { unit, count: 4 }.into());
                }
                match kind {
                    LoopKind::Rotor => pyramid.rotor_profiles[unit] = profile,
                    LoopKind::Gimbal => pyramid.gimbal_profiles[unit] = profile,
                    _ => return Err(bad()),
                }
                Ok(())
            }
            Self::Dgcmg(d) => {
                single(unit)?;
                match kind {
                    LoopKind::Rotor => d.rotor = profile,
                    LoopKind::GimbalInner => d.inner = profile,
                    LoopKind::GimbalOuter => d.outer = profile,
                    _ => return Err(bad()),
                }
                Ok(())
            }
            Self::SgVscmg(s) => {
                single(unit)?;
                match kind {
                    LoopKind::Wheel => s.wheel = profile,
                    LoopKind::Rotor => s.rotor = profile,
                    LoopKind::Gimbal => s.gimbal = profile,
                    _ => return Err(bad()),
                }
                Ok(())
            }
            Self::DgVscmg(d) => {
                single(unit)?;
                match kind {
                    LoopKind::Wheel => d.wheel = profile,
                    LoopKind::Rotor => d.rotor = profile,
                    LoopKind::GimbalInner => d.inner = profile,
                    LoopKind::GimbalOuter => d.outer = profile,
                    _ => return Err(bad()),
                }
                Ok(())
            }
        }
    }

    fn pyramid_at(pyramid: &SgcmgPyramid<T>, state: &[T]) -> SgcmgPyramid<T> {
        let mut p = *pyramid;
        p.gimbal_angles.copy_from_slice(&state[..4]);
        p
    }

    /// `det(AAᵀ)` for the pyramid, `None` for other devices.
    pub fn singularity(&self, state: &[T]) -> Option<T> {
        match self {
            Self::Sgcmg { pyramid, .. } => Some(singularity_measure(&Self::pyramid_at(pyramid, state).jacobian())),
            _ => None,
        }
    }

    /// Native commands realizing the desired body torque `u`.
    pub fn allocate(&self, t: T, state: &[T], u: &Vec3<T>) -> Result<Vec<T>, SimError> {
        match self {
            Self::ReactionWheels(rw) => Ok(rw.allocate(u)?),
            Self::Sgcmg { pyramid, steering } => {
                let p = Self::pyramid_at(pyramid, state);
                // τ = −h0·A·δ̇, so steer toward −u.
                let (rates, _) =
                    gimbal_rate_command(&p.jacobian(), &-*u, p.nominal_momentum(), t, steering, p.gimbal_rate_limit)?;
                Ok(rates.to_vec())
            }
            _ => Err(SimError::Unsupported { actuator: self.kind(), feature: "closed-loop torque allocation" }),
        }
    }

    /// Device output for native `cmd` at time `t` and state `state`.
    /// `bypass` skips the fault profiles entirely.
    pub fn evaluate(&self, t: T, state: &[T], cmd: &[T], bypass: bool) -> Result<ActuatorEval<T>, SimError> {
        if cmd.len() != self.command_len() {
            return Err(DeviceError::DimensionMismatch {
                what: "actuator commands",
                expected: self.command_len(),
                got: cmd.len(),
            }
            .into());
        }
        match self {
            Self::ReactionWheels(rw) => {
                let (body_torque, outputs) = if bypass {
                    let tau: Vec<T> = cmd.iter().map(|u| u.clamp_abs(rw.torque_limit())).collect();
                    let body = rw.spin_axes().iter().zip(&tau).fold(Vec3::zeros(), |acc, (a, &x)| acc - *a * x);
                    (body, tau)
                } else {
                    let out = rw_cluster_torque(rw, cmd, t)?;
                    (out.body_torque, out.wheel_torques)
                };
                let jw = rw.wheel_inertia();
                Ok(ActuatorEval {
                    body_torque,
                    momentum: rw.momentum(state),
                    state_rate: outputs.iter().map(|&x| x / jw).collect(),
                    unit_momenta: state.iter().map(|&w| w * jw).collect(),
                    outputs,
                })
            }
            Self::Sgcmg { pyramid, .. } => {
                let p = Self::pyramid_at(pyramid, state);
                let mut body_torque = Vec3::zeros();
                let mut momentum = Vec3::zeros();
                let mut rates = Vec::with_capacity(4);
                let mut unit_momenta = Vec::with_capacity(4);
                for (i, &c) in cmd.iter().enumerate().take(4) {
                    let rotor = rotor_loop(
                        &p.rotor_profiles[i],
                        t,
                        p.rotor_inertia,
                        p.rotor_speed,
                        p.rotor_speed_limit,
                        bypass,
                    );
                    let gimbal = gimbal_loop(&p.gimbal_profiles[i], t, c, p.gimbal_rate_limit, bypass);
                    body_torque += sgcmg_unit_torque(&rotor, &gimbal, &p.torque_direction(i));
                    let h = rotor.momentum();
                    momentum += p.momentum_direction(i) * h;
                    rates.push(gimbal.rate());
                    unit_momenta.push(h);
                }
                Ok(ActuatorEval { body_torque, momentum, state_rate: rates.clone(), outputs: rates, unit_momenta })
            }
            Self::Dgcmg(d) => {
                let mut frame = d.frame;
                frame.inner_angle = state[0];
                frame.outer_angle = state[1];
                let unit = DgcmgUnit {
                    frame,
                    rotor: rotor_loop(&d.rotor, t, d.rotor_inertia, d.rotor_speed, d.rotor_speed_limit, bypass),
                    inner: gimbal_loop(&d.inner, t, cmd[0], d.gimbal_rate_limit, bypass),
                    outer: gimbal_loop(&d.outer, t, cmd[1], d.gimbal_rate_limit, bypass),
                };
                let h = unit.rotor.momentum();
                let rates = vec![unit.inner.rate(), unit.outer.rate()];
                Ok(ActuatorEval {
                    body_torque: dgcmg_torque(&unit),
                    momentum: frame.momentum_direction() * h,
                    state_rate: rates.clone(),
                    outputs: rates,
                    unit_momenta: vec![h],
                })
            }
            Self::SgVscmg(s) => {
                let unit = SgVscmgUnit {
                    gimbal_axis: s.gimbal_axis,
                    spin_axis: s.spin_axis,
                    gimbal_angle: state[0],
                    rotor_speed: state[1],
                    momentum_offset: offset(&s.rotor, t, bypass),
                    wheel: wheel_loop(&s.wheel, t, s.rotor_inertia, cmd[0], s.accel_limit, bypass),
                    gimbal: gimbal_loop(&s.gimbal, t, cmd[1], s.gimbal_rate_limit, bypass),
                };
                let h = s.rotor_inertia * state[1] + unit.momentum_offset;
                let accel = unit.wheel.torque() / s.rotor_inertia;
                let rate = unit.gimbal.rate();
                Ok(ActuatorEval {
                    body_torque: sgvscmg_torque(&unit),
                    momentum: unit.spin_direction() * h,
                    state_rate: vec![rate, accel],
                    outputs: vec![rate, accel],
                    unit_momenta: vec![h],
                })
            }
            Self::DgVscmg(d) => {
                let mut frame = d.frame;
                frame.inner_angle = state[0];
                frame.outer_angle = state[1];
                let unit = DgVscmgUnit {
                    frame,
                    rotor_speed: state[2],
                    momentum_offset: offset(&d.rotor, t, bypass),
                    wheel: wheel_loop(&d.wheel, t, d.rotor_inertia, cmd[0], d.accel_limit, bypass),
                    inner: gimbal_loop(&d.inner, t, cmd[1], d.gimbal_rate_limit, bypass),
                    outer: gimbal_loop(&d.outer, t, cmd[2], d.gimbal_rate_limit, bypass),
                };
                let h = d.rotor_inertia * state[2] + unit.momentum_offset;
                let accel = unit.wheel.torque() / d.rotor_inertia;
                let (ri, ro) = (unit.inner.rate(), unit.outer.rate());
                Ok(ActuatorEval {
                    body_torque: dgvscmg_torque(&unit),
                    momentum: frame.momentum_direction() * h,
                    state_rate: vec![ri, ro, accel],
                    outputs: vec![ri, ro, accel],
                    unit_momenta: vec![h],
                })
            }
        }
    }
}
