use crate::fault::{LoopFaultProfile, WorkingCondition};
use crate::math::{Mat, Real, Vec3};

use super::{DeviceError, GeneralMedSpec, LoopTerm};

/// Constant-speed rotor loop. Produces the stored momentum
/// `h = J·sat_{ω_m}(η·ω_c) + h_o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorLoop<T> {
    pub effectiveness: T,
    /// Commanded spin speed ω_c, rad/s.
    pub speed_command: T,
    /// Additive momentum offset h_o, N·m·s.
    pub momentum_offset: T,
    /// Rotor inertia, kg·m².
    pub inertia: T,
    /// Spin speed saturation ω_m, rad/s.
    pub speed_limit: T,
}

impl<T: Real> RotorLoop<T> {
    pub fn healthy(inertia: T, speed_command: T) -> Self {
        Self {
            effectiveness: T::one(),
            speed_command,
            momentum_offset: T::zero(),
            inertia,
            speed_limit: speed_command.abs() * T::two(),
        }
    }

    pub fn momentum(&self) -> T {
        self.inertia * (self.effectiveness * self.speed_command).clamp_abs(self.speed_limit) + self.momentum_offset
    }

    pub fn commanded_momentum(&self) -> T {
        self.inertia * self.speed_command
    }

    /// Cascade term `(η, J·ω_c, h_o)`; exact while the speed limit is inactive.
    pub fn loop_term(&self) -> LoopTerm<T> {
        LoopTerm::new(self.effectiveness, self.commanded_momentum(), self.momentum_offset)
    }
}

/// Gimbal rate loop: `δ̇ = η·δ̇_c + δ̇_o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GimbalLoop<T> {
    pub effectiveness: T,
    /// Commanded gimbal rate, rad/s.
    pub rate_command: T,
    /// Additive rate offset, rad/s.
    pub rate_offset: T,
}

impl<T: Real> GimbalLoop<T> {
    pub fn healthy(rate_command: T) -> Self {
        Self { effectiveness: T::one(), rate_command, rate_offset: T::zero() }
    }

    pub fn rate(&self) -> T {
        self.effectiveness * self.rate_command + self.rate_offset
    }

    pub fn loop_term(&self) -> LoopTerm<T> {
        LoopTerm::new(self.effectiveness, self.rate_command, self.rate_offset)
    }
}

/// `τ = −[J·sat(η^r ω_c) + h_o]·[η^g δ̇_c + δ̇_o]·t̂`.
pub fn sgcmg_unit_torque<T: Real>(rotor: &RotorLoop<T>, gimbal: &GimbalLoop<T>, direction: &Vec3<T>) -> Vec3<T> {
    *direction * -(rotor.momentum() * gimbal.rate())
}

/// Cascade form of one SGCMG: one parallel term of rotor × gimbal.
pub fn sgcmg_general_spec<T: Real>(
    rotor: &RotorLoop<T>,
    gimbal: &GimbalLoop<T>,
) -> Result<GeneralMedSpec<T>, DeviceError> {
    GeneralMedSpec::new(vec![vec![rotor.loop_term(), gimbal.loop_term()]])
}

/// Inputs to the closed-form SGCMG fault table. Only the entries a given
/// condition pair uses are read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Params<T> {
    pub rotor_effectiveness: T,
    pub gimbal_effectiveness: T,
    pub rotor_inertia: T,
    pub speed_command: T,
    pub speed_limit: T,
    pub momentum_offset: T,
    pub rate_command: T,
    pub rate_offset: T,
    pub direction: Vec3<T>,
}

/// Closed-form SGCMG output for a (rotor, gimbal) working-condition pair,
/// written out case by case.
///
/// The rotor-speed saturation is applied wherever the rotor speed enters.
pub fn table1_lookup<T: Real>(rotor: WorkingCondition, gimbal: WorkingCondition, p: &Table1Params<T>) -> Vec3<T> {
    use WorkingCondition::*;
    let sat = |w: T| w.clamp_abs(p.speed_limit);
    let j = p.rotor_inertia;
    let (er, eg) = (p.rotor_effectiveness, p.gimbal_effectiveness);
    let (wc, ho) = (p.speed_command, p.momentum_offset);
    let (dc, dof) = (p.rate_command, p.rate_offset);

    // Rotor Fb and gimbal Fb rows are identically zero.
    let h = match rotor {
        N => j * sat(wc),
        Fd => ho,
        Fa => j * sat(er * wc),
        Fb => return Vec3::zeros(),
        Fc => j * sat(er * wc) + ho,
        Fe => j * sat(wc) + ho,
    };
    let rate = match gimbal {
        N => dc,
        Fa => eg * dc,
        Fb => return Vec3::zeros(),
        Fc => eg * dc + dof,
        Fd => dof,
        Fe => dc + dof,
    };
    p.direction * -(h * rate)
}

/// Four SGCMGs in the standard pyramid at skew angle β.
///
/// Unit `i` has its gimbal axis tilted by β from the pyramid's z axis; at
/// zero gimbal angle the momentum directions are `+y, −x, −y, +x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgcmgPyramid<T> {
    pub skew: T,
    pub gimbal_angles: [T; 4],
    pub rotor_momenta: [T; 4],
    pub rotor_inertia: T,
    /// Commanded rotor speed; `rotor_inertia * rotor_speed` is the nominal h₀.
    pub rotor_speed: T,
    pub rotor_speed_limit: T,
    pub gimbal_rate_limit: T,
    pub rotor_profiles: [LoopFaultProfile<T>; 4],
    pub gimbal_profiles: [LoopFaultProfile<T>; 4],
}

/// Pyramid skew angle giving a near-spherical momentum envelope,
/// `atan(√2)` ≈ 54.7356°.
pub fn default_skew<T: Real>() -> T {
    T::two().sqrt().atan()
}

impl<T: Real> SgcmgPyramid<T> {
    /// Healthy pyramid at zero gimbal angles with every rotor at
    /// `rotor_inertia * rotor_speed`.
    pub fn new(skew: T, rotor_inertia: T, rotor_speed: T, gimbal_rate_limit: T) -> Self {
        let h0 = rotor_inertia * rotor_speed;
        Self {
            skew,
            gimbal_angles: [T::zero(); 4],
            rotor_momenta: [h0; 4],
            rotor_inertia,
            rotor_speed,
            rotor_speed_limit: rotor_speed.abs() * T::two(),
            gimbal_rate_limit,
            rotor_profiles: [LoopFaultProfile::nominal(); 4],
            gimbal_profiles: [LoopFaultProfile::nominal(); 4],
        }
    }

    pub fn validate(&self) -> Result<(), DeviceError> {
        let positive = [
            ("rotor_inertia", self.rotor_inertia),
            ("rotor_speed", self.rotor_speed),
            ("rotor_speed_limit", self.rotor_speed_limit),
            ("gimbal_rate_limit", self.gimbal_rate_limit),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) {
                return Err(DeviceError::InvalidParameter { name, reason: "must be positive" });
            }
        }
        if !(self.skew > T::zero() && self.skew < T::FRAC_PI_2()) {
            return Err(DeviceError::InvalidParameter { name: "skew", reason: "must lie in (0, 90) degrees" });
        }
        Ok(())
    }

    /// Nominal rotor momentum h₀ = J·ω_c.
    pub fn nominal_momentum(&self) -> T {
        self.rotor_inertia * self.rotor_speed
    }

    /// Momentum direction and torque direction (`∂ĥ/∂δ`) at zero gimbal angle.
    fn base_frame(&self, i: usize) -> (Vec3<T>, Vec3<T>) {
        let (sb, cb) = self.skew.sin_cos();
        let (o, l) = (T::zero(), T::one());
        match i {
            0 => (Vec3::new(o, l, o), Vec3::new(-cb, o, sb)),
            1 => (Vec3::new(-l, o, o), Vec3::new(o, -cb, sb)),
            2 => (Vec3::new(o, -l, o), Vec3::new(cb, o, sb)),
            3 => (Vec3::new(l, o, o), Vec3::new(o, cb, sb)),
            _ => panic!("pyramid unit {i} out of range"),
        }
    }

    pub fn gimbal_axis(&self, i: usize) -> Vec3<T> {
        let (h, t) = self.base_frame(i);
        h.cross(&t)
    }

    /// Unit momentum direction of unit `i` at its current gimbal angle.
    pub fn momentum_direction(&self, i: usize) -> Vec3<T> {
        let (h, t) = self.base_frame(i);
        let (s, c) = self.gimbal_angles[i].sin_cos();
        h * c + t * s
    }

    /// Unit torque direction `t̂_i = ∂ĥ_i/∂δ_i`.
    pub fn torque_direction(&self, i: usize) -> Vec3<T> {
        let (h, t) = self.base_frame(i);
        let (s, c) = self.gimbal_angles[i].sin_cos();
        t * c - h * s
    }

    pub fn momentum(&self) -> Vec3<T> {
        (0..4).fold(Vec3::zeros(), |acc, i| acc + self.momentum_direction(i) * self.rotor_momenta[i])
    }

    pub fn jacobian(&self) -> Mat<T, 3, 4> {
        Mat::from_columns(&[
            self.torque_direction(0),
            self.torque_direction(1),
            self.torque_direction(2),
            self.torque_direction(3),
        ])
    }

    /// Rotor momentum of unit `i` at time `t` under its rotor fault profile.
    pub fn rotor_loop(&self, i: usize, t: T) -> RotorLoop<T> {
        let p = &self.rotor_profiles[i];
        RotorLoop {
            effectiveness: p.effectiveness_at(t),
            speed_command: self.rotor_speed,
            momentum_offset: p.offset_at(t),
            inertia: self.rotor_inertia,
            speed_limit: self.rotor_speed_limit,
        }
    }

    /// Gimbal loop of unit `i` for a rate command, after the rate limit.
    pub fn gimbal_loop(&self, i: usize, t: T, rate_command: T) -> GimbalLoop<T> {
        let p = &self.gimbal_profiles[i];
        GimbalLoop {
            effectiveness: p.effectiveness_at(t),
            rate_command: rate_command.clamp_abs(self.gimbal_rate_limit),
            rate_offset: p.offset_at(t),
        }
    }
}

pub fn pyramid_momentum<T: Real>(p: &SgcmgPyramid<T>) -> Vec3<T> {
    p.momentum()
}

pub fn pyramid_jacobian<T: Real>(p: &SgcmgPyramid<T>) -> Mat<T, 3, 4> {
    p.jacobian()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pyramid() -> SgcmgPyramid<f64> {
        SgcmgPyramid::new(default_skew(), 0.1, 100.0, 100f64.to_radians())
    }

    #[test]
    fn skew_default_value() {
        assert_abs_diff_eq!(default_skew::<f64>().to_degrees(), 54.7356, epsilon = 1e-4);
    }

    #[test]
    fn zero_angles_cancel_laterally() {
        let h = pyramid().momentum();
        assert_abs_diff_eq!(h.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.y, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn single_unit_quarter_turn() {
        let mut p = pyramid();
        p.rotor_momenta = [10.0, 0.0, 0.0, 0.0];
        p.gimbal_angles[0] = 90f64.to_radians();
        let h = p.momentum();
        assert_abs_diff_eq!(h.norm(), 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h.dot(&p.gimbal_axis(0)), 0.0, epsilon = 1e-12);
        // Now along the zero-angle torque direction.
        assert_abs_diff_eq!(h.y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn frames_are_orthonormal() {
        let mut p = pyramid();
        p.gimbal_angles = [0.3, -1.2, 2.0, 0.7];
        for i in 0..4 {
            let (h, t, g) = (p.momentum_direction(i), p.torque_direction(i), p.gimbal_axis(i));
            assert_abs_diff_eq!(h.norm(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(t.norm(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(h.dot(&t), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(g.dot(&h), 0.0, epsilon = 1e-15);
            // t̂ = ĝ × ĥ
            assert_abs_diff_eq!((g.cross(&h) - t).max_abs(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn x_z_plane_pair_is_one_and_three() {
        let p = pyramid();
        assert_eq!(p.gimbal_axis(0).y, 0.0);
        assert_eq!(p.gimbal_axis(2).y, 0.0);
    }

    #[test]
    fn start_configuration_is_not_singular() {
        let a = pyramid().jacobian();
        let det = (a * a.transpose()).determinant();
        // diag(2cos²β, 2cos²β, 4sin²β) = diag(2/3, 2/3, 8/3)
        assert_abs_diff_eq!(det, 32.0 / 27.0, epsilon = 1e-12);
    }

    #[test]
    fn coplanar_torque_directions_are_singular() {
        let mut p = pyramid();
        p.gimbal_angles = [std::f64::consts::FRAC_PI_2; 4];
        let a = p.jacobian();
        assert_abs_diff_eq!((a * a.transpose()).determinant(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn nominal_unit_reduces_to_gyroscopic_torque() {
        let t = Vec3::new(0.0, 0.6, 0.8);
        let rotor = RotorLoop::healthy(0.1, 100.0);
        let tau = sgcmg_unit_torque(&rotor, &GimbalLoop::healthy(0.5), &t);
        assert_abs_diff_eq!((tau - t * -(10.0 * 0.5)).max_abs(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn failed_gimbal_outputs_nothing() {
        let rotor = RotorLoop { effectiveness: 0.3, momentum_offset: 2.0, ..RotorLoop::healthy(0.1, 100.0) };
        let g = GimbalLoop { effectiveness: 0.0, rate_command: 1.3, rate_offset: 0.0 };
        assert_eq!(sgcmg_unit_torque(&rotor, &g, &Vec3::unit(1)), Vec3::zeros());
    }

    #[test]
    fn partial_gimbal_scales_torque() {
        let rotor = RotorLoop::healthy(0.1, 100.0);
        let g = GimbalLoop { effectiveness: 0.75, rate_command: 1.0, rate_offset: 0.0 };
        let tau = sgcmg_unit_torque(&rotor, &g, &Vec3::unit(0));
        assert_abs_diff_eq!(tau.norm(), 7.5, epsilon = 1e-13);
    }

    #[test]
    fn rotor_speed_saturates() {
        let rotor = RotorLoop { speed_limit: 50.0, ..RotorLoop::healthy(0.1, 100.0) };
        assert_abs_diff_eq!(rotor.momentum(), 5.0, epsilon = 1e-15);
    }

    fn table_params() -> Table1Params<f64> {
        Table1Params {
            rotor_effectiveness: 0.5,
            gimbal_effectiveness: 0.75,
            rotor_inertia: 0.1,
            speed_command: 100.0,
            speed_limit: 200.0,
            momentum_offset: 2.0,
            rate_command: 0.4,
            rate_offset: 20f64.to_radians(),
            direction: Vec3::new(0.0, 0.6, 0.8),
        }
    }

    #[test]
    fn table_nominal_rotor_offset_gimbal() {
        use WorkingCondition::*;
        let p = table_params();
        let tau = table1_lookup(N, Fd, &p);
        let expected = p.direction * -(10.0 * p.rate_offset);
        assert_abs_diff_eq!((tau - expected).max_abs(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn table_failed_rotor_row_is_zero() {
        let p = table_params();
        for g in WorkingCondition::ALL {
            assert_eq!(table1_lookup(WorkingCondition::Fb, g, &p), Vec3::zeros());
        }
    }

    #[test]
    fn table_partial_offset_rotor_pure_offset_gimbal() {
        use WorkingCondition::*;
        let p = table_params();
        let tau = table1_lookup(Fc, Fe, &p);
        let expected = p.direction * -((0.5 * 0.1 * 100.0 + 2.0) * (0.4 + p.rate_offset));
        assert_abs_diff_eq!((tau - expected).max_abs(), 0.0, epsilon = 1e-14);
    }
}
