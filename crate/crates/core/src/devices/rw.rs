use crate::fault::LoopFaultProfile;
use crate::math::{Real, Vec3};

use super::{DeviceError, GeneralMedSpec, LoopTerm};

/// Reaction wheel cluster in torque-control mode.
///
/// Wheel `i` spins about `spin_axes[i]`. Its motor torque is
/// `τ_i = η_i(t)·sat(u_i) + offset_i(t)`; the wheel momentum grows at `τ_i`
/// and the body receives the reaction `−Σ τ_i·â_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RwCluster<T> {
    spin_axes: Vec<Vec3<T>>,
    wheel_inertia: T,
    torque_limit: T,
    profiles: Vec<LoopFaultProfile<T>>,
}

/// Result of evaluating the cluster at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct RwOutput<T> {
    /// Reaction torque on the body, N·m.
    pub body_torque: Vec3<T>,
    /// Motor torque delivered by each wheel, N·m.
    pub wheel_torques: Vec<T>,
    /// Wheel spin accelerations, rad/s².
    pub wheel_accelerations: Vec<T>,
    /// Commands after the torque limit.
    pub saturated_commands: Vec<T>,
}

impl<T: Real> RwCluster<T> {
    pub fn new(
        spin_axes: Vec<Vec3<T>>,
        wheel_inertia: T,
        torque_limit: T,
        profiles: Vec<LoopFaultProfile<T>>,
    ) -> Result<Self, DeviceError> {
        if spin_axes.is_empty() {
            return Err(DeviceError::InvalidParameter { name: "spin_axes", reason: "at least one wheel is required" });
        }
        for a in &spin_axes {
            if (a.norm() - T::one()).abs() > T::lit(1e-9) {
                return Err(DeviceError::InvalidParameter { name: "spin_axes", reason: "axes must be unit vectors" });
            }
        }
        if !(wheel_inertia > T::zero()) {
            return Err(DeviceError::InvalidParameter { name: "wheel_inertia", reason: "must be positive" });
        }
        if !(torque_limit > T::zero()) {
            return Err(DeviceError::InvalidParameter { name: "torque_limit", reason: "must be positive" });
        }
        if profiles.len() != spin_axes.len() {
            return Err(DeviceError::DimensionMismatch {
                what: "wheel fault profiles",
                expected: spin_axes.len(),
                got: profiles.len(),
            });
        }
        Ok(Self { spin_axes, wheel_inertia, torque_limit, profiles })
    }

    /// Three orthogonal wheels on the body axes, all nominal.
    pub fn orthogonal(wheel_inertia: T, torque_limit: T) -> Self {
        Self::new((0..3).map(Vec3::unit).collect(), wheel_inertia, torque_limit, vec![LoopFaultProfile::nominal(); 3])
            .expect("orthogonal cluster is valid")
    }

    pub fn len(&self) -> usize {
        self.spin_axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spin_axes.is_empty()
    }

    pub fn spin_axes(&self) -> &[Vec3<T>] {
        &self.spin_axes
    }

    pub fn wheel_inertia(&self) -> T {
        self.wheel_inertia
    }

    pub fn torque_limit(&self) -> T {
        self.torque_limit
    }

    pub fn profiles(&self) -> &[LoopFaultProfile<T>] {
        &self.profiles
    }

    pub fn set_profile(&mut self, wheel: usize, profile: LoopFaultProfile<T>) -> Result<(), DeviceError> {
        let n = self.len();
        let slot = self.profiles.get_mut(wheel).ok_or(DeviceError::UnitOutOfRange { unit: wheel, count: n })?;
        *slot = profile;
        Ok(())
    }

    /// Total stored momentum for the given wheel speeds.
    pub fn momentum(&self, speeds: &[T]) -> Vec3<T> {
        self.spin_axes.iter().zip(speeds).fold(Vec3::zeros(), |h, (a, &w)| h + *a * (self.wheel_inertia * w))
    }

    /// Wheel torque commands that make the body reaction equal `body_torque`:
    /// `−Gᵀ(GGᵀ)⁻¹ τ`, or `−τ` for the orthogonal cluster.
    pub fn allocate(&self, body_torque: &Vec3<T>) -> Result<Vec<T>, DeviceError> {
        let mut gram = crate::math::Mat3::zeros();
        for a in &self.spin_axes {
            for i in 0..3 {
                for j in 0..3 {
                    gram[(i, j)] += a[i] * a[j];
                }
            }
        }
        let inv = gram.try_inverse().ok_or(DeviceError::RankDeficient)?;
        let w = inv.mul_vec(body_torque);
        Ok(self.spin_axes.iter().map(|a| -a.dot(&w)).collect())
    }

    pub fn general_spec(&self, wheel: usize, t: T, command: T) -> Result<GeneralMedSpec<T>, DeviceError> {
        let p = self.profiles.get(wheel).ok_or(DeviceError::UnitOutOfRange { unit: wheel, count: self.len() })?;
        GeneralMedSpec::new(vec![vec![LoopTerm::new(p.effectiveness_at(t), command, p.offset_at(t))]])
    }
}

pub fn rw_cluster_torque<T: Real>(cluster: &RwCluster<T>, commands: &[T], t: T) -> Result<RwOutput<T>, DeviceError> {
    if commands.len() != cluster.len() {
        return Err(DeviceError::DimensionMismatch {
            what: "wheel torque commands",
            expected: cluster.len(),
            got: commands.len(),
        });
    }
    let saturated_commands: Vec<T> = commands.iter().map(|u| u.clamp_abs(cluster.torque_limit)).collect();
    let wheel_torques: Vec<T> =
        cluster.profiles.iter().zip(&saturated_commands).map(|(p, &u)| p.output(t, u)).collect();
    let body_torque = cluster.spin_axes.iter().zip(&wheel_torques).fold(Vec3::zeros(), |acc, (a, &tau)| acc - *a * tau);
    let wheel_accelerations = wheel_torques.iter().map(|&tau| tau / cluster.wheel_inertia).collect();
    Ok(RwOutput { body_torque, wheel_torques, wheel_accelerations, saturated_commands })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fault::{condition_profile, WorkingCondition};
    use approx::assert_abs_diff_eq;

    fn cluster_with_wheel3(c: WorkingCondition, eta: f64, offset: f64) -> RwCluster<f64> {
        let mut rw = RwCluster::orthogonal(0.01, 0.4);
        let p = condition_profile(c, eta, offset, 5.0, c.default_decay_rate(), 15.0).unwrap();
        rw.set_profile(2, p).unwrap();
        rw
    }

    #[test]
    fn nominal_cluster_delivers_commands() {
        let rw = RwCluster::orthogonal(0.01, 0.4);
        let u = [0.1, -0.2, 0.3];
        let out = rw_cluster_torque(&rw, &u, 12.0).unwrap();
        assert_eq!(out.wheel_torques, u.to_vec());
        assert_eq!(out.body_torque, Vec3::new(-0.1, 0.2, -0.3));
        assert_abs_diff_eq!(out.wheel_accelerations[2], 30.0, epsilon = 1e-12);
    }

    #[test]
    fn commands_are_saturated_not_faulted() {
        let rw = RwCluster::orthogonal(0.01, 0.4);
        let out = rw_cluster_torque(&rw, &[1.0, -3.0, 0.2], 0.0).unwrap();
        assert_eq!(out.saturated_commands, vec![0.4, -0.4, 0.2]);
        assert_eq!(out.wheel_torques, vec![0.4, -0.4, 0.2]);
    }

    #[test]
    fn partial_loss_caps_wheel_three() {
        let rw = cluster_with_wheel3(WorkingCondition::Fa, 0.75, 0.0);
        for t in [20.0, 40.0, 100.0] {
            let out = rw_cluster_torque(&rw, &[0.4, 0.4, 0.4], t).unwrap();
            assert!(out.wheel_torques[2].abs() <= 0.75 * 0.4 + 1e-6);
            assert_eq!(out.wheel_torques[0], 0.4);
        }
    }

    #[test]
    fn failed_wheel_stops_accelerating() {
        let rw = cluster_with_wheel3(WorkingCondition::Fb, 0.0, 0.0);
        let out = rw_cluster_torque(&rw, &[0.0, 0.0, 0.4], 60.0).unwrap();
        assert!(out.wheel_accelerations[2].abs() < 1e-18);
    }

    #[test]
    fn offset_is_added_after_onset() {
        let rw = cluster_with_wheel3(WorkingCondition::Fd, 0.0, 0.04);
        let out = rw_cluster_torque(&rw, &[0.0, 0.0, 0.4], 16.0).unwrap();
        assert_abs_diff_eq!(out.wheel_torques[2], 0.4 * (-11.0f64).exp() + 0.04, epsilon = 1e-15);
    }

    #[test]
    fn allocation_inverts_reaction() {
        let s = 1.0 / 3f64.sqrt();
        let axes = vec![Vec3::unit(0), Vec3::unit(1), Vec3::unit(2), Vec3::new(s, s, s)];
        let rw = RwCluster::new(axes, 0.01, 10.0, vec![LoopFaultProfile::nominal(); 4]).unwrap();
        let want = Vec3::new(0.1, -0.05, 0.2);
        let u = rw.allocate(&want).unwrap();
        let out = rw_cluster_torque(&rw, &u, 0.0).unwrap();
        assert_abs_diff_eq!((out.body_torque - want).max_abs(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn invalid_construction() {
        let bad_axis = RwCluster::new(vec![Vec3::new(1.0, 1.0, 0.0)], 0.01, 0.4, vec![LoopFaultProfile::nominal()]);
        assert!(bad_axis.is_err());
        let wrong_profiles = RwCluster::new(vec![Vec3::unit(0)], 0.01, 0.4, vec![]);
        assert!(matches!(wrong_profiles, Err(DeviceError::DimensionMismatch { .. })));
        let rw = RwCluster::orthogonal(0.01, 0.4);
        assert!(rw_cluster_torque(&rw, &[0.0], 0.0).is_err());
    }

    #[test]
    fn momentum_sums_wheels() {
        let rw = RwCluster::orthogonal(0.02, 0.4);
        assert_eq!(rw.momentum(&[10.0, -5.0, 0.0]), Vec3::new(0.2, -0.1, 0.0));
    }
}
