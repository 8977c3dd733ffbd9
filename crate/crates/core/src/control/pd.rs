use crate::math::{Mat3, Quaternion, Real, Vec3};

use super::ControlError;

/// Cascade saturated PD gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdGains<T> {
    pub k: T,
    pub c: T,
    /// Body-rate limit per axis, rad/s.
    pub rate_limit: Vec3<T>,
    /// Torque authority per axis, N·m.
    pub torque_limit: Vec3<T>,
}

impl<T: Real> PdGains<T> {
    /// k = 9.54, c = 5.5, 4 deg/s rate limit on every axis.
    pub fn standard(torque_limit: T) -> Self {
        let w = T::lit(4.0f64.to_radians());
        Self {
            k: T::lit(9.54),
            c: T::lit(5.5),
            rate_limit: Vec3::new(w, w, w),
            torque_limit: Vec3::new(torque_limit, torque_limit, torque_limit),
        }
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        let positive = |name, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(ControlError::InvalidParameter { name, value: v.as_f64() })
            }
        };
        positive("k", self.k)?;
        positive("c", self.c)?;
        for i in 0..3 {
            positive("rate_limit", self.rate_limit[i])?;
            positive("torque_limit", self.torque_limit[i])?;
        }
        Ok(())
    }

    /// Per-axis limits `L_i = (c/2k)·min(√(4 a_i |q_ei|), ω_max,i)` with
    /// `a_i = u_max,i / J_ii`.
    pub fn error_limits(&self, inertia: &Mat3<T>, q_ev: &Vec3<T>) -> Vec3<T> {
        let scale = self.c / (T::two() * self.k);
        Vec3::from_array(std::array::from_fn(|i| {
            let a = self.torque_limit[i] / inertia[(i, i)];
            let accel_bound = (T::lit(4.0) * a * q_ev[i].abs()).sqrt();
            scale * accel_bound.min(self.rate_limit[i])
        }))
    }
}

/// `u = −J·(2k·sat_L(q_ev) + c·ω)`, the desired body torque.
pub fn pd_command<T: Real>(inertia: &Mat3<T>, q_e: &Quaternion<T>, omega: &Vec3<T>, g: &PdGains<T>) -> Vec3<T> {
    let limits = g.error_limits(inertia, &q_e.v);
    let sat = q_e.v.zip_map(limits, |q, l| q.clamp_abs(l));
    -inertia.mul_vec(&(sat * (T::two() * g.k) + *omega * g.c))
}

/// Clamps each axis of a torque command to the gains' authority.
pub fn clamp_command<T: Real>(u: &Vec3<T>, g: &PdGains<T>) -> Vec3<T> {
    u.zip_map(g.torque_limit, |x, l| x.clamp_abs(l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::EulerAngles;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn inertia() -> Mat3<f64> {
        Mat3::diagonal([120.0, 100.0, 80.0])
    }

    #[test]
    fn equilibrium_gives_zero() {
        let u = pd_command(&inertia(), &Quaternion::identity(), &Vec3::zeros(), &PdGains::standard(0.4));
        assert_eq!(u, Vec3::zeros());
    }

    #[test]
    fn pinned_command_at_start_attitude() {
        let q = EulerAngles::from_degrees(60.0, -20.0, 30.0).to_quaternion().positive_scalar();
        let w = Vec3::new(0.01, -0.02, 0.005);
        let u = pd_command(&inertia(), &q, &w, &PdGains::standard(0.4));
        let expected = [-52.676_692_252_650_3, 20.285_988_808_715_08, -32.917_794_835_100_2];
        for i in 0..3 {
            assert_abs_diff_eq!(u[i], expected[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn large_error_rate_bound() {
        let g = PdGains::standard(0.4);
        let q = Quaternion::from_axis_angle(Vec3::new(1.0, -1.0, 1.0).normalized(), 2.5);
        let l = g.error_limits(&inertia(), &q.v);
        for i in 0..3 {
            assert!(2.0 * g.k * l[i] <= g.c * g.rate_limit[i] + 1e-15);
        }
    }

    #[test]
    fn clamp_respects_authority() {
        let g = PdGains::standard(0.4);
        assert_eq!(clamp_command(&Vec3::new(3.0, -0.1, -9.0), &g), Vec3::new(0.4, -0.1, -0.4));
    }

    #[test]
    fn rejects_bad_gains() {
        let mut g = PdGains::<f64>::standard(0.4);
        g.k = 0.0;
        assert!(g.validate().is_err());
        assert!(PdGains::<f64>::standard(0.4).validate().is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn nonzero_state_gives_nonzero_command(
            ax in prop::array::uniform3(-1.0..1.0f64),
            angle in 1e-3..3.0f64,
            w in prop::array::uniform3(-0.1..0.1f64),
        ) {
            let axis = Vec3::from_array(ax);
            prop_assume!(axis.norm() > 1e-2);
            let q = Quaternion::from_axis_angle(axis.normalized(), angle).positive_scalar();
            let u = pd_command(&inertia(), &q, &Vec3::from_array(w), &PdGains::standard(0.4));
            // Not exactly zero unless both error and rate vanish.
            prop_assert!(u.max_abs() > 0.0 || (q.v.max_abs() == 0.0 && w == [0.0; 3]));
        }
    }
}
