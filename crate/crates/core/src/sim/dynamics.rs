use crate::math::{Mat3, Quaternion, Real, Vec3};

use super::SimError;

/// Rigid spacecraft body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacecraftParams<T> {
    inertia: Mat3<T>,
    inertia_inv: Mat3<T>,
    disturbance: Vec3<T>,
}

impl<T: Real> SpacecraftParams<T> {
    pub fn new(inertia: Mat3<T>, disturbance: Vec3<T>) -> Result<Self, SimError> {
        if !inertia.is_finite() || !disturbance.is_finite() {
            return Err(SimError::invalid("spacecraft", "inertia and disturbance must be finite"));
        }
        if !inertia.is_symmetric(T::lit(1e-12) * inertia.max_abs()) {
            return Err(SimError::invalid("spacecraft.inertia", "must be symmetric"));
        }
        // Sylvester's criterion.
        let m1 = inertia[(0, 0)];
        let m2 = inertia[(0, 0)] * inertia[(1, 1)] - inertia[(0, 1)] * inertia[(1, 0)];
        if !(m1 > T::zero() && m2 > T::zero() && inertia.determinant() > T::zero()) {
            return Err(SimError::invalid("spacecraft.inertia", "must be positive definite"));
        }
        let inertia_inv =
            inertia.try_inverse().ok_or_else(|| SimError::invalid("spacecraft.inertia", "must be invertible"))?;
        Ok(Self { inertia, inertia_inv, disturbance })
    }

    /// `J = diag(120, 100, 80)` kg·m², no disturbance.
    pub fn standard() -> Self {
        Self::new(Mat3::diagonal([T::lit(120.0), T::lit(100.0), T::lit(80.0)]), Vec3::zeros())
            .expect("standard inertia is valid")
    }

    pub fn inertia(&self) -> &Mat3<T> {
        &self.inertia
    }

    pub fn inertia_inv(&self) -> &Mat3<T> {
        &self.inertia_inv
    }

    pub fn disturbance(&self) -> Vec3<T> {
        self.disturbance
    }

    /// Total angular momentum `Jω + H` in body axes.
    pub fn total_momentum(&self, omega: &Vec3<T>, actuator_momentum: &Vec3<T>) -> Vec3<T> {
        self.inertia.mul_vec(omega) + *actuator_momentum
    }
}

/// `q̇` and `ω̇ = J⁻¹(τ + d − ω×(Jω + H))`.
pub fn spacecraft_derivative<T: Real>(
    p: &SpacecraftParams<T>,
    q: &Quaternion<T>,
    omega: &Vec3<T>,
    torque: &Vec3<T>,
    actuator_momentum: &Vec3<T>,
) -> (Quaternion<T>, Vec3<T>) {
    let gyro = omega.cross(&p.total_momentum(omega, actuator_momentum));
    let omega_dot = p.inertia_inv.mul_vec(&(*torque + p.disturbance - gyro));
    (q.derivative_unchecked(omega), omega_dot)
}
