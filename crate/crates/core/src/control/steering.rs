use crate::math::{Mat, Mat3, Real, Vec3};

use super::ControlError;

/// Generalized singular-robust inverse parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringParams<T> {
    pub lambda0: T,
    pub decay_gain: T,
    pub epsilon_amplitude: T,
    /// Modulation frequency of ε, rad/s.
    pub frequency: T,
    pub phases: [T; 3],
}

impl<T: Real> Default for SteeringParams<T> {
    fn default() -> Self {
        Self {
            lambda0: T::lit(0.01),
            decay_gain: T::lit(10.0),
            epsilon_amplitude: T::lit(0.01),
            frequency: T::lit(0.5) * T::PI(),
            phases: [T::zero(), T::FRAC_PI_2(), T::PI()],
        }
    }
}

impl<T: Real> SteeringParams<T> {
    pub fn lambda(&self, singularity: T) -> T {
        self.lambda0 * (-self.decay_gain * singularity).exp()
    }

    pub fn epsilon(&self, t: T) -> [T; 3] {
        self.phases.map(|phi| self.epsilon_amplitude * (self.frequency * t + phi).sin())
    }

    /// `[[1, ε3, ε2], [ε3, 1, ε1], [ε2, ε1, 1]]`.
    pub fn modulation(&self, t: T) -> Mat3<T> {
        let [e1, e2, e3] = self.epsilon(t);
        let one = T::one();
        Mat3::from_rows([[one, e3, e2], [e3, one, e1], [e2, e1, one]])
    }
}

/// Steering inverse together with the regularization that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SrInverse<T> {
    pub inverse: Mat<T, 4, 3>,
    pub lambda: T,
    pub modulation: Mat3<T>,
    pub singularity: T,
}

/// `det(AAᵀ)`.
pub fn singularity_measure<T: Real>(a: &Mat<T, 3, 4>) -> T {
    (*a * a.transpose()).determinant()
}

/// `A# = Aᵀ(AAᵀ + λE)⁻¹` with `λ = λ0·exp(−γ det(AAᵀ))`.
pub fn sr_inverse<T: Real>(a: &Mat<T, 3, 4>, t: T, p: &SteeringParams<T>) -> Result<SrInverse<T>, ControlError> {
    let gram = *a * a.transpose();
    let singularity = gram.determinant();
    let lambda = p.lambda(singularity);
    let modulation = p.modulation(t);
    let inv = (gram + modulation.scale(lambda)).try_inverse().ok_or(ControlError::SingularSteering)?;
    let inverse = a.transpose() * inv;
    if !inverse.is_finite() {
        return Err(ControlError::SingularSteering);
    }
    Ok(SrInverse { inverse, lambda, modulation, singularity })
}

/// `δ̇_c = A#·u / h0`, each channel clamped to `±rate_limit`.
pub fn gimbal_rate_command<T: Real>(
    a: &Mat<T, 3, 4>,
    u: &Vec3<T>,
    h0: T,
    t: T,
    p: &SteeringParams<T>,
    rate_limit: T,
) -> Result<([T; 4], SrInverse<T>), ControlError> {
    if !(h0 > T::zero()) {
        return Err(ControlError::InvalidParameter { name: "h0", value: h0.as_f64() });
    }
    let sr = sr_inverse(a, t, p)?;
    let raw = sr.inverse.mul_array(&u.to_array());
    Ok((raw.map(|r| (r / h0).clamp_abs(rate_limit)), sr))
}
