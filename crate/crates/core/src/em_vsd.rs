//! Electric motor / variable-speed-drive loop.
//!
//! Holds the brushless DC motor state-space model, the discrete-time check
//! that a parameter fault in a first-order speed or torque loop acts as a
//! multiplicative effectiveness factor `η = e^{Δa·h}`, and the resulting
//! loop output frame `y = η·command + offset`.

use crate::math::{Mat, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmVsdError {
    #[error("motor parameter `{name}` must be strictly positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("step size must be positive, got {0}")]
    InvalidStep(f64),
    #[error("parameter fault {delta_a} gives effectiveness {eta} > 1, which is non-physical")]
    NonPhysicalFault { delta_a: f64, eta: f64 },
    #[error("effectiveness factor {0} outside [0, 1]")]
    EffectivenessOutOfRange(f64),
    #[error("command sequence is empty")]
    EmptyCommand,
    #[error("regularized input gram matrix is singular")]
    SingularRegularization,
}

/// Brushless DC motor constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotorParams<T> {
    /// Armature resistance, Ω.
    pub resistance: T,
    /// Self-inductance, H.
    pub inductance: T,
    /// Back-emf constant, V·s/rad.
    pub back_emf: T,
    /// Torque constant, N·m/A.
    pub torque_constant: T,
    /// Rotor plus load inertia, kg·m².
    pub inertia: T,
    /// Viscous friction, N·m·s/rad.
    pub friction: T,
}

impl<T: Real> Default for MotorParams<T> {
    fn default() -> Self {
        Self {
            resistance: T::lit(1.0),
            inductance: T::lit(0.01),
            back_emf: T::lit(0.05),
            torque_constant: T::lit(0.05),
            inertia: T::lit(1e-4),
            friction: T::lit(1e-5),
        }
    }
}

impl<T: Real> MotorParams<T> {
    pub fn validate(&self) -> Result<(), EmVsdError> {
        let fields = [
            ("resistance", self.resistance),
            ("inductance", self.inductance),
            ("back_emf", self.back_emf),
            ("torque_constant", self.torque_constant),
            ("inertia", self.inertia),
            ("friction", self.friction),
        ];
        for (name, value) in fields {
            if !(value > T::zero()) {
                return Err(EmVsdError::NonPositiveParameter { name, value: value.as_f64() });
            }
        }
        Ok(())
    }

    /// Two-state model with `x = [I, ω_r]`, input voltage and load torque,
    /// measuring rotor speed only.
    pub fn state_space(&self) -> LinearPlant<T, 2> {
        let (r, l, ke, kt, j, s) =
            (self.resistance, self.inductance, self.back_emf, self.torque_constant, self.inertia, self.friction);
        LinearPlant {
            a: Mat::from_rows([[-r / l, -ke / l], [kt / j, -s / j]]),
            b: Mat::from_rows([[T::one() / l], [T::zero()]]),
            d: Mat::from_rows([[T::zero()], [-T::one() / j]]),
            c: Mat::from_rows([[T::zero(), T::one()]]),
        }
    }

    /// First-order speed loop obtained by letting the electrical transient
    /// settle (`L → 0`): `J ω̇ = (K_t/R)(V − K_E ω) − σω − T_l`.
    pub fn speed_loop(&self) -> LinearPlant<T, 1> {
        let j = self.inertia;
        let a = -(self.torque_constant * self.back_emf / self.resistance + self.friction) / j;
        let b = self.torque_constant / (self.resistance * j);
        LinearPlant::scalar(a, b, T::one(), -T::one() / j)
    }
}

/// Phase current and rotor speed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MotorState<T> {
    /// Phase current, A.
    pub current: T,
    /// Rotor angular velocity, rad/s.
    pub speed: T,
}

/// `İ = (V − R·I − K_E·ω)/L`, `ω̇ = (K_t·I − σ·ω − T_l)/J_m`.
pub fn motor_derivative<T: Real>(p: &MotorParams<T>, s: &MotorState<T>, voltage: T, load_torque: T) -> MotorState<T> {
    MotorState {
        current: (voltage - p.resistance * s.current - p.back_emf * s.speed) / p.inductance,
        speed: (p.torque_constant * s.current - p.friction * s.speed - load_torque) / p.inertia,
    }
}

/// `ẋ = A x + B u + D T_l`, `y = C x` with a scalar input and output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPlant<T, const N: usize> {
    pub a: Mat<T, N, N>,
    pub b: Mat<T, N, 1>,
    pub d: Mat<T, N, 1>,
    pub c: Mat<T, 1, N>,
}

impl<T: Real> LinearPlant<T, 1> {
    pub fn scalar(a: T, b: T, c: T, d: T) -> Self {
        Self { a: Mat::from_rows([[a]]), b: Mat::from_rows([[b]]), d: Mat::from_rows([[d]]), c: Mat::from_rows([[c]]) }
    }
}

/// Effectiveness factor of a first-order loop whose pole is shifted by
/// `delta_a` over a hold of `h` seconds: `η = e^{Δa·h}`.
pub fn effectiveness_from_param_fault<T: Real>(delta_a: T, h: T) -> Result<T, EmVsdError> {
    if !(h > T::zero()) {
        return Err(EmVsdError::InvalidStep(h.as_f64()));
    }
    let eta = (delta_a * h).exp();
    if delta_a > T::zero() {
        return Err(EmVsdError::NonPhysicalFault { delta_a: delta_a.as_f64(), eta: eta.as_f64() });
    }
    Ok(eta)
}

/// Returns `(e^X, φ₁(X))` with `φ₁(X) = Σ Xᵏ/(k+1)!`, so that
/// `∫₀ʰ e^{Fs} ds = h·φ₁(F h)`.
///
/// Scaling and squaring on a Taylor core; the pair doubles as
/// `e^{2X} = (e^X)²`, `φ₁(2X) = ½ φ₁(X)(e^X + I)`.
pub fn exp_and_phi1<T: Real, const N: usize>(x: &Mat<T, N, N>) -> (Mat<T, N, N>, Mat<T, N, N>) {
    let norm = x.frobenius_norm().as_f64();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = x.scale(T::lit(0.5f64.powi(squarings as i32)));

    let id = Mat::<T, N, N>::identity();
    let mut exp = id;
    let mut phi = id;
    let mut power = id;
    let mut fact = T::one();
    for k in 1..=18u32 {
        power = power * scaled;
        fact *= T::lit(k as f64);
        exp = exp + power.scale(T::one() / fact);
        phi = phi + power.scale(T::one() / (fact * T::lit((k + 1) as f64)));
    }
    for _ in 0..squarings {
        phi = (phi * (exp + id)).scale(T::half());
        exp = exp * exp;
    }
    (exp, phi)
}

/// Trajectories and worst-case mismatch produced by [`derivation_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport<T> {
    /// Output of the exactly discretized faulty plant, one entry per step.
    pub simulated: Vec<T>,
    /// Multiplicative prediction `C e^{ΔA h} e^{A h} B u0(k)`.
    pub predicted: Vec<T>,
    pub max_abs_deviation: T,
    /// `max_abs_deviation / max |predicted|`.
    pub max_relative_deviation: T,
    /// `e^{Δa h}` when the plant is first order.
    pub effectiveness: Option<T>,
}

/// Simulates the faulty plant `ẋ = (A + ΔA)x + Bu + D T_l` with a
/// zero-order hold of `h`, driven by the state-cancelling input
/// `u(k) = u0(k)/h − B⁺(x(k) + D T_l h)/h` where
/// `B⁺ = Bᵀ(BBᵀ + ςI)⁻¹`, and compares each output against the
/// multiplicative prediction.
///
/// For a first-order loop the prediction is `η·c·e^{ah}·b·u0(k)` and the
/// mismatch shrinks linearly with `h`. For higher order plants with a
/// rank-deficient `B` the state cannot be cancelled and the prediction is not
/// expected to hold; the report just measures it.
pub fn derivation_oracle<T: Real, const N: usize>(
    plant: &LinearPlant<T, N>,
    delta_a: &Mat<T, N, N>,
    h: T,
    u0: &[T],
    load_torque: T,
    regularizer: T,
) -> Result<OracleReport<T>, EmVsdError> {
    if !(h > T::zero()) {
        return Err(EmVsdError::InvalidStep(h.as_f64()));
    }
    if u0.is_empty() {
        return Err(EmVsdError::EmptyCommand);
    }
    let faulty = plant.a + *delta_a;
    let (phi, phi1) = exp_and_phi1(&faulty.scale(h));
    let gamma = phi1.scale(h);

    let gram = plant.b * plant.b.transpose() + Mat::<T, N, N>::identity().scale(regularizer);
    let gram_inv = gram.try_inverse().ok_or(EmVsdError::SingularRegularization)?;
    let b_pinv: Mat<T, 1, N> = plant.b.transpose() * gram_inv;

    let (nominal_exp, _) = exp_and_phi1(&plant.a.scale(h));
    let (fault_exp, _) = exp_and_phi1(&delta_a.scale(h));
    let gain = (plant.c * fault_exp * nominal_exp * plant.b)[(0, 0)];

    let load = plant.d.scale(load_torque);
    let mut x = Mat::<T, N, 1>::zeros();
    let mut simulated = Vec::with_capacity(u0.len());
    let mut predicted = Vec::with_capacity(u0.len());
    for &cmd in u0 {
        let u = (cmd - (b_pinv * (x + load.scale(h)))[(0, 0)]) / h;
        x = phi * x + gamma * (plant.b.scale(u) + load);
        simulated.push((plant.c * x)[(0, 0)]);
        predicted.push(gain * cmd);
    }

    let max_abs_deviation = simulated.iter().zip(&predicted).fold(T::zero(), |m, (s, p)| m.max((*s - *p).abs()));
    let peak = predicted.iter().fold(T::zero(), |m, p| m.max(p.abs()));
    let max_relative_deviation = if peak > T::zero() { max_abs_deviation / peak } else { max_abs_deviation };
    let effectiveness = (N == 1).then(|| (delta_a[(0, 0)] * h).exp());
    Ok(OracleReport { simulated, predicted, max_abs_deviation, max_relative_deviation, effectiveness })
}

/// Whether a loop regulates speed or torque.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopMode {
    Speed,
    Torque,
}

/// `ω = η_ω ω_c + ω_o` in speed mode or `T = η_T T_c + T_o` in torque mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopOutputFrame<T> {
    pub mode: LoopMode,
    effectiveness: T,
    /// rad/s in speed mode, N·m in torque mode.
    pub offset: T,
}

impl<T: Real> LoopOutputFrame<T> {
    pub fn new(mode: LoopMode, effectiveness: T, offset: T) -> Result<Self, EmVsdError> {
        if !(effectiveness >= T::zero() && effectiveness <= T::one()) {
            return Err(EmVsdError::EffectivenessOutOfRange(effectiveness.as_f64()));
        }
        Ok(Self { mode, effectiveness, offset })
    }

    pub fn nominal(mode: LoopMode) -> Self {
        Self { mode, effectiveness: T::one(), offset: T::zero() }
    }

    pub fn effectiveness(&self) -> T {
        self.effectiveness
    }

    pub fn output(&self, command: T) -> T {
        faulty_loop_output(self, command)
    }
}

pub fn faulty_loop_output<T: Real>(frame: &LoopOutputFrame<T>, command: T) -> T {
    frame.effectiveness * command + frame.offset
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn derivative_is_linear(i in -5.0..5.0f64, w in -500.0..500.0f64, v in -24.0..24.0f64,
                                tl in -0.1..0.1f64, alpha in -3.0..3.0f64) {
            let p = MotorParams::<f64>::default();
            let f1 = motor_derivative(&p, &MotorState { current: i, speed: w }, v, tl);
            let f2 = motor_derivative(&p, &MotorState { current: alpha * i, speed: alpha * w }, alpha * v, alpha * tl);
            prop_assert!((f2.current - alpha * f1.current).abs() <= 1e-9 * (1.0 + f1.current.abs()));
            prop_assert!((f2.speed - alpha * f1.speed).abs() <= 1e-9 * (1.0 + f1.speed.abs()));
        }

        #[test]
        fn nominal_frame_is_identity(cmd in -1e6..1e6f64) {
            let f = LoopOutputFrame::nominal(LoopMode::Speed);
            prop_assert_eq!(faulty_loop_output(&f, cmd), cmd);
        }
    }
}
