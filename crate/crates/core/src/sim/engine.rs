use crate::control::{clamp_command, pd_command, PdGains};
use crate::math::{quat_error, EulerAngles, Quaternion, Real, Vec3};

use super::{spacecraft_derivative, Actuator, ActuatorEval, Quantity, SimError, SpacecraftParams};

/// Source of the actuator commands.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlLaw<T> {
    /// Saturated PD on the attitude error, allocated to the actuator.
    Pd(PdGains<T>),
    /// Constant native actuator commands.
    OpenLoop(Vec<T>),
}

/// Everything needed for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub spacecraft: SpacecraftParams<T>,
    pub actuator: Actuator<T>,
    pub control: ControlLaw<T>,
    pub dt: T,
    pub duration: T,
    pub initial_attitude: Quaternion<T>,
    pub initial_rate: Vec3<T>,
    pub target: Quaternion<T>,
    /// Overrides the actuator's initial integrated state.
    pub initial_actuator_state: Option<Vec<T>>,
    /// Evaluate devices without any fault profile.
    pub bypass_faults: bool,
}

impl<T: Real> Scenario<T> {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(SimError::InvalidStep(self.dt.as_f64()));
        }
        if !(self.duration >= T::zero() && self.duration.is_finite()) {
            return Err(SimError::invalid("sim.duration", "must be finite and >= 0"));
        }
        self.initial_attitude.check_unit()?;
        self.target.check_unit()?;
        if !self.initial_rate.is_finite() {
            return Err(SimError::invalid("sim.initial_rate", "must be finite"));
        }
        self.actuator.validate()?;
        if let Some(s) = &self.initial_actuator_state {
            let n = self.actuator.initial_state().len();
            if s.len() != n {
                return Err(SimError::invalid("initial actuator state", "wrong length for the actuator"));
            }
        }
        match &self.control {
            ControlLaw::Pd(g) => {
                g.validate()?;
                if !self.actuator.supports_closed_loop() {
                    return Err(SimError::Unsupported { actuator: self.actuator.kind(), feature: "pd control" });
                }
            }
            ControlLaw::OpenLoop(cmd) => {
                if cmd.len() != self.actuator.command_len() {
                    return Err(SimError::invalid(
                        "controller.command",
                        "length must match the actuator's command vector",
                    ));
                }
                if cmd.iter().any(|c| !c.is_finite()) {
                    return Err(SimError::invalid("controller.command", "must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Number of integration steps, `round(duration / dt)`.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round().to_usize().unwrap_or(0)
    }

    pub fn initial_state(&self) -> SimState<T> {
        SimState {
            t: T::zero(),
            q: self.initial_attitude,
            omega: self.initial_rate,
            actuator: self.initial_actuator_state.clone().unwrap_or_else(|| self.actuator.initial_state()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState<T> {
    pub t: T,
    pub q: Quaternion<T>,
    pub omega: Vec3<T>,
    pub actuator: Vec<T>,
}

impl<T: Real> SimState<T> {
    fn is_finite(&self) -> bool {
        self.q.is_finite() && self.omega.is_finite() && self.actuator.iter().all(|x| x.is_finite())
    }
}

struct Rate<T> {
    q: Quaternion<T>,
    omega: Vec3<T>,
    actuator: Vec<T>,
}

fn advance<T: Real>(s: &SimState<T>, k: &Rate<T>, h: T) -> SimState<T> {
    SimState {
        t: s.t + h,
        q: s.q.lincomb(T::one(), &k.q, h),
        omega: s.omega + k.omega * h,
        actuator: s.actuator.iter().zip(&k.actuator).map(|(&x, &d)| x + d * h).collect(),
    }
}

fn derivative<T: Real>(sc: &Scenario<T>, s: &SimState<T>, cmd: &[T]) -> Result<(Rate<T>, ActuatorEval<T>), SimError> {
    let eval = sc.actuator.evaluate(s.t, &s.actuator, cmd, sc.bypass_faults)?;
    let (q, omega) = spacecraft_derivative(&sc.spacecraft, &s.q, &s.omega, &eval.body_torque, &eval.momentum);
    Ok((Rate { q, omega, actuator: eval.state_rate.clone() }, eval))
}

/// One classical RK4 step with `cmd` held over the step. Fault profiles are
/// evaluated at each stage time; the quaternion is renormalized at the end.
pub fn step_rk4<T: Real>(sc: &Scenario<T>, s: &SimState<T>, cmd: &[T], dt: T) -> Result<SimState<T>, SimError> {
    if !(dt > T::zero()) {
        return Err(SimError::InvalidStep(dt.as_f64()));
    }
    let half = dt * T::half();
    let (k1, _) = derivative(sc, s, cmd)?;
    let (k2, _) = derivative(sc, &advance(s, &k1, half), cmd)?;
    let (k3, _) = derivative(sc, &advance(s, &k2, half), cmd)?;
    let (k4, _) = derivative(sc, &advance(s, &k3, dt), cmd)?;
    let six = T::lit(6.0);
    let (a, b) = (dt / six, dt / T::lit(3.0));
    let q = s.q.lincomb(T::one(), &k1.q, a).lincomb(T::one(), &k2.q, b).lincomb(T::one(), &k3.q, b).lincomb(
        T::one(),
        &k4.q,
        a,
    );
    let omega = s.omega + k1.omega * a + k2.omega * b + k3.omega * b + k4.omega * a;
    let actuator = (0..s.actuator.len())
        .map(|i| s.actuator[i] + k1.actuator[i] * a + k2.actuator[i] * b + k3.actuator[i] * b + k4.actuator[i] * a)
        .collect();
    Ok(SimState { t: s.t + dt, q: q.normalized(), omega, actuator })
}

/// One telemetry row, all in SI units except where named.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRecord<T> {
    pub t: T,
    /// Attitude error as 3-2-1 Euler angles, degrees.
    pub euler_deg: [T; 3],
    pub rate_degps: [T; 3],
    /// Desired body torque, zero for open-loop runs.
    pub command: Vec3<T>,
    /// Delivered body torque.
    pub torque: Vec3<T>,
    pub actuator_state: Vec<T>,
    pub actuator_output: Vec<T>,
    pub unit_momenta: Vec<T>,
    pub total_momentum: Vec3<T>,
    pub singularity: Option<T>,
    /// `(η, offset)` for every loop in [`SimLog::loop_labels`] order.
    pub loops: Vec<(T, T)>,
    pub quaternion: Quaternion<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimLog<T> {
    pub actuator_kind: &'static str,
    pub state_columns: Vec<(String, Quantity)>,
    pub output_columns: Vec<(String, Quantity)>,
    pub loop_labels: Vec<String>,
    pub records: Vec<LogRecord<T>>,
}

fn control_step<T: Real>(sc: &Scenario<T>, s: &SimState<T>) -> Result<(Vec3<T>, Vec<T>), SimError> {
    match &sc.control {
        ControlLaw::Pd(g) => {
            let qe = quat_error(&s.q, &sc.target)?;
            let u = clamp_command(&pd_command(sc.spacecraft.inertia(), &qe, &s.omega, g), g);
            Ok((u, sc.actuator.allocate(s.t, &s.actuator, &u)?))
        }
        ControlLaw::OpenLoop(cmd) => Ok((Vec3::zeros(), cmd.clone())),
    }
}

fn record<T: Real>(
    sc: &Scenario<T>,
    s: &SimState<T>,
    u: Vec3<T>,
    eval: ActuatorEval<T>,
) -> Result<LogRecord<T>, SimError> {
    let qe = quat_error(&s.q, &sc.target)?;
    let loops = sc
        .actuator
        .loops()
        .iter()
        .map(
            |(_, p)| if sc.bypass_faults { (T::one(), T::zero()) } else { (p.effectiveness_at(s.t), p.offset_at(s.t)) },
        )
        .collect();
    Ok(LogRecord {
        t: s.t,
        euler_deg: EulerAngles::from_quaternion(&qe).to_degrees(),
        rate_degps: s.omega.to_array().map(|w| w.to_degrees()),
        command: u,
        torque: eval.body_torque,
        actuator_state: s.actuator.clone(),
        actuator_output: eval.outputs,
        unit_momenta: eval.unit_momenta,
        total_momentum: sc.spacecraft.total_momentum(&s.omega, &eval.momentum),
        singularity: sc.actuator.singularity(&s.actuator),
        loops,
        quaternion: s.q,
    })
}

/// Runs the closed loop from `t = 0` to the configured duration. The log has
/// one row per step plus the initial row; row `k` holds the state at `k·dt`
/// and the command applied over the following step.
pub fn run_scenario<T: Real>(sc: &Scenario<T>) -> Result<SimLog<T>, SimError> {
    sc.validate()?;
    let n = sc.steps();
    let mut log = SimLog {
        actuator_kind: sc.actuator.kind(),
        state_columns: sc.actuator.state_columns(),
        output_columns: sc.actuator.output_columns(),
        loop_labels: sc.actuator.loops().into_iter().map(|(l, _)| l).collect(),
        records: Vec::with_capacity(n + 1),
    };
    let mut s = sc.initial_state();
    for k in 0..=n {
        s.t = T::from_usize(k).expect("step index fits scalar") * sc.dt;
        let (u, cmd) = control_step(sc, &s)?;
        let eval = sc.actuator.evaluate(s.t, &s.actuator, &cmd, sc.bypass_faults)?;
        log.records.push(record(sc, &s, u, eval)?);
        if k == n {
            break;
        }
        let next = step_rk4(sc, &s, &cmd, sc.dt)?;
        if !next.is_finite() {
            return Err(SimError::NumericalAbort { step: k + 1, time: (s.t + sc.dt).as_f64() });
        }
        s = next;
    }
    Ok(log)
}
