use serde::{Deserialize, Serialize};

use crate::control::{PdGains, SteeringParams};
use crate::devices::{default_skew, DoubleGimbalFrame, RwCluster, SgcmgPyramid};
use crate::fault::{condition_profile, LoopFaultProfile, WorkingCondition};
use crate::math::{EulerAngles, Mat3, Vec3};
use crate::sim::{Actuator, ControlLaw, DgVscmgSetup, DgcmgSetup, LoopKind, Scenario, SgVscmgSetup, SpacecraftParams};

use super::ScenarioError;

/// Top-level scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub spacecraft: SpacecraftConfig,
    pub actuator: ActuatorConfig,
    #[serde(default)]
    pub controller: ControllerConfig,
    #[serde(default)]
    pub faults: Vec<FaultConfig>,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InertiaConfig {
    Diagonal([f64; 3]),
    Full([[f64; 3]; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacecraftConfig {
    /// kg·m², diagonal or full matrix.
    #[serde(default = "default_inertia")]
    pub inertia: InertiaConfig,
    /// Constant disturbance torque, N·m.
    #[serde(default)]
    pub disturbance: [f64; 3],
}

fn default_inertia() -> InertiaConfig {
    InertiaConfig::Diagonal([120.0, 100.0, 80.0])
}

impl Default for SpacecraftConfig {
    fn default() -> Self {
        Self { inertia: default_inertia(), disturbance: [0.0; 3] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ActuatorConfig {
    Rw(RwConfig),
    SgcmgPyramid(SgcmgConfig),
    Dgcmg(DgcmgConfig),
    Sgvscmg(SgVscmgConfig),
    Dgvscmg(DgVscmgConfig),
}

impl ActuatorConfig {
    pub fn type_name(&self) -> &'static str {
        match self {
            Self::Rw(_) => "rw",
            Self::SgcmgPyramid(_) => "sgcmg_pyramid",
            Self::Dgcmg(_) => "dgcmg",
            Self::Sgvscmg(_) => "sgvscmg",
            Self::Dgvscmg(_) => "dgvscmg",
        }
    }

    fn default_torque_limit(&self) -> f64 {
        match self {
            Self::Rw(rw) => rw.torque_limit,
            _ => 10.0,
        }
    }

    /// Conversion from config units to native command units, per entry.
    fn command_scales(&self, n: usize) -> Vec<f64> {
        let deg = 1f64.to_radians();
        match self {
            Self::Rw(_) => vec![1.0; n],
            Self::SgcmgPyramid(_) | Self::Dgcmg(_) => vec![deg; n],
            Self::Sgvscmg(_) | Self::Dgvscmg(_) => (0..n).map(|i| if i == 0 { 1.0 } else { deg }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RwConfig {
    /// Wheel spin axes; identity installation when omitted.
    #[serde(default)]
    pub spin_axes: Option<Vec<[f64; 3]>>,
    #[serde(default = "default_wheel_inertia")]
    pub wheel_inertia: f64,
    #[serde(default = "default_rw_torque")]
    pub torque_limit: f64,
}

fn default_wheel_inertia() -> f64 {
    0.01
}
fn default_rw_torque() -> f64 {
    0.4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgcmgConfig {
    #[serde(default = "default_skew_deg")]
    pub skew_deg: f64,
    #[serde(default = "default_rotor_inertia")]
    pub rotor_inertia: f64,
    /// rad/s
    #[serde(default = "default_rotor_speed")]
    pub rotor_speed: f64,
    /// rad/s, defaults to twice `rotor_speed`.
    #[serde(default)]
    pub rotor_speed_limit: Option<f64>,
    #[serde(default = "default_gimbal_rate_limit")]
    pub gimbal_rate_limit_degps: f64,
    #[serde(default)]
    pub initial_gimbal_deg: [f64; 4],
}

fn default_skew_deg() -> f64 {
    default_skew::<f64>().to_degrees()
}
fn default_rotor_inertia() -> f64 {
    0.1
}
fn default_rotor_speed() -> f64 {
    100.0
}
fn default_gimbal_rate_limit() -> f64 {
    100.0
}
fn default_accel_limit() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GimbalFrameConfig {
    #[serde(default = "z_axis")]
    pub outer_axis: [f64; 3],
    #[serde(default = "y_axis")]
    pub inner_axis: [f64; 3],
    #[serde(default = "x_axis")]
    pub spin_axis: [f64; 3],
    #[serde(default)]
    pub initial_inner_deg: f64,
    #[serde(default)]
    pub initial_outer_deg: f64,
}

impl Default for GimbalFrameConfig {
    fn default() -> Self {
        Self {
            outer_axis: z_axis(),
            inner_axis: y_axis(),
            spin_axis: x_axis(),
            initial_inner_deg: 0.0,
            initial_outer_deg: 0.0,
        }
    }
}

impl GimbalFrameConfig {
    fn frame(&self) -> DoubleGimbalFrame<f64> {
        DoubleGimbalFrame {
            outer_axis: Vec3::from_array(self.outer_axis),
            inner_axis: Vec3::from_array(self.inner_axis),
            spin_axis: Vec3::from_array(self.spin_axis),
            inner_angle: self.initial_inner_deg.to_radians(),
            outer_angle: self.initial_outer_deg.to_radians(),
        }
    }
}

fn x_axis() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}
fn y_axis() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}
fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgcmgConfig {
    /// `[actuator.frame]`
    #[serde(default)]
    pub frame: GimbalFrameConfig,
    #[serde(default = "default_rotor_inertia")]
    pub rotor_inertia: f64,
    #[serde(default = "default_rotor_speed")]
    pub rotor_speed: f64,
    #[serde(default)]
    pub rotor_speed_limit: Option<f64>,
    #[serde(default = "default_gimbal_rate_limit")]
    pub gimbal_rate_limit_degps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgVscmgConfig {
    #[serde(default = "z_axis")]
    pub gimbal_axis: [f64; 3],
    #[serde(default = "x_axis")]
    pub spin_axis: [f64; 3],
    #[serde(default)]
    pub initial_gimbal_deg: f64,
    #[serde(default = "default_rotor_inertia")]
    pub rotor_inertia: f64,
    /// Initial rotor speed, rad/s.
    #[serde(default = "default_rotor_speed")]
    pub rotor_speed: f64,
    /// rad/s²
    #[serde(default = "default_accel_limit")]
    pub accel_limit: f64,
    #[serde(default = "default_gimbal_rate_limit")]
    pub gimbal_rate_limit_degps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgVscmgConfig {
    /// `[actuator.frame]`
    #[serde(default)]
    pub frame: GimbalFrameConfig,
    #[serde(default = "default_rotor_inertia")]
    pub rotor_inertia: f64,
    #[serde(default = "default_rotor_speed")]
    pub rotor_speed: f64,
    #[serde(default = "default_accel_limit")]
    pub accel_limit: f64,
    #[serde(default = "default_gimbal_rate_limit")]
    pub gimbal_rate_limit_degps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ControlMode {
    #[default]
    Pd,
    OpenLoop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    #[serde(default)]
    pub mode: ControlMode,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_rate_limit")]
    pub rate_limit_degps: f64,
    /// N·m per axis; 0.4 for wheels, 10 for CMGs when omitted.
    #[serde(default)]
    pub torque_limit: Option<f64>,
    /// Native open-loop commands: N·m for wheels, deg/s for gimbals,
    /// rad/s² for the VSCMG spin acceleration (first entry).
    #[serde(default)]
    pub command: Option<Vec<f64>>,
    #[serde(default)]
    pub steering: SteeringConfig,
}

fn default_k() -> f64 {
    9.54
}
fn default_c() -> f64 {
    5.5
}
fn default_rate_limit() -> f64 {
    4.0
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            mode: ControlMode::Pd,
            k: default_k(),
            c: default_c(),
            rate_limit_degps: default_rate_limit(),
            torque_limit: None,
            command: None,
            steering: SteeringConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteeringConfig {
    #[serde(default = "default_lambda0")]
    pub lambda0: f64,
    #[serde(default = "default_decay_gain")]
    pub decay_gain: f64,
    #[serde(default = "default_eps_amp")]
    pub epsilon_amplitude: f64,
    /// rad/s
    #[serde(default = "default_frequency")]
    pub frequency: f64,
    #[serde(default = "default_phases")]
    pub phases_deg: [f64; 3],
}

fn default_lambda0() -> f64 {
    0.01
}
fn default_decay_gain() -> f64 {
    10.0
}
fn default_eps_amp() -> f64 {
    0.01
}
fn default_frequency() -> f64 {
    0.5 * std::f64::consts::PI
}
fn default_phases() -> [f64; 3] {
    [0.0, 90.0, 180.0]
}

impl Default for SteeringConfig {
    fn default() -> Self {
        Self {
            lambda0: default_lambda0(),
            decay_gain: default_decay_gain(),
            epsilon_amplitude: default_eps_amp(),
            frequency: default_frequency(),
            phases_deg: default_phases(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultConfig {
    /// 1-based unit index.
    #[serde(default = "one")]
    pub unit: usize,
    #[serde(rename = "loop")]
    pub loop_kind: LoopKind,
    pub condition: WorkingCondition,
    /// Final effectiveness; required for Fa and Fc.
    #[serde(default)]
    pub effectiveness: Option<f64>,
    /// Additive bias in loop units (gimbal loops in deg/s).
    #[serde(default)]
    pub offset: Option<f64>,
    /// s
    #[serde(default)]
    pub onset: f64,
    /// 1/s; 2 for Fa/Fc, 1 otherwise.
    #[serde(default)]
    pub decay_rate: Option<f64>,
    /// s; defaults to `onset`.
    #[serde(default)]
    pub offset_onset: Option<f64>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default = "default_initial_euler")]
    pub initial_euler_deg: [f64; 3],
    #[serde(default)]
    pub initial_rate_degps: [f64; 3],
    #[serde(default)]
    pub target_euler_deg: [f64; 3],
}

fn default_dt() -> f64 {
    0.01
}
fn default_duration() -> f64 {
    100.0
}
fn default_initial_euler() -> [f64; 3] {
    [60.0, -20.0, 30.0]
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            duration: default_duration(),
            initial_euler_deg: default_initial_euler(),
            initial_rate_degps: [0.0; 3],
            target_euler_deg: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// CSV file name inside the output directory; `<name>.csv` by default.
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default = "yes")]
    pub plots: bool,
    /// Subset of CSV columns to keep (`t_s` is always written).
    #[serde(default)]
    pub columns: Option<Vec<String>>,
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { csv: None, plots: true, columns: None }
    }
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { field: field.into(), reason: reason.into() }
}

fn positive(field: &str, v: f64) -> Result<(), ScenarioError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {v}")))
    }
}

fn unit_vector(field: &str, v: [f64; 3]) -> Result<Vec3<f64>, ScenarioError> {
    let v = Vec3::from_array(v);
    if (v.norm() - 1.0).abs() > 1e-9 {
        return Err(invalid(field, "must be a unit vector"));
    }
    Ok(v)
}

impl ScenarioConfig {
    pub fn csv_name(&self) -> String {
        self.output.csv.clone().unwrap_or_else(|| format!("{}.csv", self.name))
    }

    fn actuator(&self) -> Result<Actuator<f64>, ScenarioError> {
        let steering = &self.controller.steering;
        Ok(match &self.actuator {
            ActuatorConfig::Rw(rw) => {
                positive("actuator.wheel_inertia", rw.wheel_inertia)?;
                positive("actuator.torque_limit", rw.torque_limit)?;
                let axes = match &rw.spin_axes {
                    Some(a) => {
                        a.iter().map(|&x| unit_vector("actuator.spin_axes", x)).collect::<Result<Vec<_>, _>>()?
                    }
                    None => (0..3).map(Vec3::unit).collect(),
                };
                let n = axes.len();
                let cluster =
                    RwCluster::new(axes, rw.wheel_inertia, rw.torque_limit, vec![LoopFaultProfile::nominal(); n])
                        .map_err(|e| invalid("actuator", e.to_string()))?;
                Actuator::ReactionWheels(cluster)
            }
            ActuatorConfig::SgcmgPyramid(c) => {
                positive("actuator.skew_deg", c.skew_deg)?;
                positive("actuator.rotor_inertia", c.rotor_inertia)?;
                positive("actuator.rotor_speed", c.rotor_speed)?;
                positive("actuator.gimbal_rate_limit_degps", c.gimbal_rate_limit_degps)?;
                if c.skew_deg >= 90.0 {
                    return Err(invalid("actuator.skew_deg", "must be below 90"));
                }
                let mut p = SgcmgPyramid::new(
                    c.skew_deg.to_radians(),
                    c.rotor_inertia,
                    c.rotor_speed,
                    c.gimbal_rate_limit_degps.to_radians(),
                );
                if let Some(l) = c.rotor_speed_limit {
                    positive("actuator.rotor_speed_limit", l)?;
                    p.rotor_speed_limit = l;
                }
                p.gimbal_angles = c.initial_gimbal_deg.map(f64::to_radians);
                let steering = SteeringParams {
                    lambda0: steering.lambda0,
                    decay_gain: steering.decay_gain,
                    epsilon_amplitude: steering.epsilon_amplitude,
                    frequency: steering.frequency,
                    phases: steering.phases_deg.map(f64::to_radians),
                };
                Actuator::Sgcmg { pyramid: p, steering }
            }
            ActuatorConfig::Dgcmg(c) => {
                positive("actuator.rotor_inertia", c.rotor_inertia)?;
                positive("actuator.rotor_speed", c.rotor_speed)?;
                positive("actuator.gimbal_rate_limit_degps", c.gimbal_rate_limit_degps)?;
                let limit = c.rotor_speed_limit.unwrap_or(2.0 * c.rotor_speed);
                positive("actuator.rotor_speed_limit", limit)?;
                Actuator::Dgcmg(DgcmgSetup {
                    frame: c.frame.frame(),
                    rotor_inertia: c.rotor_inertia,
                    rotor_speed: c.rotor_speed,
                    rotor_speed_limit: limit,
                    gimbal_rate_limit: c.gimbal_rate_limit_degps.to_radians(),
                    rotor: Default::default(),
                    inner: Default::default(),
                    outer: Default::default(),
                })
            }
            ActuatorConfig::Sgvscmg(c) => {
                positive("actuator.rotor_inertia", c.rotor_inertia)?;
                positive("actuator.accel_limit", c.accel_limit)?;
                positive("actuator.gimbal_rate_limit_degps", c.gimbal_rate_limit_degps)?;
                Actuator::SgVscmg(SgVscmgSetup {
                    gimbal_axis: unit_vector("actuator.gimbal_axis", c.gimbal_axis)?,
                    spin_axis: unit_vector("actuator.spin_axis", c.spin_axis)?,
                    gimbal_angle: c.initial_gimbal_deg.to_radians(),
                    rotor_inertia: c.rotor_inertia,
                    rotor_speed: c.rotor_speed,
                    accel_limit: c.accel_limit,
                    gimbal_rate_limit: c.gimbal_rate_limit_degps.to_radians(),
                    wheel: Default::default(),
                    rotor: Default::default(),
                    gimbal: Default::default(),
                })
            }
            ActuatorConfig::Dgvscmg(c) => {
                positive("actuator.rotor_inertia", c.rotor_inertia)?;
                positive("actuator.accel_limit", c.accel_limit)?;
                positive("actuator.gimbal_rate_limit_degps", c.gimbal_rate_limit_degps)?;
                Actuator::DgVscmg(DgVscmgSetup {
                    frame: c.frame.frame(),
                    rotor_inertia: c.rotor_inertia,
                    rotor_speed: c.rotor_speed,
                    accel_limit: c.accel_limit,
                    gimbal_rate_limit: c.gimbal_rate_limit_degps.to_radians(),
                    wheel: Default::default(),
                    rotor: Default::default(),
                    inner: Default::default(),
                    outer: Default::default(),
                })
            }
        })
    }

    fn fault_profile(&self, i: usize, f: &FaultConfig) -> Result<LoopFaultProfile<f64>, ScenarioError> {
        let field = format!("faults[{i}]");
        let eta = match (f.effectiveness, f.condition.fixed_effectiveness()) {
            (Some(e), _) => e,
            (None, Some(e)) => e,
            (None, None) => {
                return Err(invalid(format!("{field}.effectiveness"), format!("required for {}", f.condition)))
            }
        };
        let scale = match f.loop_kind {
            LoopKind::Gimbal | LoopKind::GimbalInner | LoopKind::GimbalOuter => 1f64.to_radians(),
            _ => 1.0,
        };
        let offset = f.offset.unwrap_or(0.0) * scale;
        if f.condition.has_offset() && f.offset.is_none() {
            return Err(invalid(format!("{field}.offset"), format!("required for {}", f.condition)));
        }
        let rate = f.decay_rate.unwrap_or_else(|| f.condition.default_decay_rate());
        condition_profile(f.condition, eta, offset, f.onset, rate, f.offset_onset.unwrap_or(f.onset))
            .map_err(|e| invalid(field, e.to_string()))
    }

    /// Validates the whole file and builds the simulation input.
    pub fn to_scenario(&self) -> Result<Scenario<f64>, ScenarioError> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(invalid("name", "must be non-empty and contain no path separators"));
        }
        let inertia = match self.spacecraft.inertia {
            InertiaConfig::Diagonal(d) => Mat3::diagonal(d),
            InertiaConfig::Full(m) => Mat3::from_rows(m),
        };
        let spacecraft = SpacecraftParams::new(inertia, Vec3::from_array(self.spacecraft.disturbance))
            .map_err(|e| invalid("spacecraft", e.to_string()))?;

        let mut actuator = self.actuator()?;
        let mut seen = Vec::new();
        for (i, f) in self.faults.iter().enumerate() {
            if f.unit == 0 {
                return Err(invalid(format!("faults[{i}].unit"), "unit indices start at 1"));
            }
            if seen.contains(&(f.unit, f.loop_kind)) {
                return Err(invalid(format!("faults[{i}]"), "only one fault event per loop"));
            }
            seen.push((f.unit, f.loop_kind));
            let profile = self.fault_profile(i, f)?;
            actuator
                .set_profile(f.loop_kind, f.unit - 1, profile)
                .map_err(|e| invalid(format!("faults[{i}]"), e.to_string()))?;
        }

        let c = &self.controller;
        let control = match c.mode {
            ControlMode::Pd => {
                if c.command.is_some() {
                    return Err(invalid("controller.command", "only valid with mode = \"open_loop\""));
                }
                let limit = c.torque_limit.unwrap_or_else(|| self.actuator.default_torque_limit());
                positive("controller.torque_limit", limit)?;
                positive("controller.k", c.k)?;
                positive("controller.c", c.c)?;
                positive("controller.rate_limit_degps", c.rate_limit_degps)?;
                let w = c.rate_limit_degps.to_radians();
                ControlLaw::Pd(PdGains {
                    k: c.k,
                    c: c.c,
                    rate_limit: Vec3::new(w, w, w),
                    torque_limit: Vec3::new(limit, limit, limit),
                })
            }
            ControlMode::OpenLoop => {
                let cmd = c.command.clone().ok_or_else(|| invalid("controller.command", "required for open_loop"))?;
                let scales = self.actuator.command_scales(cmd.len());
                ControlLaw::OpenLoop(cmd.iter().zip(scales).map(|(x, s)| x * s).collect())
            }
        };

        let s = &self.sim;
        positive("sim.dt", s.dt)?;
        if !(s.duration >= 0.0 && s.duration.is_finite()) {
            return Err(invalid("sim.duration", "must be finite and >= 0"));
        }
        let euler = |a: [f64; 3]| EulerAngles::from_degrees(a[0], a[1], a[2]).to_quaternion();
        let scenario = Scenario {
            spacecraft,
            actuator,
            control,
            dt: s.dt,
            duration: s.duration,
            initial_attitude: euler(s.initial_euler_deg),
            initial_rate: Vec3::from_array(s.initial_rate_degps.map(f64::to_radians)),
            target: euler(s.target_euler_deg),
            initial_actuator_state: None,
            bypass_faults: false,
        };
        scenario.validate().map_err(|e| invalid(e_field(&e), e.to_string()))?;
        if let Some(cols) = &self.output.columns {
            let header = super::telemetry::header(&scenario.actuator);
            if let Some(bad) = cols.iter().find(|c| !header.contains(c)) {
                return Err(invalid("output.columns", format!("unknown column {bad:?}")));
            }
        }
        Ok(scenario)
    }
}

fn e_field(e: &crate::sim::SimError) -> String {
    match e {
        crate::sim::SimError::InvalidParameter { field, .. } => field.clone(),
        crate::sim::SimError::InvalidStep(_) => "sim.dt".into(),
        crate::sim::SimError::Unsupported { .. } => "controller.mode".into(),
        _ => "scenario".into(),
    }
}
