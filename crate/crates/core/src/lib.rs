//! Fault models for momentum exchange devices (reaction wheels and control
//! moment gyros) built from cascaded motor/drive loops, and a deterministic
//! closed-loop attitude simulator that exercises them.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod control;
pub mod devices;
pub mod em_vsd;
pub mod fault;
pub mod math;
pub mod scenario;
pub mod sim;

/// Double-precision aliases.
pub type Vector3 = math::Vec3<f64>;
pub type Matrix3 = math::Mat3<f64>;
pub type Quaternion = math::Quaternion<f64>;
pub type FaultProfile = fault::LoopFaultProfile<f64>;
pub type SimulationScenario = sim::Scenario<f64>;
pub type SimulationLog = sim::SimLog<f64>;
