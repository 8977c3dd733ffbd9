//! TOML scenario files, named presets, batch runs and CSV telemetry.

mod config;
mod telemetry;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{
    ActuatorConfig, ControlMode, ControllerConfig, DgVscmgConfig, DgcmgConfig, FaultConfig, GimbalFrameConfig,
    InertiaConfig, OutputConfig, RwConfig, ScenarioConfig, SgVscmgConfig, SgcmgConfig, SimConfig, SpacecraftConfig,
    SteeringConfig,
};
pub use telemetry::{header, read_csv, Telemetry};

use crate::sim::{run_scenario, SimError, SimLog};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl ScenarioError {
    /// Process exit code: 1 I/O, 2 bad input, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } => 1,
            Self::Sim(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::Io { path: path.display().to_string(), message: e.to_string() }
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    toml::from_str(text).map_err(|e| ScenarioError::Parse(e.message().to_string()))
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| ScenarioError::io(path, e))?;
    parse_config(&text)
}

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        const PRESETS: &[(&str, &str)] = &[$(($name, include_str!(concat!("../../presets/", $name, ".toml")))),*];
    };
}

presets!(
    "fig5a_loop_fa",
    "fig5b_loop_fb",
    "fig5c_loop_fc",
    "fig5d_loop_fd",
    "fig7_rw_nominal",
    "fig8_rw_fa",
    "fig9_rw_fb",
    "fig10_rw_fc",
    "fig11_rw_fd",
    "fig12_sgcmg_nominal",
    "fig13_sgcmg_rotor",
    "fig14_sgcmg_gimbal",
    "fig15_sgcmg_both",
    "dgcmg_open_loop",
    "sgvscmg_open_loop",
);

pub fn list_presets() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn preset(name: &str) -> Result<ScenarioConfig, ScenarioError> {
    let src = preset_source(name)
        .ok_or_else(|| ScenarioError::Invalid { field: "preset".into(), reason: format!("unknown preset {name:?}") })?;
    parse_config(src)
}

/// Runs one scenario in memory.
pub fn run_config(cfg: &ScenarioConfig) -> Result<(Telemetry, SimLog<f64>), ScenarioError> {
    let scenario = cfg.to_scenario()?;
    let log = run_scenario(&scenario)?;
    Ok((Telemetry::new(&scenario.actuator, &log), log))
}

/// CSV text exactly as written to disk.
pub fn csv_text(cfg: &ScenarioConfig, tel: &Telemetry) -> Result<String, ScenarioError> {
    let mut buf = Vec::new();
    tel.write_csv(&mut buf, cfg.output.columns.as_deref())?;
    String::from_utf8(buf).map_err(|e| ScenarioError::Io { path: "<csv>".into(), message: e.to_string() })
}

/// Runs a scenario and writes its CSV into `out_dir`. Returns the CSV path.
pub fn run_to_dir(cfg: &ScenarioConfig, out_dir: &Path) -> Result<(PathBuf, Telemetry), ScenarioError> {
    let (tel, _) = run_config(cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| ScenarioError::io(out_dir, e))?;
    let path = out_dir.join(cfg.csv_name());
    let text = csv_text(cfg, &tel)?;
    fs::write(&path, text).map_err(|e| ScenarioError::io(&path, e))?;
    Ok((path, tel))
}

/// Outcome of one file in a batch.
#[derive(Debug)]
pub struct BatchItem {
    pub source: PathBuf,
    pub result: Result<(ScenarioConfig, Telemetry), ScenarioError>,
}

/// Scenario files (`*.toml`) in a directory, sorted by name.
pub fn batch_files(dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| ScenarioError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every scenario file in parallel. A failing file does not stop the
/// others; results come back in file-name order.
pub fn run_batch(files: &[PathBuf]) -> Vec<BatchItem> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(files.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<BatchItem>>> = files.iter().map(|_| Default::default()).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                let result = load_config(path).and_then(|cfg| run_config(&cfg).map(|(tel, _)| (cfg, tel)));
                *slots[i].lock().unwrap() = Some(BatchItem { source: path.clone(), result });
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().expect("every slot filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fault::WorkingCondition;
    use crate::sim::{Actuator, LoopKind};

    const MINIMAL: &str = r#"
name = "minimal"
[actuator]
type = "rw"
"#;

    #[test]
    fn empty_fault_list_is_all_nominal() {
        let cfg = parse_config(MINIMAL).unwrap();
        let sc = cfg.to_scenario().unwrap();
        for (label, p) in sc.actuator.loops() {
            assert!(p.is_nominal(), "{label}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse_config(&format!("{MINIMAL}wheel_mass = 2.0\n")).unwrap_err();
        assert!(matches!(e, ScenarioError::Parse(_)), "{e}");
        let e = parse_config("name = \"x\"\nbogus = 1\n[actuator]\ntype = \"rw\"\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = parse_config("name = \"x\"\n[actuator]\ntype = \"warp_drive\"\n").unwrap_err();
        assert!(matches!(e, ScenarioError::Parse(_)));
    }

    #[test]
    fn offset_on_fa_is_rejected() {
        let text = format!(
            "{MINIMAL}[[faults]]\nunit = 3\nloop = \"wheel\"\ncondition = \"Fa\"\neffectiveness = 0.75\noffset = 0.04\n"
        );
        let e = parse_config(&text).unwrap().to_scenario().unwrap_err();
        assert_eq!(e.exit_code(), 2, "{e}");
    }

    #[test]
    fn fa_without_effectiveness_is_rejected() {
        let text = format!("{MINIMAL}[[faults]]\nloop = \"wheel\"\ncondition = \"Fa\"\n");
        assert!(parse_config(&text).unwrap().to_scenario().is_err());
    }

    #[test]
    fn bad_unit_and_duplicate_loop() {
        let f = "[[faults]]\nunit = 0\nloop = \"wheel\"\ncondition = \"Fb\"\n";
        assert!(parse_config(&format!("{MINIMAL}{f}")).unwrap().to_scenario().is_err());
        let f = "[[faults]]\nunit = 4\nloop = \"wheel\"\ncondition = \"Fb\"\n";
        assert!(parse_config(&format!("{MINIMAL}{f}")).unwrap().to_scenario().is_err());
        let f = "[[faults]]\nloop = \"wheel\"\ncondition = \"Fb\"\n";
        assert!(parse_config(&format!("{MINIMAL}{f}{f}")).unwrap().to_scenario().is_err());
        let f = "[[faults]]\nloop = \"gimbal\"\ncondition = \"Fb\"\n";
        assert!(parse_config(&format!("{MINIMAL}{f}")).unwrap().to_scenario().is_err());
    }

    #[test]
    fn every_preset_parses_and_validates() {
        assert!(list_presets().len() >= 13);
        for name in list_presets() {
            let cfg = preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.name, name);
            cfg.to_scenario().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn total_failure_preset_values() {
        let cfg = preset("fig9_rw_fb").unwrap();
        let f = &cfg.faults[0];
        assert_eq!((f.unit, f.loop_kind, f.condition), (3, LoopKind::Wheel, WorkingCondition::Fb));
        let sc = cfg.to_scenario().unwrap();
        let Actuator::ReactionWheels(rw) = &sc.actuator else { panic!() };
        let p = &rw.profiles()[2];
        assert_eq!(p.effectiveness_at(5.0), 1.0);
        assert!(p.effectiveness_at(30.0) < 1e-9);
        assert!(rw.profiles()[0].is_nominal());
    }

    #[test]
    fn rotor_preset_values() {
        let sc = preset("fig13_sgcmg_rotor").unwrap().to_scenario().unwrap();
        let Actuator::Sgcmg { pyramid, .. } = &sc.actuator else { panic!() };
        for i in [0, 2] {
            let p = &pyramid.rotor_profiles[i];
            assert!((p.effectiveness_at(100.0) - 0.5).abs() < 1e-9);
            assert_eq!(p.offset_at(7.9), 0.0);
            assert_eq!(p.offset_at(8.0), 2.0);
        }
        assert!(pyramid.rotor_profiles[1].is_nominal());
        assert!(pyramid.gimbal_profiles.iter().all(|p| p.is_nominal()));
    }

    #[test]
    fn gimbal_offsets_are_given_in_degrees_per_second() {
        let sc = preset("fig14_sgcmg_gimbal").unwrap().to_scenario().unwrap();
        let Actuator::Sgcmg { pyramid, .. } = &sc.actuator else { panic!() };
        assert!((pyramid.gimbal_profiles[0].offset_at(50.0) - 20f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(ScenarioError::Io { path: "x".into(), message: "y".into() }.exit_code(), 1);
        assert_eq!(ScenarioError::Sim(SimError::NumericalAbort { step: 1, time: 0.01 }).exit_code(), 3);
        assert_eq!(ScenarioError::Sim(SimError::InvalidStep(0.0)).exit_code(), 2);
    }

    #[test]
    fn csv_round_trip_and_column_subset() {
        let mut cfg = parse_config(MINIMAL).unwrap();
        cfg.sim.duration = 0.5;
        let (tel, log) = run_config(&cfg).unwrap();
        assert_eq!(tel.rows.len(), log.records.len());
        let back = read_csv(&csv_text(&cfg, &tel).unwrap()).unwrap();
        assert_eq!(back.columns, tel.columns);
        for (a, b) in back.rows.iter().flatten().zip(tel.rows.iter().flatten()) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-300));
        }
        cfg.output.columns = Some(vec!["yaw_deg".into()]);
        let sub = read_csv(&csv_text(&cfg, &tel).unwrap()).unwrap();
        assert_eq!(sub.columns, ["t_s", "yaw_deg"]);
        cfg.output.columns = Some(vec!["nonsense".into()]);
        assert!(cfg.to_scenario().is_err());
    }

    #[test]
    fn batch_isolates_failures() {
        let dir = std::env::temp_dir().join(format!("medfault-batch-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("a.toml"), MINIMAL.replace("minimal", "a") + "[sim]\nduration = 0.2\n").unwrap();
        fs::write(dir.join("b.toml"), "name = \"b\"\n").unwrap();
        fs::write(dir.join("c.toml"), MINIMAL.replace("minimal", "c") + "[sim]\nduration = 0.2\n").unwrap();
        fs::write(dir.join("notes.txt"), "ignored").unwrap();
        let files = batch_files(&dir).unwrap();
        assert_eq!(files.len(), 3);
        let out = run_batch(&files);
        assert!(out[0].result.is_ok() && out[1].result.is_err() && out[2].result.is_ok());
        fs::remove_dir_all(&dir).unwrap();
    }
}
