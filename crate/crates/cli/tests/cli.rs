use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use medfault::scenario::{parse_config, read_csv};

fn medfault(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medfault")).args(args).output().expect("spawn medfault")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_preset(name: &str, out: &Path) -> String {
    let o = medfault(&["run", name, "--out", out.to_str().unwrap(), "--no-plots"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    fs::read_to_string(out.join(format!("{name}.csv"))).unwrap()
}

const NOMINAL: &str = r#"
name = "short_nominal"
[actuator]
type = "rw"
[sim]
duration = 60.0
"#;

#[test]
fn lists_every_preset() {
    let o = medfault(&["list-presets"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["fig5a_loop_fa", "fig9_rw_fb", "fig13_sgcmg_rotor", "fig15_sgcmg_both"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn shown_preset_is_valid_toml() {
    let o = medfault(&["show-preset", "fig13_sgcmg_rotor"]);
    assert_eq!(code(&o), 0);
    let cfg = parse_config(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(cfg.faults.len(), 2);
    assert_eq!(code(&medfault(&["show-preset", "fig99"])), 2);
}

#[test]
fn nominal_run_writes_converging_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("nominal.toml");
    fs::write(&cfg, NOMINAL).unwrap();
    let o = medfault(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--no-plots"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("short_nominal.csv")).unwrap();
    assert!(text.starts_with("t_s,roll_deg,pitch_deg,yaw_deg,wx_degps,wy_degps,wz_degps,"));
    assert!(!text.contains('\r'));
    let tel = read_csv(&text).unwrap();
    assert_eq!(tel.rows.len(), 6001);
    assert!(tel.rows.iter().all(|r| r.len() == tel.columns.len()));
    let t = tel.column("t_s").unwrap();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    let last = tel.rows.last().unwrap();
    for c in ["roll_deg", "pitch_deg", "yaw_deg"] {
        assert!(last[tel.column_index(c).unwrap()].abs() < 0.1, "{c} did not converge");
    }
    assert!(!dir.path().join("short_nominal_attitude.svg").exists());
}

#[test]
fn plots_one_file_per_panel() {
    let dir = tempfile::tempdir().unwrap();
    let o = medfault(&["run", "dgcmg_open_loop", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for panel in ["attitude", "rate", "torque", "momentum", "gimbal_angle", "gimbal_rate"] {
        let svg = fs::read_to_string(dir.path().join(format!("dgcmg_open_loop_{panel}.svg"))).unwrap();
        assert!(svg.starts_with("<svg"), "{panel}");
    }
    assert!(!dir.path().join("dgcmg_open_loop_singularity.svg").exists());
}

#[test]
fn total_wheel_failure_diverges_in_yaw() {
    let dir = tempfile::tempdir().unwrap();
    let tel = read_csv(&run_preset("fig9_rw_fb", dir.path())).unwrap();
    let wz = tel.column("wz_degps").unwrap();
    // A constant spin about the uncontrolled axis keeps the yaw error moving.
    assert!(wz.last().unwrap().abs() > 1.0);
    let roll = tel.column("roll_deg").unwrap();
    assert!(roll.last().unwrap().abs() < 0.1);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run_preset("fig13_sgcmg_rotor", a.path()), run_preset("fig13_sgcmg_rotor", b.path()));
    // Overwriting in place gives the same bytes too.
    assert_eq!(run_preset("fig13_sgcmg_rotor", a.path()), run_preset("fig13_sgcmg_rotor", b.path()));
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = \"bad\"\n[actuator]\ntype = \"rw\"\n[sim]\ndt = -0.01\n").unwrap();
    let o = medfault(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sim.dt"), "{}", stderr(&o));

    fs::write(&bad, "name = \"bad\"\ncolour = 1\n[actuator]\ntype = \"rw\"\n").unwrap();
    let o = medfault(&["run", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));

    let fault = "[[faults]]\nunit = 3\nloop = \"wheel\"\ncondition = \"Fa\"\neffectiveness = 0.75\noffset = 0.04\n";
    fs::write(&bad, format!("name = \"bad\"\n[actuator]\ntype = \"rw\"\n{fault}")).unwrap();
    assert_eq!(code(&medfault(&["validate", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&medfault(&["validate", "no_such_preset"])), 2);
}

#[test]
fn valid_config_validates() {
    let o = medfault(&["validate", "fig15_sgcmg_both"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("4 faults"));
}

#[test]
fn numerical_abort_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("blowup.toml");
    fs::write(
        &cfg,
        "name = \"blowup\"\n[actuator]\ntype = \"rw\"\n[sim]\nduration = 1.0\ninitial_rate_degps = [1e300, 1e300, -1e300]\n",
    )
    .unwrap();
    let o = medfault(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("step 1"), "{}", stderr(&o));
    assert!(!dir.path().join("blowup.csv").exists());
}

#[test]
fn io_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    fs::write(&file, "x").unwrap();
    let out = file.join("sub");
    assert_eq!(code(&medfault(&["run", "fig5a_loop_fa", "--out", out.to_str().unwrap()])), 1);
    assert_eq!(code(&medfault(&["run", dir.path().join("missing.toml").to_str().unwrap()])), 1);
}

#[test]
fn batch_isolates_failures() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["one", "two", "three"] {
        fs::write(
            dir.path().join(format!("{name}.toml")),
            NOMINAL.replace("short_nominal", name).replace("60.0", "1.0"),
        )
        .unwrap();
    }
    fs::write(dir.path().join("broken.toml"), "name = \"broken\"\n").unwrap();
    let out = dir.path().join("results");
    let o = medfault(&["batch", dir.path().to_str().unwrap(), "--out", out.to_str().unwrap(), "--no-plots"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("broken.toml"));
    for name in ["one", "two", "three"] {
        let tel = read_csv(&fs::read_to_string(out.join(format!("{name}.csv"))).unwrap()).unwrap();
        assert_eq!(tel.rows.len(), 101);
    }
    assert!(String::from_utf8(o.stdout).unwrap().contains("3/4 scenarios succeeded"));
}
