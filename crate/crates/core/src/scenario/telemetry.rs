use std::io::Write;

use crate::sim::{Actuator, Quantity, SimLog};

use super::ScenarioError;

fn suffix(q: Quantity) -> (&'static str, f64) {
    match q {
        Quantity::Angle => ("deg", 1f64.to_degrees()),
        Quantity::AngularRate => ("degps", 1f64.to_degrees()),
        Quantity::SpinRate => ("radps", 1.0),
        Quantity::Torque => ("Nm", 1.0),
        Quantity::AngularAcceleration => ("radps2", 1.0),
    }
}

fn loop_offset_unit(label: &str) -> (&'static str, f64) {
    if label.starts_with("gimbal") {
        ("degps", 1f64.to_degrees())
    } else if label.starts_with("rotor") {
        ("Nms", 1.0)
    } else {
        ("Nm", 1.0)
    }
}

fn momentum_labels(a: &Actuator<f64>) -> Vec<String> {
    match a {
        Actuator::ReactionWheels(rw) => (1..=rw.len()).map(|i| format!("wheel{i}_momentum_Nms")).collect(),
        Actuator::Sgcmg { .. } => (1..=4).map(|i| format!("rotor{i}_momentum_Nms")).collect(),
        _ => vec!["rotor_momentum_Nms".into()],
    }
}

/// CSV header for a run with this actuator.
pub fn header(a: &Actuator<f64>) -> Vec<String> {
    let mut h: Vec<String> = [
        "t_s",
        "roll_deg",
        "pitch_deg",
        "yaw_deg",
        "wx_degps",
        "wy_degps",
        "wz_degps",
        "ux_Nm",
        "uy_Nm",
        "uz_Nm",
        "taux_Nm",
        "tauy_Nm",
        "tauz_Nm",
        "hx_Nms",
        "hy_Nms",
        "hz_Nms",
    ]
    .map(String::from)
    .to_vec();
    for (name, q) in a.state_columns().into_iter().chain(a.output_columns()) {
        h.push(format!("{name}_{}", suffix(q).0));
    }
    h.extend(momentum_labels(a));
    if matches!(a, Actuator::Sgcmg { .. }) {
        h.push("singularity".into());
    }
    for (label, _) in a.loops() {
        h.push(format!("{label}_eta"));
        h.push(format!("{label}_offset_{}", loop_offset_unit(&label).0));
    }
    h
}

/// Log flattened into named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Telemetry {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Telemetry {
    pub fn new(actuator: &Actuator<f64>, log: &SimLog<f64>) -> Self {
        let columns = header(actuator);
        let state_scale: Vec<f64> = actuator.state_columns().iter().map(|(_, q)| suffix(*q).1).collect();
        let output_scale: Vec<f64> = actuator.output_columns().iter().map(|(_, q)| suffix(*q).1).collect();
        let offset_scale: Vec<f64> = log.loop_labels.iter().map(|l| loop_offset_unit(l).1).collect();
        let rows = log
            .records
            .iter()
            .map(|r| {
                let mut row = Vec::with_capacity(columns.len());
                row.push(r.t);
                row.extend(r.euler_deg);
                row.extend(r.rate_degps);
                row.extend(r.command.to_array());
                row.extend(r.torque.to_array());
                row.extend(r.total_momentum.to_array());
                row.extend(r.actuator_state.iter().zip(&state_scale).map(|(x, s)| x * s));
                row.extend(r.actuator_output.iter().zip(&output_scale).map(|(x, s)| x * s));
                row.extend(&r.unit_momenta);
                if let Some(s) = r.singularity {
                    row.push(s);
                }
                for ((eta, off), s) in r.loops.iter().zip(&offset_scale) {
                    row.push(*eta);
                    row.push(off * s);
                }
                debug_assert_eq!(row.len(), columns.len());
                row
            })
            .collect();
        Self { columns, rows }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Writes CSV with 9 significant digits, LF line endings. `keep` selects
    /// a subset of columns; `t_s` is always first.
    pub fn write_csv<W: Write>(&self, out: W, keep: Option<&[String]>) -> Result<(), ScenarioError> {
        let idx: Vec<usize> = match keep {
            None => (0..self.columns.len()).collect(),
            Some(k) => {
                std::iter::once(0).chain((1..self.columns.len()).filter(|&i| k.contains(&self.columns[i]))).collect()
            }
        };
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let csv_err = |e: csv::Error| ScenarioError::Io { path: "<csv>".into(), message: e.to_string() };
        w.write_record(idx.iter().map(|&i| self.columns[i].as_str())).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(idx.iter().map(|&i| format!("{:.8e}", row[i]))).map_err(csv_err)?;
        }
        w.flush().map_err(|e| ScenarioError::Io { path: "<csv>".into(), message: e.to_string() })
    }
}

/// Parses a CSV written by [`Telemetry::write_csv`].
pub fn read_csv(text: &str) -> Result<Telemetry, ScenarioError> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let bad = |m: String| ScenarioError::Invalid { field: "csv".into(), reason: m };
    let columns: Vec<String> = r.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        rows.push(rec.iter().map(|s| s.parse::<f64>().map_err(|e| bad(e.to_string()))).collect::<Result<_, _>>()?);
    }
    Ok(Telemetry { columns, rows })
}
